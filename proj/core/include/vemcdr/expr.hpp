#pragma once

#include "vemcdr/error.hpp"

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace vemcdr::expr {

/// Syntax error with the byte offset where parsing stopped.
class SyntaxError : public ParseError
{
public:
    SyntaxError(const std::string& what, std::size_t offset)
        : ParseError("offset " + std::to_string(offset) + ": " + what, 1), offset_(offset)
    {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Domain error (log of a non-positive number, division by zero, ...) raised
/// during evaluation, carrying the offending node's byte offset.
class EvalError : public Error
{
public:
    EvalError(const std::string& what, std::size_t offset)
        : Error("offset " + std::to_string(offset) + ": " + what), offset_(offset)
    {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

enum class NodeKind { number, variable, constant, negate, binary, call };

struct Node
{
    NodeKind kind = NodeKind::number;
    double value = 0.0;           // number literal or constant value
    std::string name;             // variable, constant or function name
    char op = 0;                  // + - * / ^ for binary
    std::vector<Node> children;
    std::size_t offset = 0;       // byte offset in the source text
};

/// Parsed expression in x and y. Immutable; evaluation is re-entrant.
class Expression
{
public:
    Expression() = default;

    static Expression parse(std::string_view text);
    static Expression constant(double value);

    double operator()(double x, double y) const;
    const Node& root() const noexcept { return *root_; }
    const std::string& source() const noexcept { return source_; }

    /// Fully parenthesised text that parses back to the same tree.
    std::string to_string() const;

private:
    std::shared_ptr<const Node> root_;
    std::string source_;
};

double eval(const Node& node, double x, double y);
std::string print(const Node& node);
bool structurally_equal(const Node& a, const Node& b);

} // namespace vemcdr::expr
