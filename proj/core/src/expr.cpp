#include "vemcdr/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <iomanip>

namespace vemcdr::expr {

namespace {

// Grammar (lowest to highest precedence):
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?        right-associative
//   primary := number | name | name '(' args ')' | '(' sum ')'
class Parser
{
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Node parse()
    {
        Node n = sum();
        skip();
        if (pos_ != text_.size())
            throw SyntaxError(std::string("unexpected '") + text_[pos_] + "', expected operator or end of input",
                              pos_);
        return n;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    void skip()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Node binary(char op, Node lhs, Node rhs, std::size_t at)
    {
        Node n;
        n.kind = NodeKind::binary;
        n.op = op;
        n.offset = at;
        n.children.push_back(std::move(lhs));
        n.children.push_back(std::move(rhs));
        return n;
    }

    Node sum()
    {
        Node lhs = product();
        for (;;) {
            skip();
            const std::size_t at = pos_;
            if (accept('+'))
                lhs = binary('+', std::move(lhs), product(), at);
            else if (accept('-'))
                lhs = binary('-', std::move(lhs), product(), at);
            else
                return lhs;
        }
    }

    Node product()
    {
        Node lhs = unary();
        for (;;) {
            skip();
            const std::size_t at = pos_;
            if (accept('*'))
                lhs = binary('*', std::move(lhs), unary(), at);
            else if (accept('/'))
                lhs = binary('/', std::move(lhs), unary(), at);
            else
                return lhs;
        }
    }

    Node unary()
    {
        skip();
        const std::size_t at = pos_;
        if (accept('-')) {
            Node n;
            n.kind = NodeKind::negate;
            n.offset = at;
            n.children.push_back(unary());
            return n;
        }
        return power();
    }

    Node power()
    {
        Node base = primary();
        skip();
        const std::size_t at = pos_;
        if (accept('^'))
            return binary('^', std::move(base), unary(), at);
        return base;
    }

    static int arity(std::string_view fn)
    {
        static constexpr std::string_view unary_fns[] = {"sin", "cos", "tan", "exp", "log",
                                                         "sqrt", "tanh", "abs"};
        for (auto u : unary_fns)
            if (fn == u)
                return 1;
        if (fn == "min" || fn == "max")
            return 2;
        return -1;
    }

    Node primary()
    {
        skip();
        const std::size_t at = pos_;
        if (pos_ >= text_.size())
            throw SyntaxError("unexpected end of input, expected number, name or '('", pos_);
        const char ch = text_[pos_];

        if (ch == '(') {
            ++pos_;
            Node n = sum();
            if (!accept(')'))
                throw SyntaxError("expected ')'", pos_);
            return n;
        }

        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
            std::size_t end = pos_;
            while (end < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.'))
                ++end;
            if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
                std::size_t e = end + 1;
                if (e < text_.size() && (text_[e] == '+' || text_[e] == '-'))
                    ++e;
                if (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) {
                    while (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e])))
                        ++e;
                    end = e;
                }
            }
            const std::string lit(text_.substr(pos_, end - pos_));
            char* stop = nullptr;
            const double v = std::strtod(lit.c_str(), &stop);
            if (stop != lit.c_str() + lit.size())
                throw SyntaxError("malformed number '" + lit + "'", pos_);
            pos_ = end;
            Node n;
            n.kind = NodeKind::number;
            n.value = v;
            n.offset = at;
            return n;
        }

        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            std::size_t end = pos_;
            while (end < text_.size()
                   && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
                ++end;
            const std::string name(text_.substr(pos_, end - pos_));
            pos_ = end;
            Node n;
            n.offset = at;
            n.name = name;
            if (accept('(')) {
                const int ar = arity(name);
                if (ar < 0)
                    throw SyntaxError("unknown function '" + name + "'", at);
                n.kind = NodeKind::call;
                n.children.push_back(sum());
                for (int i = 1; i < ar; ++i) {
                    if (!accept(','))
                        throw SyntaxError("expected ',' in call to '" + name + "'", pos_);
                    n.children.push_back(sum());
                }
                if (!accept(')'))
                    throw SyntaxError("expected ')' after arguments of '" + name + "'", pos_);
                return n;
            }
            if (name == "x" || name == "y") {
                n.kind = NodeKind::variable;
                return n;
            }
            if (name == "pi" || name == "e") {
                n.kind = NodeKind::constant;
                n.value = name == "pi" ? std::numbers::pi : std::numbers::e;
                return n;
            }
            if (arity(name) > 0)
                throw SyntaxError("expected '(' after function '" + name + "'", pos_);
            throw SyntaxError("unknown name '" + name + "'", at);
        }

        throw SyntaxError(std::string("unexpected '") + ch + "', expected number, name or '('", pos_);
    }
};

double checked(double v, const Node& n, const char* what)
{
    if (!std::isfinite(v))
        throw EvalError(what, n.offset);
    return v;
}

} // namespace

double eval(const Node& n, double x, double y)
{
    switch (n.kind) {
    case NodeKind::number:
    case NodeKind::constant:
        return n.value;
    case NodeKind::variable:
        return n.name == "x" ? x : y;
    case NodeKind::negate:
        return -eval(n.children[0], x, y);
    case NodeKind::binary: {
        const double a = eval(n.children[0], x, y);
        const double b = eval(n.children[1], x, y);
        switch (n.op) {
        case '+': return checked(a + b, n, "overflow in '+'");
        case '-': return checked(a - b, n, "overflow in '-'");
        case '*': return checked(a * b, n, "overflow in '*'");
        case '/':
            if (b == 0.0)
                throw EvalError("division by zero", n.offset);
            return checked(a / b, n, "overflow in '/'");
        case '^':
            return checked(std::pow(a, b), n, "invalid or overflowing power");
        }
        break;
    }
    case NodeKind::call: {
        const double a = eval(n.children[0], x, y);
        const std::string& f = n.name;
        if (f == "sin") return std::sin(a);
        if (f == "cos") return std::cos(a);
        if (f == "tan") return checked(std::tan(a), n, "tan overflow");
        if (f == "exp") return checked(std::exp(a), n, "exp overflow");
        if (f == "log") {
            if (!(a > 0.0))
                throw EvalError("log of a non-positive number", n.offset);
            return std::log(a);
        }
        if (f == "sqrt") {
            if (a < 0.0)
                throw EvalError("sqrt of a negative number", n.offset);
            return std::sqrt(a);
        }
        if (f == "tanh") return std::tanh(a);
        if (f == "abs") return std::abs(a);
        const double b = eval(n.children[1], x, y);
        if (f == "min") return std::min(a, b);
        if (f == "max") return std::max(a, b);
        break;
    }
    }
    throw EvalError("malformed expression node", n.offset);
}

std::string print(const Node& n)
{
    switch (n.kind) {
    case NodeKind::number: {
        std::ostringstream s;
        s << std::setprecision(17) << n.value;
        return s.str();
    }
    case NodeKind::variable:
    case NodeKind::constant:
        return n.name;
    case NodeKind::negate:
        return "(-" + print(n.children[0]) + ")";
    case NodeKind::binary:
        return "(" + print(n.children[0]) + " " + n.op + " " + print(n.children[1]) + ")";
    case NodeKind::call: {
        std::string s = n.name + "(";
        for (std::size_t i = 0; i < n.children.size(); ++i)
            s += (i ? ", " : "") + print(n.children[i]);
        return s + ")";
    }
    }
    return "";
}

bool structurally_equal(const Node& a, const Node& b)
{
    if (a.kind != b.kind || a.op != b.op || a.name != b.name || a.children.size() != b.children.size())
        return false;
    if ((a.kind == NodeKind::number || a.kind == NodeKind::constant) && a.value != b.value)
        return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!structurally_equal(a.children[i], b.children[i]))
            return false;
    return true;
}

Expression Expression::parse(std::string_view text)
{
    Expression e;
    e.root_ = std::make_shared<const Node>(Parser(text).parse());
    e.source_ = std::string(text);
    return e;
}

Expression Expression::constant(double value)
{
    Expression e;
    Node n;
    n.kind = NodeKind::number;
    n.value = value;
    e.root_ = std::make_shared<const Node>(std::move(n));
    e.source_ = print(*e.root_);
    return e;
}

double Expression::operator()(double x, double y) const
{
    if (!root_)
        throw UsageError("evaluating an empty expression");
    return eval(*root_, x, y);
}

std::string Expression::to_string() const
{
    return root_ ? print(*root_) : std::string();
}

} // namespace vemcdr::expr
