#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vemcdr {

// Base for every error raised by the library. The CLI maps the derived
// categories onto exit codes (usage -> 1, numerical -> 2).
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public Error
{
public:
    using Error::Error;
};

class UsageError : public Error
{
public:
    using Error::Error;
};

class ParseError : public Error
{
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class GeometryError : public Error
{
public:
    using Error::Error;
};

// Numerical failures: a singular local projector system, a singular global
// matrix, or an iterative solver that hit its cap.
class NumericalError : public Error
{
public:
    using Error::Error;
};

class ProjectorError : public NumericalError
{
public:
    ProjectorError(const std::string& what, std::size_t cell)
        : NumericalError("cell " + std::to_string(cell) + ": " + what), cell_(cell)
    {}

    std::size_t cell() const noexcept { return cell_; }

private:
    std::size_t cell_;
};

class SolverError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

class NonConvergenceError : public SolverError
{
public:
    NonConvergenceError(const std::string& what, double best_residual, int iterations)
        : SolverError(what), best_residual_(best_residual), iterations_(iterations)
    {}

    double best_residual() const noexcept { return best_residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double best_residual_;
    int iterations_;
};

} // namespace vemcdr
