#pragma once

#include <stdexcept>
#include <string>

namespace risklab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Act outside the domain of a utility (e.g. nonpositive consumption under log).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

/// Iterative solver hit its cap. Carries the best objective seen and a gap estimate.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double best_value, double gap)
        : Error(what), best_value_(best_value), gap_(gap) {}

    double best_value() const noexcept { return best_value_; }
    double gap() const noexcept { return gap_; }

private:
    double best_value_;
    double gap_;
};

/// A decision whose optimum landed inside the numerical tie band.
class BoundaryIndeterminate : public Error {
public:
    BoundaryIndeterminate(const std::string& what, double value)
        : Error("boundary-indeterminate: " + what), value_(value) {}

    double value() const noexcept { return value_; }

private:
    double value_;
};

/// Precondition of a theorem-level check does not hold.
class HypothesisViolated : public Error {
public:
    explicit HypothesisViolated(const std::string& what)
        : Error("hypothesis violated: " + what) {}
};

void require(bool condition, const std::string& message);

} // namespace risklab
