#pragma once

#include <stdexcept>
#include <string>

namespace feller {

/// Parameter outside its declared range.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluation requested on the singular locus of a field (or outside its time window).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Iterative method failed to reach its tolerance; carries the last residual.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidArgument(msg);
}

}  // namespace feller
