#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ptorus {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A sample or enumeration budget would be exceeded.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// Evaluation requested at a point of the discontinuity set without a side.
class AmbiguousSide : public Error {
public:
    using Error::Error;
};

class SingularDerivative : public Error {
public:
    using Error::Error;
};

/// Root finding on a nonlinear branch did not converge.
class PreimageFailure : public Error {
public:
    PreimageFailure(int branch, const std::string& what)
        : Error("preimage failure on branch " + std::to_string(branch) + ": " + what), branch_(branch) {}
    [[nodiscard]] int branch() const noexcept { return branch_; }

private:
    int branch_;
};

/// Transported normal became parallel to the curve it is attached to.
class ParallelNormal : public Error {
public:
    ParallelNormal(int k, std::size_t sample)
        : Error("transported normal parallel to curve at k=" + std::to_string(k) + ", sample " +
                std::to_string(sample)),
          k_(k), sample_(sample) {}
    [[nodiscard]] int k() const noexcept { return k_; }
    [[nodiscard]] std::size_t sample() const noexcept { return sample_; }

private:
    int k_;
    std::size_t sample_;
};

/// Candidate weights alpha disagree where a curve image overlaps itself.
class A1Violation : public Error {
public:
    A1Violation(int k, std::size_t sample, double spread)
        : Error("alpha disagreement at k=" + std::to_string(k) + ", sample " + std::to_string(sample) +
                ", spread " + std::to_string(spread)),
          k_(k), sample_(sample), spread_(spread) {}
    [[nodiscard]] int k() const noexcept { return k_; }
    [[nodiscard]] std::size_t sample() const noexcept { return sample_; }
    [[nodiscard]] double spread() const noexcept { return spread_; }

private:
    int k_;
    std::size_t sample_;
    double spread_;
};

/// Jump probe ladder could not be kept away from other discontinuity curves.
class ProbeRejected : public Error {
public:
    using Error::Error;
};

class ConvergenceFailure : public Error {
public:
    using Error::Error;
};

/// Malformed run configuration; line is 0 when the problem is not tied to a line.
class ConfigError : public Error {
public:
    ConfigError(int line, const std::string& what)
        : Error(line > 0 ? "config line " + std::to_string(line) + ": " + what : "config: " + what), line_(line) {}
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace ptorus
