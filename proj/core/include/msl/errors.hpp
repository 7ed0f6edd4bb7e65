#pragma once

#include <stdexcept>
#include <string>

namespace msl {

/// A point or range argument lies outside the interval it must belong to.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A structural invariant of a value type was violated on construction.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// An operation was called outside its documented precondition.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// The solvability condition (theta_r != 0, theta_{1-r} != 0, alpha strictly
/// increasing) fails. Carries the offending position when there is one.
class HypothesisError : public std::runtime_error {
public:
    HypothesisError(const std::string& what, double position)
        : std::runtime_error(what), position_(position) {}
    explicit HypothesisError(const std::string& what)
        : std::runtime_error(what), position_(0.0), has_position_(false) {}

    double position() const noexcept { return position_; }
    bool has_position() const noexcept { return has_position_; }

private:
    double position_;
    bool has_position_ = true;
};

}  // namespace msl
