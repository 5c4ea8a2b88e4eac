#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dpc {

/// Non-finite, out-of-range or otherwise unusable input.
class invalid_parameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A value object whose stated invariant does not hold (e.g. probabilities not summing to one).
class invariant_violation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Layer with a zero inner radius where a positive one is required.
class degenerate_layer : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class insufficient_samples : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bisection could not bracket the target within the allowed expansion.
class bracketing_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The closed-form optimal power expression has a non-positive base.
class infeasible_closed_form : public std::domain_error {
public:
    infeasible_closed_form(const std::string& what, double inner_sum)
        : std::domain_error(what), inner_sum_(inner_sum) {}

    double inner_sum() const noexcept { return inner_sum_; }
    bool degenerate() const noexcept { return inner_sum_ == 0.0; }

private:
    double inner_sum_;
};

/// Empty constraint set. The certificate holds nonnegative row weights whose
/// combination of the constraints yields a contradiction; certificate_value is
/// the strictly positive amount by which the combined inequality is violated
/// per unit of the decision variables' sum.
class infeasible_design : public std::domain_error {
public:
    infeasible_design(const std::string& what, std::vector<double> certificate, double certificate_value)
        : std::domain_error(what),
          certificate_(std::move(certificate)),
          certificate_value_(certificate_value) {}

    const std::vector<double>& certificate() const noexcept { return certificate_; }
    double certificate_value() const noexcept { return certificate_value_; }

private:
    std::vector<double> certificate_;
    double certificate_value_;
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw invalid_parameter(msg);
}

} // namespace detail
} // namespace dpc
