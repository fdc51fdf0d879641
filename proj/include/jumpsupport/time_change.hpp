#pragma once

#include <vector>

namespace jumpsupport {

/// Increasing piecewise-linear bijection of [0, T] through the anchors
/// λ(t_j) = s_j, with λ(0) = 0 and λ(T) = T.
class TimeChange {
public:
    TimeChange() = default;
    TimeChange(const std::vector<double>& times_t, const std::vector<double>& times_s, double T);
    static TimeChange identity(double T) { return TimeChange({}, {}, T); }

    double operator()(double t) const { return eval(knots_t_, knots_s_, t); }
    double inverse(double s) const { return eval(knots_s_, knots_t_, s); }
    /// sup over pieces of |log slope|.
    double max_log_slope() const { return max_log_slope_; }
    double horizon() const { return knots_t_.back(); }
    const std::vector<double>& knots_t() const { return knots_t_; }
    const std::vector<double>& knots_s() const { return knots_s_; }

private:
    static double eval(const std::vector<double>& from, const std::vector<double>& to, double x);

    std::vector<double> knots_t_;
    std::vector<double> knots_s_;
    double max_log_slope_ = 0.0;
};

}  // namespace jumpsupport
