#include "jumpsupport/time_change.hpp"

#include <algorithm>
#include <cmath>

#include "jumpsupport/errors.hpp"

namespace jumpsupport {

TimeChange::TimeChange(const std::vector<double>& times_t, const std::vector<double>& times_s, double T) {
    if (!(T > 0.0)) throw PreconditionError("time change: T must be positive");
    if (times_t.size() != times_s.size()) throw PreconditionError("time change: anchor lists differ in length");
    knots_t_.reserve(times_t.size() + 2);
    knots_s_.reserve(times_t.size() + 2);
    knots_t_.push_back(0.0);
    knots_s_.push_back(0.0);
    for (std::size_t j = 0; j < times_t.size(); ++j) {
        if (!(times_t[j] > 0.0 && times_t[j] < T)) throw PreconditionError("time change: anchors must lie in (0, T)");
        if (!(times_s[j] > 0.0 && times_s[j] < T))
            throw PreconditionError("time change: anchor images must lie in (0, T)");
        if (!(times_t[j] > knots_t_.back())) throw PreconditionError("time change: anchors must increase");
        if (!(times_s[j] > knots_s_.back())) throw PreconditionError("time change: non-monotone anchor images");
        knots_t_.push_back(times_t[j]);
        knots_s_.push_back(times_s[j]);
    }
    knots_t_.push_back(T);
    knots_s_.push_back(T);
    for (std::size_t j = 1; j < knots_t_.size(); ++j) {
        const double slope = (knots_s_[j] - knots_s_[j - 1]) / (knots_t_[j] - knots_t_[j - 1]);
        max_log_slope_ = std::max(max_log_slope_, std::abs(std::log(slope)));
    }
}

double TimeChange::eval(const std::vector<double>& from, const std::vector<double>& to, double x) {
    if (x <= from.front()) return to.front();
    if (x >= from.back()) return to.back();
    auto it = std::upper_bound(from.begin(), from.end(), x);
    const auto j = static_cast<std::size_t>(it - from.begin());
    const double w = (x - from[j - 1]) / (from[j] - from[j - 1]);
    return to[j - 1] + w * (to[j] - to[j - 1]);
}

}  // namespace jumpsupport
