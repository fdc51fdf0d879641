#include "jumpsupport/path.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "jumpsupport/errors.hpp"

namespace jumpsupport {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CadlagPath::CadlagPath(std::vector<double> times, std::vector<Vector> values, std::vector<PathJump> jumps)
    : times_(std::move(times)), values_(std::move(values)), jumps_(std::move(jumps)) {
    validate();
}

CadlagPath CadlagPath::constant(double t, const Vector& x) { return CadlagPath({t}, {x}); }

void CadlagPath::validate() {
    if (times_.empty() || times_.size() != values_.size())
        throw PreconditionError("CadlagPath: need matching, non-empty times and values");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1])) throw PreconditionError("CadlagPath: grid must be strictly increasing");
    const auto m = values_.front().size();
    for (const auto& v : values_) {
        if (v.size() != m) throw PreconditionError("CadlagPath: inconsistent value dimension");
        if (!v.allFinite()) throw NumericalError("CadlagPath: non-finite value");
    }
    auto& idx = jump_index_;
    idx.clear();
    for (const auto& j : jumps_) {
        auto it = std::lower_bound(times_.begin(), times_.end(), j.time);
        if (it == times_.end() || *it != j.time) throw PreconditionError("CadlagPath: jump time off grid");
        const auto i = static_cast<std::size_t>(it - times_.begin());
        if (j.pre.size() != m || j.post.size() != m) throw PreconditionError("CadlagPath: jump dimension");
        if (j.post != values_[i]) throw PreconditionError("CadlagPath: jump post-value disagrees with grid");
        if (!idx.empty() && idx.back() >= i) throw PreconditionError("CadlagPath: jumps must be time-ordered");
        idx.push_back(i);
    }
}

bool CadlagPath::is_jump_index(std::size_t i) const {
    return std::binary_search(jump_index_.begin(), jump_index_.end(), i);
}

const Vector& CadlagPath::left_value(std::size_t i) const {
    auto it = std::lower_bound(jump_index_.begin(), jump_index_.end(), i);
    if (it != jump_index_.end() && *it == i) return jumps_[static_cast<std::size_t>(it - jump_index_.begin())].pre;
    return values_[i];
}

std::size_t CadlagPath::segment(double t) const {
    // largest i with t_i <= t
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return 0;
    return static_cast<std::size_t>(it - times_.begin()) - 1;
}

Vector CadlagPath::at(double t) const {
    if (t <= times_.front()) return values_.front();
    if (t >= times_.back()) return values_.back();
    const auto i = segment(t);
    if (times_[i] == t) return values_[i];
    const double w = (t - times_[i]) / (times_[i + 1] - times_[i]);
    return (1.0 - w) * values_[i] + w * left_value(i + 1);
}

Vector CadlagPath::left_limit(double t) const {
    if (t <= times_.front()) return values_.front();
    if (t > times_.back()) return values_.back();
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    const auto k = static_cast<std::size_t>(it - times_.begin());
    if (*it == t) return left_value(k);
    return at(t);
}

void CadlagPath::write_csv(std::ostream& os) const {
    os << "t";
    for (int k = 1; k <= dim(); ++k) os << ",x_" << k;
    os << ",is_jump\n";
    for (std::size_t i = 0; i < times_.size(); ++i) {
        os << format_double(times_[i]);
        for (int k = 0; k < dim(); ++k) os << ',' << format_double(values_[i][k]);
        os << ',' << (is_jump_index(i) ? 1 : 0) << '\n';
    }
}

void CadlagPath::write_csv(const std::string& file) const {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + file + " for writing");
    write_csv(os);
}

}  // namespace jumpsupport
