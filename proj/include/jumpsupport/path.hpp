#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "jumpsupport/types.hpp"

namespace jumpsupport {

struct PathJump {
    double time = 0.0;
    Vector pre;
    Vector post;
};

/// Right-continuous path on a strictly increasing grid. Between grid points the
/// path is linear; at a recorded jump time the left limit is the jump's pre-value.
class CadlagPath {
public:
    CadlagPath() = default;
    CadlagPath(std::vector<double> times, std::vector<Vector> values, std::vector<PathJump> jumps = {});

    /// Single-point path (S = Q).
    static CadlagPath constant(double t, const Vector& x);

    const std::vector<double>& times() const { return times_; }
    const std::vector<Vector>& values() const { return values_; }
    const std::vector<PathJump>& jumps() const { return jumps_; }
    int dim() const { return values_.empty() ? 0 : static_cast<int>(values_.front().size()); }
    std::size_t size() const { return times_.size(); }
    double start() const { return times_.front(); }
    double horizon() const { return times_.back(); }
    const Vector& terminal() const { return values_.back(); }

    /// Value at t (right-continuous); t is clamped to the grid range.
    Vector at(double t) const;
    /// Left limit at t.
    Vector left_limit(double t) const;
    /// Left limit at grid index i (pre-value when a jump sits on t_i).
    const Vector& left_value(std::size_t i) const;
    bool is_jump_index(std::size_t i) const;

    void write_csv(std::ostream& os) const;
    void write_csv(const std::string& file) const;

private:
    void validate();
    std::size_t segment(double t) const;

    std::vector<double> times_;
    std::vector<Vector> values_;
    std::vector<PathJump> jumps_;
    // index of the grid point carrying each jump, parallel to jumps_
    std::vector<std::size_t> jump_index_;
};

/// `%.17g` rendering shared by every CSV writer.
std::string format_double(double x);

}  // namespace jumpsupport
