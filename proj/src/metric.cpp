#include "jumpsupport/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jumpsupport/errors.hpp"

namespace jumpsupport::metric {

namespace {

void check_pair(const CadlagPath& p, const CadlagPath& q) {
    if (p.dim() != q.dim()) throw PreconditionError("path distance: dimension mismatch");
    const double tol = 1e-12 * std::max(1.0, std::abs(p.horizon()));
    if (std::abs(p.start() - q.start()) > tol || std::abs(p.horizon() - q.horizon()) > tol)
        throw PreconditionError("path distance: horizon mismatch");
}

std::vector<double> jump_times(const CadlagPath& p) {
    std::vector<double> t;
    for (const auto& j : p.jumps())
        if (j.pre != j.post && j.time > 0.0 && j.time < p.horizon()) t.push_back(j.time);
    return t;
}

/// Sweep over grid points of q and λ⁻¹(grid of p); both paths are affine in t
/// between consecutive points, so one-sided values there give the sup.
double sup_after_change(const CadlagPath& p, const CadlagPath& q, const TimeChange* lambda, double stop_above) {
    std::vector<double> pts = q.times();
    pts.reserve(pts.size() + p.size() + 4);
    for (double s : p.times()) pts.push_back(lambda ? lambda->inverse(s) : s);
    if (lambda)
        for (double t : lambda->knots_t()) pts.push_back(t);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double worst = 0.0;
    for (double t : pts) {
        const double s = lambda ? (*lambda)(t) : t;
        worst = std::max(worst, (p.at(s) - q.at(t)).norm());
        worst = std::max(worst, (p.left_limit(s) - q.left_limit(t)).norm());
        if (worst > stop_above) return worst;
    }
    return worst;
}

}  // namespace

double uniform_distance(const CadlagPath& p, const CadlagPath& q) {
    check_pair(p, q);
    return sup_after_change(p, q, nullptr, std::numeric_limits<double>::infinity());
}

CompositeTerms composite_distance(const CadlagPath& p, const CadlagPath& q, const TimeChange& lambda) {
    check_pair(p, q);
    CompositeTerms c;
    c.slope = lambda.max_log_slope();
    c.sup = sup_after_change(p, q, &lambda, std::numeric_limits<double>::infinity());
    return c;
}

PathDistanceReport skorokhod_distance_upper(const CadlagPath& p, const CadlagPath& q, const SkorokhodOptions& opts) {
    check_pair(p, q);
    PathDistanceReport rep;
    rep.uniform = uniform_distance(p, q);
    if (q.start() != 0.0) throw PreconditionError("skorokhod bound: paths must start at t = 0");
    const double T = q.horizon();

    double best = std::numeric_limits<double>::infinity();
    auto offer = [&](const std::vector<std::pair<double, double>>& anchors) {
        ++rep.candidates;
        double slope = 0.0;
        double sup = rep.uniform;
        if (!anchors.empty()) {
            std::vector<double> ts;
            std::vector<double> ss;
            for (const auto& [t, s] : anchors) {
                ts.push_back(t);
                ss.push_back(s);
            }
            const TimeChange lambda(ts, ss, T);
            slope = lambda.max_log_slope();
            if (slope >= best) return;
            sup = sup_after_change(p, q, &lambda, best - slope);
        }
        const double total = slope + sup;
        if (total < best) {
            best = total;
            rep.skorokhod_upper = total;
            rep.anchors = anchors;
            rep.slope_term = slope;
            rep.sup_term = sup;
        }
    };

    if (opts.include_identity) offer({});
    const auto a = jump_times(p);  // p-time
    const auto b = jump_times(q);  // q-time
    if (!a.empty() && !b.empty()) {
        if (a.size() <= opts.exhaustive_limit && b.size() <= opts.exhaustive_limit) {
            std::vector<std::pair<double, double>> cur;
            // every order-preserving partial matching between q's and p's jumps
            auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> void {
                if (!cur.empty()) offer(cur);
                for (std::size_t jj = j; jj < b.size(); ++jj)
                    for (std::size_t ii = i; ii < a.size(); ++ii) {
                        cur.emplace_back(b[jj], a[ii]);
                        self(self, ii + 1, jj + 1);
                        cur.pop_back();
                    }
            };
            rec(rec, 0, 0);
        } else {
            std::vector<std::pair<double, double>> cur;
            std::size_t i = 0;
            for (double t : b) {
                if (i >= a.size()) break;
                // nearest remaining p-jump, keeping the matching order-preserving
                std::size_t k = i;
                for (std::size_t c = i; c < a.size(); ++c)
                    if (std::abs(a[c] - t) < std::abs(a[k] - t)) k = c;
                cur.emplace_back(t, a[k]);
                i = k + 1;
            }
            offer(cur);
        }
    }
    if (!opts.include_identity && rep.candidates == 0) offer({});
    return rep;
}

}  // namespace jumpsupport::metric
