#pragma once

#include <utility>
#include <vector>

#include "jumpsupport/path.hpp"
#include "jumpsupport/time_change.hpp"

namespace jumpsupport::metric {

/// sup_t |p(t) - q(t)| over the merged grid, both one-sided values.
double uniform_distance(const CadlagPath& p, const CadlagPath& q);

struct CompositeTerms {
    double slope = 0.0;  // sup |log slope of λ|
    double sup = 0.0;    // sup_t |p(λ(t)) - q(t)|
    double total() const { return slope + sup; }
};

/// The metric functional for one time change λ (mapping q-time to p-time).
CompositeTerms composite_distance(const CadlagPath& p, const CadlagPath& q, const TimeChange& lambda);

struct SkorokhodOptions {
    /// Enumerate every order-preserving matching when both paths have at most
    /// this many jumps; otherwise use greedy nearest matching.
    std::size_t exhaustive_limit = 8;
    bool include_identity = true;
};

struct PathDistanceReport {
    double uniform = 0.0;
    double skorokhod_upper = 0.0;
    /// Witness anchors (t in q-time, λ(t) in p-time); empty for the identity.
    std::vector<std::pair<double, double>> anchors;
    double slope_term = 0.0;
    double sup_term = 0.0;
    std::size_t candidates = 0;
};

PathDistanceReport skorokhod_distance_upper(const CadlagPath& p, const CadlagPath& q,
                                            const SkorokhodOptions& opts = {});

}  // namespace jumpsupport::metric
