#pragma once

#include <map>
#include <vector>

#include "tdo/instance.hpp"
#include "tdo/trap.hpp"

namespace tdo {

struct BisOptions {
    int depth_cap = 40;      // smallest interval is period * 2^-depth_cap
    bool keep_leaves = false; // record leaf intervals for audits
};

struct BisBuild {
    std::map<int, PwlFunction> summaries;
    long tdd_calls = 0; // distinct sample times; shared across all destinations
    long leaf_count = 0;
    int max_depth = 0;
    // destinations still failing the certificate at the depth cap, with the
    // (1+eps') they actually achieved
    std::map<int, double> unresolved;
    std::vector<std::pair<double, double>> leaves; // when keep_leaves
};

/// Leaf certificate used by the bisection: the envelope ratio
/// upper/lower <= 1+eps at both interval endpoints and both intersection
/// points. Sufficient for (1+eps) pointwise since lower <= D <= upper.
bool bis_leaf_ok(const TrapCell& cell, double eps, double* worst_ratio = nullptr);

/// Summary construction for nearby destinations: bisects the shared
/// departure-time axis until every destination passes the leaf certificate,
/// sampling one-to-all travel times at the interval endpoints (cached across
/// the whole tree). Output meets the same sandwich contract as TRAP.
BisBuild bis_build(const TdInstance& inst, int l, const std::vector<int>& destinations, double eps,
                   const MetricProfile& profile, const BisOptions& opts = {});

} // namespace tdo
