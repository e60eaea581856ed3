#pragma once

#include <vector>

#include "tdo/flat.hpp"

namespace tdo {

struct LevelTable {
    std::vector<LevelParams> levels; // 1..k then the ultimate level k+1
    double nearby_exponent = 0.0;    // chi
    std::vector<std::string> warnings;
};

/// Level parameter table: N_i = n^((g^i-1)/g^i), rho_i = N_i^(-delta/(r+1)),
/// c_i = N_i * n^xi_i, F_i = c_i^chi with chi = (1+alpha)/(2+alpha*nu); the
/// ultimate level has N = c = n. Levels whose coverage would reach the whole
/// graph collapse into the ultimate level (warning). When a profile is given,
/// each xi_i is checked against its admissible window: the structural upper
/// bound errors, the estimated lower bound only warns unless `strict`.
LevelTable derive_levels(long n, double gamma, int k, double delta, int r,
                         const std::vector<double>& coverage_slack, double alpha, double nu,
                         const MetricProfile* profile = nullptr, bool strict = false);

OracleStore preprocess_horn(const TdInstance& inst, const TuningParams& params,
                            const MetricProfile& profile, std::uint64_t seed, int workers = 1,
                            BuildReport* report = nullptr);

/// Constant-time membership test: does this landmark hold a summary for d?
bool is_informed(const OracleStore& store, int landmark_vertex, int dest);

} // namespace tdo
