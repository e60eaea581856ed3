#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdo/instance.hpp"

namespace tdo {

/// Measured constants of one instance. Slope bounds and the opposite-trip
/// ratio are empirical estimates from sampled pairs; the optional safety
/// factor widens them before they feed envelope construction. The estimator
/// keeps max_ascent >= max_descent (widening a declared bound is always
/// sound, and the per-cell error bound is stated against the ascent).
struct MetricProfile {
    double max_descent = 0.0;    // travel-time slopes >= -max_descent, in [0,1)
    double max_ascent = 0.0;     // travel-time slopes <= max_ascent
    double opposite_ratio = 1.0; // D[o,d](t) <= ratio * D[d,o](t) on samples
    double expansion_factor = 1.0; // |expanded ball| / |ball| seen on samples
    double rank_exponent = 1.0;    // rank <= rank_factor * dist^exponent
    double rank_factor = 1.0;
    double distance_factor = 1.0;  // dist <= distance_factor * rank^(1/exponent)
    double diam_exponent = 1.0;    // period = diameter^(1/diam_exponent)
    double free_flow_diameter = 0.0;
    double max_arc_cost = 0.0;
    long breakpoint_total = 0;
    long breakpoint_max = 0;
    long spoiling_total = 0;

    // estimation metadata
    int sample_pairs = 0;
    int sample_times = 0;
    std::uint64_t seed = 0;
    double slope_safety = 1.0;
};

struct ProfileOptions {
    int origins = 24;        // sampled origins; pairs are ordered pairs among them
    int time_grid = 64;      // departure times per origin
    std::uint64_t seed = 1;
    double slope_safety = 1.0;   // multiplies measured slope bounds
    double ratio_safety = 1.0;   // multiplies the measured opposite ratio
    std::vector<long> expansion_sizes = {8, 16, 32};
};

MetricProfile estimate_profile(const TdInstance& inst, const ProfileOptions& opts = {});

/// Oracle parameters, either hand-set or derived by the tuners below.
struct TuningParams {
    double eps = 0.5;
    double period_exponent = 0.5;   // T = n^alpha
    double landmark_exponent = 0.0; // sampling probability n^-omega
    double radius_exponent = 0.0;   // nearby radius T^theta
    double diam_exponent = 1.0;     // nu, copied from the profile
    double query_exponent = 0.66;   // delta
    double preproc_exponent = 0.1;  // beta
    int recursion_budget = 0;       // r
    // hierarchy only
    double level_growth = 2.0;          // gamma
    int levels = 0;                     // k
    std::vector<double> coverage_slack; // xi_i, one per level 1..k
    double nearby_exponent = 0.0;       // chi
    double esc_factor = 0.0;            // phi, early-stopping factor
    std::vector<std::string> warnings;
};

/// FLAT tuner: theta = (1+alpha)/(2/nu+alpha), omega = delta/(r+1),
/// r = floor[(delta/alpha)(2/nu+alpha) / ((beta/alpha)(2/nu+alpha) + 2/nu-1)] - 1.
TuningParams tune_flat(double n, double alpha, double nu, double eps, double psi, double delta,
                       double beta);

/// TRAPONLY tuner: omega = delta/(r+1), theta = delta*nu/(r+1),
/// r = floor[delta(1+alpha*nu)/(alpha+beta)] - 1.
TuningParams tune_traponly(double n, double alpha, double nu, double eps, double psi, double delta,
                           double beta);

/// Smallest recursion budget whose stretch is at most 1 + k*eps.
int budget_for_stretch(int k, double eps, double psi);

/// HORN tuner; derives r from the level-1 constraint and picks each xi_i at
/// the midpoint of its admissible window.
TuningParams tune_horn(double n, double alpha, double nu, double eps, double gamma, int k,
                       double delta, double beta, const MetricProfile& profile);

/// Lower end of the admissible coverage-slack window (upper end is 1-gamma^-i).
double coverage_slack_lower_bound(double n, const MetricProfile& profile);

} // namespace tdo
