#pragma once

#include <map>
#include <optional>
#include <vector>

#include "tdo/instance.hpp"
#include "tdo/tuning.hpp"

namespace tdo {

/// One departure-time cell of the trapezoidal approximation. The upper
/// envelope is the lower hull of the two lines through the endpoint samples
/// with extreme admissible slopes; the lower envelope is the mirror image.
struct TrapCell {
    double t_start = 0.0, t_end = 0.0;
    double d_start = 0.0, d_end = 0.0; // samples at the endpoints
    double max_descent = 0.0, max_ascent = 0.0;

    double upper_kink_t = 0.0, upper_kink_v = 0.0;
    double lower_kink_t = 0.0, lower_kink_v = 0.0;
    bool upper_kink_inside = false;
    bool lower_kink_inside = false;
    double max_additive_error = 0.0;

    double upper(double t) const;
    double lower(double t) const;
};

/// Builds the per-cell envelopes and their intersection points.
/// With both slope bounds zero the samples must agree; the cell is constant.
TrapCell build_cell(double d_start, double d_end, double t_start, double t_end, double max_descent,
                    double max_ascent);

/// Cell width that makes the upper envelope a (1+eps)-upper-approximation for
/// a destination at the given free-flow distance. +inf when max_ascent == 0.
double sufficient_cell_width(double free_flow_dist, double eps, double max_ascent);

/// Destinations whose sufficient cell width exceeds tau (one free-flow
/// Dijkstra); excludes the landmark itself and unreachable vertices.
std::vector<int> faraway_set(const TdInstance& inst, int l, double tau, double eps,
                             const MetricProfile& profile);

struct TrapOptions {
    std::optional<double> forced_width; // grid width override (oracle builders)
    long cell_cap = 0;                  // 0 -> ceil(10 * period)
};

struct TrapBuild {
    std::map<int, PwlFunction> summaries;
    long tdd_calls = 0;
    long cells = 0;
    double grid_width = 0.0;
    double worst_mae_excess = 0.0; // max over cells of MAE - max_ascent * cell length
    long max_breakpoints = 0;      // largest summary emitted
};

/// Samples the one-to-all travel times on a shared departure-time grid and
/// concatenates the per-cell upper envelopes into one summary per
/// destination. The final grid endpoint wraps onto the t=0 sample, so the
/// number of one-to-all calls equals the number of cells.
TrapBuild build_summaries(const TdInstance& inst, int l, const std::vector<int>& destinations,
                          double eps, const MetricProfile& profile, const TrapOptions& opts = {});

} // namespace tdo
