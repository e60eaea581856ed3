#include "tdo/trap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tdo/errors.hpp"
#include "tdo/tdd.hpp"

namespace tdo {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double TrapCell::upper(double t) const {
    const double rising = d_start + max_ascent * (t - t_start);
    const double falling = d_end + max_descent * (t_end - t);
    return std::min(rising, falling);
}

double TrapCell::lower(double t) const {
    const double rising = d_end - max_ascent * (t_end - t);
    const double falling = d_start - max_descent * (t - t_start);
    return std::max(rising, falling);
}

TrapCell build_cell(double d_start, double d_end, double t_start, double t_end, double max_descent,
                    double max_ascent) {
    if (!(t_start < t_end)) throw InvariantError("trap cell: empty interval");
    if (max_descent < 0.0 || max_descent >= 1.0)
        throw InvariantError("trap cell: max_descent must be in [0,1)");
    if (max_ascent < 0.0) throw InvariantError("trap cell: max_ascent must be >= 0");
    if (!(d_start > 0.0) || !(d_end > 0.0)) throw InvariantError("trap cell: samples must be positive");

    TrapCell c;
    c.t_start = t_start;
    c.t_end = t_end;
    c.d_start = d_start;
    c.d_end = d_end;
    c.max_descent = max_descent;
    c.max_ascent = max_ascent;

    const double span = max_descent + max_ascent;
    const double len = t_end - t_start;
    if (span == 0.0) {
        const double scale = std::max(d_start, d_end);
        if (std::fabs(d_start - d_end) > 1e-9 * scale)
            throw InvariantError("trap cell: zero slope bounds but samples differ (inconsistent slope)");
        c.upper_kink_inside = false;
        c.lower_kink_inside = false;
        c.max_additive_error = 0.0;
        return c;
    }

    c.upper_kink_t = (d_end - d_start) / span + (max_descent * t_end + max_ascent * t_start) / span;
    c.upper_kink_v = (max_ascent * d_end + max_descent * d_start) / span + max_descent * max_ascent * len / span;
    c.lower_kink_t = (d_start - d_end) / span + (max_descent * t_start + max_ascent * t_end) / span;
    c.lower_kink_v = (max_ascent * d_start + max_descent * d_end) / span - max_descent * max_ascent * len / span;

    const double eps_t = 1e-12 * std::max(1.0, t_end);
    c.upper_kink_inside = (c.upper_kink_t > t_start + eps_t && c.upper_kink_t < t_end - eps_t);
    c.lower_kink_inside = (c.lower_kink_t > t_start + eps_t && c.lower_kink_t < t_end - eps_t);

    // upper - lower is concave, so its maximum sits at a kink or an endpoint.
    double mae = 0.0;
    auto consider = [&](double t) { mae = std::max(mae, c.upper(t) - c.lower(t)); };
    consider(t_start);
    consider(t_end);
    if (c.upper_kink_inside) consider(c.upper_kink_t);
    if (c.lower_kink_inside) consider(c.lower_kink_t);
    c.max_additive_error = mae;
    return c;
}

double sufficient_cell_width(double free_flow_dist, double eps, double max_ascent) {
    if (!(eps > 0.0)) throw UsageError("sufficient_cell_width: eps must be > 0");
    if (max_ascent == 0.0) return kInf;
    return free_flow_dist / ((1.0 + 1.0 / eps) * max_ascent);
}

std::vector<int> faraway_set(const TdInstance& inst, int l, double tau, double eps,
                             const MetricProfile& profile) {
    if (!(tau > 0.0)) throw UsageError("faraway_set: tau must be > 0");
    const BallResult ff = static_ball(inst, l, CostMetric::free_flow);
    std::vector<int> out;
    for (const auto& s : ff.order) {
        if (s.vertex == l) continue;
        if (sufficient_cell_width(s.dist, eps, profile.max_ascent) > tau) out.push_back(s.vertex);
    }
    std::sort(out.begin(), out.end());
    return out;
}

TrapBuild build_summaries(const TdInstance& inst, int l, const std::vector<int>& destinations,
                          double eps, const MetricProfile& profile, const TrapOptions& opts) {
    TrapBuild out;
    if (destinations.empty()) return out;
    if (!(eps > 0.0)) throw UsageError("trap: eps must be > 0");
    const double T = inst.period();

    double width;
    if (opts.forced_width) {
        width = *opts.forced_width;
    } else {
        const BallResult ff = static_ball(inst, l, CostMetric::free_flow);
        width = kInf;
        for (int v : destinations) {
            if (!ff.settled(v))
                throw InvariantError("trap: destination " + std::to_string(v) + " unreachable from " +
                                     std::to_string(l));
            width = std::min(width, sufficient_cell_width(ff.dist(v), eps, profile.max_ascent));
        }
    }

    long cells;
    if (!std::isfinite(width) || width >= T) {
        width = T;
        cells = 1;
    } else {
        cells = static_cast<long>(std::ceil(T / width));
        while (static_cast<double>(cells - 1) * width >= T) --cells; // guard fp ceil
    }
    const long cap = opts.cell_cap > 0 ? opts.cell_cap : static_cast<long>(std::ceil(10.0 * T));
    if (cells > cap)
        throw InvariantError("trap: " + std::to_string(cells) + " cells exceed cap " + std::to_string(cap) +
                             "; use a larger tau or a smaller destination set");

    // Shared sample grid: one one-to-all call per grid time, stopping once all
    // destinations are settled. The final cell endpoint is t=0 by periodicity.
    const int n = inst.vertex_count();
    std::vector<char> await(static_cast<std::size_t>(n), 0);
    for (int v : destinations) await[static_cast<std::size_t>(v)] = 1;
    Stop stop;
    stop.await_set = &await;
    stop.await_count = static_cast<long>(destinations.size());

    TddEngine engine(inst);
    std::vector<std::vector<double>> sample(static_cast<std::size_t>(cells));
    for (long j = 0; j < cells; ++j) {
        const double t = static_cast<double>(j) * width;
        const BallResult ball = engine.run(l, t, CostMetric::time_dependent, stop);
        ++out.tdd_calls;
        auto& row = sample[static_cast<std::size_t>(j)];
        row.reserve(destinations.size());
        for (int v : destinations) {
            const double d = ball.dist(v);
            if (!std::isfinite(d))
                throw InvariantError("trap: destination " + std::to_string(v) + " unreachable at t=" +
                                     std::to_string(t));
            row.push_back(d);
        }
    }

    out.cells = cells;
    out.grid_width = width;
    for (std::size_t di = 0; di < destinations.size(); ++di) {
        std::vector<Breakpoint> pts;
        pts.reserve(static_cast<std::size_t>(2 * cells));
        for (long j = 0; j < cells; ++j) {
            const double t_s = static_cast<double>(j) * width;
            const double t_f = (j + 1 == cells) ? T : static_cast<double>(j + 1) * width;
            const double d_s = sample[static_cast<std::size_t>(j)][di];
            const double d_f = sample[static_cast<std::size_t>((j + 1) % cells)][di];
            const TrapCell cell =
                build_cell(d_s, d_f, t_s, t_f, profile.max_descent, profile.max_ascent);
            out.worst_mae_excess = std::max(
                out.worst_mae_excess, cell.max_additive_error - profile.max_ascent * (t_f - t_s));
            pts.push_back({t_s, cell.upper(t_s)});
            if (cell.upper_kink_inside) pts.push_back({cell.upper_kink_t, cell.upper_kink_v});
        }
        PwlFunction summary = PwlFunction(std::move(pts), T).compressed();
        out.max_breakpoints = std::max(out.max_breakpoints, static_cast<long>(summary.size()));
        out.summaries.emplace(destinations[di], std::move(summary));
    }
    return out;
}

} // namespace tdo
