#include "tdo/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tdo/errors.hpp"
#include "tdo/parallel.hpp"
#include "tdo/query.hpp"
#include "tdo/rng.hpp"
#include "tdo/tdd.hpp"

namespace tdo {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// floor(expr) - 1 with the marginal case clamped to the always-legal r = 0
int derive_budget(double expr, TuningParams& params, const char* who) {
    const long raw = static_cast<long>(std::floor(expr + 1e-12)) - 1;
    if (raw >= 0) return static_cast<int>(raw);
    if (raw == -1) {
        params.warnings.push_back(std::string(who) +
                                  ": derived recursion budget was marginally negative; clamped to 0");
        return 0;
    }
    throw InvariantError(std::string(who) +
                         ": derived recursion budget is negative; use a larger delta or a smaller beta");
}

} // namespace

MetricProfile estimate_profile(const TdInstance& inst, const ProfileOptions& opts) {
    const int n = inst.vertex_count();
    if (n == 0) throw UsageError("estimate_profile: empty instance");
    if (opts.origins < 2 || opts.time_grid < 2) throw UsageError("estimate_profile: sample too small");

    MetricProfile prof;
    prof.max_arc_cost = inst.max_cost();
    prof.breakpoint_total = inst.breakpoint_total();
    prof.breakpoint_max = inst.breakpoint_max();
    prof.spoiling_total = inst.spoiling_total();
    prof.seed = opts.seed;
    prof.slope_safety = opts.slope_safety;
    prof.sample_times = opts.time_grid;

    // Sample origins; pairs are ordered pairs among them so both directions
    // of every pair are available for the opposite-trip ratio.
    Rng rng = Rng(opts.seed).fork(0x70726f66ULL);
    const int want = std::min(opts.origins, n);
    std::vector<int> origins;
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    while (static_cast<int>(origins.size()) < want) {
        const int v = static_cast<int>(rng.uniform_int(0, n - 1));
        if (!used[static_cast<std::size_t>(v)]) {
            used[static_cast<std::size_t>(v)] = 1;
            origins.push_back(v);
        }
    }
    std::sort(origins.begin(), origins.end());

    const double T = inst.period();
    const int grid = opts.time_grid;
    // dist[o_idx][time_idx][target_idx], rank likewise
    const std::size_t no = origins.size();
    std::vector<std::vector<std::vector<double>>> dist(
        no, std::vector<std::vector<double>>(static_cast<std::size_t>(grid),
                                             std::vector<double>(no, kInf)));
    std::vector<std::vector<std::vector<long>>> rank(
        no, std::vector<std::vector<long>>(static_cast<std::size_t>(grid),
                                           std::vector<long>(no, 0)));

    parallel_for(no, default_workers(), [&](std::size_t oi) {
        TddEngine engine(inst);
        for (int j = 0; j < grid; ++j) {
            const double t = T * static_cast<double>(j) / static_cast<double>(grid);
            const BallResult ball = engine.run(origins[oi], t, CostMetric::time_dependent, {});
            for (std::size_t di = 0; di < no; ++di) {
                dist[oi][static_cast<std::size_t>(j)][di] = ball.dist(origins[di]);
                rank[oi][static_cast<std::size_t>(j)][di] = ball.rank(origins[di]);
            }
        }
    });

    double ascent = 0.0, descent = 0.0, ratio = 1.0;
    long pair_count = 0;
    std::vector<std::pair<double, double>> rank_samples; // (dist, rank)
    for (std::size_t oi = 0; oi < no; ++oi) {
        for (std::size_t di = 0; di < no; ++di) {
            if (di == oi) continue;
            bool reachable = true;
            for (int j = 0; j < grid && reachable; ++j)
                if (!std::isfinite(dist[oi][static_cast<std::size_t>(j)][di])) reachable = false;
            if (!reachable) continue;
            ++pair_count;
            for (int j = 0; j < grid; ++j) {
                const double d0 = dist[oi][static_cast<std::size_t>(j)][di];
                const double d1 = dist[oi][static_cast<std::size_t>((j + 1) % grid)][di];
                const double dt = T / static_cast<double>(grid);
                const double slope = (d1 - d0) / dt;
                ascent = std::max(ascent, slope);
                descent = std::max(descent, -slope);
                const double back = dist[di][static_cast<std::size_t>(j)][oi];
                if (std::isfinite(back) && back > 0.0) ratio = std::max(ratio, d0 / back);
                rank_samples.push_back({d0, static_cast<double>(rank[oi][static_cast<std::size_t>(j)][di])});
            }
        }
    }
    if (pair_count == 0) throw InvariantError("estimate_profile: no reachable sample pairs");
    prof.sample_pairs = static_cast<int>(pair_count);

    prof.max_descent = std::min(0.999999, descent * opts.slope_safety);
    // ascent at least matches descent: the per-cell error bound of the
    // trapezoid construction is stated against the ascent bound
    prof.max_ascent = std::max(ascent * opts.slope_safety, prof.max_descent);
    prof.opposite_ratio = std::max(1.0, ratio * opts.ratio_safety);

    // rank exponent by least squares on log rank vs log distance, then the
    // factors as tight envelopes over the sample
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        long m = 0;
        for (const auto& [d, g] : rank_samples) {
            if (!(d > 0.0) || !(g > 0.0)) continue;
            const double x = std::log(d), y = std::log(g);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++m;
        }
        double lambda = 1.0;
        if (m >= 2) {
            const double var = sxx - sx * sx / static_cast<double>(m);
            if (var > 1e-9) lambda = (sxy - sx * sy / static_cast<double>(m)) / var;
        }
        prof.rank_exponent = std::max(1.0, lambda);
        double f = 1.0, g = 1.0;
        for (const auto& [d, r] : rank_samples) {
            if (!(d > 0.0) || !(r > 0.0)) continue;
            f = std::max(f, r / std::pow(d, prof.rank_exponent));
            g = std::max(g, d / std::pow(r, 1.0 / prof.rank_exponent));
        }
        prof.rank_factor = f;
        prof.distance_factor = g;
    }

    // ball expansion factor over a few origins and ball sizes
    {
        double expansion = 1.0;
        const std::size_t probe = std::min<std::size_t>(no, 8);
        for (std::size_t oi = 0; oi < probe; ++oi) {
            for (long F : opts.expansion_sizes) {
                if (F > n) continue;
                const ExpandedBall eb = expanded_ball(inst, origins[oi], F);
                if (!eb.ball.empty())
                    expansion = std::max(expansion, static_cast<double>(eb.expanded.size()) /
                                                        static_cast<double>(eb.ball.size()));
            }
        }
        prof.expansion_factor = expansion;
    }

    // double-sweep diameter estimate: eccentricity from a start vertex, then
    // from the farthest vertex found (a lower bound, usually tight on
    // road-like graphs; the normalizer uses the conservative upper bound)
    {
        TddEngine engine(inst);
        int start = origins[0];
        double best = 0.0;
        for (int sweep = 0; sweep < 3; ++sweep) {
            const BallResult ball = engine.run(start, 0.0, CostMetric::free_flow, {});
            if (ball.order.empty()) break;
            const auto& far = ball.order.back();
            if (far.dist <= best) break;
            best = far.dist;
            start = far.vertex;
        }
        prof.free_flow_diameter = best;
    }
    const double diam = std::max(prof.free_flow_diameter, 1.0 + 1e-9);
    const double logT = std::log(std::max(T, 1.0 + 1e-9));
    prof.diam_exponent = std::min(5.0, std::max(0.05, std::log(diam) / logT));
    return prof;
}

TuningParams tune_flat(double n, double alpha, double nu, double eps, double psi, double delta,
                       double beta) {
    if (!(delta > alpha && delta < 1.0))
        throw UsageError("tune_flat: delta must lie in (alpha, 1)");
    const double beta_cap = alpha * (1.0 + alpha) / (2.0 / nu + alpha);
    if (!(beta > 0.0) || beta > beta_cap + 1e-12)
        throw UsageError("tune_flat: beta must lie in (0, alpha(1+alpha)/(2/nu+alpha)]");
    (void)psi;

    TuningParams p;
    p.eps = eps;
    p.period_exponent = alpha;
    p.diam_exponent = nu;
    p.query_exponent = delta;
    p.preproc_exponent = beta;
    const double expr = (delta / alpha) * (2.0 / nu + alpha) /
                        ((beta / alpha) * (2.0 / nu + alpha) + (2.0 / nu - 1.0));
    p.recursion_budget = derive_budget(expr, p, "tune_flat");
    p.landmark_exponent = delta / static_cast<double>(p.recursion_budget + 1);
    p.radius_exponent = (1.0 + alpha) / (2.0 / nu + alpha);
    p.nearby_exponent = (1.0 + alpha) / (2.0 + alpha * nu);
    (void)n;
    return p;
}

TuningParams tune_traponly(double n, double alpha, double nu, double eps, double psi, double delta,
                           double beta) {
    if (!(delta > alpha && delta < 1.0))
        throw UsageError("tune_traponly: delta must lie in (alpha, 1)");
    if (!(beta > 0.0) || beta > alpha * alpha * nu + 1e-12)
        throw UsageError("tune_traponly: beta must lie in (0, alpha^2*nu]");
    (void)psi;

    TuningParams p;
    p.eps = eps;
    p.period_exponent = alpha;
    p.diam_exponent = nu;
    p.query_exponent = delta;
    p.preproc_exponent = beta;
    const double expr = delta * (1.0 + alpha * nu) / (alpha + beta);
    p.recursion_budget = derive_budget(expr, p, "tune_traponly");
    p.landmark_exponent = delta / static_cast<double>(p.recursion_budget + 1);
    p.radius_exponent = delta * nu / static_cast<double>(p.recursion_budget + 1);
    (void)n;
    return p;
}

int budget_for_stretch(int k, double eps, double psi) {
    if (k < 2) throw UsageError("budget_for_stretch: k must be >= 2");
    if (!(eps > 0.0) || !(psi > 0.0)) throw UsageError("budget_for_stretch: eps, psi must be > 0");
    const double x = std::log(static_cast<double>(k) / static_cast<double>(k - 1)) /
                     std::log(1.0 + eps / psi);
    return static_cast<int>(std::ceil(x - 1e-12)) - 1;
}

double coverage_slack_lower_bound(double n, const MetricProfile& profile) {
    const double ln_n = std::log(std::max(n, 3.0));
    const double lnln_n = std::log(std::max(ln_n, 1.0 + 1e-9));
    const double lam = profile.rank_exponent;
    return ((1.0 + lam) * lnln_n +
            lam * std::log(1.0 + profile.opposite_ratio / (1.0 - profile.max_descent))) /
           ln_n;
}

TuningParams tune_horn(double n, double alpha, double nu, double eps, double gamma, int k,
                       double delta, double beta, const MetricProfile& profile) {
    if (!(gamma > 1.0)) throw UsageError("tune_horn: gamma must be > 1");
    if (k < 0) throw UsageError("tune_horn: k must be >= 0");
    if (!(delta > alpha && delta < 1.0)) throw UsageError("tune_horn: delta must lie in (alpha, 1)");
    if (!(beta > 0.0)) throw UsageError("tune_horn: beta must be > 0");

    TuningParams p;
    p.eps = eps;
    p.period_exponent = alpha;
    p.diam_exponent = nu;
    p.query_exponent = delta;
    p.preproc_exponent = beta;
    p.level_growth = gamma;
    p.levels = k;

    // coverage-slack windows (lower bound estimated from the profile,
    // structural upper bound 1 - gamma^-i); error when any window is empty
    const double lower = coverage_slack_lower_bound(n, profile);
    std::string offenders;
    for (int i = 1; i <= k; ++i) {
        const double upper = 1.0 - std::pow(gamma, -static_cast<double>(i));
        if (lower >= upper) offenders += (offenders.empty() ? "" : ", ") + std::to_string(i);
    }
    if (!offenders.empty())
        throw InvariantError(
            "tune_horn: empty coverage-slack window at level(s) " + offenders +
            "; the admissible interval (estimated lower bound, 1-gamma^-i) has no room at this n");
    for (int i = 1; i <= k; ++i) {
        const double upper = 1.0 - std::pow(gamma, -static_cast<double>(i));
        p.coverage_slack.push_back(0.5 * (lower + upper));
    }

    // level-1 constraint binds: smallest (1 - gamma^-i) over the levels
    const double expr = (delta / alpha) * ((2.0 / nu + alpha) * (1.0 - 1.0 / gamma)) /
                        (beta * (2.0 / (alpha * nu) + 1.0) + 2.0 / nu - 1.0);
    p.recursion_budget = derive_budget(expr, p, "tune_horn");
    p.landmark_exponent = delta / static_cast<double>(p.recursion_budget + 1);
    p.radius_exponent = (1.0 + alpha) / (2.0 / nu + alpha);
    p.nearby_exponent = (1.0 + alpha) / (2.0 + alpha * nu);
    p.esc_factor = stretch_constants(eps, profile.opposite_ratio, profile.max_ascent,
                                     p.recursion_budget)
                       .esc_factor;
    return p;
}

} // namespace tdo
