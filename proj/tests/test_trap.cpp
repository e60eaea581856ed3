#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "support/oracles.hpp"
#include "tdo/errors.hpp"
#include "tdo/instance.hpp"
#include "tdo/tdd.hpp"
#include "tdo/trap.hpp"
#include "tdo/tuning.hpp"

using namespace tdo;

namespace {

MetricProfile profile_with(double descent, double ascent) {
    MetricProfile p;
    p.max_descent = descent;
    p.max_ascent = ascent;
    return p;
}

// Generated instance shared by the heavier cases; slope bounds measured with
// a safety margin so the envelopes certifiably sandwich the travel times.
struct TrapRig {
    TdInstance inst;
    MetricProfile profile;
    TrapRig() : inst(make()), profile() {
        ProfileOptions popts;
        popts.seed = 99;
        popts.slope_safety = 1.6;
        popts.origins = 16;
        popts.time_grid = 48;
        profile = estimate_profile(inst, popts);
    }
    static TdInstance make() {
        GeneratorConfig cfg;
        cfg.n = 200;
        cfg.seed = 1234;
        cfg.spoiling_fraction = 0.3;
        const TdInstance raw = generate(cfg);
        return normalize_period(raw, 0.65);
    }
};

} // namespace

TEST_CASE("symmetric cell: tent envelopes and a tight error bound") {
    const TrapCell cell = build_cell(4.0, 4.0, 0.0, 6.0, 0.3, 0.3);
    // equal samples and symmetric slopes: the error is exactly ascent * length
    CHECK(cell.max_additive_error == doctest::Approx(0.3 * 6.0));
    CHECK(cell.upper(0.0) == doctest::Approx(4.0));
    CHECK(cell.upper(6.0) == doctest::Approx(4.0));
    CHECK(cell.upper(3.0) == doctest::Approx(4.0 + 0.3 * 3.0));
    CHECK(cell.lower(3.0) == doctest::Approx(4.0 - 0.3 * 3.0));
    CHECK(cell.upper_kink_inside);
    CHECK(cell.lower_kink_inside);
}

TEST_CASE("kink formulas agree with an independent line intersection") {
    // descent 0.5, ascent 1, samples 5 -> 7 over [0, 10]
    const TrapCell cell = build_cell(5.0, 7.0, 0.0, 10.0, 0.5, 1.0);
    CHECK(cell.upper_kink_t == doctest::Approx(14.0 / 3.0));
    CHECK(cell.upper_kink_v == doctest::Approx(29.0 / 3.0));

    // upper legs: through (0,5) rising at +1, through (10,7) falling at -0.5
    const auto [tu, vu] = testsupport::line_intersection(0.0, 5.0, 1.0, 10.0, 7.0, -0.5);
    CHECK(cell.upper_kink_t == doctest::Approx(tu));
    CHECK(cell.upper_kink_v == doctest::Approx(vu));
    const auto [tl, vl] = testsupport::line_intersection(0.0, 5.0, -0.5, 10.0, 7.0, 1.0);
    CHECK(cell.lower_kink_t == doctest::Approx(tl));
    CHECK(cell.lower_kink_v == doctest::Approx(vl));
}

TEST_CASE("cell error bound holds for random inputs") {
    Rng rng(77);
    for (int i = 0; i < 500; ++i) {
        const double t0 = rng.uniform(0.0, 5.0);
        const double len = rng.uniform(0.1, 8.0);
        const double descent = rng.uniform(0.0, 0.9);
        // profiles keep the ascent bound at or above the descent bound
        const double ascent = std::max(rng.uniform(0.01, 2.0), descent);
        // samples consistent with the slope bounds
        const double d0 = rng.uniform(1.0, 10.0);
        const double d1 = d0 + rng.uniform(-descent * len, ascent * len);
        if (!(d1 > 0.0)) continue;
        const TrapCell cell = build_cell(d0, d1, t0, t0 + len, descent, ascent);
        CHECK(cell.max_additive_error <= ascent * len + 1e-9);
        CHECK(cell.upper(t0) == doctest::Approx(d0));
        CHECK(cell.upper(t0 + len) == doctest::Approx(d1));
        // sandwich between the envelopes at interior points
        for (int s = 1; s < 8; ++s) {
            const double t = t0 + len * s / 8.0;
            CHECK(cell.lower(t) <= cell.upper(t) + 1e-12);
        }
    }
}

TEST_CASE("zero slope bounds demand equal samples") {
    CHECK_NOTHROW(build_cell(4.0, 4.0, 0.0, 5.0, 0.0, 0.0));
    CHECK_THROWS_AS(build_cell(4.0, 5.0, 0.0, 5.0, 0.0, 0.0), InvariantError);
    const TrapCell flat = build_cell(4.0, 4.0, 0.0, 5.0, 0.0, 0.0);
    CHECK(flat.max_additive_error == 0.0);
    CHECK(flat.upper(2.5) == doctest::Approx(4.0));
}

TEST_CASE("sufficient cell width formula") {
    CHECK(sufficient_cell_width(10.0, 1.0, 0.5) == doctest::Approx(10.0));
    // large eps limit approaches dist / ascent
    CHECK(sufficient_cell_width(10.0, 1e9, 0.5) == doctest::Approx(20.0).epsilon(1e-6));
    // linear in the distance
    CHECK(sufficient_cell_width(20.0, 1.0, 0.5) ==
          doctest::Approx(2.0 * sufficient_cell_width(10.0, 1.0, 0.5)));
    // static metric: no finite width needed
    CHECK(std::isinf(sufficient_cell_width(10.0, 1.0, 0.0)));
}

TEST_CASE("faraway set splits by the free-flow distance") {
    const TdInstance inst = testsupport::six_node_fixture();
    const MetricProfile prof = profile_with(0.2, 0.5);
    const double eps = 0.5;

    // tiny tau: everything reachable except the landmark itself
    const auto all = faraway_set(inst, 0, 1e-9, eps, prof);
    CHECK(all.size() == 5);

    // the oracle: thresholds from the brute-force free-flow distances
    const auto dist = testsupport::scalar_shortest(inst, 0);
    std::vector<double> widths;
    for (int v = 1; v < 6; ++v)
        widths.push_back(sufficient_cell_width(dist[static_cast<std::size_t>(v)], eps, prof.max_ascent));
    std::sort(widths.begin(), widths.end());
    const double tau_mid = 0.5 * (widths[1] + widths[2]); // between two distinct thresholds
    const auto split = faraway_set(inst, 0, tau_mid, eps, prof);
    std::size_t expect = 0;
    for (double w : widths)
        if (w > tau_mid) ++expect;
    CHECK(split.size() == expect);
}

TEST_CASE("static instance: summaries are exact constants") {
    GeneratorConfig cfg;
    cfg.n = 60;
    cfg.seed = 8;
    cfg.spoiling_fraction = 0.0; // constant costs
    const TdInstance inst = generate(cfg);
    MetricProfile prof = profile_with(0.0, 0.0);

    const auto dests = faraway_set(inst, 0, 1e-9, 0.5, prof);
    REQUIRE(!dests.empty());
    const TrapBuild build = build_summaries(inst, 0, dests, 0.5, prof);
    CHECK(build.cells == 1);
    CHECK(build.tdd_calls == 1);
    const auto dist = testsupport::scalar_shortest(inst, 0);
    for (const auto& [d, f] : build.summaries) {
        CHECK(f.size() == 1);
        CHECK(f.eval(3.0) == doctest::Approx(dist[static_cast<std::size_t>(d)]));
    }
}

TEST_CASE("summaries sandwich the exact travel times within 1+eps") {
    const TrapRig rig;
    const double eps = 0.5;
    const int landmark = 17;

    const BallResult ff = static_ball(rig.inst, landmark, CostMetric::free_flow);
    // pick a tau that keeps a healthy faraway set
    double median_dist;
    {
        std::vector<double> ds;
        for (const auto& s : ff.order) ds.push_back(s.dist);
        std::sort(ds.begin(), ds.end());
        median_dist = ds[ds.size() / 2];
    }
    const double tau = sufficient_cell_width(median_dist, eps, rig.profile.max_ascent);
    const auto dests = faraway_set(rig.inst, landmark, tau, eps, rig.profile);
    REQUIRE(dests.size() >= 20);

    const TrapBuild build = build_summaries(rig.inst, landmark, dests, eps, rig.profile);

    // call count identity and its closed-form upper bound
    CHECK(build.tdd_calls == build.cells);
    double min_far = testsupport::kInf;
    for (int v : dests) min_far = std::min(min_far, ff.dist(v));
    CHECK(static_cast<double>(build.tdd_calls) <=
          1.0 + rig.inst.period() * (1.0 + 1.0 / eps) * rig.profile.max_ascent / min_far + 1e-9);

    // breakpoint budget
    CHECK(build.max_breakpoints <= 2 * build.cells);

    // MAE audit accumulated during the build
    CHECK(build.worst_mae_excess <= 1e-9);

    // sandwich against the exact engine: 20 destinations x 32 times
    Rng rng(5151);
    TddEngine engine(rig.inst);
    std::vector<int> sample = dests;
    for (std::size_t i = 0; i < sample.size(); ++i)
        std::swap(sample[i], sample[static_cast<std::size_t>(rng.uniform_int(
                                 static_cast<long>(i), static_cast<long>(sample.size()) - 1))]);
    sample.resize(20);
    for (int d : sample) {
        const PwlFunction& f = build.summaries.at(d);
        for (int s = 0; s < 32; ++s) {
            const double t = rng.uniform(0.0, rig.inst.period());
            Stop stop;
            stop.target = d;
            const double exact = engine.run(landmark, t, CostMetric::time_dependent, stop).dist(d);
            const double approx = f.eval(t);
            CHECK(approx >= exact - 1e-9 * exact);
            CHECK(approx <= (1.0 + eps) * exact * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("per-cell envelopes sandwich the exact function inside each cell") {
    const TrapRig rig;
    const double eps = 0.5;
    const int landmark = 3;
    const BallResult ff = static_ball(rig.inst, landmark, CostMetric::free_flow);
    std::vector<double> ds;
    for (const auto& s : ff.order) ds.push_back(s.dist);
    std::sort(ds.begin(), ds.end());
    const double tau = sufficient_cell_width(ds[ds.size() / 2], eps, rig.profile.max_ascent);
    const auto dests_all = faraway_set(rig.inst, landmark, tau, eps, rig.profile);
    REQUIRE(dests_all.size() >= 4);
    const std::vector<int> dests(dests_all.begin(), dests_all.begin() + 4);

    const TrapBuild build = build_summaries(rig.inst, landmark, dests, eps, rig.profile);
    TddEngine engine(rig.inst);
    // 32 probes per cell on one destination; both envelope sides via cells
    const int probe_dest = dests[1];
    for (long c = 0; c < build.cells; ++c) {
        const double t_s = static_cast<double>(c) * build.grid_width;
        const double t_f = std::min(rig.inst.period(), static_cast<double>(c + 1) * build.grid_width);
        Stop stop;
        stop.target = probe_dest;
        const double d_s = engine.run(landmark, t_s, CostMetric::time_dependent, stop).dist(probe_dest);
        const double d_f =
            engine.run(landmark, std::fmod(t_f, rig.inst.period()), CostMetric::time_dependent, stop)
                .dist(probe_dest);
        const TrapCell cell =
            build_cell(d_s, d_f, t_s, t_f, rig.profile.max_descent, rig.profile.max_ascent);
        for (int s = 0; s < 32; ++s) {
            const double t = t_s + (t_f - t_s) * (s + 0.5) / 32.0;
            const double exact = engine.run(landmark, t, CostMetric::time_dependent, stop).dist(probe_dest);
            CHECK(cell.lower(t) <= exact + 1e-9 * exact);
            CHECK(cell.upper(t) >= exact - 1e-9 * exact);
        }
    }
}

TEST_CASE("the sufficient endpoint condition really yields 1+eps per cell") {
    // whenever an endpoint sample is large enough relative to the cell width,
    // the upper envelope stays within (1+eps) of the exact function
    const TrapRig rig;
    const double eps = 0.5;
    const int landmark = 29;
    const BallResult ff = static_ball(rig.inst, landmark, CostMetric::free_flow);
    std::vector<double> ds;
    for (const auto& s : ff.order) ds.push_back(s.dist);
    std::sort(ds.begin(), ds.end());
    const double tau = sufficient_cell_width(ds[ds.size() / 3], eps, rig.profile.max_ascent);
    const auto dests_all = faraway_set(rig.inst, landmark, tau, eps, rig.profile);
    REQUIRE(dests_all.size() >= 3);
    const std::vector<int> dests(dests_all.begin(), dests_all.begin() + 3);
    const TrapBuild build = build_summaries(rig.inst, landmark, dests, eps, rig.profile);

    TddEngine engine(rig.inst);
    const double width = build.grid_width;
    const double la = rig.profile.max_ascent;
    const double ld = rig.profile.max_descent;
    long conditioned = 0;
    for (long cidx = 0; cidx < build.cells; ++cidx) {
        const double t_s = static_cast<double>(cidx) * width;
        const double t_f = std::min(rig.inst.period(), static_cast<double>(cidx + 1) * width);
        for (int d : dests) {
            Stop stop;
            stop.target = d;
            const double d_s = engine.run(landmark, t_s, CostMetric::time_dependent, stop).dist(d);
            const double d_f =
                engine.run(landmark, std::fmod(t_f, rig.inst.period()), CostMetric::time_dependent, stop)
                    .dist(d);
            const bool cond = d_s >= (ld + la / eps) * (t_f - t_s) ||
                              d_f >= (1.0 + 1.0 / eps) * la * (t_f - t_s);
            if (!cond) continue;
            ++conditioned;
            const TrapCell cell = build_cell(d_s, d_f, t_s, t_f, ld, la);
            for (int s = 0; s < 8; ++s) {
                const double t = t_s + (t_f - t_s) * (s + 0.5) / 8.0;
                const double exact =
                    engine.run(landmark, t, CostMetric::time_dependent, stop).dist(d);
                CHECK(cell.upper(t) <= (1.0 + eps) * exact + 1e-9 * std::max(1.0, exact));
            }
        }
    }
    CHECK(conditioned > 0);
}

TEST_CASE("degenerate inputs") {
    const TrapRig rig;
    CHECK(build_summaries(rig.inst, 0, {}, 0.5, rig.profile).summaries.empty());

    TrapOptions opts;
    opts.forced_width = rig.inst.period() / 100.0;
    opts.cell_cap = 50;
    const auto dests = faraway_set(rig.inst, 0, 1e9, 0.5, rig.profile);
    CHECK(dests.empty()); // infinite tau: nothing is far away
    CHECK_THROWS_AS(build_summaries(rig.inst, 0, {5, 6}, 0.5, rig.profile, opts), InvariantError);
}
