#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "tdo/bisect.hpp"
#include "tdo/instance.hpp"
#include "tdo/tdd.hpp"
#include "tdo/trap.hpp"

using namespace tdo;

namespace {

// two vertices, one arc with a tent profile peaking at 0.3 * period: the
// travel-time function from 0 to 1 is the arc cost itself, and the midpoint
// split never aligns with the peak
TdInstance tent_chain(double base, double amplitude, double period) {
    std::vector<std::pair<std::pair<int, int>, PwlFunction>> arcs;
    arcs.push_back({{0, 1}, PwlFunction({{0.0, base}, {0.3 * period, base + amplitude}}, period)});
    arcs.push_back({{1, 0}, PwlFunction::constant(base, period)});
    return TdInstance(2, period, std::move(arcs));
}

MetricProfile tent_profile(const TdInstance& inst) {
    const auto [lo, hi] = inst.arc(0).cost.slope_range();
    MetricProfile p;
    p.max_descent = -lo;
    p.max_ascent = std::max(hi, p.max_descent);
    return p;
}

} // namespace

TEST_CASE("constant costs resolve at the root with two sample calls") {
    GeneratorConfig cfg;
    cfg.n = 40;
    cfg.seed = 4;
    cfg.spoiling_fraction = 0.0;
    const TdInstance inst = generate(cfg);
    MetricProfile prof;
    prof.max_ascent = 0.0;
    prof.max_descent = 0.0;

    std::vector<int> dests;
    for (int v = 1; v < 8; ++v) dests.push_back(v);
    const BisBuild build = bis_build(inst, 0, dests, 0.25, prof);
    CHECK(build.tdd_calls == 2);
    CHECK(build.leaf_count == 1);
    CHECK(build.max_depth == 0);
    CHECK(build.unresolved.empty());

    const auto dist = testsupport::scalar_shortest(inst, 0);
    for (const auto& [d, f] : build.summaries) {
        CHECK(f.eval(1.0) == doctest::Approx(dist[static_cast<std::size_t>(d)]));
        CHECK(f.eval(7.7) == doctest::Approx(dist[static_cast<std::size_t>(d)]));
    }
}

TEST_CASE("tent profile: sandwich holds and sharper peaks bisect deeper") {
    const double period = 16.0;
    long calls_soft = 0;
    long calls_sharp = 0;
    for (const double amplitude : {0.5, 3.0}) {
        const TdInstance inst = tent_chain(2.0, amplitude, period);
        const MetricProfile prof = tent_profile(inst);
        const BisBuild build = bis_build(inst, 0, {1}, 0.1, prof);
        CHECK(build.unresolved.empty());
        const PwlFunction& f = build.summaries.at(1);
        for (int s = 0; s < 64; ++s) {
            const double t = period * (s + 0.5) / 64.0;
            const double exact = inst.arc(0).cost.eval(t);
            CHECK(f.eval(t) >= exact - 1e-9 * exact);
            CHECK(f.eval(t) <= 1.1 * exact * (1.0 + 1e-9));
        }
        (amplitude < 1.0 ? calls_soft : calls_sharp) = build.tdd_calls;
    }
    CHECK(calls_sharp > calls_soft);
}

TEST_CASE("leaf certificate holds at endpoints and kinks of every leaf") {
    const double period = 16.0;
    const TdInstance inst = tent_chain(2.0, 2.0, period);
    const MetricProfile prof = tent_profile(inst);
    BisOptions opts;
    opts.keep_leaves = true;
    const double eps = 0.2;
    const BisBuild build = bis_build(inst, 0, {1}, eps, prof, opts);
    REQUIRE(!build.leaves.empty());
    TddEngine engine(inst);
    Stop stop;
    stop.target = 1;
    for (const auto& [t0, t1] : build.leaves) {
        const double d0 = engine.run(0, t0, CostMetric::time_dependent, stop).dist(1);
        const double d1 = engine.run(0, t1, CostMetric::time_dependent, stop).dist(1);
        const TrapCell cell = build_cell(d0, d1, t0, t1, prof.max_descent, prof.max_ascent);
        double worst = 0.0;
        CHECK(bis_leaf_ok(cell, eps, &worst));
        CHECK(worst <= 1.0 + eps + 1e-12);
    }
}

TEST_CASE("spoiling breakpoints drive the sample count") {
    GeneratorConfig cfg;
    cfg.n = 80;
    cfg.seed = 12;
    cfg.spoiling_fraction = 0.0;
    const TdInstance flat = generate(cfg);
    cfg.spoiling_fraction = 0.5;
    const TdInstance wavy = generate(cfg);
    CHECK(flat.spoiling_total() == 0);
    CHECK(wavy.spoiling_total() >= wavy.arc_count()); // roughly K* ~ n scale

    ProfileOptions popts;
    popts.seed = 2;
    popts.origins = 12;
    popts.time_grid = 32;
    popts.slope_safety = 1.5;
    const MetricProfile prof_flat = estimate_profile(flat, popts);
    const MetricProfile prof_wavy = estimate_profile(wavy, popts);

    std::vector<int> dests;
    for (int v = 1; v <= 10; ++v) dests.push_back(v);
    const BisBuild b_flat = bis_build(flat, 0, dests, 0.25, prof_flat);
    const BisBuild b_wavy = bis_build(wavy, 0, dests, 0.25, prof_wavy);
    CHECK(b_wavy.tdd_calls > b_flat.tdd_calls);

    // sandwich on the wavy instance against the exact engine
    TddEngine engine(wavy);
    Rng rng(9);
    for (int d : dests) {
        const PwlFunction& f = b_wavy.summaries.at(d);
        for (int s = 0; s < 16; ++s) {
            const double t = rng.uniform(0.0, wavy.period());
            Stop stop;
            stop.target = d;
            const double exact = engine.run(0, t, CostMetric::time_dependent, stop).dist(d);
            CHECK(f.eval(t) >= exact - 1e-9 * exact);
            if (b_wavy.unresolved.count(d) == 0)
                CHECK(f.eval(t) <= 1.25 * exact * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("refinement never increases the per-cell error") {
    Rng rng(55);
    for (int i = 0; i < 300; ++i) {
        const double descent = rng.uniform(0.0, 0.8);
        const double ascent = std::max(descent, rng.uniform(0.1, 1.5));
        const double t0 = 0.0, t1 = rng.uniform(1.0, 8.0);
        const double mid = 0.5 * (t0 + t1);
        const double d0 = rng.uniform(2.0, 6.0);
        // midpoint and endpoint consistent with the slope bounds
        const double dm = d0 + rng.uniform(-descent, ascent) * (mid - t0);
        const double d1 = dm + rng.uniform(-descent, ascent) * (t1 - mid);
        if (!(dm > 0.0) || !(d1 > 0.0)) continue;
        const TrapCell parent = build_cell(d0, d1, t0, t1, descent, ascent);
        const TrapCell left = build_cell(d0, dm, t0, mid, descent, ascent);
        const TrapCell right = build_cell(dm, d1, mid, t1, descent, ascent);
        CHECK(left.max_additive_error <= parent.max_additive_error + 1e-9);
        CHECK(right.max_additive_error <= parent.max_additive_error + 1e-9);
    }
}

TEST_CASE("depth cap flags unresolved destinations with their achieved ratio") {
    // steep bounds and a tiny travel time force the certificate to fail early
    const double period = 16.0;
    const TdInstance inst = tent_chain(0.05, 0.02, period);
    MetricProfile prof;
    prof.max_ascent = 0.9;
    prof.max_descent = 0.9;
    BisOptions opts;
    opts.depth_cap = 2;
    const BisBuild build = bis_build(inst, 0, {1}, 0.01, prof, opts);
    REQUIRE(build.unresolved.count(1) == 1);
    CHECK(build.unresolved.at(1) > 0.01);
    CHECK(build.max_depth == 2);
    // the emitted envelope is still an upper bound
    TddEngine engine(inst);
    Stop stop;
    stop.target = 1;
    for (int s = 0; s < 16; ++s) {
        const double t = period * s / 16.0;
        const double exact = engine.run(0, t, CostMetric::time_dependent, stop).dist(1);
        CHECK(build.summaries.at(1).eval(t) >= exact - 1e-9);
    }
}
