#include "tdo/bisect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tdo/errors.hpp"
#include "tdo/tdd.hpp"

namespace tdo {

bool bis_leaf_ok(const TrapCell& cell, double eps, double* worst_ratio) {
    double worst = 1.0;
    bool ok = true;
    auto probe = [&](double t) {
        const double hi = cell.upper(t);
        const double lo = cell.lower(t);
        if (!(lo > 0.0)) {
            ok = false;
            worst = std::numeric_limits<double>::infinity();
            return;
        }
        worst = std::max(worst, hi / lo);
    };
    probe(cell.t_start);
    probe(cell.t_end);
    if (cell.upper_kink_inside) probe(cell.upper_kink_t);
    if (cell.lower_kink_inside) probe(cell.lower_kink_t);
    if (worst_ratio) *worst_ratio = worst;
    return ok && worst <= 1.0 + eps;
}

namespace {

struct Builder {
    const TdInstance& inst;
    const std::vector<int>& dests;
    double eps;
    const MetricProfile& profile;
    const BisOptions& opts;
    BisBuild& out;

    TddEngine engine;
    std::vector<char> await;
    std::map<double, std::vector<double>> samples; // time -> per-destination dist
    std::vector<std::vector<Breakpoint>> pieces;   // per destination

    Builder(const TdInstance& i, const std::vector<int>& d, double e, const MetricProfile& p,
            const BisOptions& o, BisBuild& b)
        : inst(i), dests(d), eps(e), profile(p), opts(o), out(b), engine(i),
          await(static_cast<std::size_t>(i.vertex_count()), 0),
          pieces(d.size()) {
        for (int v : d) await[static_cast<std::size_t>(v)] = 1;
    }

    const std::vector<double>& sample(double t) {
        auto it = samples.find(t);
        if (it != samples.end()) return it->second;
        Stop stop;
        stop.await_set = &await;
        stop.await_count = static_cast<long>(dests.size());
        const BallResult ball = engine.run(origin, t, CostMetric::time_dependent, stop);
        ++out.tdd_calls;
        std::vector<double> row;
        row.reserve(dests.size());
        for (int v : dests) {
            const double d = ball.dist(v);
            if (!std::isfinite(d))
                throw InvariantError("bis: destination " + std::to_string(v) + " unreachable from " +
                                     std::to_string(origin));
            row.push_back(d);
        }
        return samples.emplace(t, std::move(row)).first->second;
    }

    int origin = 0;

    void node(double t0, double t1, int depth) {
        // Copy the sample rows: the map can rehash/rebalance between the two
        // lookups and recursion below re-enters sample().
        const std::vector<double> s0 = sample(t0);
        const std::vector<double> s1 = sample(t1);

        std::vector<TrapCell> cells;
        cells.reserve(dests.size());
        bool all_ok = true;
        for (std::size_t i = 0; i < dests.size(); ++i) {
            cells.push_back(build_cell(s0[i], s1[i], t0, t1, profile.max_descent, profile.max_ascent));
            if (all_ok && !bis_leaf_ok(cells.back(), eps)) all_ok = false;
        }

        if (!all_ok && depth < opts.depth_cap) {
            const double mid = 0.5 * (t0 + t1);
            node(t0, mid, depth + 1);
            node(mid, t1, depth + 1);
            return;
        }

        if (!all_ok) {
            // depth cap: flag the failing destinations with their achieved ratio
            for (std::size_t i = 0; i < dests.size(); ++i) {
                double ratio = 1.0;
                if (!bis_leaf_ok(cells[i], eps, &ratio)) {
                    auto it = out.unresolved.find(dests[i]);
                    const double achieved = ratio - 1.0;
                    if (it == out.unresolved.end())
                        out.unresolved.emplace(dests[i], achieved);
                    else
                        it->second = std::max(it->second, achieved);
                }
            }
        }

        ++out.leaf_count;
        out.max_depth = std::max(out.max_depth, depth);
        if (opts.keep_leaves) out.leaves.push_back({t0, t1});
        const double eps_t = 1e-12 * std::max(1.0, inst.period());
        for (std::size_t i = 0; i < dests.size(); ++i) {
            auto& pts = pieces[i];
            pts.push_back({t0, cells[i].upper(t0)});
            if (cells[i].upper_kink_inside &&
                cells[i].upper_kink_t > t0 + eps_t && cells[i].upper_kink_t < t1 - eps_t)
                pts.push_back({cells[i].upper_kink_t, cells[i].upper_kink_v});
        }
    }
};

} // namespace

BisBuild bis_build(const TdInstance& inst, int l, const std::vector<int>& destinations, double eps,
                   const MetricProfile& profile, const BisOptions& opts) {
    BisBuild out;
    if (destinations.empty()) return out;
    if (!(eps > 0.0)) throw UsageError("bis: eps must be > 0");

    Builder b(inst, destinations, eps, profile, opts, out);
    b.origin = l;
    b.node(0.0, inst.period(), 0);

    for (std::size_t i = 0; i < destinations.size(); ++i) {
        PwlFunction f = PwlFunction(std::move(b.pieces[i]), inst.period()).compressed();
        out.summaries.emplace(destinations[i], std::move(f));
    }
    return out;
}

} // namespace tdo
