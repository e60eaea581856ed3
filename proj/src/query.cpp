#include "tdo/query.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_set>

#include "tdo/errors.hpp"
#include "tdo/tdd.hpp"

namespace tdo {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

StretchConstants stretch_constants(double eps, double opposite_ratio, double max_ascent,
                                   int recursion_budget) {
    if (!(eps > 0.0)) throw UsageError("stretch_constants: eps must be > 0");
    if (opposite_ratio < 1.0) throw UsageError("stretch_constants: opposite ratio must be >= 1");
    if (max_ascent < 0.0) throw UsageError("stretch_constants: max ascent must be >= 0");
    if (recursion_budget < 0) throw UsageError("stretch_constants: budget must be >= 0");

    StretchConstants c;
    c.eps = eps;
    c.opposite_ratio = opposite_ratio;
    c.max_ascent = max_ascent;
    c.recursion_budget = recursion_budget;
    c.fca_constant = 1.0 +
                     max_ascent * (1.0 + eps) * (1.0 + 2.0 * opposite_ratio + max_ascent * opposite_ratio) +
                     (1.0 + eps) * opposite_ratio;
    const double growth = std::pow(1.0 + eps / c.fca_constant, recursion_budget + 1);
    c.rqa_stretch = eps * growth / (growth - 1.0);
    c.esc_factor = eps * static_cast<double>(recursion_budget + 1) / (c.fca_constant * (growth - 1.0));
    return c;
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::exact: return "exact";
        case Termination::landmark: return "landmark";
        case Termination::esc: return "esc";
        case Termination::alh_rqa: return "alh+rqa";
        default: return "budget-exhausted";
    }
}

QueryEngine::QueryEngine(const OracleStore& store) : store_(&store) {}

QueryResult QueryEngine::exact_tdd(int o, int d, double t) const {
    Stop stop;
    stop.target = d;
    const BallResult ball = tdsp_one_to_all(store_->instance, o, t, stop);
    if (ball.reason != StopReason::target_settled)
        throw NoPathError("no path from " + std::to_string(o) + " to " + std::to_string(d));
    QueryResult res;
    res.origin = o;
    res.dest = d;
    res.depart = t;
    res.value = ball.dist(d);
    res.exact = true;
    res.termination = Termination::exact;
    res.settled = static_cast<long>(ball.order.size());
    return res;
}

// Candidate suffix via a settled landmark: a stored summary when the landmark
// is informed about d; on TRAPONLY stores an on-the-fly ball capped at the
// expanded-ball size recovers the exact suffix for nearby destinations.
bool QueryEngine::suffix_value(const LmView& view, int landmark, int dest, double arrive,
                               long& settled, SuffixEval* out) const {
    if (dest == landmark) {
        *out = {0.0, true};
        return true;
    }
    for (int idx : store_->records_at(landmark)) {
        const LandmarkRecord& rec = store_->record(idx);
        if (view.min_level > 0 && rec.level < view.min_level) continue;
        auto it = rec.summaries.find(dest);
        if (it != rec.summaries.end()) {
            *out = {it->second.eval(arrive), false};
            return true;
        }
    }
    if (store_->mode == StoreMode::traponly) {
        // nearby destination: no summary by construction, grow the suffix ball
        const LandmarkRecord& rec = store_->record(store_->records_at(landmark).front());
        Stop stop;
        stop.target = dest;
        stop.size_cap = rec.expanded_cap;
        const BallResult ball = tdsp_one_to_all(store_->instance, landmark, arrive, stop);
        settled += static_cast<long>(ball.order.size());
        if (ball.reason == StopReason::target_settled) {
            *out = {ball.dist(dest), true};
            return true;
        }
    }
    return false; // uninformed landmark: not a candidate source
}

QueryResult QueryEngine::rqa_core(int o, int d, double t, int budget, const LmView& view,
                                  long settled_so_far, std::vector<Candidate> candidates) const {
    const TdInstance& inst = store_->instance;
    QueryResult res;
    res.origin = o;
    res.dest = d;
    res.depart = t;
    res.settled = settled_so_far;

    struct Item {
        int center;
        double depart;
        double prefix;
        int depth;
        std::vector<int> chain;
    };
    std::deque<Item> queue;
    std::unordered_set<int> visited;
    queue.push_back({o, t, 0.0, 0, {}});
    visited.insert(o);

    TddEngine engine(inst);
    while (!queue.empty()) {
        Item item = std::move(queue.front());
        queue.pop_front();

        Stop stop;
        stop.target = d;
        stop.stop_set = view.flags;
        const BallResult ball = engine.run(item.center, item.depart, CostMetric::time_dependent, stop);
        res.settled += static_cast<long>(ball.order.size());

        if (ball.reason == StopReason::target_settled && ball.stopped_at == d) {
            const double value = item.prefix + ball.dist(d);
            if (item.depth == 0) {
                // the initial ball reached d before any landmark: exact answer
                res.value = value;
                res.exact = true;
                res.termination = Termination::exact;
                return res;
            }
            candidates.push_back({value, -1, false, true, item.chain});
            continue;
        }
        if (ball.reason != StopReason::landmark_settled) continue; // dead component

        const int landmark = ball.stopped_at;
        const double reach = ball.dist(landmark);
        SuffixEval suffix{};
        if (suffix_value(view, landmark, d, item.depart + reach, res.settled, &suffix))
            candidates.push_back(
                {item.prefix + reach + suffix.value, landmark, suffix.exact_suffix, false, item.chain});

        if (item.depth < budget) {
            for (const auto& s : ball.order) {
                if (s.vertex == item.center || s.vertex == landmark) continue;
                if (!visited.insert(s.vertex).second) continue;
                Item child;
                child.center = s.vertex;
                child.depart = item.depart + s.dist;
                child.prefix = item.prefix + s.dist;
                child.depth = item.depth + 1;
                child.chain = item.chain;
                child.chain.push_back(s.vertex);
                queue.push_back(std::move(child));
            }
        }
    }

    const Candidate* best = nullptr;
    for (const auto& c : candidates)
        if (!best || c.value < best->value) best = &c;
    if (!best) {
        // pathological store: fall back to the exact engine
        QueryResult ex = exact_tdd(o, d, t); // throws NoPathError when unreachable
        ex.settled += res.settled;
        ex.termination = Termination::budget_exhausted;
        ex.exact = true;
        return ex;
    }
    res.value = best->value;
    res.exact = best->exact_path && best->chain.empty();
    res.termination = res.exact ? Termination::exact : Termination::landmark;
    res.via_landmark = best->landmark;
    res.exact_suffix = best->exact_suffix;
    res.chain = best->chain;
    return res;
}

QueryResult QueryEngine::fca(int o, int d, double t) const { return rqa(o, d, t, 0); }

QueryResult QueryEngine::rqa(int o, int d, double t, int budget) const {
    if (store_->mode == StoreMode::horn)
        throw UsageError("rqa requires a flat or traponly store; use hqa");
    if (budget < 0) throw UsageError("rqa: budget must be >= 0");
    LmView view{&store_->landmark_flags(), 0};
    return rqa_core(o, d, t, budget, view, 0, {});
}

QueryResult QueryEngine::hqa(int o, int d, double t, int budget) const {
    if (store_->mode != StoreMode::horn) throw UsageError("hqa requires a horn store");
    if (budget < 0) throw UsageError("hqa: budget must be >= 0");
    const TdInstance& inst = store_->instance;
    const double n = static_cast<double>(inst.vertex_count());
    const double ln_n = std::log(std::max(n, 3.0));
    const StretchConstants sc =
        stretch_constants(store_->eps, store_->profile.opposite_ratio, store_->profile.max_ascent,
                          budget);
    const double esc_threshold =
        (1.0 + sc.eps) * sc.esc_factor * static_cast<double>(budget + 1) + sc.fca_constant - 1.0;

    const int ultimate = static_cast<int>(store_->levels.size());
    const double exponent = store_->params.query_exponent / static_cast<double>(budget + 1);
    std::vector<double> ring_lo(store_->levels.size() + 1, 0.0), ring_hi(store_->levels.size() + 1, 0.0);
    for (const auto& lv : store_->levels) {
        const double base = std::pow(lv.target_rank, exponent);
        ring_lo[static_cast<std::size_t>(lv.level)] = std::max(1.0, base / ln_n);
        ring_hi[static_cast<std::size_t>(lv.level)] = ln_n * base;
    }
    // the ultimate level triggers beyond the ring of the last bounded level
    const double ultimate_after =
        ultimate >= 2 ? ring_hi[static_cast<std::size_t>(ultimate - 1)] : ln_n;

    struct BestCand {
        double value = kInf;
        int landmark = -1;
    };
    BestCand best;
    int alh_level = 0;
    bool esc_fired = false;

    Stop stop;
    stop.target = d;
    stop.predicate = [&](int v, double dist, long rank) {
        // v == d cannot reach here: the target stop fires first.
        bool stop_now = false;
        for (int idx : store_->records_at(v)) {
            const LandmarkRecord& rec = store_->record(idx);
            auto it = rec.summaries.find(d);
            const bool informed = (it != rec.summaries.end());
            if (informed) {
                const double approx = it->second.eval(t + dist);
                const double value = dist + approx;
                if (value < best.value) best = {value, v};
                // early stop: the summary is large relative to the landmark distance
                if (approx >= esc_threshold * dist) {
                    esc_fired = true;
                    stop_now = true;
                }
                if (rec.level < ultimate && rank >= ring_lo[static_cast<std::size_t>(rec.level)] &&
                    rank <= ring_hi[static_cast<std::size_t>(rec.level)]) {
                    alh_level = rec.level;
                    stop_now = true;
                }
            }
            if (rec.level == ultimate && static_cast<double>(rank) > ultimate_after) {
                alh_level = ultimate;
                stop_now = true;
            }
        }
        return stop_now;
    };

    const BallResult ball = tdsp_one_to_all(inst, o, t, stop);
    long settled = static_cast<long>(ball.order.size());

    QueryResult res;
    res.origin = o;
    res.dest = d;
    res.depart = t;

    if (ball.reason == StopReason::target_settled) {
        res.value = ball.dist(d);
        res.exact = true;
        res.termination = Termination::exact;
        res.settled = settled;
        return res;
    }
    if (ball.reason == StopReason::exhausted) {
        if (best.value == kInf)
            throw NoPathError("no path from " + std::to_string(o) + " to " + std::to_string(d));
        res.value = best.value;
        res.termination = Termination::budget_exhausted;
        res.via_landmark = best.landmark;
        res.settled = settled;
        return res;
    }
    if (esc_fired) {
        res.value = best.value;
        res.termination = Termination::esc;
        res.via_landmark = best.landmark;
        res.settled = settled;
        return res;
    }

    // ALH: continue with rqa over the landmark union of this level and above.
    std::vector<Candidate> preset;
    if (best.value < kInf) preset.push_back({best.value, best.landmark, false, false, {}});
    std::vector<char> flags(static_cast<std::size_t>(inst.vertex_count()), 0);
    for (const auto& rec : store_->landmarks)
        if (rec.level >= alh_level) flags[static_cast<std::size_t>(rec.vertex)] = 1;
    LmView view{&flags, alh_level};
    QueryResult sub = rqa_core(o, d, t, budget, view, settled, std::move(preset));
    sub.alh_level = alh_level;
    if (!sub.exact && sub.termination != Termination::budget_exhausted)
        sub.termination = Termination::alh_rqa;
    return sub;
}

} // namespace tdo
