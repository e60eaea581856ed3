#include "tdo/tdd.hpp"

#include <algorithm>
#include <queue>

#include "tdo/errors.hpp"

namespace tdo {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TddEngine::TddEngine(const TdInstance& inst) : inst_(&inst) {}

BallResult TddEngine::run(int origin, double depart, CostMetric metric, const Stop& stop) const {
    const TdInstance& inst = *inst_;
    const int n = inst.vertex_count();
    if (origin < 0 || origin >= n) throw UsageError("tdd: origin out of range");
    if (depart < 0.0) throw UsageError("tdd: departure time must be >= 0");

    BallResult res;
    res.origin = origin;
    res.depart = depart;
    res.rank_of.assign(static_cast<std::size_t>(n), 0);
    res.dist_of.assign(static_cast<std::size_t>(n), kInf);

    std::vector<double> best(static_cast<std::size_t>(n), kInf);
    std::vector<int> parent(static_cast<std::size_t>(n), -1);
    using Item = std::pair<double, int>; // (dist, vertex); id breaks ties
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    best[static_cast<std::size_t>(origin)] = 0.0;
    pq.push({0.0, origin});

    long await_left = stop.await_count;
    long rank = 0;
    while (!pq.empty()) {
        const auto [d, v] = pq.top();
        pq.pop();
        if (res.rank_of[static_cast<std::size_t>(v)] != 0) continue; // stale entry
        if (d > best[static_cast<std::size_t>(v)]) continue;

        if (stop.radius_cap >= 0.0 && d > stop.radius_cap) {
            res.reason = StopReason::radius_reached;
            return res;
        }

        ++rank;
        res.rank_of[static_cast<std::size_t>(v)] = static_cast<int>(rank);
        res.dist_of[static_cast<std::size_t>(v)] = d;
        res.order.push_back({v, d, parent[static_cast<std::size_t>(v)]});

        if (stop.target == v) {
            res.reason = StopReason::target_settled;
            res.stopped_at = v;
            return res;
        }
        if (stop.stop_set && (*stop.stop_set)[static_cast<std::size_t>(v)]) {
            res.reason = StopReason::landmark_settled;
            res.stopped_at = v;
            return res;
        }
        if (stop.await_set && (*stop.await_set)[static_cast<std::size_t>(v)]) {
            if (--await_left <= 0) {
                res.reason = StopReason::await_done;
                return res;
            }
        }
        if (stop.size_cap >= 0 && rank >= stop.size_cap) {
            res.reason = StopReason::size_reached;
            return res;
        }
        if (stop.predicate && stop.predicate(v, d, rank)) {
            res.reason = StopReason::predicate_hit;
            res.stopped_at = v;
            return res;
        }

        for (int aid : inst.out_arcs(v)) {
            const Arc& a = inst.arc(aid);
            const int w = a.head;
            if (res.rank_of[static_cast<std::size_t>(w)] != 0) continue;
            double c;
            switch (metric) {
                case CostMetric::time_dependent: c = a.cost.eval(depart + d); break;
                case CostMetric::free_flow: c = a.free_flow; break;
                default: c = a.full_congestion; break;
            }
            const double cand = d + c;
            if (cand < best[static_cast<std::size_t>(w)]) {
                best[static_cast<std::size_t>(w)] = cand;
                parent[static_cast<std::size_t>(w)] = v;
                pq.push({cand, w});
            }
        }
    }
    res.reason = StopReason::exhausted;
    return res;
}

BallResult tdsp_one_to_all(const TdInstance& inst, int origin, double depart, const Stop& stop) {
    return TddEngine(inst).run(origin, depart, CostMetric::time_dependent, stop);
}

long dijkstra_rank(const TdInstance& inst, int origin, int dest, double depart) {
    Stop stop;
    stop.target = dest;
    const BallResult b = tdsp_one_to_all(inst, origin, depart, stop);
    if (b.reason != StopReason::target_settled) return -1;
    return b.rank(dest);
}

BallResult static_ball(const TdInstance& inst, int origin, CostMetric metric, const Stop& stop) {
    return TddEngine(inst).run(origin, 0.0, metric, stop);
}

ExpandedBall expanded_ball(const TdInstance& inst, int l, long F) {
    const int n = inst.vertex_count();
    if (F > n) throw UsageError("expanded_ball: F exceeds vertex count");
    ExpandedBall out;

    Stop size_stop;
    size_stop.size_cap = F;
    const BallResult ball = static_ball(inst, l, CostMetric::free_flow, size_stop);
    out.ball.reserve(ball.order.size());
    for (const auto& s : ball.order) out.ball.push_back(s.vertex);
    if (!ball.order.empty()) out.free_flow_radius = ball.order.back().dist;

    // Full-congestion distances to every ball member.
    std::vector<char> members(static_cast<std::size_t>(n), 0);
    for (int v : out.ball) members[static_cast<std::size_t>(v)] = 1;
    Stop await;
    await.await_set = &members;
    await.await_count = static_cast<long>(out.ball.size());
    const BallResult cong = static_ball(inst, l, CostMetric::full_congestion, await);
    double r_bar = 0.0;
    for (int v : out.ball) r_bar = std::max(r_bar, cong.dist(v));
    out.congestion_radius = r_bar;

    Stop radius;
    radius.radius_cap = r_bar;
    const BallResult grown = static_ball(inst, l, CostMetric::free_flow, radius);
    out.expanded.reserve(grown.order.size());
    for (const auto& s : grown.order) out.expanded.push_back(s.vertex);
    return out;
}

} // namespace tdo
