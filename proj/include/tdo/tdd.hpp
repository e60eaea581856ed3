#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "tdo/instance.hpp"

namespace tdo {

enum class CostMetric { time_dependent, free_flow, full_congestion };

enum class StopReason {
    exhausted,
    target_settled,
    landmark_settled,
    size_reached,
    radius_reached,
    predicate_hit,
    await_done,
};

struct Settled {
    int vertex;
    double dist;
    int parent; // -1 at the origin
};

struct BallResult {
    int origin = -1;
    double depart = 0.0;
    StopReason reason = StopReason::exhausted;
    int stopped_at = -1; // target or landmark that ended the run

    std::vector<Settled> order;   // settle order
    std::vector<int> rank_of;     // 1-based settle index, 0 = unsettled
    std::vector<double> dist_of;  // +inf when unsettled

    bool settled(int v) const { return rank_of[static_cast<std::size_t>(v)] != 0; }
    double dist(int v) const { return dist_of[static_cast<std::size_t>(v)]; }
    long rank(int v) const { return rank_of[static_cast<std::size_t>(v)]; }
};

/// Stop conditions compose; the first one that fires ends the run.
struct Stop {
    int target = -1;
    const std::vector<char>* stop_set = nullptr; // settle any flagged vertex -> stop
    long size_cap = -1;                          // settle exactly this many
    double radius_cap = -1.0;                    // settle everything with dist <= cap
    const std::vector<char>* await_set = nullptr; // stop once await_count members settled
    long await_count = 0;
    std::function<bool(int, double, long)> predicate; // (vertex, dist, rank) -> stop?
};

/// Label-setting shortest-path engine. Ties in the queue break by vertex id,
/// so runs are deterministic. One engine is single-threaded; use one engine
/// per thread for parallel sweeps over the same instance.
class TddEngine {
public:
    explicit TddEngine(const TdInstance& inst);

    BallResult run(int origin, double depart, CostMetric metric, const Stop& stop = {}) const;

private:
    const TdInstance* inst_;
};

BallResult tdsp_one_to_all(const TdInstance& inst, int origin, double depart, const Stop& stop = {});

/// Settle index of dest when running from (origin, depart); -1 if unreachable.
long dijkstra_rank(const TdInstance& inst, int origin, int dest, double depart);

BallResult static_ball(const TdInstance& inst, int origin, CostMetric metric, const Stop& stop = {});

struct ExpandedBall {
    std::vector<int> ball;            // B[l;F] under the free-flow metric, settle order
    std::vector<int> expanded;        // free-flow ball of radius congestion_radius
    double free_flow_radius = 0.0;    // distance of the F-th settled vertex
    double congestion_radius = 0.0;   // max full-congestion distance inside the ball
};

/// Free-flow ball of size F around l, expanded to the full-congestion radius
/// seen inside it.
ExpandedBall expanded_ball(const TdInstance& inst, int l, long F);

} // namespace tdo
