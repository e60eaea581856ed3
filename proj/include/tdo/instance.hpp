#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tdo/pwl.hpp"

namespace tdo {

struct Arc {
    int tail;
    int head;
    PwlFunction cost;
    double free_flow;       // min cost over the period
    double full_congestion; // max cost over the period
};

struct InstanceOptions {
    bool check_fifo = true;
};

/// Directed time-dependent network. Immutable after construction; the cached
/// free-flow/full-congestion scalars per arc are derived from the cost
/// functions at build time.
class TdInstance {
public:
    TdInstance(); // empty graph, period 1
    TdInstance(int n, double period, std::vector<std::pair<std::pair<int, int>, PwlFunction>> arcs,
               const InstanceOptions& opts = {});

    int vertex_count() const { return n_; }
    int arc_count() const { return static_cast<int>(arcs_.size()); }
    double period() const { return period_; }
    const Arc& arc(int id) const { return arcs_[static_cast<std::size_t>(id)]; }
    const std::vector<Arc>& arcs() const { return arcs_; }

    /// Ids of arcs leaving v, in construction order.
    const std::vector<int>& out_arcs(int v) const { return out_[static_cast<std::size_t>(v)]; }

    double max_cost() const { return max_cost_; }
    long breakpoint_total() const;
    long breakpoint_max() const;
    long spoiling_total() const;

    bool strongly_connected() const;

    void save(const std::string& path) const;
    void save(std::ostream& os) const;
    static TdInstance load(const std::string& path);
    static TdInstance load(std::istream& is, const std::string& name = "<stream>");

private:
    int n_ = 0;
    double period_ = 1.0;
    std::vector<Arc> arcs_;
    std::vector<std::vector<int>> out_;
    double max_cost_ = 0.0;
};

struct GeneratorConfig {
    long n = 100;
    double avg_degree = 4.0; // average out-degree target; refused above 10
    int breakpoints_min = 4;
    int breakpoints_max = 8;
    double spoiling_fraction = 0.3;     // 0 -> constant arc costs
    double max_slope_target = 0.2;      // per-arc slope bound
    double opposite_ratio_target = 1.5; // cost ratio between arc directions
    double relative_amplitude = 0.25;   // value swing as a fraction of base cost
    enum class Topology { random_geometric, grid } topology = Topology::random_geometric;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Synthetic strongly connected instance with FIFO costs, bounded arc slopes
/// and a controlled count of concavity-spoiling breakpoints.
TdInstance generate(const GeneratorConfig& cfg);

/// Rescales the instance so that the period equals n^alpha and still covers
/// the free-flow diameter (tiling the cost functions first if it does not).
/// Shortest-path structure is preserved: both axes scale by the same factor.
TdInstance normalize_period(const TdInstance& inst, double alpha);

/// Upper bound on the free-flow diameter via two Dijkstra sweeps through a
/// hub vertex (exact diameters need all-pairs, too slow for large n).
double free_flow_diameter_upper(const TdInstance& inst);

} // namespace tdo
