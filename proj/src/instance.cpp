#include "tdo/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

#include "tdo/errors.hpp"
#include "tdo/rng.hpp"

namespace tdo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Scalar Dijkstra over a weight-per-arc view; enough for diameters and
// connectivity work inside this module. The tdd module has the full engine.
std::vector<double> scalar_dijkstra(const TdInstance& inst, int source, bool reverse) {
    const int n = inst.vertex_count();
    std::vector<double> dist(static_cast<std::size_t>(n), kInf);
    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
    for (const auto& a : inst.arcs()) {
        if (reverse)
            adj[static_cast<std::size_t>(a.head)].push_back({a.tail, a.free_flow});
        else
            adj[static_cast<std::size_t>(a.tail)].push_back({a.head, a.free_flow});
    }
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[static_cast<std::size_t>(source)] = 0.0;
    pq.push({0.0, source});
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[static_cast<std::size_t>(v)]) continue;
        for (auto [w, c] : adj[static_cast<std::size_t>(v)]) {
            if (d + c < dist[static_cast<std::size_t>(w)]) {
                dist[static_cast<std::size_t>(w)] = d + c;
                pq.push({d + c, w});
            }
        }
    }
    return dist;
}

} // namespace

TdInstance::TdInstance() = default;

TdInstance::TdInstance(int n, double period,
                       std::vector<std::pair<std::pair<int, int>, PwlFunction>> arcs,
                       const InstanceOptions& opts)
    : n_(n), period_(period) {
    if (n < 0) throw InvariantError("instance: negative vertex count");
    if (!(period > 0.0)) throw InvariantError("instance: period must be positive");
    out_.assign(static_cast<std::size_t>(n), {});
    arcs_.reserve(arcs.size());
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        const int tail = arcs[i].first.first;
        const int head = arcs[i].first.second;
        PwlFunction& cost = arcs[i].second;
        if (tail < 0 || tail >= n || head < 0 || head >= n)
            throw InvariantError("instance: arc " + std::to_string(i) + " endpoint out of range");
        if (std::fabs(cost.period() - period) > 1e-9 * period)
            throw InvariantError("instance: arc " + std::to_string(i) + " period mismatch");
        if (opts.check_fifo && !cost.fifo_valid())
            throw InvariantError("instance: arc " + std::to_string(i) + " violates FIFO (slope < -1)");
        const double lo = cost.min_value();
        const double hi = cost.max_value();
        max_cost_ = std::max(max_cost_, hi);
        out_[static_cast<std::size_t>(tail)].push_back(static_cast<int>(i));
        arcs_.push_back(Arc{tail, head, std::move(cost), lo, hi});
    }
}

long TdInstance::breakpoint_total() const {
    long k = 0;
    for (const auto& a : arcs_) k += static_cast<long>(a.cost.size());
    return k;
}

long TdInstance::breakpoint_max() const {
    long k = 0;
    for (const auto& a : arcs_) k = std::max(k, static_cast<long>(a.cost.size()));
    return k;
}

long TdInstance::spoiling_total() const {
    long k = 0;
    for (const auto& a : arcs_) k += a.cost.count_concavity_spoiling();
    return k;
}

bool TdInstance::strongly_connected() const {
    if (n_ == 0) return true;
    // Two depth-first sweeps from vertex 0, forward and over reversed arcs.
    auto sweep = [&](const std::vector<std::vector<int>>& adj) {
        std::vector<char> seen(static_cast<std::size_t>(n_), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int w : adj[static_cast<std::size_t>(v)]) {
                if (!seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = 1;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        return count;
    };
    std::vector<std::vector<int>> fwd(static_cast<std::size_t>(n_)), bwd(static_cast<std::size_t>(n_));
    for (const auto& a : arcs_) {
        fwd[static_cast<std::size_t>(a.tail)].push_back(a.head);
        bwd[static_cast<std::size_t>(a.head)].push_back(a.tail);
    }
    return sweep(fwd) == n_ && sweep(bwd) == n_;
}

void TdInstance::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    save(os);
    if (!os) throw IoError("write failure on " + path);
}

void TdInstance::save(std::ostream& os) const {
    os << "tdi 1 " << n_ << ' ' << arcs_.size() << ' ' << fmt17(period_) << '\n';
    for (const auto& a : arcs_) {
        os << "arc " << a.tail << ' ' << a.head << ' ' << a.cost.size() << '\n';
        for (const auto& p : a.cost.breakpoints())
            os << fmt17(p.t) << ' ' << fmt17(p.value) << '\n';
    }
}

TdInstance TdInstance::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    return load(is, path);
}

TdInstance TdInstance::load(std::istream& is, const std::string& name) {
    auto fail = [&](long line, const std::string& what) -> ParseError {
        return ParseError(name + ":" + std::to_string(line) + ": " + what);
    };
    long line = 0;
    std::string row;
    if (!std::getline(is, row)) throw fail(1, "empty file");
    ++line;
    std::istringstream head(row);
    std::string magic;
    int version = 0;
    long n = 0, m = 0;
    double period = 0.0;
    if (!(head >> magic >> version >> n >> m >> period) || magic != "tdi" || version != 1)
        throw fail(line, "expected header 'tdi 1 <n> <m> <T>'");
    if (n < 0 || m < 0 || !(period > 0.0)) throw fail(line, "invalid header values");

    std::vector<std::pair<std::pair<int, int>, PwlFunction>> arcs;
    arcs.reserve(static_cast<std::size_t>(m));
    for (long i = 0; i < m; ++i) {
        if (!std::getline(is, row)) throw fail(line + 1, "unexpected end of file in arc block");
        ++line;
        std::istringstream ah(row);
        std::string kw;
        long tail = 0, headv = 0, k = 0;
        if (!(ah >> kw >> tail >> headv >> k) || kw != "arc")
            throw fail(line, "expected 'arc <tail> <head> <K>'");
        if (k < 1) throw fail(line, "arc must have at least one breakpoint");
        std::vector<Breakpoint> pts;
        pts.reserve(static_cast<std::size_t>(k));
        for (long j = 0; j < k; ++j) {
            if (!std::getline(is, row)) throw fail(line + 1, "unexpected end of file in breakpoints");
            ++line;
            std::istringstream bp(row);
            double t = 0.0, v = 0.0;
            if (!(bp >> t >> v)) throw fail(line, "expected '<t> <value>'");
            pts.push_back({t, v});
        }
        PwlFunction cost = [&]() {
            try {
                return PwlFunction(std::move(pts), period);
            } catch (const InvariantError& e) {
                throw fail(line, std::string("arc ") + std::to_string(i) + ": " + e.what());
            }
        }();
        if (!cost.fifo_valid())
            throw InvariantError(name + ": arc " + std::to_string(i) + " (" + std::to_string(tail) +
                                 "->" + std::to_string(headv) + ") violates FIFO");
        arcs.push_back({{static_cast<int>(tail), static_cast<int>(headv)}, std::move(cost)});
    }
    return TdInstance(static_cast<int>(n), period, std::move(arcs));
}

double free_flow_diameter_upper(const TdInstance& inst) {
    const int n = inst.vertex_count();
    if (n == 0) return 0.0;
    // d(u,v) <= d(u,x) + d(x,v) for any hub x, so one forward and one
    // backward sweep through a hub bound the diameter from above. A few hub
    // candidates keep the bound tight; exact diameters need all-pairs.
    auto bound_through = [&](int hub) {
        const auto fwd = scalar_dijkstra(inst, hub, false);
        const auto bwd = scalar_dijkstra(inst, hub, true);
        double ecc_out = 0.0, ecc_in = 0.0;
        for (int v = 0; v < n; ++v) {
            const double f = fwd[static_cast<std::size_t>(v)];
            const double b = bwd[static_cast<std::size_t>(v)];
            if (std::isfinite(f)) ecc_out = std::max(ecc_out, f);
            if (std::isfinite(b)) ecc_in = std::max(ecc_in, b);
        }
        return ecc_in + ecc_out;
    };
    double best = bound_through(0);
    for (int hub : {n / 4, n / 2, (3 * n) / 4}) {
        if (hub > 0 && hub < n) best = std::min(best, bound_through(hub));
    }
    return best;
}

TdInstance normalize_period(const TdInstance& inst, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("normalize_period: alpha must be in (0,1)");
    if (inst.vertex_count() == 0) return inst;
    const double diam = free_flow_diameter_upper(inst);
    const double t_old = inst.period();
    long copies = 1;
    if (t_old < diam) copies = static_cast<long>(std::ceil(diam / t_old));
    const double t_tiled = t_old * static_cast<double>(copies);
    const double target = std::pow(static_cast<double>(inst.vertex_count()), alpha);
    const double scale = target / t_tiled;

    // Check cost underflow before building anything.
    for (const auto& a : inst.arcs()) {
        if (a.free_flow * scale < 1e-12)
            throw InvariantError("normalize_period: alpha scales minimum arc cost below 1e-12");
    }

    std::vector<std::pair<std::pair<int, int>, PwlFunction>> arcs;
    arcs.reserve(inst.arcs().size());
    for (const auto& a : inst.arcs()) {
        std::vector<Breakpoint> pts;
        pts.reserve(a.cost.size() * static_cast<std::size_t>(copies));
        for (long c = 0; c < copies; ++c) {
            for (const auto& p : a.cost.breakpoints())
                pts.push_back({(p.t + static_cast<double>(c) * t_old) * scale, p.value * scale});
        }
        arcs.push_back({{a.tail, a.head}, PwlFunction(std::move(pts), target)});
    }
    return TdInstance(inst.vertex_count(), target, std::move(arcs));
}

void GeneratorConfig::validate() const {
    if (n < 1) throw UsageError("generator: n must be >= 1");
    if (avg_degree <= 0.0) throw UsageError("generator: avg_degree must be positive");
    if (avg_degree > 10.0)
        throw UsageError("generator: avg_degree > 10 refused; sparse instances only");
    if (topology == Topology::grid && avg_degree < 3.0)
        throw UsageError("generator: grid topology yields average degree near 4");
    if (breakpoints_min < 1 || breakpoints_max < breakpoints_min)
        throw UsageError("generator: bad breakpoint range");
    if (spoiling_fraction < 0.0 || spoiling_fraction > 1.0)
        throw UsageError("generator: spoiling_fraction must be in [0,1]");
    if (max_slope_target < 0.0) throw UsageError("generator: max_slope_target must be >= 0");
    if (opposite_ratio_target < 1.0) throw UsageError("generator: opposite_ratio_target must be >= 1");
    if (relative_amplitude <= 0.0 || relative_amplitude >= 0.5)
        throw UsageError("generator: relative_amplitude must be in (0, 0.5)");
}

namespace {

struct UndirectedEdge {
    int u, v;
    double length;
};

struct Topology {
    std::vector<UndirectedEdge> edges;
    double typical_length;
};

Topology build_random_geometric(long n, double avg_degree, Rng& rng) {
    std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        xs[static_cast<std::size_t>(i)] = rng.uniform();
        ys[static_cast<std::size_t>(i)] = rng.uniform();
    }
    const double pi = 3.14159265358979323846;
    const double radius = std::sqrt(avg_degree / (pi * static_cast<double>(n)));

    // Bucket grid for neighbour search.
    const int cells = std::max(1, static_cast<int>(1.0 / radius));
    const double cell = 1.0 / cells;
    std::vector<std::vector<int>> grid(static_cast<std::size_t>(cells) * static_cast<std::size_t>(cells));
    auto cell_of = [&](double x, double y) {
        int cx = std::min(cells - 1, static_cast<int>(x / cell));
        int cy = std::min(cells - 1, static_cast<int>(y / cell));
        return static_cast<std::size_t>(cy) * static_cast<std::size_t>(cells) + static_cast<std::size_t>(cx);
    };
    for (long i = 0; i < n; ++i)
        grid[cell_of(xs[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(i)])].push_back(
            static_cast<int>(i));

    Topology topo;
    topo.typical_length = radius;
    auto dist2 = [&](int a, int b) {
        const double dx = xs[static_cast<std::size_t>(a)] - xs[static_cast<std::size_t>(b)];
        const double dy = ys[static_cast<std::size_t>(a)] - ys[static_cast<std::size_t>(b)];
        return dx * dx + dy * dy;
    };
    for (long i = 0; i < n; ++i) {
        const int cx = std::min(cells - 1, static_cast<int>(xs[static_cast<std::size_t>(i)] / cell));
        const int cy = std::min(cells - 1, static_cast<int>(ys[static_cast<std::size_t>(i)] / cell));
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = cx + dx, ny = cy + dy;
                if (nx < 0 || ny < 0 || nx >= cells || ny >= cells) continue;
                for (int j : grid[static_cast<std::size_t>(ny) * static_cast<std::size_t>(cells) +
                                  static_cast<std::size_t>(nx)]) {
                    if (j <= i) continue;
                    const double d2 = dist2(static_cast<int>(i), j);
                    if (d2 <= radius * radius)
                        topo.edges.push_back({static_cast<int>(i), j, std::sqrt(d2)});
                }
            }
        }
    }

    // Connect components through nearest cross pairs; keeps the layout road-like.
    std::vector<int> parent(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    auto unite = [&](int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); };
    for (const auto& e : topo.edges) unite(e.u, e.v);
    for (;;) {
        // group vertices by root
        std::vector<int> root(static_cast<std::size_t>(n));
        int base = find(0);
        bool connected = true;
        for (long i = 0; i < n; ++i) {
            root[static_cast<std::size_t>(i)] = find(static_cast<int>(i));
            if (root[static_cast<std::size_t>(i)] != base) connected = false;
        }
        if (connected) break;
        // nearest pair between the base component and the rest
        int best_a = -1, best_b = -1;
        double best = kInf;
        for (long a = 0; a < n; ++a) {
            if (root[static_cast<std::size_t>(a)] != base) continue;
            for (long b = 0; b < n; ++b) {
                if (root[static_cast<std::size_t>(b)] == base) continue;
                const double d2 = dist2(static_cast<int>(a), static_cast<int>(b));
                if (d2 < best) {
                    best = d2;
                    best_a = static_cast<int>(a);
                    best_b = static_cast<int>(b);
                }
            }
        }
        topo.edges.push_back({best_a, best_b, std::sqrt(best)});
        unite(best_a, best_b);
    }
    return topo;
}

Topology build_grid(long n) {
    const long side = std::max<long>(1, static_cast<long>(std::llround(std::sqrt(static_cast<double>(n)))));
    const long rows = (n + side - 1) / side;
    Topology topo;
    topo.typical_length = 1.0;
    auto id = [&](long r, long c) { return r * side + c; };
    for (long r = 0; r < rows; ++r) {
        for (long c = 0; c < side; ++c) {
            const long v = id(r, c);
            if (v >= n) break;
            if (c + 1 < side && id(r, c + 1) < n)
                topo.edges.push_back({static_cast<int>(v), static_cast<int>(id(r, c + 1)), 1.0});
            if (r + 1 < rows && id(r + 1, c) < n)
                topo.edges.push_back({static_cast<int>(v), static_cast<int>(id(r + 1, c)), 1.0});
        }
    }
    return topo;
}

// Cyclic shape in [-1, 1] with exactly `valleys` slope-increase junctions.
// Extremes alternate valley/peak; between them the values follow a ramp that
// is concave in time, so only valley junctions see a slope increase.
std::vector<double> shape_values(int k, int valleys, const std::vector<double>& times,
                                 double period, Rng& rng) {
    const double pi = 3.14159265358979323846;
    std::vector<double> shape(static_cast<std::size_t>(k), 0.0);
    // choose 2*valleys extreme positions among k junctions
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    // deterministic partial shuffle
    for (int i = 0; i < 2 * valleys; ++i) {
        const int j = static_cast<int>(rng.uniform_int(i, k - 1));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    std::vector<int> extremes(idx.begin(), idx.begin() + 2 * valleys);
    std::sort(extremes.begin(), extremes.end());
    // alternate starting with a valley
    for (std::size_t e = 0; e < extremes.size(); ++e) {
        const bool is_valley = (e % 2 == 0);
        shape[static_cast<std::size_t>(extremes[e])] = is_valley ? -1.0 : 1.0;
    }
    // fill runs between consecutive extremes (cyclically) with concave ramps;
    // the ramp parameter is the time fraction, so slopes decrease through the
    // run for any breakpoint spacing
    const int m = static_cast<int>(extremes.size());
    for (int e = 0; e < m; ++e) {
        const int a = extremes[static_cast<std::size_t>(e)];
        const int b = extremes[static_cast<std::size_t>((e + 1) % m)];
        const double va = shape[static_cast<std::size_t>(a)];
        const double vb = shape[static_cast<std::size_t>(b)];
        const int steps = ((b - a) % k + k) % k;
        if (steps <= 1) continue;
        const double ta = times[static_cast<std::size_t>(a)];
        const double run_len = std::fmod(times[static_cast<std::size_t>(b)] - ta + period, period);
        for (int s = 1; s < steps; ++s) {
            const int pos = (a + s) % k;
            const double frac =
                std::fmod(times[static_cast<std::size_t>(pos)] - ta + period, period) / run_len;
            double t;
            if (vb > va) t = std::sin(0.5 * pi * frac);        // ascending, concave
            else t = 1.0 - std::cos(0.5 * pi * frac);          // descending, concave
            shape[static_cast<std::size_t>(pos)] = va + (vb - va) * t;
        }
    }
    return shape;
}

} // namespace

TdInstance generate(const GeneratorConfig& cfg) {
    cfg.validate();
    Rng master(cfg.seed);
    Rng topo_rng = master.fork(0x746f706fULL);
    Rng cost_rng = master.fork(0x636f7374ULL);

    Topology topo = (cfg.topology == GeneratorConfig::Topology::grid)
                        ? build_grid(cfg.n)
                        : build_random_geometric(cfg.n, cfg.avg_degree, topo_rng);

    // Base scalar costs, scaled so every arc value stays >= 1 even at the
    // bottom of its swing (costs live in [1, M]).
    const std::size_t m_und = topo.edges.size();
    std::vector<double> base(m_und);
    double min_base = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < m_und; ++e) {
        const double rel =
            std::clamp(topo.edges[e].length / topo.typical_length, 0.45, 1.25);
        base[e] = rel * cost_rng.uniform(0.95, 1.05);
        min_base = std::min(min_base, base[e]);
    }
    const double cost_scale = 1.0 / (min_base * (1.0 - cfg.relative_amplitude));
    for (auto& b : base) b *= cost_scale;

    // Period: upper bound on the free-flow diameter from the base costs.
    // Build a throwaway constant-cost instance for the sweep.
    double period;
    {
        std::vector<std::pair<std::pair<int, int>, PwlFunction>> tmp;
        tmp.reserve(m_und * 2);
        for (std::size_t e = 0; e < m_und; ++e) {
            tmp.push_back({{topo.edges[e].u, topo.edges[e].v}, PwlFunction::constant(base[e], 1.0)});
            tmp.push_back({{topo.edges[e].v, topo.edges[e].u}, PwlFunction::constant(base[e], 1.0)});
        }
        TdInstance flat(static_cast<int>(cfg.n), 1.0, std::move(tmp));
        period = std::max(1.0, 1.05 * free_flow_diameter_upper(flat));
    }

    const double slope_budget = std::min(cfg.max_slope_target, 0.9);
    std::vector<std::pair<std::pair<int, int>, PwlFunction>> arcs;
    arcs.reserve(m_und * 2);
    for (std::size_t e = 0; e < m_und; ++e) {
        const int u = topo.edges[e].u;
        const int v = topo.edges[e].v;
        const double ratio = cost_rng.uniform(1.0, cfg.opposite_ratio_target);
        const bool flip = cost_rng.bernoulli(0.5);

        PwlFunction fast = [&]() {
            if (cfg.spoiling_fraction == 0.0 || slope_budget == 0.0)
                return PwlFunction::constant(base[e], period);
            const int k = static_cast<int>(cost_rng.uniform_int(cfg.breakpoints_min, cfg.breakpoints_max));
            if (k < 2) return PwlFunction::constant(base[e], period);
            int valleys = static_cast<int>(std::llround(cfg.spoiling_fraction * k));
            valleys = std::max(1, std::min(valleys, k / 2));
            // breakpoint times: t=0 plus k-1 spaced uniforms
            std::vector<double> times(static_cast<std::size_t>(k));
            times[0] = 0.0;
            const double min_gap = 0.02 * period / static_cast<double>(k);
            for (;;) {
                for (int i = 1; i < k; ++i)
                    times[static_cast<std::size_t>(i)] = cost_rng.uniform(min_gap, period - min_gap);
                std::sort(times.begin() + 1, times.end());
                bool ok = true;
                for (int i = 0; i + 1 < k; ++i)
                    if (times[static_cast<std::size_t>(i + 1)] - times[static_cast<std::size_t>(i)] < min_gap)
                        ok = false;
                if (ok) break;
            }
            const auto shape = shape_values(k, valleys, times, period, cost_rng);
            // steepest junction-to-junction slope with unit amplitude
            double steep = 0.0;
            for (int i = 0; i < k; ++i) {
                const double dt = (i + 1 < k) ? times[static_cast<std::size_t>(i + 1)] - times[static_cast<std::size_t>(i)]
                                              : period - times[static_cast<std::size_t>(k - 1)] + times[0];
                const double dv = shape[static_cast<std::size_t>((i + 1) % k)] - shape[static_cast<std::size_t>(i)];
                steep = std::max(steep, std::fabs(dv) / dt);
            }
            double amplitude = cfg.relative_amplitude * base[e];
            const double use = cost_rng.uniform(0.6, 1.0);
            if (steep > 0.0) amplitude = std::min(amplitude, use * slope_budget / steep);
            std::vector<Breakpoint> pts(static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i)
                pts[static_cast<std::size_t>(i)] = {times[static_cast<std::size_t>(i)],
                                                    base[e] + amplitude * shape[static_cast<std::size_t>(i)]};
            return PwlFunction(std::move(pts), period);
        }();

        // Opposite direction: constant additive offset keeps slopes identical,
        // so the slope bound and FIFO carry over unchanged.
        const double offset = (ratio - 1.0) * base[e];
        PwlFunction slow = [&]() {
            std::vector<Breakpoint> pts = fast.breakpoints();
            for (auto& p : pts) p.value += offset;
            return PwlFunction(std::move(pts), period);
        }();

        if (!flip) {
            arcs.push_back({{u, v}, fast});
            arcs.push_back({{v, u}, slow});
        } else {
            arcs.push_back({{u, v}, slow});
            arcs.push_back({{v, u}, fast});
        }
    }

    TdInstance inst(static_cast<int>(cfg.n), period, std::move(arcs));
    if (!inst.strongly_connected())
        throw InvariantError("generator: produced instance is not strongly connected");
    return inst;
}

} // namespace tdo
