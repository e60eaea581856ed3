#include "tdo/flat.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "tdo/bisect.hpp"
#include "tdo/errors.hpp"
#include "tdo/parallel.hpp"
#include "tdo/rng.hpp"
#include "tdo/tdd.hpp"
#include "tdo/trap.hpp"

namespace tdo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace

std::string to_string(StoreMode m) {
    switch (m) {
        case StoreMode::traponly: return "traponly";
        case StoreMode::flat: return "flat";
        default: return "horn";
    }
}

StoreMode store_mode_from_string(const std::string& s) {
    if (s == "traponly") return StoreMode::traponly;
    if (s == "flat") return StoreMode::flat;
    if (s == "horn") return StoreMode::horn;
    throw UsageError("unknown store mode '" + s + "'");
}

bool is_informed(const LandmarkRecord& rec, int dest) {
    return dest == rec.vertex || rec.summaries.count(dest) != 0;
}

void OracleStore::finalize() {
    const int n = instance.vertex_count();
    landmark_flag_.assign(static_cast<std::size_t>(n), 0);
    records_at_.assign(static_cast<std::size_t>(n), {});
    int max_level = 0;
    for (const auto& rec : landmarks) max_level = std::max(max_level, rec.level);
    level_flag_.assign(static_cast<std::size_t>(max_level) + 1, {});
    for (auto& lf : level_flag_) lf.assign(static_cast<std::size_t>(n), 0);
    for (std::size_t i = 0; i < landmarks.size(); ++i) {
        const auto& rec = landmarks[i];
        landmark_flag_[static_cast<std::size_t>(rec.vertex)] = 1;
        level_flag_[static_cast<std::size_t>(rec.level)][static_cast<std::size_t>(rec.vertex)] = 1;
        records_at_[static_cast<std::size_t>(rec.vertex)].push_back(static_cast<int>(i));
    }
}

const std::vector<char>& OracleStore::level_flags(int level) const {
    return level_flag_.at(static_cast<std::size_t>(level));
}

const std::vector<int>& OracleStore::records_at(int vertex) const {
    return records_at_[static_cast<std::size_t>(vertex)];
}

const PwlFunction* OracleStore::summary(int landmark_vertex, int dest) const {
    for (int idx : records_at(landmark_vertex)) {
        const auto& rec = landmarks[static_cast<std::size_t>(idx)];
        auto it = rec.summaries.find(dest);
        if (it != rec.summaries.end()) return &it->second;
    }
    return nullptr;
}

std::vector<int> sample_landmarks(const TdInstance& inst, double rho, std::uint64_t seed) {
    if (!(rho > 0.0 && rho <= 1.0)) throw UsageError("sample_landmarks: rho must be in (0,1]");
    auto draw = [&](std::uint64_t tag) {
        Rng rng = Rng(seed).fork(tag);
        std::vector<int> out;
        for (int v = 0; v < inst.vertex_count(); ++v)
            if (rng.bernoulli(rho)) out.push_back(v);
        return out;
    };
    std::vector<int> l = draw(0x6c616e64ULL);
    if (l.empty()) l = draw(0x6c616e65ULL); // one retry with a fresh stream
    if (l.empty()) throw InvariantError("sample_landmarks: empty landmark set twice; instance too small");
    return l;
}

namespace {

// Induced subgraph on `members` (original vertex ids, any order).
struct Subgraph {
    TdInstance graph;
    std::vector<int> to_orig;
    std::vector<int> to_sub; // -1 when absent
};

Subgraph induced_subgraph(const TdInstance& inst, const std::vector<int>& members) {
    Subgraph sg;
    sg.to_orig = members;
    std::sort(sg.to_orig.begin(), sg.to_orig.end());
    sg.to_sub.assign(static_cast<std::size_t>(inst.vertex_count()), -1);
    for (std::size_t i = 0; i < sg.to_orig.size(); ++i)
        sg.to_sub[static_cast<std::size_t>(sg.to_orig[i])] = static_cast<int>(i);
    std::vector<std::pair<std::pair<int, int>, PwlFunction>> arcs;
    for (int v : sg.to_orig) {
        for (int aid : inst.out_arcs(v)) {
            const Arc& a = inst.arc(aid);
            const int hs = sg.to_sub[static_cast<std::size_t>(a.head)];
            if (hs < 0) continue;
            arcs.push_back({{sg.to_sub[static_cast<std::size_t>(a.tail)], hs}, a.cost});
        }
    }
    InstanceOptions opts;
    opts.check_fifo = false; // arcs were validated on the full instance
    sg.graph = TdInstance(static_cast<int>(sg.to_orig.size()), inst.period(), std::move(arcs), opts);
    return sg;
}

void merge_report(BuildReport& into, const BuildReport& from) {
    into.trap_calls += from.trap_calls;
    into.bis_calls += from.bis_calls;
    into.summary_count += from.summary_count;
    into.breakpoint_total += from.breakpoint_total;
    into.unresolved += from.unresolved;
    into.worst_mae_excess = std::max(into.worst_mae_excess, from.worst_mae_excess);
}

void count_summaries(const LandmarkRecord& rec, BuildReport& rep) {
    rep.summary_count += static_cast<long>(rec.summaries.size());
    for (const auto& [d, f] : rec.summaries) rep.breakpoint_total += static_cast<long>(f.size());
}

} // namespace

LandmarkRecord build_flat_landmark(const TdInstance& inst, int l, double nearby_radius, double eps,
                                   const MetricProfile& profile, int level, BuildReport* report) {
    LandmarkRecord rec;
    rec.vertex = l;
    rec.level = level;
    rec.nearby_radius = nearby_radius;

    const BallResult ff = static_ball(inst, l, CostMetric::free_flow);
    std::vector<int> nearby, faraway, ball_members{l};
    for (const auto& s : ff.order) {
        if (s.vertex == l) continue;
        if (s.dist <= nearby_radius) {
            nearby.push_back(s.vertex);
            ball_members.push_back(s.vertex);
        } else {
            faraway.push_back(s.vertex);
        }
    }

    // Expanded ball: the bisection may restrict itself to this subgraph
    // without changing any travel time toward a nearby destination.
    const int n = inst.vertex_count();
    std::vector<char> member_flag(static_cast<std::size_t>(n), 0);
    for (int v : ball_members) member_flag[static_cast<std::size_t>(v)] = 1;
    Stop await;
    await.await_set = &member_flag;
    await.await_count = static_cast<long>(ball_members.size());
    const BallResult cong = static_ball(inst, l, CostMetric::full_congestion, await);
    double congestion_radius = 0.0;
    for (int v : ball_members) congestion_radius = std::max(congestion_radius, cong.dist(v));
    Stop radius;
    radius.radius_cap = congestion_radius;
    const BallResult grown = static_ball(inst, l, CostMetric::free_flow, radius);
    std::vector<int> expanded;
    expanded.reserve(grown.order.size());
    for (const auto& s : grown.order) expanded.push_back(s.vertex);
    rec.expanded_cap = static_cast<long>(expanded.size());

    BuildReport local;
    if (!nearby.empty()) {
        Subgraph sg = induced_subgraph(inst, expanded);
        std::vector<int> sub_dests;
        sub_dests.reserve(nearby.size());
        for (int v : nearby) sub_dests.push_back(sg.to_sub[static_cast<std::size_t>(v)]);
        const BisBuild bis = bis_build(sg.graph, sg.to_sub[static_cast<std::size_t>(l)], sub_dests,
                                       eps, profile);
        local.bis_calls += bis.tdd_calls;
        local.unresolved += static_cast<long>(bis.unresolved.size());
        for (std::size_t i = 0; i < sub_dests.size(); ++i) {
            auto it = bis.summaries.find(sub_dests[i]);
            rec.summaries.emplace(nearby[i], it->second);
        }
    }

    if (!faraway.empty()) {
        TrapOptions topts;
        topts.forced_width = (profile.max_ascent > 0.0)
                                 ? nearby_radius / ((1.0 + 1.0 / eps) * profile.max_ascent)
                                 : kInf;
        const TrapBuild trap = build_summaries(inst, l, faraway, eps, profile, topts);
        local.trap_calls += trap.tdd_calls;
        local.worst_mae_excess = std::max(local.worst_mae_excess, trap.worst_mae_excess);
        rec.trap_width = trap.grid_width;
        for (auto& [d, f] : trap.summaries) rec.summaries.emplace(d, f);
    }

    count_summaries(rec, local);
    if (report) merge_report(*report, local);
    return rec;
}

namespace {

LandmarkRecord build_traponly_landmark(const TdInstance& inst, int l, double nearby_radius,
                                       double eps, const MetricProfile& profile,
                                       BuildReport* report) {
    LandmarkRecord rec;
    rec.vertex = l;
    rec.level = 0;
    rec.nearby_radius = nearby_radius;

    const BallResult ff = static_ball(inst, l, CostMetric::free_flow);
    std::vector<int> faraway;
    long ball_size = 0;
    for (const auto& s : ff.order) {
        if (s.vertex != l && s.dist > nearby_radius) faraway.push_back(s.vertex);
        else ++ball_size;
    }

    const ExpandedBall eb = expanded_ball(inst, l, ball_size);
    rec.expanded_cap = static_cast<long>(eb.expanded.size());

    BuildReport local;
    if (!faraway.empty()) {
        TrapOptions topts;
        topts.forced_width = (profile.max_ascent > 0.0)
                                 ? nearby_radius / ((1.0 + 1.0 / eps) * profile.max_ascent)
                                 : kInf;
        const TrapBuild trap = build_summaries(inst, l, faraway, eps, profile, topts);
        local.trap_calls += trap.tdd_calls;
        local.worst_mae_excess = std::max(local.worst_mae_excess, trap.worst_mae_excess);
        rec.trap_width = trap.grid_width;
        for (auto& [d, f] : trap.summaries) rec.summaries.emplace(d, f);
    }
    count_summaries(rec, local);
    if (report) merge_report(*report, local);
    return rec;
}

OracleStore preprocess_fully_informed(const TdInstance& inst, const TuningParams& params,
                                      const MetricProfile& profile, std::uint64_t seed, int workers,
                                      BuildReport* report, StoreMode mode) {
    const auto t0 = std::chrono::steady_clock::now();
    const double n = static_cast<double>(inst.vertex_count());
    if (inst.vertex_count() == 0) throw UsageError("preprocess: empty instance");
    const double rho = std::pow(n, -params.landmark_exponent);
    const double radius = std::pow(inst.period(), params.radius_exponent);

    OracleStore store;
    store.mode = mode;
    store.eps = params.eps;
    store.seed = seed;
    store.params = params;
    store.profile = profile;
    store.instance = inst;
    store.nearby_radius_global = radius;

    const std::vector<int> lset = sample_landmarks(inst, rho, seed);
    store.landmarks.resize(lset.size());
    std::vector<BuildReport> reports(lset.size());
    parallel_for(lset.size(), workers, [&](std::size_t i) {
        if (mode == StoreMode::flat)
            store.landmarks[i] =
                build_flat_landmark(inst, lset[i], radius, params.eps, profile, 0, &reports[i]);
        else
            store.landmarks[i] =
                build_traponly_landmark(inst, lset[i], radius, params.eps, profile, &reports[i]);
    });

    BuildReport rep;
    rep.landmarks = static_cast<long>(lset.size());
    for (const auto& r : reports) merge_report(rep, r);

    // F = max over landmarks of the nearby ball size.
    long max_nearby = 0;
    {
        TddEngine engine(inst);
        for (const auto& rec : store.landmarks) {
            Stop radius_stop;
            radius_stop.radius_cap = radius;
            const BallResult b = engine.run(rec.vertex, 0.0, CostMetric::free_flow, radius_stop);
            max_nearby = std::max(max_nearby, static_cast<long>(b.order.size()));
        }
    }
    store.max_nearby = max_nearby;

    store.finalize();
    rep.spot_checks = spot_check_store(store); // throws on a sandwich violation
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (report) *report = rep;
    return store;
}

} // namespace

OracleStore preprocess_traponly(const TdInstance& inst, const TuningParams& params,
                                const MetricProfile& profile, std::uint64_t seed, int workers,
                                BuildReport* report) {
    return preprocess_fully_informed(inst, params, profile, seed, workers, report,
                                     StoreMode::traponly);
}

OracleStore preprocess_flat(const TdInstance& inst, const TuningParams& params,
                            const MetricProfile& profile, std::uint64_t seed, int workers,
                            BuildReport* report) {
    return preprocess_fully_informed(inst, params, profile, seed, workers, report, StoreMode::flat);
}

long spot_check_store(const OracleStore& store, double pair_fraction, int times_per_pair,
                      std::uint64_t seed) {
    // Enumerate (record, dest) pairs deterministically, then probe a sample.
    std::vector<std::pair<int, int>> pairs; // (record idx, dest)
    for (std::size_t i = 0; i < store.landmarks.size(); ++i)
        for (const auto& [d, f] : store.landmarks[i].summaries) pairs.push_back({static_cast<int>(i), d});
    if (pairs.empty()) return 0;

    long want = static_cast<long>(std::ceil(pair_fraction * static_cast<double>(pairs.size())));
    want = std::max<long>(std::min<long>(want, 500), std::min<long>(20, static_cast<long>(pairs.size())));

    Rng rng(seed);
    std::vector<std::size_t> chosen;
    for (long i = 0; i < want; ++i)
        chosen.push_back(static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(pairs.size()) - 1)));
    std::sort(chosen.begin(), chosen.end());
    chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());

    TddEngine engine(store.instance);
    long probes = 0;
    for (std::size_t idx : chosen) {
        const auto [ri, dest] = pairs[idx];
        const LandmarkRecord& rec = store.landmarks[static_cast<std::size_t>(ri)];
        const PwlFunction& f = rec.summaries.at(dest);
        for (int k = 0; k < times_per_pair; ++k) {
            const double t = rng.uniform(0.0, store.instance.period());
            Stop stop;
            stop.target = dest;
            const BallResult b = engine.run(rec.vertex, t, CostMetric::time_dependent, stop);
            if (b.reason != StopReason::target_settled)
                throw InvariantError("spot check: stored destination unreachable");
            const double exact = b.dist(dest);
            const double approx = f.eval(t);
            ++probes;
            const double tol = 1e-9 * std::max(1.0, exact);
            if (approx < exact - tol)
                throw InvariantError("spot check: summary below exact travel time for landmark " +
                                     std::to_string(rec.vertex) + " dest " + std::to_string(dest));
            if (approx > (1.0 + store.eps) * exact + tol)
                throw InvariantError("spot check: summary exceeds (1+eps) bound for landmark " +
                                     std::to_string(rec.vertex) + " dest " + std::to_string(dest));
        }
    }
    return probes;
}

// --- serialization ---------------------------------------------------------

void OracleStore::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    save(os);
    if (!os) throw IoError("write failure on " + path);
}

void OracleStore::save(std::ostream& os) const {
    os << "tdo " << to_string(mode) << ' ' << instance.vertex_count() << ' ' << fmt17(eps) << ' '
       << seed << '\n';
    os << "param eps " << fmt17(params.eps) << '\n';
    os << "param period_exponent " << fmt17(params.period_exponent) << '\n';
    os << "param landmark_exponent " << fmt17(params.landmark_exponent) << '\n';
    os << "param radius_exponent " << fmt17(params.radius_exponent) << '\n';
    os << "param diam_exponent " << fmt17(params.diam_exponent) << '\n';
    os << "param query_exponent " << fmt17(params.query_exponent) << '\n';
    os << "param preproc_exponent " << fmt17(params.preproc_exponent) << '\n';
    os << "param recursion_budget " << params.recursion_budget << '\n';
    os << "param level_growth " << fmt17(params.level_growth) << '\n';
    os << "param levels " << params.levels << '\n';
    os << "param nearby_exponent " << fmt17(params.nearby_exponent) << '\n';
    os << "param coverage_slack " << params.coverage_slack.size();
    for (double x : params.coverage_slack) os << ' ' << fmt17(x);
    os << '\n';
    os << "profile max_descent " << fmt17(profile.max_descent) << '\n';
    os << "profile max_ascent " << fmt17(profile.max_ascent) << '\n';
    os << "profile opposite_ratio " << fmt17(profile.opposite_ratio) << '\n';
    os << "profile expansion_factor " << fmt17(profile.expansion_factor) << '\n';
    os << "profile rank_exponent " << fmt17(profile.rank_exponent) << '\n';
    os << "profile rank_factor " << fmt17(profile.rank_factor) << '\n';
    os << "profile distance_factor " << fmt17(profile.distance_factor) << '\n';
    os << "profile diam_exponent " << fmt17(profile.diam_exponent) << '\n';
    os << "profile free_flow_diameter " << fmt17(profile.free_flow_diameter) << '\n';
    os << "profile max_arc_cost " << fmt17(profile.max_arc_cost) << '\n';
    os << "profile breakpoint_total " << profile.breakpoint_total << '\n';
    os << "profile breakpoint_max " << profile.breakpoint_max << '\n';
    os << "profile spoiling_total " << profile.spoiling_total << '\n';
    os << "profile sample_pairs " << profile.sample_pairs << '\n';
    os << "profile sample_times " << profile.sample_times << '\n';
    os << "profile seed " << profile.seed << '\n';
    os << "profile slope_safety " << fmt17(profile.slope_safety) << '\n';
    os << "nearby_radius " << fmt17(nearby_radius_global) << '\n';
    os << "max_nearby " << max_nearby << '\n';
    os << "levels " << levels.size() << '\n';
    for (const auto& lv : levels)
        os << "level " << lv.level << ' ' << fmt17(lv.target_rank) << ' ' << fmt17(lv.sample_prob)
           << ' ' << lv.coverage_size << ' ' << lv.nearby_size << ' ' << fmt17(lv.coverage_slack)
           << '\n';
    os << "instance\n";
    instance.save(os);
    os << "landmarks " << landmarks.size() << '\n';
    for (const auto& rec : landmarks) {
        os << "landmark " << rec.vertex << ' ' << rec.level << ' ' << fmt17(rec.trap_width) << ' '
           << rec.expanded_cap << ' ' << fmt17(rec.nearby_radius) << '\n';
        os << "summary " << rec.vertex << ' ' << rec.summaries.size() << '\n';
        for (const auto& [d, f] : rec.summaries) {
            os << "dest " << d << ' ' << f.size() << '\n';
            for (const auto& p : f.breakpoints()) os << fmt17(p.t) << ' ' << fmt17(p.value) << '\n';
        }
    }
    os << "end\n";
}

OracleStore OracleStore::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    return load(is, path);
}

OracleStore OracleStore::load(std::istream& is, const std::string& name) {
    long line = 0;
    auto fail = [&](const std::string& what) -> ParseError {
        return ParseError(name + ":" + std::to_string(line) + ": " + what);
    };
    auto next = [&](std::string& row) {
        if (!std::getline(is, row)) throw fail("unexpected end of file");
        ++line;
    };

    OracleStore store;
    std::string row;
    next(row);
    {
        std::istringstream ss(row);
        std::string magic, mode;
        long n;
        if (!(ss >> magic >> mode >> n >> store.eps >> store.seed) || magic != "tdo")
            throw fail("expected 'tdo <mode> <n> <eps> <seed>'");
        store.mode = store_mode_from_string(mode);
    }

    // key-value section until "instance"
    for (;;) {
        next(row);
        std::istringstream ss(row);
        std::string kw;
        ss >> kw;
        if (kw == "instance") break;
        if (kw == "param") {
            std::string key;
            ss >> key;
            auto& p = store.params;
            if (key == "eps") ss >> p.eps;
            else if (key == "period_exponent") ss >> p.period_exponent;
            else if (key == "landmark_exponent") ss >> p.landmark_exponent;
            else if (key == "radius_exponent") ss >> p.radius_exponent;
            else if (key == "diam_exponent") ss >> p.diam_exponent;
            else if (key == "query_exponent") ss >> p.query_exponent;
            else if (key == "preproc_exponent") ss >> p.preproc_exponent;
            else if (key == "recursion_budget") ss >> p.recursion_budget;
            else if (key == "level_growth") ss >> p.level_growth;
            else if (key == "levels") ss >> p.levels;
            else if (key == "nearby_exponent") ss >> p.nearby_exponent;
            else if (key == "coverage_slack") {
                std::size_t count = 0;
                ss >> count;
                p.coverage_slack.resize(count);
                for (auto& x : p.coverage_slack) ss >> x;
            } else throw fail("unknown param key '" + key + "'");
            if (!ss) throw fail("bad param line");
        } else if (kw == "profile") {
            std::string key;
            ss >> key;
            auto& f = store.profile;
            if (key == "max_descent") ss >> f.max_descent;
            else if (key == "max_ascent") ss >> f.max_ascent;
            else if (key == "opposite_ratio") ss >> f.opposite_ratio;
            else if (key == "expansion_factor") ss >> f.expansion_factor;
            else if (key == "rank_exponent") ss >> f.rank_exponent;
            else if (key == "rank_factor") ss >> f.rank_factor;
            else if (key == "distance_factor") ss >> f.distance_factor;
            else if (key == "diam_exponent") ss >> f.diam_exponent;
            else if (key == "free_flow_diameter") ss >> f.free_flow_diameter;
            else if (key == "max_arc_cost") ss >> f.max_arc_cost;
            else if (key == "breakpoint_total") ss >> f.breakpoint_total;
            else if (key == "breakpoint_max") ss >> f.breakpoint_max;
            else if (key == "spoiling_total") ss >> f.spoiling_total;
            else if (key == "sample_pairs") ss >> f.sample_pairs;
            else if (key == "sample_times") ss >> f.sample_times;
            else if (key == "seed") ss >> f.seed;
            else if (key == "slope_safety") ss >> f.slope_safety;
            else throw fail("unknown profile key '" + key + "'");
            if (!ss) throw fail("bad profile line");
        } else if (kw == "nearby_radius") {
            if (!(ss >> store.nearby_radius_global)) throw fail("bad nearby_radius");
        } else if (kw == "max_nearby") {
            if (!(ss >> store.max_nearby)) throw fail("bad max_nearby");
        } else if (kw == "levels") {
            std::size_t count = 0;
            if (!(ss >> count)) throw fail("bad levels count");
            store.levels.resize(count);
            for (auto& lv : store.levels) {
                next(row);
                std::istringstream ls(row);
                std::string lkw;
                if (!(ls >> lkw >> lv.level >> lv.target_rank >> lv.sample_prob >> lv.coverage_size >>
                      lv.nearby_size >> lv.coverage_slack) ||
                    lkw != "level")
                    throw fail("bad level line");
            }
        } else {
            throw fail("unknown section '" + kw + "'");
        }
    }

    store.instance = TdInstance::load(is, name);
    // TdInstance::load consumed its own lines; keep our counter coarse.
    next(row);
    {
        std::istringstream ss(row);
        std::string kw;
        std::size_t count = 0;
        if (!(ss >> kw >> count) || kw != "landmarks") throw fail("expected 'landmarks <count>'");
        store.landmarks.resize(count);
    }
    for (auto& rec : store.landmarks) {
        next(row);
        {
            std::istringstream ss(row);
            std::string kw;
            if (!(ss >> kw >> rec.vertex >> rec.level >> rec.trap_width >> rec.expanded_cap >>
                  rec.nearby_radius) ||
                kw != "landmark")
                throw fail("expected landmark record");
        }
        next(row);
        std::size_t dest_count = 0;
        {
            std::istringstream ss(row);
            std::string kw;
            int vertex = 0;
            if (!(ss >> kw >> vertex >> dest_count) || kw != "summary" || vertex != rec.vertex)
                throw fail("expected summary header");
        }
        for (std::size_t j = 0; j < dest_count; ++j) {
            next(row);
            std::istringstream ss(row);
            std::string kw;
            int dest = 0;
            std::size_t k = 0;
            if (!(ss >> kw >> dest >> k) || kw != "dest") throw fail("expected dest header");
            std::vector<Breakpoint> pts(k);
            for (auto& p : pts) {
                next(row);
                std::istringstream bp(row);
                if (!(bp >> p.t >> p.value)) throw fail("bad summary breakpoint");
            }
            rec.summaries.emplace(dest, PwlFunction(std::move(pts), store.instance.period()));
        }
    }
    next(row);
    if (row != "end") throw fail("expected trailing 'end'");
    store.finalize();
    return store;
}

} // namespace tdo
