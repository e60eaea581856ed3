#include "tdo/horn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "tdo/bisect.hpp"
#include "tdo/errors.hpp"
#include "tdo/parallel.hpp"
#include "tdo/rng.hpp"
#include "tdo/tdd.hpp"
#include "tdo/trap.hpp"

namespace tdo {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

LevelTable derive_levels(long n, double gamma, int k, double delta, int r,
                         const std::vector<double>& coverage_slack, double alpha, double nu,
                         const MetricProfile* profile, bool strict) {
    if (n < 1) throw UsageError("derive_levels: n must be >= 1");
    if (!(gamma > 1.0)) throw UsageError("derive_levels: gamma must be > 1");
    if (k < 0) throw UsageError("derive_levels: k must be >= 0");
    if (!(delta > 0.0 && delta < 1.0)) throw UsageError("derive_levels: delta must be in (0,1)");
    if (r < 0) throw UsageError("derive_levels: recursion budget must be >= 0");
    if (static_cast<int>(coverage_slack.size()) != k)
        throw UsageError("derive_levels: need one coverage slack per level 1..k");

    LevelTable table;
    table.nearby_exponent = (1.0 + alpha) / (2.0 + alpha * nu);
    const double nd = static_cast<double>(n);
    const double lower = profile ? coverage_slack_lower_bound(nd, *profile) : 0.0;

    int collapse_at = k + 1; // first level folded into the ultimate one
    for (int i = 1; i <= k; ++i) {
        const double gi = std::pow(gamma, static_cast<double>(i));
        const double upper = 1.0 - 1.0 / gi;
        const double xi = coverage_slack[static_cast<std::size_t>(i - 1)];
        if (!(xi > 0.0) || xi >= upper)
            throw InvariantError("derive_levels: coverage slack for level " + std::to_string(i) +
                                 " outside (0, 1-gamma^-i) = (0, " + std::to_string(upper) + ")");
        if (profile && xi <= lower) {
            const std::string msg = "coverage slack for level " + std::to_string(i) + " (" +
                                    std::to_string(xi) + ") is below the estimated window bound " +
                                    std::to_string(lower);
            if (strict) throw InvariantError("derive_levels: " + msg);
            table.warnings.push_back(msg);
        }

        LevelParams lv;
        lv.level = i;
        lv.target_rank = std::pow(nd, (gi - 1.0) / gi);
        lv.sample_prob = std::pow(lv.target_rank, -delta / static_cast<double>(r + 1));
        lv.coverage_size = static_cast<long>(std::ceil(lv.target_rank * std::pow(nd, xi)));
        lv.coverage_slack = xi;
        if (lv.coverage_size >= n) {
            collapse_at = i;
            table.warnings.push_back("level " + std::to_string(i) +
                                     " coverage reaches the whole graph; collapsing into the ultimate level");
            break;
        }
        lv.nearby_size = std::max<long>(
            1, static_cast<long>(std::ceil(std::pow(static_cast<double>(lv.coverage_size),
                                                    table.nearby_exponent))));
        table.levels.push_back(lv);
    }
    // drop any levels at or above the collapse point
    while (!table.levels.empty() && table.levels.back().level >= collapse_at) table.levels.pop_back();

    LevelParams ult;
    ult.level = static_cast<int>(table.levels.size()) + 1;
    ult.target_rank = nd;
    ult.sample_prob = std::pow(nd, -delta / static_cast<double>(r + 1));
    ult.coverage_size = n;
    ult.nearby_size = std::max<long>(1, static_cast<long>(std::ceil(std::pow(nd, table.nearby_exponent))));
    ult.coverage_slack = 0.0;
    table.levels.push_back(ult);

    // monotonicity sanity over the kept levels
    for (std::size_t i = 0; i + 1 < table.levels.size(); ++i) {
        const auto& a = table.levels[i];
        const auto& b = table.levels[i + 1];
        if (!(a.target_rank < b.target_rank) || !(a.sample_prob > b.sample_prob) ||
            !(a.coverage_size < b.coverage_size))
            throw InvariantError("derive_levels: level parameters not monotone");
    }
    return table;
}

namespace {

// Level 1..k landmark: coverage is the smallest free-flow ball holding c_i
// vertices; the F_i closest get bisection summaries, the rest trapezoidal
// ones with the F_i-ball radius defining the grid width.
LandmarkRecord build_leveled_landmark(const TdInstance& inst, int l, const LevelParams& lv,
                                      double eps, const MetricProfile& profile,
                                      BuildReport* report) {
    LandmarkRecord rec;
    rec.vertex = l;
    rec.level = lv.level;

    Stop size_stop;
    size_stop.size_cap = lv.coverage_size;
    const BallResult cov = static_ball(inst, l, CostMetric::free_flow, size_stop);

    std::vector<int> nearby, faraway;
    double nearby_radius = 0.0;
    for (std::size_t i = 0; i < cov.order.size(); ++i) {
        const auto& s = cov.order[i];
        if (static_cast<long>(i) < lv.nearby_size) {
            nearby_radius = s.dist;
            if (s.vertex != l) nearby.push_back(s.vertex);
        } else {
            faraway.push_back(s.vertex);
        }
    }
    rec.nearby_radius = nearby_radius;

    // expanded subgraph around the nearby ball
    const ExpandedBall eb = expanded_ball(inst, l, std::min<long>(lv.nearby_size,
                                                                  static_cast<long>(cov.order.size())));
    rec.expanded_cap = static_cast<long>(eb.expanded.size());

    BuildReport local;
    if (!nearby.empty()) {
        std::vector<int> members = eb.expanded;
        // the expanded ball always contains the nearby ball; build the subgraph
        std::sort(members.begin(), members.end());
        std::vector<int> to_sub(static_cast<std::size_t>(inst.vertex_count()), -1);
        for (std::size_t i = 0; i < members.size(); ++i)
            to_sub[static_cast<std::size_t>(members[i])] = static_cast<int>(i);
        std::vector<std::pair<std::pair<int, int>, PwlFunction>> arcs;
        for (int v : members) {
            for (int aid : inst.out_arcs(v)) {
                const Arc& a = inst.arc(aid);
                const int hs = to_sub[static_cast<std::size_t>(a.head)];
                if (hs < 0) continue;
                arcs.push_back({{to_sub[static_cast<std::size_t>(a.tail)], hs}, a.cost});
            }
        }
        InstanceOptions opts;
        opts.check_fifo = false;
        TdInstance sub(static_cast<int>(members.size()), inst.period(), std::move(arcs), opts);
        std::vector<int> sub_dests;
        sub_dests.reserve(nearby.size());
        for (int v : nearby) sub_dests.push_back(to_sub[static_cast<std::size_t>(v)]);
        const BisBuild bis =
            bis_build(sub, to_sub[static_cast<std::size_t>(l)], sub_dests, eps, profile);
        local.bis_calls += bis.tdd_calls;
        local.unresolved += static_cast<long>(bis.unresolved.size());
        for (std::size_t i = 0; i < sub_dests.size(); ++i)
            rec.summaries.emplace(nearby[i], bis.summaries.at(sub_dests[i]));
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

    local.summary_count += static_cast<long>(rec.summaries.size());
    for (const auto& [d, f] : rec.summaries) local.breakpoint_total += static_cast<long>(f.size());
    if (report) {
        report->trap_calls += local.trap_calls;
        report->bis_calls += local.bis_calls;
        report->summary_count += local.summary_count;
        report->breakpoint_total += local.breakpoint_total;
        report->unresolved += local.unresolved;
        report->worst_mae_excess = std::max(report->worst_mae_excess, local.worst_mae_excess);
    }
    return rec;
}

} // namespace

OracleStore preprocess_horn(const TdInstance& inst, const TuningParams& params,
                            const MetricProfile& profile, std::uint64_t seed, int workers,
                            BuildReport* report) {
    const auto t0 = std::chrono::steady_clock::now();
    if (inst.vertex_count() == 0) throw UsageError("preprocess: empty instance");
    const long n = inst.vertex_count();

    LevelTable table = derive_levels(n, params.level_growth, params.levels, params.query_exponent,
                                     params.recursion_budget, params.coverage_slack,
                                     params.period_exponent, params.diam_exponent, &profile, false);

    OracleStore store;
    store.mode = StoreMode::horn;
    store.eps = params.eps;
    store.seed = seed;
    store.params = params;
    store.params.nearby_exponent = table.nearby_exponent;
    store.params.warnings.insert(store.params.warnings.end(), table.warnings.begin(),
                                 table.warnings.end());
    store.profile = profile;
    store.instance = inst;
    store.levels = table.levels;
    store.nearby_radius_global = std::pow(inst.period(), params.radius_exponent);

    // One job per (level, landmark vertex); the ultimate level samples with
    // the base seed so a k=0 hierarchy matches a FLAT build exactly.
    struct Job {
        const LevelParams* level;
        int vertex;
        bool ultimate;
    };
    std::vector<Job> jobs;
    const int ultimate_level = static_cast<int>(table.levels.size());
    for (const auto& lv : table.levels) {
        const bool ultimate = (lv.level == ultimate_level);
        const std::uint64_t level_seed =
            ultimate ? seed : Rng(seed).fork(0x6c65766cULL + static_cast<std::uint64_t>(lv.level)).next();
        for (int v : sample_landmarks(inst, lv.sample_prob, level_seed))
            jobs.push_back({&lv, v, ultimate});
    }

    store.landmarks.resize(jobs.size());
    std::vector<BuildReport> reports(jobs.size());
    parallel_for(jobs.size(), workers, [&](std::size_t i) {
        const Job& job = jobs[i];
        if (job.ultimate)
            store.landmarks[i] = build_flat_landmark(inst, job.vertex, store.nearby_radius_global,
                                                     params.eps, profile, job.level->level, &reports[i]);
        else
            store.landmarks[i] =
                build_leveled_landmark(inst, job.vertex, *job.level, params.eps, profile, &reports[i]);
    });

    BuildReport rep;
    rep.landmarks = static_cast<long>(jobs.size());
    for (const auto& r : reports) {
        rep.trap_calls += r.trap_calls;
        rep.bis_calls += r.bis_calls;
        rep.summary_count += r.summary_count;
        rep.breakpoint_total += r.breakpoint_total;
        rep.unresolved += r.unresolved;
        rep.worst_mae_excess = std::max(rep.worst_mae_excess, r.worst_mae_excess);
    }

    store.finalize();
    rep.spot_checks = spot_check_store(store); // throws on a sandwich violation
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (report) *report = rep;
    return store;
}

bool is_informed(const OracleStore& store, int landmark_vertex, int dest) {
    if (dest == landmark_vertex) return true;
    return store.summary(landmark_vertex, dest) != nullptr;
}

} // namespace tdo
