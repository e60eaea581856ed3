// Command-line driver: generate, profile, preprocess, query, bench, verify.
// JSON lines go to stdout for scripts; human summaries go to stderr.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tdo/bisect.hpp"
#include "tdo/errors.hpp"
#include "tdo/flat.hpp"
#include "tdo/horn.hpp"
#include "tdo/instance.hpp"
#include "tdo/parallel.hpp"
#include "tdo/query.hpp"
#include "tdo/rng.hpp"
#include "tdo/tdd.hpp"
#include "tdo/trap.hpp"
#include "tdo/tuning.hpp"

using nlohmann::json;

namespace {

using namespace tdo;

json profile_to_json(const MetricProfile& p) {
    return json{{"max_descent", p.max_descent},
                {"max_ascent", p.max_ascent},
                {"opposite_ratio", p.opposite_ratio},
                {"expansion_factor", p.expansion_factor},
                {"rank_exponent", p.rank_exponent},
                {"rank_factor", p.rank_factor},
                {"distance_factor", p.distance_factor},
                {"diam_exponent", p.diam_exponent},
                {"free_flow_diameter", p.free_flow_diameter},
                {"max_arc_cost", p.max_arc_cost},
                {"breakpoint_total", p.breakpoint_total},
                {"breakpoint_max", p.breakpoint_max},
                {"spoiling_total", p.spoiling_total},
                {"sample_pairs", p.sample_pairs},
                {"sample_times", p.sample_times},
                {"slope_safety", p.slope_safety}};
}

GeneratorConfig config_from_json(const json& j) {
    GeneratorConfig cfg;
    if (j.contains("n")) cfg.n = j["n"].get<long>();
    if (j.contains("avg_degree")) cfg.avg_degree = j["avg_degree"].get<double>();
    if (j.contains("breakpoints_min")) cfg.breakpoints_min = j["breakpoints_min"].get<int>();
    if (j.contains("breakpoints_max")) cfg.breakpoints_max = j["breakpoints_max"].get<int>();
    if (j.contains("spoiling_fraction")) cfg.spoiling_fraction = j["spoiling_fraction"].get<double>();
    if (j.contains("max_slope_target")) cfg.max_slope_target = j["max_slope_target"].get<double>();
    if (j.contains("opposite_ratio_target"))
        cfg.opposite_ratio_target = j["opposite_ratio_target"].get<double>();
    if (j.contains("relative_amplitude"))
        cfg.relative_amplitude = j["relative_amplitude"].get<double>();
    if (j.contains("topology")) {
        const std::string topo = j["topology"].get<std::string>();
        if (topo == "grid") cfg.topology = GeneratorConfig::Topology::grid;
        else if (topo == "geometric" || topo == "random-geometric")
            cfg.topology = GeneratorConfig::Topology::random_geometric;
        else throw UsageError("unknown topology '" + topo + "'");
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    return cfg;
}

struct PreprocessArgs {
    std::string instance_path;
    std::string mode = "flat";
    std::string out_path;
    std::string params = "auto"; // auto | path to a JSON params file
    double eps = 0.5;
    double delta = 0.66;
    double beta = 0.1;
    double gamma = 2.0;
    int levels = 0;
    int budget = -1; // -1: from tuner
    std::uint64_t seed = 1;
    int workers = 0;
    double slope_safety = 1.25;
    bool explicit_eps = false;
};

TuningParams params_from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open params file " + path);
    json j;
    is >> j;
    TuningParams p;
    p.eps = j.value("eps", p.eps);
    p.period_exponent = j.value("period_exponent", p.period_exponent);
    p.landmark_exponent = j.value("landmark_exponent", p.landmark_exponent);
    p.radius_exponent = j.value("radius_exponent", p.radius_exponent);
    p.diam_exponent = j.value("diam_exponent", p.diam_exponent);
    p.query_exponent = j.value("query_exponent", p.query_exponent);
    p.preproc_exponent = j.value("preproc_exponent", p.preproc_exponent);
    p.recursion_budget = j.value("recursion_budget", p.recursion_budget);
    p.level_growth = j.value("level_growth", p.level_growth);
    p.levels = j.value("levels", p.levels);
    p.nearby_exponent = j.value("nearby_exponent", p.nearby_exponent);
    if (j.contains("coverage_slack"))
        p.coverage_slack = j["coverage_slack"].get<std::vector<double>>();
    return p;
}

int cmd_preprocess(const PreprocessArgs& a) {
    const TdInstance inst = TdInstance::load(a.instance_path);
    const double n = static_cast<double>(inst.vertex_count());
    if (n < 2) throw UsageError("preprocess: instance too small");
    const double alpha = std::log(inst.period()) / std::log(n);

    ProfileOptions popts;
    popts.seed = a.seed;
    popts.slope_safety = a.slope_safety;
    const MetricProfile profile = estimate_profile(inst, popts);
    const double psi =
        stretch_constants(a.eps, profile.opposite_ratio, profile.max_ascent, 0).fca_constant;

    TuningParams params;
    if (a.params == "auto") {
        if (a.mode == "flat")
            params = tune_flat(n, alpha, profile.diam_exponent, a.eps, psi, a.delta, a.beta);
        else if (a.mode == "traponly")
            params = tune_traponly(n, alpha, profile.diam_exponent, a.eps, psi, a.delta, a.beta);
        else if (a.mode == "horn")
            params = tune_horn(n, alpha, profile.diam_exponent, a.eps, a.gamma, a.levels, a.delta,
                               a.beta, profile);
        else
            throw UsageError("preprocess: unknown mode '" + a.mode + "'");
        if (a.budget >= 0) {
            params.recursion_budget = a.budget;
            params.landmark_exponent = a.delta / static_cast<double>(a.budget + 1);
        }
    } else {
        params = params_from_file(a.params);
        if (a.explicit_eps) params.eps = a.eps;
        params.period_exponent = alpha;
        params.diam_exponent = profile.diam_exponent;
        if (a.budget >= 0) params.recursion_budget = a.budget;
    }

    const int workers = a.workers > 0 ? a.workers : default_workers();
    BuildReport report;
    OracleStore store;
    if (a.mode == "flat")
        store = preprocess_flat(inst, params, profile, a.seed, workers, &report);
    else if (a.mode == "traponly")
        store = preprocess_traponly(inst, params, profile, a.seed, workers, &report);
    else
        store = preprocess_horn(inst, params, profile, a.seed, workers, &report);

    store.save(a.out_path);

    json out{{"mode", a.mode},
             {"landmarks", report.landmarks},
             {"trap_calls", report.trap_calls},
             {"bis_calls", report.bis_calls},
             {"summaries", report.summary_count},
             {"breakpoints", report.breakpoint_total},
             {"unresolved", report.unresolved},
             {"spot_checks", report.spot_checks},
             {"recursion_budget", params.recursion_budget},
             {"landmark_exponent", params.landmark_exponent},
             {"radius_exponent", params.radius_exponent},
             {"eps", params.eps},
             {"wall_seconds", report.wall_seconds}};
    std::cout << out.dump() << '\n';
    std::cerr << "preprocess " << a.mode << ": " << report.landmarks << " landmarks, "
              << report.summary_count << " summaries, " << report.breakpoint_total
              << " breakpoints, " << report.trap_calls + report.bis_calls << " one-to-all calls in "
              << report.wall_seconds << " s\n";
    for (const auto& w : params.warnings) std::cerr << "warning: " << w << '\n';
    return 0;
}

json result_to_json(const QueryResult& r, double exact_value) {
    json j{{"origin", r.origin},
           {"dest", r.dest},
           {"depart", r.depart},
           {"value", r.value},
           {"exact", r.exact},
           {"termination", to_string(r.termination)},
           {"settled", r.settled}};
    if (exact_value > 0.0) j["stretch"] = r.value / exact_value;
    else j["stretch"] = 1.0;
    if (r.via_landmark >= 0) j["via_landmark"] = r.via_landmark;
    j["exact_suffix"] = r.exact_suffix;
    if (!r.chain.empty()) j["chain"] = r.chain;
    if (r.alh_level > 0) j["alh_level"] = r.alh_level;
    return j;
}

QueryResult run_algo(const QueryEngine& engine, const OracleStore& store, const std::string& algo,
                     int o, int d, double t, int budget) {
    if (algo == "tdd") return engine.exact_tdd(o, d, t);
    if (algo == "fca") {
        if (store.mode == StoreMode::horn) throw UsageError("fca needs a flat or traponly store");
        return engine.fca(o, d, t);
    }
    if (algo == "rqa") {
        if (store.mode != StoreMode::flat) throw UsageError("rqa needs a flat store");
        return engine.rqa(o, d, t, budget);
    }
    if (algo == "rqa+") {
        if (store.mode != StoreMode::traponly) throw UsageError("rqa+ needs a traponly store");
        return engine.rqa(o, d, t, budget);
    }
    if (algo == "hqa") {
        if (store.mode != StoreMode::horn) throw UsageError("hqa needs a horn store");
        return engine.hqa(o, d, t, budget);
    }
    throw UsageError("unknown algorithm '" + algo + "'");
}

int cmd_bench(const std::string& store_path, long queries, std::uint64_t seed,
              const std::string& algo, int budget, const std::string& out_path) {
    const OracleStore store = OracleStore::load(store_path);
    const TdInstance& inst = store.instance;
    const int n = inst.vertex_count();
    if (n < 4) throw UsageError("bench: instance too small");
    QueryEngine engine(store);

    struct Record {
        int o, d;
        double t;
        double exact;
        double reported;
        double stretch;
        long settled;
        long rank;
        std::string termination;
    };
    std::vector<Record> records;
    records.reserve(static_cast<std::size_t>(queries));

    // rank-stratified sampling: log-spaced buckets [2^j, 2^(j+1))
    std::vector<std::pair<long, long>> buckets;
    for (long lo = 2; lo <= n; lo *= 2) buckets.push_back({lo, std::min<long>(lo * 2, n + 1)});
    if (buckets.empty()) throw UsageError("bench: no rank buckets");

    Rng rng = Rng(seed).fork(0x62656e63ULL);
    TddEngine sampler(inst);
    long misses = 0;
    while (static_cast<long>(records.size()) < queries) {
        if (misses > 50 * queries + 100) throw UsageError("bench: too few reachable pairs");
        const int o = static_cast<int>(rng.uniform_int(0, n - 1));
        const double t = rng.uniform(0.0, inst.period());
        const BallResult ball = sampler.run(o, t, CostMetric::time_dependent, {});
        const long reachable = static_cast<long>(ball.order.size());
        bool produced = false;
        for (const auto& [lo, hi] : buckets) {
            if (static_cast<long>(records.size()) >= queries) break;
            if (reachable < lo + 1) continue;
            const long hi_eff = std::min(hi, reachable + 1);
            const long rank = rng.uniform_int(lo, hi_eff - 1);
            const int d = ball.order[static_cast<std::size_t>(rank - 1)].vertex;
            const double exact = ball.dist(d);
            QueryResult res = run_algo(engine, store, algo, o, d, t, budget);
            Record rec;
            rec.o = o;
            rec.d = d;
            rec.t = t;
            rec.exact = exact;
            rec.reported = res.value;
            rec.stretch = exact > 0.0 ? res.value / exact : 1.0;
            rec.settled = res.settled;
            rec.rank = rank;
            rec.termination = to_string(res.termination);
            records.push_back(rec);
            produced = true;
        }
        if (!produced) ++misses;
    }

    // per-bucket aggregates and the settled-vs-rank fit
    auto median = [](std::vector<double> v) {
        if (v.empty()) return 0.0;
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size() / 2;
        return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
    };
    json jbuckets = json::array();
    std::vector<std::pair<double, double>> fit_pts; // (log mid, log median settled)
    for (const auto& [lo, hi] : buckets) {
        std::vector<double> stretches, settleds, ranks;
        for (const auto& r : records) {
            if (r.rank >= lo && r.rank < hi) {
                stretches.push_back(r.stretch);
                settleds.push_back(static_cast<double>(r.settled));
                ranks.push_back(static_cast<double>(r.rank));
            }
        }
        if (stretches.empty()) continue;
        const double mid = 0.5 * static_cast<double>(lo + hi - 1);
        const double med_settled = median(settleds);
        double max_stretch = 0.0;
        for (double s : stretches) max_stretch = std::max(max_stretch, s);
        jbuckets.push_back(json{{"lo", lo},
                                {"hi", hi},
                                {"count", stretches.size()},
                                {"median_stretch", median(stretches)},
                                {"max_stretch", max_stretch},
                                {"median_settled", med_settled}});
        if (med_settled > 0.0) fit_pts.push_back({std::log(mid), std::log(med_settled)});
    }
    double slope = 0.0, intercept = 0.0;
    if (fit_pts.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto [x, y] : fit_pts) {
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double m = static_cast<double>(fit_pts.size());
        const double var = sxx - sx * sx / m;
        if (var > 1e-12) {
            slope = (sxy - sx * sy / m) / var;
            intercept = (sy - slope * sx) / m;
        }
    }

    json report{{"algo", algo},
                {"budget", budget},
                {"seed", seed},
                {"mode", to_string(store.mode)},
                {"n", n},
                {"eps", store.eps},
                {"queries", records.size()},
                {"buckets", jbuckets},
                {"settled_fit", json{{"slope", slope}, {"intercept", intercept},
                                     {"points", fit_pts.size()}}}};
    json jrecords = json::array();
    for (const auto& r : records)
        jrecords.push_back(json{{"o", r.o},
                                {"d", r.d},
                                {"t", r.t},
                                {"exact", r.exact},
                                {"reported", r.reported},
                                {"stretch", r.stretch},
                                {"settled", r.settled},
                                {"rank", r.rank},
                                {"termination", r.termination}});
    report["records"] = jrecords;

    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw IoError("cannot open " + out_path + " for writing");
    os << report.dump(2) << '\n';
    os.close();

    std::ofstream csv(out_path + ".csv", std::ios::binary);
    if (!csv) throw IoError("cannot open " + out_path + ".csv for writing");
    csv << "o,d,t,exact,reported,stretch,settled,rank,termination\n";
    char buf[64];
    for (const auto& r : records) {
        auto num = [&](double x) {
            std::snprintf(buf, sizeof(buf), "%.17g", x);
            return std::string(buf);
        };
        csv << r.o << ',' << r.d << ',' << num(r.t) << ',' << num(r.exact) << ',' << num(r.reported)
            << ',' << num(r.stretch) << ',' << r.settled << ',' << r.rank << ',' << r.termination
            << '\n';
    }
    csv.close();

    std::cerr << "bench " << algo << ": " << records.size() << " queries, fit exponent " << slope
              << "\n";
    return 0;
}

int cmd_verify(const std::string& target) {
    std::ifstream probe(target, std::ios::binary);
    if (!probe) throw IoError("cannot open " + target);
    std::string first;
    std::getline(probe, first);
    probe.close();

    if (first.rfind("tdi", 0) == 0) {
        const TdInstance inst = TdInstance::load(target); // parses + FIFO checks
        for (int i = 0; i < inst.arc_count(); ++i) {
            const Arc& a = inst.arc(i);
            if (a.free_flow != a.cost.min_value() || a.full_congestion != a.cost.max_value())
                throw InvariantError("verify: cached metric mismatch on arc " + std::to_string(i));
        }
        std::cerr << "verify: instance ok (" << inst.vertex_count() << " vertices, "
                  << inst.arc_count() << " arcs)\n";
        return 0;
    }
    if (first.rfind("tdo", 0) == 0) {
        const OracleStore store = OracleStore::load(target);
        const long probes = spot_check_store(store);

        // coverage checks on sampled pairs
        Rng rng(0x76657269ULL);
        const int n = store.instance.vertex_count();
        long coverage_checks = 0;
        for (int trial = 0; trial < 200 && !store.landmarks.empty(); ++trial) {
            const auto& rec = store.landmarks[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<long>(store.landmarks.size()) - 1))];
            const int d = static_cast<int>(rng.uniform_int(0, n - 1));
            if (d == rec.vertex) continue;
            const BallResult ff = static_ball(store.instance, rec.vertex, CostMetric::free_flow,
                                              [&] {
                                                  Stop s;
                                                  s.target = d;
                                                  return s;
                                              }());
            const bool reachable = ff.reason == StopReason::target_settled;
            const bool has = rec.summaries.count(d) != 0;
            ++coverage_checks;
            if (store.mode == StoreMode::flat) {
                if (reachable && !has)
                    throw InvariantError("verify: flat store misses summary " +
                                         std::to_string(rec.vertex) + "->" + std::to_string(d));
            } else if (store.mode == StoreMode::traponly) {
                const bool nearby = reachable && ff.dist(d) <= rec.nearby_radius;
                if (reachable && nearby == has)
                    throw InvariantError("verify: traponly coverage wrong for " +
                                         std::to_string(rec.vertex) + "->" + std::to_string(d));
                if (!reachable && has)
                    throw InvariantError("verify: traponly stores unreachable destination");
            }
        }

        // profile re-estimation drift: a fresh raw estimate must stay within
        // the declared (safety-inflated) slope bounds
        ProfileOptions popts;
        popts.origins = 8;
        popts.time_grid = 16;
        popts.seed = 0xd41f7eULL;
        const MetricProfile fresh = estimate_profile(store.instance, popts);
        if (fresh.max_ascent > store.profile.max_ascent * 1.5 + 0.25)
            throw InvariantError("verify: profile drift, measured ascent exceeds declared bound");
        if (fresh.max_descent > std::min(0.999999, store.profile.max_descent * 1.5 + 0.25))
            throw InvariantError("verify: profile drift, measured descent exceeds declared bound");

        std::cerr << "verify: store ok (" << store.landmarks.size() << " landmarks, " << probes
                  << " sandwich probes, " << coverage_checks << " coverage probes)\n";
        return 0;
    }
    throw UsageError("verify: unrecognized file header in " + target);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-dependent shortest-path distance oracles"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic TDI instance");
    std::string gen_config, gen_out;
    std::uint64_t gen_seed = 0;
    bool gen_seed_set = false;
    double gen_alpha = 0.5;
    gen->add_option("--config", gen_config, "generator config (JSON)")->required();
    gen->add_option("--out", gen_out, "output instance path")->required();
    gen->add_option("--seed", gen_seed, "seed override")->each([&](const std::string&) {
        gen_seed_set = true;
    });
    gen->add_option("--alpha", gen_alpha, "period exponent for normalization; 0 skips");

    // profile
    auto* prof = app.add_subcommand("profile", "estimate the metric profile of an instance");
    std::string prof_instance;
    ProfileOptions prof_opts;
    prof->add_option("--instance", prof_instance)->required();
    prof->add_option("--origins", prof_opts.origins);
    prof->add_option("--times", prof_opts.time_grid);
    prof->add_option("--seed", prof_opts.seed);
    prof->add_option("--slope-safety", prof_opts.slope_safety);
    prof->add_option("--ratio-safety", prof_opts.ratio_safety);

    // preprocess
    auto* prep = app.add_subcommand("preprocess", "build an oracle store");
    PreprocessArgs pa;
    prep->add_option("--instance", pa.instance_path)->required();
    prep->add_option("--mode", pa.mode, "traponly | flat | horn")->required();
    prep->add_option("--out", pa.out_path)->required();
    prep->add_option("--params", pa.params, "auto or a JSON params file");
    prep->add_option("--eps", pa.eps)->each([&](const std::string&) { pa.explicit_eps = true; });
    prep->add_option("--delta", pa.delta);
    prep->add_option("--beta", pa.beta);
    prep->add_option("--gamma", pa.gamma);
    prep->add_option("--levels", pa.levels);
    prep->add_option("--budget", pa.budget);
    prep->add_option("--seed", pa.seed);
    prep->add_option("--workers", pa.workers);
    prep->add_option("--slope-safety", pa.slope_safety);

    // query
    auto* q = app.add_subcommand("query", "answer one query");
    std::string q_store, q_algo = "fca";
    int q_from = 0, q_to = 0, q_budget = 0;
    double q_at = 0.0;
    q->add_option("--store", q_store)->required();
    q->add_option("--from", q_from)->required();
    q->add_option("--to", q_to)->required();
    q->add_option("--at", q_at)->required();
    q->add_option("--algo", q_algo, "tdd | fca | rqa | rqa+ | hqa");
    q->add_option("--budget", q_budget);

    // bench
    auto* b = app.add_subcommand("bench", "rank-stratified benchmark");
    std::string b_store, b_algo = "fca", b_out;
    long b_queries = 100;
    std::uint64_t b_seed = 1;
    int b_budget = 0;
    b->add_option("--store", b_store)->required();
    b->add_option("--queries", b_queries);
    b->add_option("--seed", b_seed);
    b->add_option("--algo", b_algo);
    b->add_option("--budget", b_budget);
    b->add_option("--out", b_out)->required();

    // verify
    auto* v = app.add_subcommand("verify", "check instance or store invariants");
    std::string v_target;
    v->add_option("--target", v_target)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) {
            std::ifstream is(gen_config);
            if (!is) throw IoError("cannot open config " + gen_config);
            json j;
            is >> j;
            GeneratorConfig cfg = config_from_json(j);
            if (gen_seed_set) cfg.seed = gen_seed;
            double alpha = j.value("alpha", gen_alpha);
            if (gen->count("--alpha")) alpha = gen_alpha;
            TdInstance inst = generate(cfg);
            if (alpha > 0.0) inst = normalize_period(inst, alpha);
            inst.save(gen_out);
            std::cerr << "generate: n=" << inst.vertex_count() << " m=" << inst.arc_count()
                      << " T=" << inst.period() << "\n";
            std::cout << json{{"n", inst.vertex_count()},
                              {"m", inst.arc_count()},
                              {"period", inst.period()},
                              {"spoiling", inst.spoiling_total()}}
                             .dump()
                      << '\n';
            return 0;
        }
        if (prof->parsed()) {
            const TdInstance inst = TdInstance::load(prof_instance);
            const MetricProfile p = estimate_profile(inst, prof_opts);
            std::cout << profile_to_json(p).dump() << '\n';
            return 0;
        }
        if (prep->parsed()) return cmd_preprocess(pa);
        if (q->parsed()) {
            const OracleStore store = OracleStore::load(q_store);
            QueryEngine engine(store);
            const QueryResult res = run_algo(engine, store, q_algo, q_from, q_to, q_at, q_budget);
            double exact = res.value;
            if (!res.exact) exact = engine.exact_tdd(q_from, q_to, q_at).value;
            std::cout << result_to_json(res, exact).dump() << '\n';
            return 0;
        }
        if (b->parsed()) return cmd_bench(b_store, b_queries, b_seed, b_algo, b_budget, b_out);
        if (v->parsed()) return cmd_verify(v_target);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const NoPathError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const InvariantError& e) {
        std::cerr << "violation: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
