#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tdo/instance.hpp"
#include "tdo/tuning.hpp"

namespace tdo {

enum class StoreMode { traponly, flat, horn };

std::string to_string(StoreMode m);
StoreMode store_mode_from_string(const std::string& s);

/// One landmark hierarchy level (HORN); FLAT/TRAPONLY stores keep none.
struct LevelParams {
    int level = 0;           // 1..k, or k+1 for the ultimate level
    double target_rank = 0;  // N_i
    double sample_prob = 0;  // rho_i
    long coverage_size = 0;  // c_i
    long nearby_size = 0;    // F_i
    double coverage_slack = 0; // xi_i
};

struct LandmarkRecord {
    int vertex = -1;
    int level = 0;            // 0 in flat/traponly stores
    double trap_width = 0.0;  // departure-time grid width used for the summaries
    long expanded_cap = 0;    // |expanded ball|; RQA+ suffix-ball cap
    double nearby_radius = 0.0;
    std::map<int, PwlFunction> summaries; // destination -> upper-approximation
};

/// Frozen preprocessing output. Embeds the instance so that queries and
/// benchmarks are self-contained; immutable after construction or load.
class OracleStore {
public:
    StoreMode mode = StoreMode::flat;
    double eps = 0.5;
    std::uint64_t seed = 0;
    TuningParams params;
    MetricProfile profile;
    TdInstance instance;
    double nearby_radius_global = 0.0; // T^theta
    long max_nearby = 0;               // F = max over landmarks of |nearby ball|
    std::vector<LevelParams> levels;   // horn only
    std::vector<LandmarkRecord> landmarks; // sorted by (level, vertex)

    void finalize(); // builds the lookup indexes below

    const std::vector<char>& landmark_flags() const { return landmark_flag_; }
    const std::vector<char>& level_flags(int level) const;
    /// Records at `vertex` (a vertex can be a landmark on several levels).
    const std::vector<int>& records_at(int vertex) const;
    const LandmarkRecord& record(int idx) const { return landmarks[static_cast<std::size_t>(idx)]; }

    /// Summary lookup for flat/traponly stores (single record per vertex).
    const PwlFunction* summary(int landmark_vertex, int dest) const;

    void save(const std::string& path) const;
    void save(std::ostream& os) const;
    static OracleStore load(const std::string& path);
    static OracleStore load(std::istream& is, const std::string& name = "<stream>");

private:
    std::vector<char> landmark_flag_;
    std::vector<std::vector<char>> level_flag_; // horn, indexed by level
    std::vector<std::vector<int>> records_at_;
};

/// Coverage membership: a HORN landmark is informed about d when it stores a
/// summary for d (every landmark is informed about itself).
bool is_informed(const LandmarkRecord& rec, int dest);

/// Independent Bernoulli(rho) sample per vertex; retried once when empty.
std::vector<int> sample_landmarks(const TdInstance& inst, double rho, std::uint64_t seed);

struct BuildReport {
    long landmarks = 0;
    long trap_calls = 0;
    long bis_calls = 0;
    long summary_count = 0;
    long breakpoint_total = 0;
    long unresolved = 0;       // destinations flagged by the bisection depth cap
    long spot_checks = 0;      // sandwich probes run before the store is frozen
    double worst_mae_excess = 0.0;
    double wall_seconds = 0.0;
};

OracleStore preprocess_traponly(const TdInstance& inst, const TuningParams& params,
                                const MetricProfile& profile, std::uint64_t seed, int workers = 1,
                                BuildReport* report = nullptr);

OracleStore preprocess_flat(const TdInstance& inst, const TuningParams& params,
                            const MetricProfile& profile, std::uint64_t seed, int workers = 1,
                            BuildReport* report = nullptr);

/// Shared per-landmark builder for fully informed landmarks: bisection inside
/// the expanded nearby ball, trapezoidal summaries beyond it. Used by FLAT and
/// by HORN's ultimate level so that a degenerate hierarchy reproduces FLAT.
LandmarkRecord build_flat_landmark(const TdInstance& inst, int l, double nearby_radius, double eps,
                                   const MetricProfile& profile, int level, BuildReport* report);

/// Spot sandwich check over a sample of stored summaries; throws
/// InvariantError on a violation. Returns the number of (pair, time) probes.
long spot_check_store(const OracleStore& store, double pair_fraction = 0.01, int times_per_pair = 8,
                      std::uint64_t seed = 0x5eedc0deULL);

} // namespace tdo
