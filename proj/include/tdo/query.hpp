#pragma once

#include <string>
#include <vector>

#include "tdo/flat.hpp"

namespace tdo {

/// Constants governing the query-time guarantees.
/// fca_constant     psi   = 1 + a(1+eps)(1+2z+az) + (1+eps)z   for a = max
///                          ascent, z = opposite ratio
/// rqa_stretch      sigma(r) = eps(1+eps/psi)^(r+1) / ((1+eps/psi)^(r+1)-1)
/// esc_factor       phi   = eps(r+1) / (psi((1+eps/psi)^(r+1)-1))
struct StretchConstants {
    double eps = 0.0;
    double opposite_ratio = 1.0;
    double max_ascent = 0.0;
    int recursion_budget = 0;
    double fca_constant = 0.0;
    double rqa_stretch = 0.0;
    double esc_factor = 0.0;
};

StretchConstants stretch_constants(double eps, double opposite_ratio, double max_ascent,
                                   int recursion_budget);

enum class Termination { exact, landmark, esc, alh_rqa, budget_exhausted };

std::string to_string(Termination t);

struct QueryResult {
    int origin = -1;
    int dest = -1;
    double depart = 0.0;
    double value = 0.0;       // reported upper-approximate travel time
    bool exact = false;       // value equals the exact travel time
    Termination termination = Termination::exact;
    int via_landmark = -1;    // winning landmark, -1 when exact
    bool exact_suffix = false; // winner used an on-the-fly suffix ball (RQA+)
    std::vector<int> chain;   // ball-center chain of the winning candidate
    long settled = 0;         // total settled vertices (work measure)
    int alh_level = 0;        // level fixed by ALH (HQA only)
};

/// Query algorithms over a frozen store. Read-only and safe to share across
/// threads; each call is single-threaded.
class QueryEngine {
public:
    explicit QueryEngine(const OracleStore& store);

    QueryResult exact_tdd(int o, int d, double t) const;

    /// Ball from (o,t) until d or the closest landmark settles; exact value or
    /// prefix + summary via that landmark. Equals rqa with budget 0.
    QueryResult fca(int o, int d, double t) const;

    /// Recursive ball growing with the given budget. On TRAPONLY stores the
    /// RQA+ rule applies: a landmark with no summary for d grows a capped
    /// suffix ball to recover the exact travel time.
    QueryResult rqa(int o, int d, double t, int budget) const;

    /// Hierarchical query: one ball from (o,t) until the destination settles,
    /// the early-stopping rule fires, or an informed landmark pins the
    /// appropriate level, which then runs rqa over that level and above.
    QueryResult hqa(int o, int d, double t, int budget) const;

private:
    struct SuffixEval {
        double value;
        bool exact_suffix;
    };
    struct Candidate {
        double value;
        int landmark;
        bool exact_suffix;
        bool exact_path;
        std::vector<int> chain;
    };
    struct LmView {
        const std::vector<char>* flags;
        int min_level; // 0 = any record
    };

    bool suffix_value(const LmView& view, int landmark, int dest, double arrive, long& settled,
                      SuffixEval* out) const;
    QueryResult rqa_core(int o, int d, double t, int budget, const LmView& view,
                         long settled_so_far, std::vector<Candidate> preset) const;

    const OracleStore* store_;
};

} // namespace tdo
