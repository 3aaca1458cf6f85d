// ============================================================================
// stratsynth/scoring.hpp — PAR-k scores, rewards, classification, VBS
// ============================================================================

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stratsynth/errors.hpp"
#include "stratsynth/instance.hpp"
#include "stratsynth/record.hpp"

namespace stratsynth {

using Outcome = std::pair<SolveResult, std::int64_t>;  // (result, wall_ms)

// Penalized average runtime in seconds: solved records contribute their wall
// time, everything else (unknown/timeout/error) is charged k times the
// timeout.
inline double par_score(const std::vector<Outcome>& outcomes, std::int64_t timeout_ms, int k) {
    if (outcomes.empty()) throw EmptySetError{};
    double total = 0.0;
    for (const auto& [result, wall_ms] : outcomes) {
        if (is_solved(result))
            total += static_cast<double>(wall_ms) / 1000.0;
        else
            total += static_cast<double>(k) * static_cast<double>(timeout_ms) / 1000.0;
    }
    return total / static_cast<double>(outcomes.size());
}

inline double par_score(const std::vector<EvalRecord>& records, std::int64_t timeout_ms, int k) {
    std::vector<Outcome> outcomes;
    outcomes.reserve(records.size());
    for (const EvalRecord& r : records) outcomes.emplace_back(r.result, r.wall_ms);
    return par_score(outcomes, timeout_ms, k);
}

// Linear map of PAR-10 onto [0, 1]: 0 when nothing is solved, 1 when
// everything solves instantly.
inline double reward_from_par10(double par10_s, std::int64_t timeout_ms) {
    return 1.0 - par10_s / (10.0 * static_cast<double>(timeout_ms) / 1000.0);
}

// ── Classification ──────────────────────────────────────────────────────────

enum class Classification : std::uint8_t { correct, wrong, unsolved };

inline const char* classification_text(Classification c) {
    switch (c) {
        case Classification::correct: return "correct";
        case Classification::wrong: return "wrong";
        case Classification::unsolved: return "unsolved";
    }
    return "?";
}

inline Classification classify(SolveResult result, Status expected) {
    if (!is_solved(result)) return Classification::unsolved;
    if (expected == Status::unknown) return Classification::correct;
    const bool says_sat = result == SolveResult::sat;
    const bool expected_sat = expected == Status::sat;
    return says_sat == expected_sat ? Classification::correct : Classification::wrong;
}

inline Classification classify(const EvalRecord& record, Status expected) {
    return classify(record.result, expected);
}

// ── ScoreReport ─────────────────────────────────────────────────────────────

struct InstanceRow {
    std::string instance_id;
    SolveResult result = SolveResult::unknown;
    std::int64_t wall_ms = 0;
    Classification classification = Classification::unsolved;
};

struct ScoreReport {
    std::string strategy;       // rendered text
    std::string strategy_key;
    std::int64_t timeout_ms = 0;
    int total = 0;
    int solved = 0;   // returned sat or unsat
    int correct = 0;
    int wrong = 0;
    double percent_solved = 0.0;  // correctly solved, as a percentage
    double par2 = 0.0;
    double par10 = 0.0;
    std::vector<InstanceRow> rows;
};

// Builds a report from per-instance outcomes; `outcomes[i]` belongs to
// `instances[i]`.
inline ScoreReport build_score_report(std::string strategy_text, std::string strategy_key,
                                      const std::vector<Outcome>& outcomes,
                                      const std::vector<Instance>& instances,
                                      std::int64_t timeout_ms) {
    if (outcomes.size() != instances.size())
        throw Error("score report: outcome/instance count mismatch");
    ScoreReport rep;
    rep.strategy = std::move(strategy_text);
    rep.strategy_key = std::move(strategy_key);
    rep.timeout_ms = timeout_ms;
    rep.total = static_cast<int>(outcomes.size());
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& [result, wall_ms] = outcomes[i];
        InstanceRow row;
        row.instance_id = instances[i].id;
        row.result = result;
        row.wall_ms = wall_ms;
        row.classification = classify(result, instances[i].expected_status);
        if (is_solved(result)) rep.solved += 1;
        if (row.classification == Classification::correct) rep.correct += 1;
        if (row.classification == Classification::wrong) rep.wrong += 1;
        rep.rows.push_back(std::move(row));
    }
    if (rep.total > 0) {
        rep.percent_solved = 100.0 * static_cast<double>(rep.correct) / rep.total;
        rep.par2 = par_score(outcomes, timeout_ms, 2);
        rep.par10 = par_score(outcomes, timeout_ms, 10);
    }
    return rep;
}

// ── Virtual best strategy ───────────────────────────────────────────────────
// PAR-10 of the oracle that, per instance, runs the best strategy of the set
// with zero overhead. Requires a cached record for every pair.

inline double vbs_par10(const std::vector<std::string>& strategy_keys,
                        const std::vector<Instance>& instances, const EvalCache& cache,
                        std::int64_t timeout_ms) {
    if (instances.empty()) throw EmptySetError{};
    std::vector<Outcome> best;
    best.reserve(instances.size());
    for (const Instance& inst : instances) {
        Outcome pick{SolveResult::timeout, timeout_ms};
        bool solved = false;
        for (const std::string& key : strategy_keys) {
            const EvalRecord* rec = cache.find(key, inst.id, timeout_ms);
            if (rec == nullptr) throw MissingRecordError(key, inst.id);
            if (is_solved(rec->result) && (!solved || rec->wall_ms < pick.second)) {
                pick = {rec->result, rec->wall_ms};
                solved = true;
            }
        }
        best.push_back(pick);
    }
    return par_score(best, timeout_ms, 10);
}

}  // namespace stratsynth
