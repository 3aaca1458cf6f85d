// Shared test fixtures: small catalogs and random strategy generation.

#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "stratsynth/catalog.hpp"
#include "stratsynth/mdp.hpp"
#include "stratsynth/parser.hpp"
#include "stratsynth/strategy.hpp"

namespace testsupport {

using namespace stratsynth;

inline TacticCatalog tiny_catalog() {
    static const char* text = R"json({
      "logic": "TEST",
      "tactics": [
        {"name": "simplify", "solver_wrapper": false, "params": [
          {"name": "som", "candidates": [true, false]},
          {"name": "flat", "candidates": [true, false]}
        ]},
        {"name": "propagate-values", "solver_wrapper": false, "params": []},
        {"name": "solve-eqs", "solver_wrapper": false, "params": []},
        {"name": "nla2bv", "solver_wrapper": false, "params": [
          {"name": "nla2bv_max_bv_size", "candidates": [4, 16]}
        ]},
        {"name": "bit-blast", "solver_wrapper": false, "params": []},
        {"name": "smt", "solver_wrapper": true, "params": [
          {"name": "random_seed", "candidates": [0, 1]}
        ]},
        {"name": "sat", "solver_wrapper": true, "params": []},
        {"name": "qfbv", "solver_wrapper": true, "params": []}
      ],
      "probes": [
        {"name": "is-pb", "kind": "boolean"},
        {"name": "num-consts", "kind": "numeric", "thresholds": [100]},
        {"name": "size", "kind": "numeric", "thresholds": [1000, 50000]}
      ],
      "try_for_ms": [250, 500, 1000]
    })json";
    return catalog_from_json(nlohmann::json::parse(text));
}

inline TacticCatalog data_catalog(const std::string& name) {
    return load_catalog(std::string(STRATSYNTH_DATA_DIR) + "/catalogs/" + name);
}

// ── Random valid strategies ─────────────────────────────────────────────────
// Every execution path ends in a solver-wrapper application; names resolve
// against the catalog. Exercises all node kinds and all six comparison
// operators.

inline StrategyRef random_application(std::mt19937_64& rng, const TacticCatalog& cat,
                                      bool solver) {
    const auto tactics = solver ? cat.solver_wrappers() : cat.preprocessing_tactics();
    const TacticSpec* t = tactics[rng() % tactics.size()];
    if (t->params.empty() || (rng() & 1) != 0) return leaf(t->name);
    // Random nonempty subset of parameters, in random order.
    std::vector<std::pair<std::string, ParamValue>> settings;
    for (const ParamSpec& p : t->params)
        settings.emplace_back(p.name, p.candidates[rng() % p.candidates.size()]);
    std::shuffle(settings.begin(), settings.end(), rng);
    settings.resize(1 + rng() % settings.size());
    return with_params(t->name, std::move(settings));
}

inline Predicate random_predicate(std::mt19937_64& rng, const TacticCatalog& cat) {
    std::vector<const ProbeSpec*> booleans, numerics;
    for (const ProbeSpec& p : cat.probes)
        (p.kind == ProbeKind::boolean_probe ? booleans : numerics).push_back(&p);
    if (!booleans.empty() && (numerics.empty() || (rng() % 3) == 0))
        return Predicate::boolean(booleans[rng() % booleans.size()]->name);
    const ProbeSpec* p = numerics[rng() % numerics.size()];
    static const CmpOp ops[] = {CmpOp::gt, CmpOp::lt, CmpOp::ge,
                                CmpOp::le, CmpOp::eq, CmpOp::ne};
    const std::int64_t constant = static_cast<std::int64_t>(rng() % 100000) - 50000;
    return Predicate::compare(p->name, ops[rng() % 6], constant);
}

inline StrategyRef random_ast(std::mt19937_64& rng, const TacticCatalog& cat, int depth) {
    if (depth <= 0) return random_application(rng, cat, /*solver=*/true);
    switch (rng() % 5) {
        case 0:
            return random_application(rng, cat, /*solver=*/true);
        case 1:
            return then(random_application(rng, cat, /*solver=*/false),
                        random_ast(rng, cat, depth - 1));
        case 2:
            return or_else(random_ast(rng, cat, depth - 1), random_ast(rng, cat, depth - 1));
        case 3:
            return try_for(random_ast(rng, cat, depth - 1),
                           1 + static_cast<std::int64_t>(rng() % 60000));
        default:
            return ite(random_predicate(rng, cat), random_ast(rng, cat, depth - 1),
                       random_ast(rng, cat, depth - 1));
    }
}

// Finishes a uniformly random derivation of the MDP.
inline StrategyRef random_terminal(const SynthesisMdp& mdp, std::mt19937_64& rng) {
    DerivationState s = mdp.initial_state();
    while (!s.terminal()) {
        const std::vector<Action> legal = mdp.legal_actions(s);
        s = mdp.apply_action(s, legal[rng() % legal.size()]);
    }
    return mdp.finish(s);
}

// Distinct linear strategies sampled by random rollouts.
inline std::vector<StrategyRef> sample_linear_pool(const TacticCatalog& cat, std::size_t n,
                                                   std::uint64_t seed) {
    StageConfig stage;
    stage.stage = Stage::linear;
    SynthesisMdp mdp(cat, stage);
    std::mt19937_64 rng(seed);
    std::vector<StrategyRef> pool;
    std::vector<std::string> keys;
    while (pool.size() < n) {
        StrategyRef s = random_terminal(mdp, rng);
        const std::string key = canonical_key(*s);
        bool fresh = true;
        for (const std::string& k : keys) fresh = fresh && k != key;
        if (fresh) {
            pool.push_back(std::move(s));
            keys.push_back(key);
        }
    }
    return pool;
}

}  // namespace testsupport
