// ============================================================================
// stratsynth/catalog.hpp — per-logic tactic/probe inventory
// ============================================================================
//
// A TacticCatalog lists the tactics (with candidate parameter values), probes
// (with comparison thresholds), and try-for timeout candidates available to
// the synthesizer for one SMT logic. Catalogs are plain data loaded from JSON
// files; tactic names are accepted verbatim so user-defined tactics work.
//
// ============================================================================

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stratsynth/errors.hpp"
#include "stratsynth/types.hpp"

namespace stratsynth {

enum class TacticKind : std::uint8_t { preprocessing, solver_wrapper };

struct ParamSpec {
    std::string name;
    std::vector<ParamValue> candidates;  // >= 2 entries after catalog load
};

struct TacticSpec {
    std::string name;
    TacticKind kind = TacticKind::preprocessing;
    std::vector<ParamSpec> params;
};

enum class ProbeKind : std::uint8_t { boolean_probe, numeric_probe };

struct ProbeSpec {
    std::string name;
    ProbeKind kind = ProbeKind::numeric_probe;
    std::vector<std::int64_t> thresholds;  // numeric probes only
};

// ── TacticCatalog ───────────────────────────────────────────────────────────

struct TacticCatalog {
    std::string logic;
    std::vector<TacticSpec> tactics;
    std::vector<ProbeSpec> probes;
    std::vector<std::int64_t> try_for_ms;  // may be empty; filled from the timeout

    const TacticSpec* find_tactic(const std::string& name) const {
        for (const auto& t : tactics)
            if (t.name == name) return &t;
        return nullptr;
    }

    const ProbeSpec* find_probe(const std::string& name) const {
        for (const auto& p : probes)
            if (p.name == name) return &p;
        return nullptr;
    }

    bool is_solver_wrapper(const std::string& name) const {
        const TacticSpec* t = find_tactic(name);
        return t != nullptr && t->kind == TacticKind::solver_wrapper;
    }

    std::vector<const TacticSpec*> solver_wrappers() const {
        std::vector<const TacticSpec*> out;
        for (const auto& t : tactics)
            if (t.kind == TacticKind::solver_wrapper) out.push_back(&t);
        return out;
    }

    std::vector<const TacticSpec*> preprocessing_tactics() const {
        std::vector<const TacticSpec*> out;
        for (const auto& t : tactics)
            if (t.kind == TacticKind::preprocessing) out.push_back(&t);
        return out;
    }
};

// ── JSON loading ────────────────────────────────────────────────────────────

inline ParamValue param_value_from_json(const nlohmann::json& j, const std::string& where) {
    if (j.is_boolean()) return ParamValue(j.get<bool>());
    if (j.is_number_integer()) return ParamValue(j.get<std::int64_t>());
    throw ConfigError(where + ": candidate values must be booleans or integers");
}

inline TacticCatalog catalog_from_json(const nlohmann::json& j) {
    TacticCatalog cat;
    if (!j.is_object()) throw ConfigError("catalog: top level must be an object");
    cat.logic = j.value("logic", std::string{});

    for (const auto& jt : j.value("tactics", nlohmann::json::array())) {
        TacticSpec t;
        t.name = jt.at("name").get<std::string>();
        t.kind = jt.value("solver_wrapper", false) ? TacticKind::solver_wrapper
                                                   : TacticKind::preprocessing;
        for (const auto& jp : jt.value("params", nlohmann::json::array())) {
            ParamSpec p;
            p.name = jp.at("name").get<std::string>();
            for (const auto& jc : jp.at("candidates"))
                p.candidates.push_back(param_value_from_json(jc, t.name + ":" + p.name));
            // A parameter with fewer than two candidates offers no choice.
            if (p.candidates.size() >= 2) t.params.push_back(std::move(p));
        }
        if (cat.find_tactic(t.name) != nullptr)
            throw ConfigError("catalog: duplicate tactic name " + t.name);
        cat.tactics.push_back(std::move(t));
    }

    for (const auto& jp : j.value("probes", nlohmann::json::array())) {
        ProbeSpec p;
        p.name = jp.at("name").get<std::string>();
        const std::string kind = jp.at("kind").get<std::string>();
        if (kind == "boolean") {
            p.kind = ProbeKind::boolean_probe;
        } else if (kind == "numeric") {
            p.kind = ProbeKind::numeric_probe;
            for (const auto& jt : jp.value("thresholds", nlohmann::json::array()))
                p.thresholds.push_back(jt.get<std::int64_t>());
            if (p.thresholds.empty())
                throw ConfigError("catalog: numeric probe " + p.name + " needs >= 1 threshold");
        } else {
            throw ConfigError("catalog: probe " + p.name + " has unknown kind " + kind);
        }
        if (cat.find_probe(p.name) != nullptr)
            throw ConfigError("catalog: duplicate probe name " + p.name);
        cat.probes.push_back(std::move(p));
    }

    for (const auto& jt : j.value("try_for_ms", nlohmann::json::array())) {
        const auto ms = jt.get<std::int64_t>();
        if (ms <= 0) throw ConfigError("catalog: try_for_ms entries must be positive");
        cat.try_for_ms.push_back(ms);
    }

    if (cat.solver_wrappers().empty())
        throw ConfigError("catalog: at least one solver_wrapper tactic is required");
    return cat;
}

inline TacticCatalog load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open catalog file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("catalog " + path + ": " + e.what());
    }
    return catalog_from_json(j);
}

// ── Predicate pool ──────────────────────────────────────────────────────────
// All boolean probes, then for each numeric probe x threshold the two
// generated comparisons (> and <=), in catalog order.

inline std::vector<Predicate> predicate_pool(const TacticCatalog& cat) {
    std::vector<Predicate> pool;
    for (const auto& p : cat.probes)
        if (p.kind == ProbeKind::boolean_probe) pool.push_back(Predicate::boolean(p.name));
    for (const auto& p : cat.probes) {
        if (p.kind != ProbeKind::numeric_probe) continue;
        for (std::int64_t k : p.thresholds) {
            pool.push_back(Predicate::compare(p.name, CmpOp::gt, k));
            pool.push_back(Predicate::compare(p.name, CmpOp::le, k));
        }
    }
    return pool;
}

// Default try-for timeout candidates: 1/16, 1/8, 1/4, 1/2 of the evaluation
// timeout, deduplicated (short timeouts can make fractions collide).
inline std::vector<std::int64_t> default_try_for_candidates(std::int64_t timeout_ms) {
    std::vector<std::int64_t> out;
    for (int div : {16, 8, 4, 2}) {
        std::int64_t ms = std::max<std::int64_t>(1, timeout_ms / div);
        if (std::find(out.begin(), out.end(), ms) == out.end()) out.push_back(ms);
    }
    return out;
}

}  // namespace stratsynth
