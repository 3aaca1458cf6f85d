// ============================================================================
// stratsynth/validate.hpp — structural rule checks for strategies
// ============================================================================
//
// Checks a complete strategy against the construction rules the synthesizer
// obeys. Violations are data, not failures: the caller decides what to do.
//
//   R1  every execution path ends in a solver-wrapper tactic, and no tactic
//       follows a solver wrapper
//   R2  try-for never nests inside another try-for
//   R3  if appears only within the first three depths of the syntax tree and
//       never after a tactic application
//   R5  nla2bv at most once per sequence of tactic applications
//   R6  bit-blast only immediately after simplify
//
// Path semantics: an execution path picks one branch at every or-else/if.
// or-else arms both start from the goal as it was when the or-else began, so
// tactics inside a failed first arm do not count towards the second arm.
//
// ============================================================================

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "stratsynth/catalog.hpp"
#include "stratsynth/strategy.hpp"

namespace stratsynth {

enum class Rule : std::uint8_t { R1, R2, R3, R5, R6 };

inline const char* rule_name(Rule r) {
    switch (r) {
        case Rule::R1: return "R1";
        case Rule::R2: return "R2";
        case Rule::R3: return "R3";
        case Rule::R5: return "R5";
        case Rule::R6: return "R6";
    }
    return "?";
}

struct Violation {
    Rule rule;
    std::string detail;
};

namespace detail {

struct ValidateCtx {
    int depth = 0;
    bool in_try_for = false;
    bool after_tactic = false;
    int nla2bv_count = 0;
    std::string last_tactic;
};

class Validator {
  public:
    Validator(const TacticCatalog& catalog, int max_if_depth)
        : catalog_(catalog), max_if_depth_(max_if_depth) {}

    std::vector<Violation> run(const StrategyNode& root) {
        walk(root, ValidateCtx{});
        // One entry per violated rule, in rule order.
        std::vector<Violation> out;
        std::sort(found_.begin(), found_.end(),
                  [](const Violation& a, const Violation& b) { return a.rule < b.rule; });
        for (auto& v : found_)
            if (out.empty() || out.back().rule != v.rule) out.push_back(std::move(v));
        return out;
    }

  private:
    void application_checks(const std::string& tactic, const ValidateCtx& ctx) {
        if (tactic == "nla2bv" && ctx.nla2bv_count >= 1)
            report(Rule::R5, "nla2bv applied more than once in a sequence");
        if (tactic == "bit-blast" && ctx.last_tactic != "simplify")
            report(Rule::R6, "bit-blast not immediately after simplify");
    }

    void walk(const StrategyNode& n, ValidateCtx ctx) {
        switch (n.kind) {
            case StrategyKind::tactic:
            case StrategyKind::using_params:
                // Terminal application of this path.
                application_checks(n.tactic, ctx);
                if (!catalog_.is_solver_wrapper(n.tactic))
                    report(Rule::R1, "path ends in non-solver tactic " + n.tactic);
                return;
            case StrategyKind::then: {
                const std::string& head = n.child0->tactic;
                application_checks(head, ctx);
                if (catalog_.is_solver_wrapper(head))
                    report(Rule::R1, "tactic follows solver wrapper " + head);
                ValidateCtx tail = ctx;
                tail.depth += 1;
                tail.after_tactic = true;
                tail.last_tactic = head;
                if (head == "nla2bv") tail.nla2bv_count += 1;
                walk(*n.child1, tail);
                return;
            }
            case StrategyKind::or_else: {
                ValidateCtx child = ctx;
                child.depth += 1;
                walk(*n.child0, child);
                walk(*n.child1, child);
                return;
            }
            case StrategyKind::try_for: {
                if (ctx.in_try_for) report(Rule::R2, "nested try-for");
                ValidateCtx child = ctx;
                child.depth += 1;
                child.in_try_for = true;
                walk(*n.child0, child);
                return;
            }
            case StrategyKind::ite: {
                if (ctx.depth >= max_if_depth_)
                    report(Rule::R3, "if at depth " + std::to_string(ctx.depth));
                if (ctx.after_tactic) report(Rule::R3, "if after a tactic application");
                ValidateCtx child = ctx;
                child.depth += 1;
                walk(*n.child0, child);
                walk(*n.child1, child);
                return;
            }
        }
    }

    void report(Rule rule, std::string detail) { found_.push_back({rule, std::move(detail)}); }

    const TacticCatalog& catalog_;
    int max_if_depth_;
    std::vector<Violation> found_;
};

}  // namespace detail

inline std::vector<Violation> validate(const StrategyNode& root, const TacticCatalog& catalog,
                                       int max_if_depth = 3) {
    return detail::Validator(catalog, max_if_depth).run(root);
}

inline bool violates(const std::vector<Violation>& vs, Rule r) {
    for (const auto& v : vs)
        if (v.rule == r) return true;
    return false;
}

}  // namespace stratsynth
