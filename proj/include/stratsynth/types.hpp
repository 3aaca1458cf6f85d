// ============================================================================
// stratsynth/types.hpp — shared literal types for the strategy language
// ============================================================================

#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace stratsynth {

// A literal tactic-parameter value: boolean or integer.
using ParamValue = std::variant<bool, std::int64_t>;

inline std::string param_value_text(const ParamValue& v) {
    if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
    return std::to_string(std::get<std::int64_t>(v));
}

// ── CmpOp ───────────────────────────────────────────────────────────────────
// Comparison operators usable in predicates. Only gt/le are generated by the
// synthesizer; all six are accepted by the parser.

enum class CmpOp : std::uint8_t { gt, lt, ge, le, eq, ne };

inline const char* cmp_op_text(CmpOp op) {
    switch (op) {
        case CmpOp::gt: return ">";
        case CmpOp::lt: return "<";
        case CmpOp::ge: return ">=";
        case CmpOp::le: return "<=";
        case CmpOp::eq: return "=";
        case CmpOp::ne: return "!=";
    }
    return "?";
}

inline bool cmp_apply(CmpOp op, std::int64_t lhs, std::int64_t rhs) {
    switch (op) {
        case CmpOp::gt: return lhs > rhs;
        case CmpOp::lt: return lhs < rhs;
        case CmpOp::ge: return lhs >= rhs;
        case CmpOp::le: return lhs <= rhs;
        case CmpOp::eq: return lhs == rhs;
        case CmpOp::ne: return lhs != rhs;
    }
    return false;
}

// ── Predicate ───────────────────────────────────────────────────────────────
// A branching condition: either a boolean probe by name, or a comparison of a
// numeric probe against an integer constant.

struct Predicate {
    std::string probe;
    bool comparison = false;
    CmpOp op = CmpOp::gt;
    std::int64_t constant = 0;

    static Predicate boolean(std::string name) {
        Predicate p;
        p.probe = std::move(name);
        return p;
    }

    static Predicate compare(std::string name, CmpOp op, std::int64_t constant) {
        Predicate p;
        p.probe = std::move(name);
        p.comparison = true;
        p.op = op;
        p.constant = constant;
        return p;
    }

    std::string text() const {
        if (!comparison) return probe;
        return "(" + std::string(cmp_op_text(op)) + " " + probe + " " + std::to_string(constant) + ")";
    }

    bool operator==(const Predicate& o) const {
        if (comparison != o.comparison || probe != o.probe) return false;
        if (!comparison) return true;
        return op == o.op && constant == o.constant;
    }
};

}  // namespace stratsynth
