// ============================================================================
// stratsynth/features.hpp — formula measures (probes) from SMT-LIB text
// ============================================================================
//
// Probe semantics, computed from the parsed input:
//
//   num-consts — number of declared 0-arity symbols (declare-const, or
//                declare-fun with an empty argument list)
//   num-exprs  — number of distinct subterms across all assertions; a
//                subterm occurring several times counts once
//   size       — total assertion AST node count, without sharing
//   is-pb      — every assertion is a pseudo-boolean inequality: a
//                comparison (<=, <, >=, >, =) between sums of integer
//                literals and 0/1-valued if-then-else terms over declared
//                Bool symbols, optionally scaled by integer coefficients.
//                An empty assertion set is vacuously pseudo-boolean.
//
// These re-implemented measures drive if-predicate resolution during staged
// evaluation; they may differ from a solver's internal probes on exotic
// inputs.
//
// ============================================================================

#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stratsynth/catalog.hpp"
#include "stratsynth/errors.hpp"
#include "stratsynth/types.hpp"

namespace stratsynth {

using FeatureValue = std::variant<bool, std::int64_t>;
using FeatureMap = std::map<std::string, FeatureValue>;

inline bool eval_predicate(const Predicate& pred, const FeatureMap& features) {
    auto it = features.find(pred.probe);
    if (it == features.end()) throw MissingFeatureError(pred.probe);
    if (!pred.comparison) {
        if (!std::holds_alternative<bool>(it->second)) throw MissingFeatureError(pred.probe);
        return std::get<bool>(it->second);
    }
    if (!std::holds_alternative<std::int64_t>(it->second)) throw MissingFeatureError(pred.probe);
    return cmp_apply(pred.op, std::get<std::int64_t>(it->second), pred.constant);
}

// ── SMT-LIB s-expressions ───────────────────────────────────────────────────

struct Sexp {
    bool is_atom = false;
    std::string atom;
    std::vector<Sexp> items;
};

namespace detail {

class SmtlibReader {
  public:
    explicit SmtlibReader(std::string_view src) : src_(src) {}

    std::vector<Sexp> read_all() {
        std::vector<Sexp> out;
        skip_trivia();
        while (i_ < src_.size()) {
            out.push_back(read());
            skip_trivia();
        }
        return out;
    }

  private:
    Sexp read() {
        skip_trivia();
        if (i_ >= src_.size()) throw SyntaxError(i_, "s-expression");
        const char c = src_[i_];
        if (c == ')') throw SyntaxError(i_, "s-expression");
        if (c == '(') {
            ++i_;
            Sexp list;
            skip_trivia();
            while (i_ < src_.size() && src_[i_] != ')') {
                list.items.push_back(read());
                skip_trivia();
            }
            if (i_ >= src_.size()) throw SyntaxError(i_, ")");
            ++i_;
            return list;
        }
        return read_atom();
    }

    Sexp read_atom() {
        Sexp a;
        a.is_atom = true;
        if (src_[i_] == '|') {
            const std::size_t start = ++i_;
            while (i_ < src_.size() && src_[i_] != '|') ++i_;
            if (i_ >= src_.size()) throw SyntaxError(start - 1, "closing |");
            a.atom = std::string(src_.substr(start, i_ - start));
            ++i_;
            return a;
        }
        if (src_[i_] == '"') {
            const std::size_t start = i_++;
            std::string text = "\"";
            while (i_ < src_.size()) {
                if (src_[i_] == '"') {
                    if (i_ + 1 < src_.size() && src_[i_ + 1] == '"') {  // escaped quote
                        text += '"';
                        i_ += 2;
                        continue;
                    }
                    ++i_;
                    a.atom = text + "\"";
                    return a;
                }
                text += src_[i_++];
            }
            throw SyntaxError(start, "closing \"");
        }
        const std::size_t start = i_;
        while (i_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[i_])) &&
               src_[i_] != '(' && src_[i_] != ')' && src_[i_] != ';')
            ++i_;
        a.atom = std::string(src_.substr(start, i_ - start));
        return a;
    }

    void skip_trivia() {
        while (i_ < src_.size()) {
            if (std::isspace(static_cast<unsigned char>(src_[i_]))) {
                ++i_;
            } else if (src_[i_] == ';') {
                while (i_ < src_.size() && src_[i_] != '\n') ++i_;
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t i_ = 0;
};

inline void serialize_sexp(const Sexp& e, std::string& out) {
    if (e.is_atom) {
        out += e.atom;
        return;
    }
    out += '(';
    for (std::size_t i = 0; i < e.items.size(); ++i) {
        if (i > 0) out += ' ';
        serialize_sexp(e.items[i], out);
    }
    out += ')';
}

inline std::int64_t node_count(const Sexp& e) {
    if (e.is_atom) return 1;
    std::int64_t n = 1;
    for (const Sexp& item : e.items) n += node_count(item);
    return n;
}

inline void collect_distinct(const Sexp& e, std::set<std::string>& seen) {
    std::string repr;
    serialize_sexp(e, repr);
    seen.insert(std::move(repr));
    if (!e.is_atom)
        for (const Sexp& item : e.items) collect_distinct(item, seen);
}

inline bool is_int_literal(const Sexp& e) {
    if (!e.is_atom || e.atom.empty()) return false;
    std::size_t i = 0;
    if (e.atom[0] == '-') {
        if (e.atom.size() == 1) return false;
        i = 1;
    }
    for (; i < e.atom.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(e.atom[i]))) return false;
    return true;
}

// Recognizer for the pseudo-boolean shape documented above.
class PbChecker {
  public:
    explicit PbChecker(const std::map<std::string, std::string>& sorts) : sorts_(sorts) {}

    bool assertion_is_pb(const Sexp& body) const {
        if (body.is_atom || body.items.size() != 3) return false;
        const Sexp& op = body.items[0];
        if (!op.is_atom) return false;
        if (op.atom != "<=" && op.atom != "<" && op.atom != ">=" && op.atom != ">" &&
            op.atom != "=")
            return false;
        return is_pb_sum(body.items[1]) && is_pb_sum(body.items[2]);
    }

  private:
    bool is_bool_symbol(const Sexp& e) const {
        if (e.is_atom) {
            auto it = sorts_.find(e.atom);
            return it != sorts_.end() && it->second == "Bool";
        }
        if (e.items.size() == 2 && e.items[0].is_atom && e.items[0].atom == "not")
            return is_bool_symbol(e.items[1]);
        return false;
    }

    bool is_indicator(const Sexp& e) const {  // (ite b <int> <int>)
        return !e.is_atom && e.items.size() == 4 && e.items[0].is_atom &&
               e.items[0].atom == "ite" && is_bool_symbol(e.items[1]) &&
               is_int_literal(e.items[2]) && is_int_literal(e.items[3]);
    }

    bool is_pb_term(const Sexp& e) const {
        if (is_int_literal(e) || is_indicator(e)) return true;
        if (!e.is_atom && e.items.size() == 3 && e.items[0].is_atom && e.items[0].atom == "*") {
            const Sexp& a = e.items[1];
            const Sexp& b = e.items[2];
            return (is_int_literal(a) && is_indicator(b)) ||
                   (is_indicator(a) && is_int_literal(b));
        }
        return false;
    }

    bool is_pb_sum(const Sexp& e) const {
        if (is_pb_term(e)) return true;
        if (!e.is_atom && e.items.size() >= 2 && e.items[0].is_atom && e.items[0].atom == "+") {
            for (std::size_t i = 1; i < e.items.size(); ++i)
                if (!is_pb_term(e.items[i])) return false;
            return true;
        }
        return false;
    }

    const std::map<std::string, std::string>& sorts_;
};

}  // namespace detail

// ── Analysis ────────────────────────────────────────────────────────────────

struct SmtlibAnalysis {
    std::int64_t num_consts = 0;
    std::int64_t num_exprs = 0;
    std::int64_t size = 0;
    bool is_pb = true;
};

inline SmtlibAnalysis analyze_smtlib(std::string_view text) {
    const std::vector<Sexp> commands = detail::SmtlibReader(text).read_all();

    SmtlibAnalysis out;
    std::map<std::string, std::string> sorts;  // 0-arity symbol -> sort name
    std::vector<const Sexp*> assertions;

    for (const Sexp& cmd : commands) {
        if (cmd.is_atom || cmd.items.empty() || !cmd.items[0].is_atom) continue;
        const std::string& head = cmd.items[0].atom;
        if (head == "declare-const" && cmd.items.size() == 3 && cmd.items[1].is_atom) {
            out.num_consts += 1;
            if (cmd.items[2].is_atom) sorts[cmd.items[1].atom] = cmd.items[2].atom;
        } else if (head == "declare-fun" && cmd.items.size() == 4 && cmd.items[1].is_atom &&
                   !cmd.items[2].is_atom && cmd.items[2].items.empty()) {
            out.num_consts += 1;
            if (cmd.items[3].is_atom) sorts[cmd.items[1].atom] = cmd.items[3].atom;
        } else if (head == "assert" && cmd.items.size() == 2) {
            assertions.push_back(&cmd.items[1]);
        }
    }

    std::set<std::string> distinct;
    detail::PbChecker pb(sorts);
    for (const Sexp* body : assertions) {
        out.size += detail::node_count(*body);
        detail::collect_distinct(*body, distinct);
        if (!pb.assertion_is_pb(*body)) out.is_pb = false;
    }
    out.num_exprs = static_cast<std::int64_t>(distinct.size());
    return out;
}

// Feature map covering every probe of the catalog; probes the extractor does
// not implement raise MissingFeatureError.
inline FeatureMap extract_features(std::string_view text, const TacticCatalog& catalog) {
    const SmtlibAnalysis a = analyze_smtlib(text);
    FeatureMap out;
    for (const ProbeSpec& probe : catalog.probes) {
        if (probe.name == "num-consts")
            out[probe.name] = a.num_consts;
        else if (probe.name == "num-exprs")
            out[probe.name] = a.num_exprs;
        else if (probe.name == "size")
            out[probe.name] = a.size;
        else if (probe.name == "is-pb")
            out[probe.name] = a.is_pb;
        else
            throw MissingFeatureError(probe.name);
    }
    return out;
}

}  // namespace stratsynth
