// ============================================================================
// stratsynth/parser.hpp — strategy text -> StrategyRef
// ============================================================================
//
// Recursive-descent parser for the strategy surface syntax. Whitespace
// insensitive; the inverse of render(). Symbol names are resolved against a
// TacticCatalog: unknown tactics/probes/parameters raise UnknownSymbolError,
// structural problems raise SyntaxError with the offending offset.
//
// n-ary (then a b c) / (or-else a b c) inputs are accepted and folded to the
// right; rendering always emits the binary form.
//
// ============================================================================

#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stratsynth/catalog.hpp"
#include "stratsynth/errors.hpp"
#include "stratsynth/strategy.hpp"

namespace stratsynth {

namespace detail {

struct Token {
    enum class Kind { lparen, rparen, atom, end };
    Kind kind = Kind::end;
    std::string text;
    std::size_t pos = 0;
};

class StrategyLexer {
  public:
    explicit StrategyLexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
        tok_.pos = i_;
        if (i_ >= src_.size()) {
            tok_.kind = Token::Kind::end;
            tok_.text.clear();
            return;
        }
        const char c = src_[i_];
        if (c == '(') {
            tok_ = {Token::Kind::lparen, "(", i_++};
            return;
        }
        if (c == ')') {
            tok_ = {Token::Kind::rparen, ")", i_++};
            return;
        }
        std::size_t start = i_;
        while (i_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[i_])) &&
               src_[i_] != '(' && src_[i_] != ')')
            ++i_;
        tok_ = {Token::Kind::atom, std::string(src_.substr(start, i_ - start)), start};
    }

    std::string_view src_;
    std::size_t i_ = 0;
    Token tok_;
};

inline bool parse_int64(const std::string& text, std::int64_t& out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

class StrategyParser {
  public:
    StrategyParser(std::string_view src, const TacticCatalog& catalog)
        : lexer_(src), catalog_(catalog) {}

    StrategyRef parse() {
        StrategyRef s = strategy();
        const Token& t = lexer_.peek();
        if (t.kind != Token::Kind::end)
            throw SyntaxError(t.pos, "end of input");
        return s;
    }

  private:
    StrategyRef strategy() {
        const Token t = lexer_.take();
        if (t.kind == Token::Kind::atom) return tactic_leaf(t);
        if (t.kind != Token::Kind::lparen) throw SyntaxError(t.pos, "strategy");

        const Token head = lexer_.take();
        if (head.kind != Token::Kind::atom) throw SyntaxError(head.pos, "combinator name");

        StrategyRef result;
        if (head.text == "then" || head.text == "or-else") {
            std::vector<StrategyRef> items;
            while (lexer_.peek().kind != Token::Kind::rparen) items.push_back(strategy());
            if (items.size() < 2) throw SyntaxError(lexer_.peek().pos, "strategy");
            result = items.back();
            for (std::size_t i = items.size() - 1; i-- > 0;) {
                if (head.text == "then") {
                    if (!items[i]->is_application())
                        throw SyntaxError(head.pos, "tactic application");
                    result = then(items[i], result);
                } else {
                    result = or_else(items[i], result);
                }
            }
        } else if (head.text == "try-for") {
            StrategyRef child = strategy();
            const Token ms = lexer_.take();
            std::int64_t value = 0;
            if (ms.kind != Token::Kind::atom || !parse_int64(ms.text, value) || value <= 0)
                throw SyntaxError(ms.pos, "positive millisecond constant");
            result = try_for(std::move(child), value);
        } else if (head.text == "if") {
            Predicate p = predicate();
            StrategyRef a = strategy();
            StrategyRef b = strategy();
            result = ite(std::move(p), std::move(a), std::move(b));
        } else if (head.text == "using-params") {
            result = using_params_body();
        } else {
            throw SyntaxError(head.pos, "combinator (then/or-else/try-for/if/using-params)");
        }

        expect_rparen();
        return result;
    }

    StrategyRef tactic_leaf(const Token& t) {
        if (catalog_.find_tactic(t.text) == nullptr) throw UnknownSymbolError(t.text);
        return leaf(t.text);
    }

    StrategyRef using_params_body() {
        const Token t = lexer_.take();
        if (t.kind != Token::Kind::atom) throw SyntaxError(t.pos, "tactic name");
        const TacticSpec* spec = catalog_.find_tactic(t.text);
        if (spec == nullptr) throw UnknownSymbolError(t.text);

        std::vector<std::pair<std::string, ParamValue>> settings;
        while (lexer_.peek().kind == Token::Kind::atom) {
            const Token key = lexer_.take();
            if (key.text.size() < 2 || key.text[0] != ':')
                throw SyntaxError(key.pos, ":parameter keyword");
            const std::string name = key.text.substr(1);
            bool known = false;
            for (const auto& p : spec->params) known = known || p.name == name;
            if (!known) throw UnknownSymbolError(name);

            const Token val = lexer_.take();
            if (val.kind != Token::Kind::atom) throw SyntaxError(val.pos, "parameter value");
            ParamValue value;
            std::int64_t ival = 0;
            if (val.text == "true")
                value = true;
            else if (val.text == "false")
                value = false;
            else if (parse_int64(val.text, ival))
                value = ival;
            else
                throw SyntaxError(val.pos, "boolean or integer value");
            settings.emplace_back(name, value);
        }
        if (settings.empty()) throw SyntaxError(lexer_.peek().pos, ":parameter keyword");
        return with_params(t.text, std::move(settings));
    }

    Predicate predicate() {
        const Token t = lexer_.take();
        if (t.kind == Token::Kind::atom) {
            const ProbeSpec* probe = catalog_.find_probe(t.text);
            if (probe == nullptr) throw UnknownSymbolError(t.text);
            if (probe->kind != ProbeKind::boolean_probe)
                throw SyntaxError(t.pos, "boolean probe");
            return Predicate::boolean(t.text);
        }
        if (t.kind != Token::Kind::lparen) throw SyntaxError(t.pos, "predicate");

        const Token op = lexer_.take();
        CmpOp cmp;
        if (op.kind != Token::Kind::atom || !lookup_op(op.text, cmp))
            throw SyntaxError(op.pos, "comparison operator");

        const Token probe_tok = lexer_.take();
        if (probe_tok.kind != Token::Kind::atom) throw SyntaxError(probe_tok.pos, "numeric probe");
        const ProbeSpec* probe = catalog_.find_probe(probe_tok.text);
        if (probe == nullptr) throw UnknownSymbolError(probe_tok.text);
        if (probe->kind != ProbeKind::numeric_probe)
            throw SyntaxError(probe_tok.pos, "numeric probe");

        const Token k = lexer_.take();
        std::int64_t constant = 0;
        if (k.kind != Token::Kind::atom || !parse_int64(k.text, constant))
            throw SyntaxError(k.pos, "integer constant");

        expect_rparen();
        return Predicate::compare(probe_tok.text, cmp, constant);
    }

    static bool lookup_op(const std::string& text, CmpOp& out) {
        if (text == ">") out = CmpOp::gt;
        else if (text == "<") out = CmpOp::lt;
        else if (text == ">=") out = CmpOp::ge;
        else if (text == "<=") out = CmpOp::le;
        else if (text == "=") out = CmpOp::eq;
        else if (text == "!=") out = CmpOp::ne;
        else return false;
        return true;
    }

    void expect_rparen() {
        const Token t = lexer_.take();
        if (t.kind != Token::Kind::rparen) throw SyntaxError(t.pos, ")");
    }

    StrategyLexer lexer_;
    const TacticCatalog& catalog_;
};

}  // namespace detail

inline StrategyRef parse_strategy(std::string_view text, const TacticCatalog& catalog) {
    return detail::StrategyParser(text, catalog).parse();
}

}  // namespace stratsynth
