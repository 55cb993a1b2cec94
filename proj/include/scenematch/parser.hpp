#pragma once

// Description language: chain shorthand ("horizontal pipe on red
// floodgate[hunt]") and a structured form with and/or/not, object and
// relation declarations and `{ ... } or { ... }` alternatives.

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scenematch/description.hpp"
#include "scenematch/possibility.hpp"
#include "scenematch/vocabulary.hpp"

namespace scenematch {

class ParseError : public Error {
public:
    enum class Kind { Syntax, UnknownPredicate, ArityMismatch, MissingHunt, DuplicateHunt, Invalid };

    ParseError(Kind kind, std::size_t position, std::vector<std::string> expected, const std::string& what)
        : Error(format(kind, position, expected, what)),
          kind_(kind),
          position_(position),
          expected_(std::move(expected)) {}

    Kind kind() const { return kind_; }
    std::size_t position() const { return position_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    static std::string format(Kind kind, std::size_t pos, const std::vector<std::string>& expected,
                              const std::string& what) {
        static constexpr const char* names[] = {"syntax error", "unknown predicate", "arity mismatch",
                                                "missing hunt marker", "duplicate hunt marker",
                                                "invalid description"};
        std::string msg = std::string(names[static_cast<int>(kind)]) + " at " + std::to_string(pos);
        if (!what.empty()) msg += ": " + what;
        if (!expected.empty()) {
            msg += " (expected";
            for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? ", " : " ") + expected[i];
            msg += ")";
        }
        return msg;
    }

    Kind kind_;
    std::size_t position_;
    std::vector<std::string> expected_;
};

namespace detail {

struct Token {
    enum class Kind { Word, LBrace, RBrace, LParen, RParen, Comma, Colon, Hunt, End };
    Kind kind = Kind::End;
    std::string text;   // original spelling (ids keep their case)
    std::string lower;  // keyword / predicate matching
    std::size_t pos = 0;
};

inline bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
           (static_cast<unsigned char>(c) & 0x80);
}

inline std::string lowercase(std::string_view s) { return ascii_lower(s); }

inline std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token t;
        t.pos = i;
        switch (c) {
        case '{': t.kind = Token::Kind::LBrace; break;
        case '}': t.kind = Token::Kind::RBrace; break;
        case '(': t.kind = Token::Kind::LParen; break;
        case ')': t.kind = Token::Kind::RParen; break;
        case ',': t.kind = Token::Kind::Comma; break;
        case ':': t.kind = Token::Kind::Colon; break;
        case '[': {
            std::size_t j = i + 1;
            while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
            std::size_t k = j;
            while (k < text.size() && word_char(text[k])) ++k;
            std::size_t close = k;
            while (close < text.size() && std::isspace(static_cast<unsigned char>(text[close]))) ++close;
            if (lowercase(text.substr(j, k - j)) != "hunt" || close >= text.size() || text[close] != ']') {
                throw ParseError(ParseError::Kind::Syntax, i, {"[hunt]"}, "malformed marker");
            }
            t.kind = Token::Kind::Hunt;
            t.text = "[hunt]";
            t.lower = t.text;
            out.push_back(t);
            i = close + 1;
            continue;
        }
        default:
            if (!word_char(c)) {
                throw ParseError(ParseError::Kind::Syntax, i, {}, std::string("unexpected character '") + c + "'");
            }
            std::size_t j = i;
            while (j < text.size() && word_char(text[j])) ++j;
            t.kind = Token::Kind::Word;
            t.text = std::string(text.substr(i, j - i));
            t.lower = lowercase(t.text);
            out.push_back(t);
            i = j;
            continue;
        }
        t.text = std::string(1, c);
        t.lower = t.text;
        out.push_back(t);
        ++i;
    }
    Token end;
    end.pos = text.size();
    out.push_back(end);
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

    Description parse() {
        Description d;
        if (is_word("alternative")) ++at_;
        d.alternatives.push_back(parse_alt());
        while (is_word("or")) {
            ++at_;
            if (is_word("alternative")) ++at_;
            d.alternatives.push_back(parse_alt());
        }
        if (peek().kind != Token::Kind::End) fail_syntax({"or", "end of input"});
        return d;
    }

private:
    using K = Token::Kind;

    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(at_ + ahead, toks_.size() - 1)];
    }
    bool is_word(std::string_view w, std::size_t ahead = 0) const {
        return peek(ahead).kind == K::Word && peek(ahead).lower == w;
    }
    bool at_alt_end() const {
        return peek().kind == K::End || peek().kind == K::RBrace || is_word("or");
    }

    [[noreturn]] void fail_syntax(std::vector<std::string> expected, const std::string& what = {}) const {
        const auto& t = peek();
        std::string found = t.kind == K::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(ParseError::Kind::Syntax, t.pos, std::move(expected),
                         what.empty() ? "found " + found : what);
    }

    void expect(K kind, const char* spelling) {
        if (peek().kind != kind) fail_syntax({spelling});
        ++at_;
    }

    std::string expect_id() {
        if (peek().kind != K::Word) fail_syntax({"identifier"});
        return toks_[at_++].text;
    }

    // Does an "or" at the cursor start a new alternative rather than continue a formula?
    bool or_starts_alternative() const {
        return peek(1).kind == K::LBrace || is_word("object", 1) || is_word("relation", 1) ||
               is_word("alternative", 1);
    }

    Alternative parse_alt() {
        const bool braced = peek().kind == K::LBrace;
        if (braced) ++at_;
        Alternative alt = (is_word("object") || is_word("relation")) ? parse_structured() : parse_chain();
        if (braced) expect(K::RBrace, "}");
        return alt;
    }

    // ---- structured form ----

    Alternative parse_structured() {
        Alternative alt;
        std::vector<std::size_t> hunt_pos;
        while (is_word("object") || is_word("relation")) {
            if (is_word("object")) {
                ++at_;
                ExpectedObject o;
                o.id = expect_id();
                expect(K::Colon, ":");
                o.formula = parse_aformula();
                if (peek().kind == K::Hunt) {
                    hunt_pos.push_back(peek().pos);
                    o.is_hunt = true;
                    ++at_;
                }
                alt.objects.push_back(std::move(o));
            } else {
                ++at_;
                RelationEdge e;
                const auto formula_pos = peek().pos;
                e.formula = parse_rformula();
                expect(K::LParen, "(");
                e.args.push_back(expect_id());
                while (peek().kind == K::Comma) {
                    ++at_;
                    e.args.push_back(expect_id());
                }
                expect(K::RParen, ")");
                check_arity(e, formula_pos);
                alt.relations.push_back(std::move(e));
            }
        }
        if (!at_alt_end()) fail_syntax({"object", "relation", "or", "}"});
        if (hunt_pos.size() > 1) {
            throw ParseError(ParseError::Kind::DuplicateHunt, hunt_pos[1], {}, "");
        }
        if (hunt_pos.empty()) {
            if (alt.objects.size() != 1) {
                throw ParseError(ParseError::Kind::MissingHunt, peek().pos, {"[hunt]"},
                                 "multi-object alternative needs exactly one [hunt]");
            }
            alt.objects.front().is_hunt = true;
        }
        return alt;
    }

    void check_arity(const RelationEdge& e, std::size_t pos) const {
        std::vector<std::string> atoms;
        collect_atoms(e.formula, atoms);
        for (const auto& a : atoms) {
            if (static_cast<std::size_t>(find_relation(a)->arity) != e.args.size()) {
                throw ParseError(ParseError::Kind::ArityMismatch, pos, {},
                                 a + " takes " + std::to_string(find_relation(a)->arity) + " arguments, got " +
                                     std::to_string(e.args.size()));
            }
        }
    }

    template <typename Tag, typename LeafFn>
    Formula<Tag> parse_or(LeafFn&& leaf) {
        std::vector<Formula<Tag>> terms;
        terms.push_back(parse_and<Tag>(leaf));
        while (is_word("or") && !or_starts_alternative()) {
            ++at_;
            terms.push_back(parse_and<Tag>(leaf));
        }
        return terms.size() == 1 ? std::move(terms.front()) : Formula<Tag>::disj(std::move(terms));
    }

    template <typename Tag, typename LeafFn>
    Formula<Tag> parse_and(LeafFn&& leaf) {
        std::vector<Formula<Tag>> factors;
        factors.push_back(parse_factor<Tag>(leaf));
        while (is_word("and")) {
            ++at_;
            factors.push_back(parse_factor<Tag>(leaf));
        }
        return factors.size() == 1 ? std::move(factors.front()) : Formula<Tag>::conj(std::move(factors));
    }

    template <typename Tag, typename LeafFn>
    Formula<Tag> parse_factor(LeafFn&& leaf) {
        if (is_word("not")) {
            ++at_;
            return Formula<Tag>::negate(parse_factor<Tag>(leaf));
        }
        if (peek().kind == K::LParen) {
            ++at_;
            auto f = parse_or<Tag>(leaf);
            expect(K::RParen, ")");
            return f;
        }
        if (peek().kind != K::Word) fail_syntax({"not", "(", "predicate"});
        return Formula<Tag>::leaf(leaf(toks_[at_++]));
    }

    AttributeFormula parse_aformula() {
        return parse_or<AttributeTag>([](const Token& t) {
            auto name = canonical_attribute(t.lower);
            if (!name) throw ParseError(ParseError::Kind::UnknownPredicate, t.pos, {"attribute"}, t.text);
            return *name;
        });
    }

    RelationFormula parse_rformula() {
        return parse_or<RelationTag>([](const Token& t) {
            if (!is_relation(t.lower)) {
                throw ParseError(ParseError::Kind::UnknownPredicate, t.pos, {"relation"}, t.text);
            }
            return t.lower;
        });
    }

    // ---- chain shorthand ----

    // Longest relation phrase matching at the cursor; returns words consumed.
    std::size_t match_relation_phrase(const RelationPhrase** best) const {
        std::size_t best_len = 0;
        for (const auto& ph : relation_phrases()) {
            bool ok = true;
            for (std::size_t k = 0; k < ph.words.size() && ok; ++k) {
                ok = peek(k).kind == K::Word && peek(k).lower == ph.words[k];
            }
            if (ok && ph.words.size() > best_len) {
                best_len = ph.words.size();
                *best = &ph;
            }
        }
        return best_len;
    }

    Alternative parse_chain() {
        Alternative alt;
        std::vector<std::size_t> hunt_pos;
        for (;;) {
            ExpectedObject o;
            o.id = "o" + std::to_string(alt.objects.size() + 1);
            std::vector<AttributeFormula> atoms;
            for (;;) {
                const Token& t = peek();
                if (t.kind != K::Word) fail_syntax({"attribute", "type"});
                auto name = canonical_attribute(t.lower);
                if (!name) {
                    const RelationPhrase* ph = nullptr;
                    if (match_relation_phrase(&ph) > 0 || is_relation(t.lower) || t.lower == "or") {
                        fail_syntax({"type"}, "object phrase without a type word before '" + t.text + "'");
                    }
                    throw ParseError(ParseError::Kind::UnknownPredicate, t.pos, {"attribute", "type"}, t.text);
                }
                ++at_;
                atoms.push_back(AttributeFormula::leaf(*name));
                if (is_type_atom(*name)) break;
            }
            o.formula = atoms.size() == 1 ? std::move(atoms.front()) : AttributeFormula::conj(std::move(atoms));
            if (peek().kind == K::Hunt) {
                hunt_pos.push_back(peek().pos);
                o.is_hunt = true;
                ++at_;
            }
            alt.objects.push_back(std::move(o));
            if (at_alt_end()) break;

            const RelationPhrase* ph = nullptr;
            std::size_t len = match_relation_phrase(&ph);
            RelationFormula rf;
            if (len > 0) {
                std::vector<RelationFormula> leaves;
                for (auto a : ph->atoms) leaves.push_back(RelationFormula::leaf(std::string(a)));
                rf = leaves.size() == 1 ? std::move(leaves.front()) : RelationFormula::conj(std::move(leaves));
            } else if (peek().kind == K::Word && is_relation(peek().lower)) {
                rf = RelationFormula::leaf(peek().lower);
                len = 1;
            } else {
                fail_syntax({"relation word", "[hunt]", "or", "end of input"});
            }
            at_ += len;
            const auto n = alt.objects.size();
            alt.relations.push_back({std::move(rf), {"o" + std::to_string(n), "o" + std::to_string(n + 1)}});
        }
        if (hunt_pos.size() > 1) throw ParseError(ParseError::Kind::DuplicateHunt, hunt_pos[1], {}, "");
        // A chain names the hunt object last unless it says otherwise.
        if (hunt_pos.empty()) alt.objects.back().is_hunt = true;
        return alt;
    }

    std::vector<Token> toks_;
    std::size_t at_ = 0;
};

inline ParseError::Kind kind_for(DiagCode c) {
    switch (c) {
    case DiagCode::UnknownPredicate: return ParseError::Kind::UnknownPredicate;
    case DiagCode::ArityMismatch: return ParseError::Kind::ArityMismatch;
    case DiagCode::MissingHunt: return ParseError::Kind::MissingHunt;
    case DiagCode::DuplicateHunt: return ParseError::Kind::DuplicateHunt;
    default: return ParseError::Kind::Invalid;
    }
}

} // namespace detail

inline Description parse_description(std::string_view text) {
    bool blank = true;
    for (char c : text) blank = blank && std::isspace(static_cast<unsigned char>(c));
    if (blank) throw ParseError(ParseError::Kind::Syntax, 0, {"description"}, "empty input");

    Description d = detail::Parser(text).parse();
    auto diags = validate_description(d);
    if (!diags.empty()) {
        const auto& first = diags.front();
        throw ParseError(detail::kind_for(first.code), 0, {},
                         std::string(to_string(first.code)) + " " + first.element);
    }
    return d;
}

// ---- printing ----

namespace detail {

template <typename Tag>
void print_formula(const Formula<Tag>& f, std::string& out) {
    auto child = [&out](const Formula<Tag>& c, bool wrap) {
        if (wrap) out += "(";
        print_formula(c, out);
        if (wrap) out += ")";
    };
    switch (f.op) {
    case FormulaOp::Leaf:
        out += f.atom;
        break;
    case FormulaOp::Not:
        out += "not ";
        child(f.children.front(), !f.children.front().is_leaf() && f.children.front().op != FormulaOp::Not);
        break;
    case FormulaOp::And:
        for (std::size_t i = 0; i < f.children.size(); ++i) {
            if (i) out += " and ";
            const auto op = f.children[i].op;
            child(f.children[i], op == FormulaOp::And || op == FormulaOp::Or);
        }
        break;
    case FormulaOp::Or:
        for (std::size_t i = 0; i < f.children.size(); ++i) {
            if (i) out += " or ";
            child(f.children[i], f.children[i].op == FormulaOp::Or);
        }
        break;
    }
}

// Adjectives followed by the type word, if the formula has that shape.
inline bool chain_phrase(const AttributeFormula& f, std::string& out) {
    if (f.is_leaf()) {
        if (!is_type_atom(f.atom)) return false;
        out += f.atom;
        return true;
    }
    if (f.op != FormulaOp::And) return false;
    for (std::size_t i = 0; i < f.children.size(); ++i) {
        const auto& c = f.children[i];
        const bool last = i + 1 == f.children.size();
        if (!c.is_leaf() || is_type_atom(c.atom) != last) return false;
    }
    for (std::size_t i = 0; i < f.children.size(); ++i) out += (i ? " " : "") + f.children[i].atom;
    return true;
}

inline bool chain_relation(const RelationFormula& f, std::string& out) {
    std::vector<std::string> atoms;
    if (f.is_leaf()) {
        atoms.push_back(f.atom);
    } else if (f.op == FormulaOp::And) {
        for (const auto& c : f.children) {
            if (!c.is_leaf()) return false;
            atoms.push_back(c.atom);
        }
    } else {
        return false;
    }
    for (const auto& ph : relation_phrases()) {
        if (ph.atoms.size() != atoms.size()) continue;
        bool same = true;
        for (std::size_t i = 0; i < atoms.size() && same; ++i) same = ph.atoms[i] == atoms[i];
        if (!same) continue;
        for (std::size_t i = 0; i < ph.words.size(); ++i) out += (i ? " " : "") + std::string(ph.words[i]);
        return true;
    }
    return false;
}

inline bool print_chain(const Alternative& alt, std::string& out) {
    const auto n = alt.objects.size();
    if (n == 0 || alt.relations.size() != n - 1) return false;
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& o = alt.objects[i];
        if (o.id != "o" + std::to_string(i + 1)) return false;
        if (i > 0) {
            const auto& e = alt.relations[i - 1];
            if (e.args != std::vector<std::string>{"o" + std::to_string(i), o.id}) return false;
            s += " ";
            if (!chain_relation(e.formula, s)) return false;
            s += " ";
        }
        if (!chain_phrase(o.formula, s)) return false;
        if (o.is_hunt) s += "[hunt]";
    }
    out += s;
    return true;
}

inline void print_structured(const Alternative& alt, std::string& out) {
    out += "{\n";
    for (const auto& o : alt.objects) {
        out += "  object " + o.id + ": ";
        print_formula(o.formula, out);
        if (o.is_hunt) out += " [hunt]";
        out += "\n";
    }
    for (const auto& e : alt.relations) {
        out += "  relation ";
        print_formula(e.formula, out);
        out += " (";
        for (std::size_t i = 0; i < e.args.size(); ++i) out += (i ? ", " : "") + e.args[i];
        out += ")\n";
    }
    out += "}";
}

} // namespace detail

// Canonical text: chain shorthand when a single alternative fits it,
// structured form otherwise.
inline std::string print_description(const Description& d) {
    std::string out;
    if (d.alternatives.size() == 1 && detail::print_chain(d.alternatives.front(), out)) return out;
    out.clear();
    for (std::size_t i = 0; i < d.alternatives.size(); ++i) {
        if (i) out += "\nor\n";
        detail::print_structured(d.alternatives[i], out);
    }
    return out;
}

// Object formula in the order an operator would say it ("red floodgate").
inline std::string describe_object(const ExpectedObject& o) {
    std::string s;
    if (detail::chain_phrase(o.formula, s)) return s;
    s.clear();
    detail::print_formula(o.formula, s);
    return s;
}

inline std::string describe_relation(const RelationFormula& f) {
    std::string s;
    detail::print_formula(f, s);
    return s;
}

} // namespace scenematch
