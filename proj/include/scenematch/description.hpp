#pragma once

// Description data model: expected objects with attribute formulas, relation
// edges between them, and disjunctive alternatives.

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "scenematch/vocabulary.hpp"

namespace scenematch {

enum class FormulaOp { Leaf, And, Or, Not };

template <typename Tag>
struct Formula {
    FormulaOp op = FormulaOp::Leaf;
    std::string atom;               // Leaf only
    std::vector<Formula> children;  // And/Or: >= 2, Not: 1

    static Formula leaf(std::string name) {
        Formula f;
        f.atom = std::move(name);
        return f;
    }
    static Formula conj(std::vector<Formula> xs) { return node(FormulaOp::And, std::move(xs)); }
    static Formula disj(std::vector<Formula> xs) { return node(FormulaOp::Or, std::move(xs)); }
    static Formula negate(Formula x) { return node(FormulaOp::Not, {std::move(x)}); }

    bool is_leaf() const { return op == FormulaOp::Leaf; }

    bool operator==(const Formula& other) const {
        return op == other.op && atom == other.atom && children == other.children;
    }

private:
    static Formula node(FormulaOp op, std::vector<Formula> xs) {
        Formula f;
        f.op = op;
        f.children = std::move(xs);
        return f;
    }
};

struct AttributeTag {};
struct RelationTag {};
using AttributeFormula = Formula<AttributeTag>;
using RelationFormula = Formula<RelationTag>;

// Collects leaf atoms in left-to-right order.
template <typename Tag>
void collect_atoms(const Formula<Tag>& f, std::vector<std::string>& out) {
    if (f.is_leaf()) {
        out.push_back(f.atom);
        return;
    }
    for (const auto& c : f.children) collect_atoms(c, out);
}

// Type atoms that are not under any negation.
inline void collect_positive_types(const AttributeFormula& f, std::vector<std::string>& out) {
    switch (f.op) {
    case FormulaOp::Leaf:
        if (is_type_atom(f.atom)) out.push_back(f.atom);
        break;
    case FormulaOp::Not:
        break;
    default:
        for (const auto& c : f.children) collect_positive_types(c, out);
    }
}

struct ExpectedObject {
    std::string id;
    AttributeFormula formula;
    bool is_hunt = false;

    bool operator==(const ExpectedObject&) const = default;

    std::string type_atom() const {
        std::vector<std::string> types;
        collect_positive_types(formula, types);
        return types.empty() ? std::string{} : types.front();
    }
};

struct RelationEdge {
    RelationFormula formula;
    std::vector<std::string> args;

    bool operator==(const RelationEdge&) const = default;
};

struct Alternative {
    std::vector<ExpectedObject> objects;
    std::vector<RelationEdge> relations;

    bool operator==(const Alternative&) const = default;

    std::ptrdiff_t index_of(const std::string& id) const {
        for (std::size_t i = 0; i < objects.size(); ++i) {
            if (objects[i].id == id) return static_cast<std::ptrdiff_t>(i);
        }
        return -1;
    }

    std::size_t hunt_index() const {
        for (std::size_t i = 0; i < objects.size(); ++i) {
            if (objects[i].is_hunt) return i;
        }
        return 0;
    }
};

struct Description {
    std::vector<Alternative> alternatives;

    bool operator==(const Description&) const = default;
};

enum class DiagCode {
    EmptyDescription,
    EmptyAlternative,
    DuplicateObjectId,
    MissingHunt,
    DuplicateHunt,
    UnknownPredicate,
    MalformedFormula,
    MissingTypeAtom,
    MultipleTypeAtoms,
    UnknownObjectRef,
    ArityMismatch,
    RepeatedArgument,
};

inline const char* to_string(DiagCode c) {
    switch (c) {
    case DiagCode::EmptyDescription: return "EmptyDescription";
    case DiagCode::EmptyAlternative: return "EmptyAlternative";
    case DiagCode::DuplicateObjectId: return "DuplicateObjectId";
    case DiagCode::MissingHunt: return "MissingHunt";
    case DiagCode::DuplicateHunt: return "DuplicateHunt";
    case DiagCode::UnknownPredicate: return "UnknownPredicate";
    case DiagCode::MalformedFormula: return "MalformedFormula";
    case DiagCode::MissingTypeAtom: return "MissingTypeAtom";
    case DiagCode::MultipleTypeAtoms: return "MultipleTypeAtoms";
    case DiagCode::UnknownObjectRef: return "UnknownObjectRef";
    case DiagCode::ArityMismatch: return "ArityMismatch";
    case DiagCode::RepeatedArgument: return "RepeatedArgument";
    }
    return "?";
}

struct Diagnostic {
    DiagCode code;
    std::size_t alternative = 0;
    std::string element;

    bool operator==(const Diagnostic&) const = default;
};

namespace detail {

template <typename Tag, typename Known>
bool well_formed(const Formula<Tag>& f, Known&& known, std::vector<std::string>& unknown) {
    switch (f.op) {
    case FormulaOp::Leaf:
        if (!f.children.empty()) return false;
        if (!known(f.atom)) unknown.push_back(f.atom);
        return true;
    case FormulaOp::Not:
        if (f.children.size() != 1) return false;
        break;
    case FormulaOp::And:
    case FormulaOp::Or:
        if (f.children.size() < 2) return false;
        break;
    }
    bool ok = true;
    for (const auto& c : f.children) ok = well_formed(c, known, unknown) && ok;
    return ok;
}

inline std::string edge_label(const RelationEdge& e) {
    std::vector<std::string> atoms;
    collect_atoms(e.formula, atoms);
    std::string s;
    for (const auto& a : atoms) s += (s.empty() ? "" : "&") + a;
    s += "(";
    for (std::size_t i = 0; i < e.args.size(); ++i) s += (i ? "," : "") + e.args[i];
    return s + ")";
}

} // namespace detail

inline std::vector<Diagnostic> validate_alternative(const Alternative& alt, std::size_t index) {
    std::vector<Diagnostic> out;
    auto report = [&](DiagCode c, std::string element) {
        out.push_back({c, index, std::move(element)});
    };

    if (alt.objects.empty()) report(DiagCode::EmptyAlternative, "");

    std::set<std::string> ids;
    std::size_t hunts = 0;
    for (const auto& o : alt.objects) {
        if (!ids.insert(o.id).second) report(DiagCode::DuplicateObjectId, o.id);
        if (o.is_hunt) ++hunts;

        std::vector<std::string> unknown;
        if (!detail::well_formed(o.formula, [](const std::string& a) { return is_attribute(a); }, unknown)) {
            report(DiagCode::MalformedFormula, o.id);
        }
        for (const auto& u : unknown) report(DiagCode::UnknownPredicate, o.id + ":" + u);

        std::vector<std::string> types;
        collect_positive_types(o.formula, types);
        if (types.empty()) report(DiagCode::MissingTypeAtom, o.id);
        if (types.size() > 1) report(DiagCode::MultipleTypeAtoms, o.id);
    }
    if (!alt.objects.empty()) {
        if (hunts == 0) report(DiagCode::MissingHunt, "");
        if (hunts > 1) report(DiagCode::DuplicateHunt, "");
    }

    for (const auto& e : alt.relations) {
        const auto label = detail::edge_label(e);
        std::vector<std::string> unknown;
        if (!detail::well_formed(e.formula, [](const std::string& a) { return is_relation(a); }, unknown)) {
            report(DiagCode::MalformedFormula, label);
        }
        for (const auto& u : unknown) report(DiagCode::UnknownPredicate, label + ":" + u);

        std::vector<std::string> atoms;
        collect_atoms(e.formula, atoms);
        for (const auto& a : atoms) {
            const auto* rel = find_relation(a);
            if (rel && static_cast<std::size_t>(rel->arity) != e.args.size()) {
                report(DiagCode::ArityMismatch, label);
                break;
            }
        }
        std::set<std::string> seen;
        for (const auto& a : e.args) {
            if (!ids.count(a)) report(DiagCode::UnknownObjectRef, label + ":" + a);
            if (!seen.insert(a).second) report(DiagCode::RepeatedArgument, label + ":" + a);
        }
    }
    return out;
}

// Empty iff every structural invariant of the description holds.
inline std::vector<Diagnostic> validate_description(const Description& d) {
    if (d.alternatives.empty()) return {{DiagCode::EmptyDescription, 0, ""}};
    std::vector<Diagnostic> out;
    for (std::size_t i = 0; i < d.alternatives.size(); ++i) {
        auto part = validate_alternative(d.alternatives[i], i);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

} // namespace scenematch
