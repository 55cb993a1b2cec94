#pragma once

// Attribute and spatial-relation predicates as possibility degrees, and the
// min / max / complement evaluation of formulas built from them.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scenematch/description.hpp"
#include "scenematch/possibility.hpp"
#include "scenematch/scene.hpp"
#include "scenematch/vocabulary.hpp"

namespace scenematch {

class EvalError : public Error {
public:
    using Error::Error;
};

// One-sided trapezoid. Increasing when zero < full, decreasing otherwise.
struct Ramp {
    double zero = 0;
    double full = 1;

    double operator()(double x) const {
        return zero < full ? ramp_up(x, zero, full) : ramp_down(x, full, zero);
    }

    bool operator==(const Ramp&) const = default;
};

struct MembershipParams {
    Ramp horizontal{1.5, 3.0};         // width / height
    Ramp vertical{1.5, 3.0};           // height / width
    Ramp elongated{2.0, 5.0};          // long side / short side
    Ramp long_{2.0, 5.0};              // long side / short side
    Ramp short_{5.0, 2.0};             // long side / short side
    Ramp x_overlap{0.0, 0.5};          // shared x extent / narrower width
    Ramp vertical_gap{-4.0, 0.0};      // px between A's bottom and B's top, for above
    Ramp horizontal_gap{-4.0, 0.0};    // px between A's right and B's left, for left-of
    Ramp contact_gap{15.0, 2.0};       // px between boxes
    Ramp center_distance{6.0, 2.0};    // center distance / mean diagonal
    Ramp end_distance{3.0, 1.0};       // contact offset from an end / thickness
    double unknown_depth = 1.0;        // in_front_of / behind without override

    bool operator==(const MembershipParams&) const = default;

    std::vector<std::pair<std::string, Ramp*>> ramps() {
        return {{"horizontal", &horizontal},         {"vertical", &vertical},
                {"elongated", &elongated},           {"long", &long_},
                {"short", &short_},                  {"x_overlap", &x_overlap},
                {"vertical_gap", &vertical_gap},     {"horizontal_gap", &horizontal_gap},
                {"contact_gap", &contact_gap},       {"center_distance", &center_distance},
                {"end_distance", &end_distance}};
    }
};

inline nlohmann::ordered_json params_to_json(MembershipParams p) {
    nlohmann::ordered_json doc;
    for (auto& [name, r] : p.ramps()) doc[name] = {{"zero", r->zero}, {"full", r->full}};
    doc["unknown_depth"] = p.unknown_depth;
    return doc;
}

// Keys absent from the document keep their defaults.
inline MembershipParams params_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw EvalError("params document must be an object");
    MembershipParams p;
    auto ramps = p.ramps();
    for (const auto& [key, value] : doc.items()) {
        if (key == "unknown_depth") {
            if (!value.is_number()) throw EvalError("unknown_depth must be a number");
            p.unknown_depth = value.get<double>();
            if (!(p.unknown_depth >= 0 && p.unknown_depth <= 1)) throw EvalError("unknown_depth outside [0,1]");
            continue;
        }
        auto it = std::find_if(ramps.begin(), ramps.end(), [&](const auto& r) { return r.first == key; });
        if (it == ramps.end()) throw EvalError("unknown membership parameter " + key);
        if (!value.is_object() || !value.contains("zero") || !value.contains("full") ||
            !value["zero"].is_number() || !value["full"].is_number()) {
            throw EvalError(key + " needs numeric zero and full");
        }
        Ramp r{value["zero"].get<double>(), value["full"].get<double>()};
        if (!std::isfinite(r.zero) || !std::isfinite(r.full) || r.zero == r.full) {
            throw EvalError(key + ": zero and full must be finite and distinct");
        }
        *it->second = r;
    }
    return p;
}

struct EvalOptions {
    bool strict = false;
    // Receives notes about degrees assumed from ignorance.
    std::set<std::string>* notes = nullptr;
};

namespace geom {

inline double aspect(const BoundingBox& b) { return b.width() / b.height(); }
inline double elongation(const BoundingBox& b) {
    return std::max(b.width(), b.height()) / std::min(b.width(), b.height());
}

inline double interval_overlap(double a0, double a1, double b0, double b1) {
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

inline double x_overlap_ratio(const BoundingBox& a, const BoundingBox& b) {
    return interval_overlap(a.x_min, a.x_max, b.x_min, b.x_max) / std::min(a.width(), b.width());
}

inline double box_gap(const BoundingBox& a, const BoundingBox& b) {
    const double dx = std::max({0.0, b.x_min - a.x_max, a.x_min - b.x_max});
    const double dy = std::max({0.0, b.y_min - a.y_max, a.y_min - b.y_max});
    return std::hypot(dx, dy);
}

inline double diagonal(const BoundingBox& b) { return std::hypot(b.width(), b.height()); }

inline double on(const BoundingBox& a, const BoundingBox& b, const MembershipParams& p) {
    const double upper = a.y_min <= b.y_min ? 1.0 : 0.0;
    return std::min(p.x_overlap(x_overlap_ratio(a, b)), upper);
}

inline double above(const BoundingBox& a, const BoundingBox& b, const MembershipParams& p) {
    const double higher = a.center_y() < b.center_y() ? 1.0 : 0.0;
    return std::min({p.x_overlap(x_overlap_ratio(a, b)), higher, p.vertical_gap(b.y_min - a.y_max)});
}

inline double left_of(const BoundingBox& a, const BoundingBox& b, const MembershipParams& p) {
    const double lefter = a.center_x() < b.center_x() ? 1.0 : 0.0;
    return std::min(lefter, p.horizontal_gap(b.x_min - a.x_max));
}

inline double connected(const BoundingBox& a, const BoundingBox& b, const MembershipParams& p) {
    return p.contact_gap(box_gap(a, b));
}

inline double near(const BoundingBox& a, const BoundingBox& b, const MembershipParams& p) {
    const double d = std::hypot(a.center_x() - b.center_x(), a.center_y() - b.center_y());
    return p.center_distance(d / ((diagonal(a) + diagonal(b)) / 2));
}

// How close to one end of `a`'s long axis the contact with `b` sits.
inline double end_contact(const BoundingBox& a, const BoundingBox& b, const MembershipParams& p) {
    const bool upright = a.height() >= a.width();
    const double lo = upright ? a.y_min : a.x_min;
    const double hi = upright ? a.y_max : a.x_max;
    const double blo = upright ? b.y_min : b.x_min;
    const double bhi = upright ? b.y_max : b.x_max;
    const double thickness = upright ? a.width() : a.height();
    const double c0 = std::max(lo, blo);
    const double c1 = std::min(hi, bhi);
    if (c0 > c1) return 1.0;  // b lies beyond an end
    return p.end_distance(std::min(c0 - lo, hi - c1) / thickness);
}

inline double elbow(const BoundingBox& a, const BoundingBox& b, const MembershipParams& p) {
    const double perpendicular = std::max(std::min(p.vertical(1 / aspect(a)), p.horizontal(aspect(b))),
                                          std::min(p.horizontal(aspect(a)), p.vertical(1 / aspect(b))));
    return std::min({perpendicular, connected(a, b, p), end_contact(a, b, p), end_contact(b, a, p)});
}

} // namespace geom

inline Possibility eval_attribute(const std::string& predicate, const PerceivedObject& o,
                                  const MembershipParams& params) {
    const auto kind = attribute_kind(predicate);
    if (!kind) throw EvalError("unknown attribute predicate " + predicate);
    if (auto it = o.attribute_overrides.find(predicate); it != o.attribute_overrides.end()) return it->second;

    const auto& b = o.bbox;
    switch (*kind) {
    case AttributeKind::Type:
        return predicate == o.detected_type ? o.detection_confidence : Possibility::zero();
    case AttributeKind::Color:
        return o.color(predicate);
    case AttributeKind::Orientation:
        return Possibility(predicate == "horizontal" ? params.horizontal(geom::aspect(b))
                                                     : params.vertical(1 / geom::aspect(b)));
    case AttributeKind::Size:
        if (predicate == "elongated") return Possibility(params.elongated(geom::elongation(b)));
        if (predicate == "long") return Possibility(params.long_(geom::elongation(b)));
        return Possibility(params.short_(geom::elongation(b)));
    }
    return Possibility::zero();
}

namespace detail {

inline std::string relation_text(const std::string& predicate, std::span<const PerceivedObject* const> args) {
    std::string s = predicate + "(";
    for (std::size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + args[i]->id;
    return s + ")";
}

inline const Possibility* find_override(const Scene& scene, const RelationEntry& rel,
                                        std::span<const PerceivedObject* const> args) {
    RelationKey key{std::string(rel.name), {}};
    for (const auto* a : args) key.args.push_back(a->id);
    if (auto it = scene.relation_overrides.find(key); it != scene.relation_overrides.end()) return &it->second;
    if (args.size() == 2) {
        RelationKey swapped{std::string(rel.converse), {key.args[1], key.args[0]}};
        if (auto it = scene.relation_overrides.find(swapped); it != scene.relation_overrides.end()) {
            return &it->second;
        }
    }
    return nullptr;
}

} // namespace detail

inline Possibility eval_relation(const std::string& predicate, std::span<const PerceivedObject* const> args,
                                 const Scene& scene, const MembershipParams& params, const EvalOptions& opts = {}) {
    const auto* rel = find_relation(predicate);
    if (!rel) throw EvalError("unknown relation predicate " + predicate);
    if (static_cast<std::size_t>(rel->arity) != args.size()) {
        throw EvalError(predicate + " takes " + std::to_string(rel->arity) + " arguments");
    }
    if (const auto* ov = detail::find_override(scene, *rel, args)) return *ov;

    const auto& a = args[0]->bbox;
    const auto& b = args[1]->bbox;
    double v = 0;
    if (predicate == "on") v = geom::on(a, b, params);
    else if (predicate == "under") v = geom::on(b, a, params);
    else if (predicate == "above") v = geom::above(a, b, params);
    else if (predicate == "below") v = geom::above(b, a, params);
    else if (predicate == "on_the_left_to") v = geom::left_of(a, b, params);
    else if (predicate == "on_the_right_to") v = geom::left_of(b, a, params);
    else if (predicate == "connected_to") v = geom::connected(a, b, params);
    else if (predicate == "near_from") v = geom::near(a, b, params);
    else if (predicate == "elbow") v = geom::elbow(a, b, params);
    else {
        // Depth is not observable in a single image.
        const auto text = detail::relation_text(predicate, args);
        if (opts.strict) throw EvalError(text + " cannot be evaluated without a relation override");
        if (opts.notes) opts.notes->insert(text + " has no override; assumed " + std::to_string(params.unknown_depth));
        v = params.unknown_depth;
    }
    return Possibility(clamp_unit(v));
}

// Negation is pushed to the leaves (1 - min = max of 1 - x), so Not(Not(f))
// evaluates exactly like f.
template <typename Tag, typename LeafFn>
Possibility eval_formula(const Formula<Tag>& f, LeafFn&& leaf, bool negated = false) {
    switch (f.op) {
    case FormulaOp::Leaf: {
        const Possibility v = leaf(f.atom);
        return negated ? v.complement() : v;
    }
    case FormulaOp::Not:
        return eval_formula(f.children.front(), leaf, !negated);
    case FormulaOp::And:
    case FormulaOp::Or: {
        const bool take_min = (f.op == FormulaOp::And) != negated;
        Possibility r = take_min ? Possibility::one() : Possibility::zero();
        for (const auto& c : f.children) {
            const auto v = eval_formula(c, leaf, negated);
            r = take_min ? min(r, v) : max(r, v);
        }
        return r;
    }
    }
    return Possibility::zero();
}

inline Possibility eval_attribute_formula(const AttributeFormula& f, const PerceivedObject& o,
                                          const MembershipParams& params) {
    return eval_formula(f, [&](const std::string& atom) { return eval_attribute(atom, o, params); });
}

inline Possibility eval_relation_formula(const RelationFormula& f, std::span<const PerceivedObject* const> args,
                                         const Scene& scene, const MembershipParams& params,
                                         const EvalOptions& opts = {}) {
    return eval_formula(f, [&](const std::string& atom) { return eval_relation(atom, args, scene, params, opts); });
}

} // namespace scenematch
