#pragma once

// Perceived map: typed, confidence-weighted bounding boxes with colour
// degrees and optional attribute / relation overrides.

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scenematch/possibility.hpp"
#include "scenematch/vocabulary.hpp"

namespace scenematch {

class SceneError : public Error {
public:
    using Error::Error;
};

// Image coordinates, y grows downward.
struct BoundingBox {
    double x_min = 0, x_max = 0, y_min = 0, y_max = 0;

    BoundingBox() = default;
    BoundingBox(double x0, double x1, double y0, double y1) : x_min(x0), x_max(x1), y_min(y0), y_max(y1) {
        if (!(x0 <= x1) || !(y0 <= y1)) throw SceneError("bounding box with min > max");
    }

    // Extents are floored at one pixel so ratios stay finite.
    double width() const { return std::max(x_max - x_min, 1.0); }
    double height() const { return std::max(y_max - y_min, 1.0); }
    double center_x() const { return (x_min + x_max) / 2; }
    double center_y() const { return (y_min + y_max) / 2; }

    bool operator==(const BoundingBox&) const = default;
};

struct PerceivedObject {
    std::string id;
    std::string detected_type;
    Possibility detection_confidence;
    BoundingBox bbox;
    std::map<std::string, Possibility> color_degrees;
    std::map<std::string, Possibility> attribute_overrides;

    Possibility color(const std::string& name) const {
        auto it = color_degrees.find(name);
        return it == color_degrees.end() ? Possibility::zero() : it->second;
    }

    bool operator==(const PerceivedObject&) const = default;
};

struct RelationKey {
    std::string relation;
    std::vector<std::string> args;

    auto operator<=>(const RelationKey&) const = default;
};

struct Scene {
    std::vector<PerceivedObject> objects;
    std::map<RelationKey, Possibility> relation_overrides;

    const PerceivedObject* find(const std::string& id) const {
        for (const auto& o : objects) {
            if (o.id == id) return &o;
        }
        return nullptr;
    }

    // Object order is not significant.
    bool operator==(const Scene& other) const {
        auto by_id = [](std::vector<PerceivedObject> v) {
            std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
            return v;
        };
        return relation_overrides == other.relation_overrides && by_id(objects) == by_id(other.objects);
    }
};

// Throws SceneError on the first broken invariant.
inline void check_scene(const Scene& s) {
    std::set<std::string> ids;
    for (const auto& o : s.objects) {
        if (o.id.empty()) throw SceneError("object with empty id");
        if (!ids.insert(o.id).second) throw SceneError("duplicate object id " + o.id);
        if (!is_type_atom(o.detected_type)) throw SceneError(o.id + ": unknown type " + o.detected_type);
        for (const auto& [name, _] : o.color_degrees) {
            if (attribute_kind(name) != AttributeKind::Color) throw SceneError(o.id + ": unknown color " + name);
        }
        for (const auto& [name, _] : o.attribute_overrides) {
            if (!is_attribute(name)) throw SceneError(o.id + ": unknown attribute " + name);
        }
    }
    for (const auto& [key, _] : s.relation_overrides) {
        const auto* rel = find_relation(key.relation);
        if (!rel) throw SceneError("unknown relation " + key.relation);
        if (static_cast<std::size_t>(rel->arity) != key.args.size()) {
            throw SceneError("override " + key.relation + " has wrong arity");
        }
        for (const auto& a : key.args) {
            if (!ids.count(a)) throw SceneError("override " + key.relation + " references unknown id " + a);
        }
    }
    // An override and its converse must agree, so that e.g. left(A,B) == right(B,A).
    for (const auto& [key, degree] : s.relation_overrides) {
        RelationKey converse{std::string(find_relation(key.relation)->converse), {key.args.rbegin(), key.args.rend()}};
        auto it = s.relation_overrides.find(converse);
        if (it != s.relation_overrides.end() && it->second != degree) {
            throw SceneError("conflicting overrides for " + key.relation + " and " + converse.relation);
        }
    }
}

namespace detail {

inline Possibility degree_from(const nlohmann::json& j, const std::string& what) {
    if (!j.is_number()) throw SceneError(what + ": degree must be a number");
    try {
        return Possibility(j.get<double>());
    } catch (const RangeError&) {
        throw SceneError(what + ": degree " + j.dump() + " outside [0,1]");
    }
}

inline std::map<std::string, Possibility> degree_map(const nlohmann::json& j, const std::string& what) {
    std::map<std::string, Possibility> out;
    if (j.is_null()) return out;
    if (!j.is_object()) throw SceneError(what + " must be an object");
    for (const auto& [k, v] : j.items()) out.emplace(k, degree_from(v, what + "." + k));
    return out;
}

} // namespace detail

inline Scene scene_from_json(const nlohmann::json& doc) {
    using nlohmann::json;
    if (!doc.is_object()) throw SceneError("scene document must be an object");
    Scene s;
    const auto& objs = doc.contains("objects") ? doc.at("objects") : json::array();
    if (!objs.is_array()) throw SceneError("objects must be an array");
    for (const auto& jo : objs) {
        if (!jo.is_object()) throw SceneError("object entry must be an object");
        PerceivedObject o;
        try {
            o.id = jo.at("id").get<std::string>();
            o.detected_type = ascii_lower(jo.at("type").get<std::string>());
            const auto& b = jo.at("bbox");
            if (!b.is_array() || b.size() != 4) throw SceneError(o.id + ": bbox must be [x_min, x_max, y_min, y_max]");
            o.bbox = BoundingBox(b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>());
        } catch (const json::exception& e) {
            throw SceneError(std::string("malformed object entry: ") + e.what());
        }
        if (!jo.contains("confidence")) throw SceneError(o.id + ": missing confidence");
        o.detection_confidence = detail::degree_from(jo.at("confidence"), o.id + ".confidence");
        o.color_degrees = detail::degree_map(jo.value("colors", json()), o.id + ".colors");
        o.attribute_overrides = detail::degree_map(jo.value("attribute_overrides", json()), o.id + ".attribute_overrides");
        s.objects.push_back(std::move(o));
    }
    if (doc.contains("relation_overrides")) {
        const auto& ro = doc.at("relation_overrides");
        if (!ro.is_array()) throw SceneError("relation_overrides must be an array");
        for (const auto& jr : ro) {
            RelationKey key;
            try {
                key.relation = jr.at("relation").get<std::string>();
                key.args = jr.at("args").get<std::vector<std::string>>();
            } catch (const json::exception& e) {
                throw SceneError(std::string("malformed relation override: ") + e.what());
            }
            if (!jr.contains("degree")) throw SceneError("relation override without degree");
            auto degree = detail::degree_from(jr.at("degree"), "relation_overrides." + key.relation);
            if (!s.relation_overrides.emplace(key, degree).second) {
                throw SceneError("duplicate relation override " + key.relation);
            }
        }
    }
    check_scene(s);
    return s;
}

inline Scene load_scene(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SceneError(std::string("malformed scene document: ") + e.what());
    }
    return scene_from_json(doc);
}

inline Scene load_scene(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SceneError(std::string("malformed scene document: ") + e.what());
    }
    return scene_from_json(doc);
}

// Canonical layout: objects sorted by id, keys in fixed order.
inline nlohmann::ordered_json scene_to_json(const Scene& s) {
    using nlohmann::ordered_json;
    std::vector<const PerceivedObject*> sorted;
    for (const auto& o : s.objects) sorted.push_back(&o);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });

    ordered_json objs = ordered_json::array();
    for (const auto* o : sorted) {
        ordered_json jo;
        jo["id"] = o->id;
        jo["type"] = o->detected_type;
        jo["confidence"] = o->detection_confidence.value();
        jo["bbox"] = {o->bbox.x_min, o->bbox.x_max, o->bbox.y_min, o->bbox.y_max};
        ordered_json colors = ordered_json::object();
        for (const auto& [k, v] : o->color_degrees) colors[k] = v.value();
        jo["colors"] = colors;
        if (!o->attribute_overrides.empty()) {
            ordered_json ov = ordered_json::object();
            for (const auto& [k, v] : o->attribute_overrides) ov[k] = v.value();
            jo["attribute_overrides"] = ov;
        }
        objs.push_back(std::move(jo));
    }
    ordered_json rel = ordered_json::array();
    for (const auto& [key, degree] : s.relation_overrides) {
        ordered_json jr;
        jr["relation"] = key.relation;
        jr["args"] = key.args;
        jr["degree"] = degree.value();
        rel.push_back(std::move(jr));
    }
    ordered_json doc;
    doc["objects"] = std::move(objs);
    doc["relation_overrides"] = std::move(rel);
    return doc;
}

inline std::string save_scene(const Scene& s) {
    return scene_to_json(s).dump(2) + "\n";
}

} // namespace scenematch
