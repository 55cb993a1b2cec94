#pragma once

// Fixed attribute and relation vocabularies, plus the word aliases the
// chain shorthand accepts.

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scenematch {

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

enum class AttributeKind { Type, Color, Orientation, Size };

struct AttributeEntry {
    std::string_view name;
    AttributeKind kind;
};

inline constexpr std::array<AttributeEntry, 16> kAttributes{{
    {"pipe", AttributeKind::Type},
    {"floodgate", AttributeKind::Type},
    {"elbow", AttributeKind::Type},
    {"cistern", AttributeKind::Type},
    {"supercharger", AttributeKind::Type},
    {"tsquare", AttributeKind::Type},
    {"red", AttributeKind::Color},
    {"blue", AttributeKind::Color},
    {"green", AttributeKind::Color},
    {"yellow", AttributeKind::Color},
    {"grey", AttributeKind::Color},
    {"horizontal", AttributeKind::Orientation},
    {"vertical", AttributeKind::Orientation},
    {"long", AttributeKind::Size},
    {"elongated", AttributeKind::Size},
    {"short", AttributeKind::Size},
}};

struct RelationEntry {
    std::string_view name;
    int arity;
    // Predicate with arguments swapped, or the predicate itself if symmetric.
    std::string_view converse;
    bool symmetric;
};

inline constexpr std::array<RelationEntry, 11> kRelations{{
    {"above", 2, "below", false},
    {"below", 2, "above", false},
    {"on", 2, "under", false},
    {"under", 2, "on", false},
    {"on_the_left_to", 2, "on_the_right_to", false},
    {"on_the_right_to", 2, "on_the_left_to", false},
    {"in_front_of", 2, "behind", false},
    {"behind", 2, "in_front_of", false},
    {"connected_to", 2, "connected_to", true},
    {"near_from", 2, "near_from", true},
    {"elbow", 2, "elbow", true},
}};

inline std::optional<AttributeKind> attribute_kind(std::string_view name) {
    for (const auto& e : kAttributes) {
        if (e.name == name) return e.kind;
    }
    return std::nullopt;
}

inline bool is_attribute(std::string_view name) { return attribute_kind(name).has_value(); }

inline bool is_type_atom(std::string_view name) {
    return attribute_kind(name) == AttributeKind::Type;
}

inline const RelationEntry* find_relation(std::string_view name) {
    for (const auto& e : kRelations) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

inline bool is_relation(std::string_view name) { return find_relation(name) != nullptr; }

inline std::vector<std::string> type_names() {
    std::vector<std::string> out;
    for (const auto& e : kAttributes) {
        if (e.kind == AttributeKind::Type) out.emplace_back(e.name);
    }
    return out;
}

inline std::vector<std::string> color_names() {
    std::vector<std::string> out;
    for (const auto& e : kAttributes) {
        if (e.kind == AttributeKind::Color) out.emplace_back(e.name);
    }
    return out;
}

// Single-word spellings mapped onto attribute names.
inline std::optional<std::string> canonical_attribute(std::string_view word) {
    if (is_attribute(word)) return std::string(word);
    if (word == "super-charger" || word == "super_charger") return "supercharger";
    if (word == "t-square" || word == "t_square" || word == "tee") return "tsquare";
    if (word == "gray") return "grey";
    return std::nullopt;
}

// A chain relation phrase: a sequence of words that stands for a conjunction
// of one or more relation atoms.
struct RelationPhrase {
    std::vector<std::string_view> words;
    std::vector<std::string_view> atoms;
};

// Listed so that the first phrase for a given atom list is the printed one.
inline const std::vector<RelationPhrase>& relation_phrases() {
    static const std::vector<RelationPhrase> phrases{
        {{"above"}, {"above"}},
        {{"below"}, {"below"}},
        {{"on", "the", "left", "to"}, {"on_the_left_to"}},
        {{"on", "the", "left", "of"}, {"on_the_left_to"}},
        {{"on", "the", "right", "to"}, {"on_the_right_to"}},
        {{"on", "the", "right", "of"}, {"on_the_right_to"}},
        {{"on"}, {"on"}},
        {{"under"}, {"under"}},
        {{"in", "front", "of"}, {"in_front_of"}},
        {{"behind"}, {"behind"}},
        {{"connected", "on", "the", "left", "to"}, {"connected_to", "on_the_left_to"}},
        {{"connected", "on", "the", "right", "to"}, {"connected_to", "on_the_right_to"}},
        {{"connected", "to"}, {"connected_to"}},
        {{"near", "from"}, {"near_from"}},
        {{"near", "to"}, {"near_from"}},
        {{"elbow"}, {"elbow"}},
    };
    return phrases;
}

} // namespace scenematch
