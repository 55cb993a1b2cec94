#pragma once

// Human-readable session listings and JSON documents for match results and
// redundancy reports.

#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenematch/matcher.hpp"
#include "scenematch/parser.hpp"
#include "scenematch/redundancy.hpp"
#include "scenematch/scene.hpp"

namespace scenematch {

inline std::string format_degree(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string item_text(const Alternative& alt, const ItemScore& s) {
    if (s.kind == ItemScore::Kind::Object) {
        return s.perceived.front() + " " + describe_object(alt.objects[s.index]);
    }
    std::string t = "R(";
    for (std::size_t i = 0; i < s.perceived.size(); ++i) t += (i ? ", " : "") + s.perceived[i];
    return t + ") " + describe_relation(alt.relations[s.index].formula);
}

inline std::string format_hypothesis(const Description& d, const MatchHypothesis& h, std::size_t rank) {
    std::string out = "hypothesis " + std::to_string(rank) + " π = " + format_degree(h.likelihood.value());
    if (d.alternatives.size() > 1) out += "  (alternative " + std::to_string(h.alternative_index + 1) + ")";
    out += "\n";
    const auto& alt = d.alternatives[h.alternative_index];
    for (const auto& s : h.item_scores) {
        out += "  " + item_text(alt, s) + ": π = " + format_degree(s.value.value()) + "\n";
    }
    return out;
}

inline std::string format_recognized(const Description& d, const RecognizedScene& rs) {
    std::string out;
    for (std::size_t i = 0; i < rs.hypotheses.size(); ++i) out += format_hypothesis(d, rs.hypotheses[i], i + 1);
    if (rs.hypotheses.empty()) out += "no hypothesis\n";
    return out;
}

inline nlohmann::ordered_json hypothesis_to_json(const Description& d, const MatchHypothesis& h) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["alternative"] = h.alternative_index;
    j["likelihood"] = h.likelihood.value();
    j["hunt"] = h.hunt;
    ordered_json binding = ordered_json::array();
    for (const auto& [e, p] : h.binding) binding.push_back({e, p});
    j["binding"] = binding;
    ordered_json items = ordered_json::array();
    const auto& alt = d.alternatives[h.alternative_index];
    for (const auto& s : h.item_scores) {
        ordered_json it;
        it["kind"] = s.kind == ItemScore::Kind::Object ? "object" : "relation";
        it["index"] = s.index;
        it["perceived"] = s.perceived;
        it["degree"] = s.value.value();
        it["text"] = item_text(alt, s);
        items.push_back(std::move(it));
    }
    j["items"] = items;
    return j;
}

inline nlohmann::ordered_json recognized_to_json(const Description& d, const RecognizedScene& rs,
                                                 const std::set<std::string>& notes = {}) {
    nlohmann::ordered_json j;
    j["description"] = print_description(d);
    j["hypotheses"] = nlohmann::ordered_json::array();
    for (const auto& h : rs.hypotheses) j["hypotheses"].push_back(hypothesis_to_json(d, h));
    j["non_ambiguity"] = non_ambiguity(rs);
    j["notes"] = std::vector<std::string>(notes.begin(), notes.end());
    return j;
}

inline MatchHypothesis hypothesis_from_json(const nlohmann::json& j) {
    MatchHypothesis h;
    h.alternative_index = j.at("alternative").get<std::size_t>();
    h.likelihood = Possibility(j.at("likelihood").get<double>());
    h.hunt = j.at("hunt").get<std::string>();
    for (const auto& b : j.at("binding")) h.binding.emplace_back(b.at(0).get<std::string>(), b.at(1).get<std::string>());
    for (const auto& it : j.at("items")) {
        h.item_scores.push_back({it.at("kind").get<std::string>() == "object" ? ItemScore::Kind::Object
                                                                              : ItemScore::Kind::Relation,
                                 it.at("index").get<std::size_t>(), it.at("perceived").get<std::vector<std::string>>(),
                                 Possibility(it.at("degree").get<double>())});
    }
    return h;
}

inline RecognizedScene recognized_from_json(const nlohmann::json& j) {
    RecognizedScene rs;
    for (const auto& h : j.at("hypotheses")) rs.hypotheses.push_back(hypothesis_from_json(h));
    return rs;
}

template <typename Tag>
nlohmann::ordered_json formula_to_json(const Formula<Tag>& f) {
    if (f.op == FormulaOp::Leaf) return f.atom;
    static constexpr const char* names[] = {"leaf", "and", "or", "not"};
    nlohmann::ordered_json j;
    auto& kids = j[names[static_cast<int>(f.op)]] = nlohmann::ordered_json::array();
    for (const auto& c : f.children) kids.push_back(formula_to_json(c));
    return j;
}

inline nlohmann::ordered_json description_to_json(const Description& d) {
    nlohmann::ordered_json alts = nlohmann::ordered_json::array();
    for (const auto& alt : d.alternatives) {
        nlohmann::ordered_json a;
        a["objects"] = nlohmann::ordered_json::array();
        for (const auto& o : alt.objects) {
            a["objects"].push_back({{"id", o.id}, {"formula", formula_to_json(o.formula)}, {"hunt", o.is_hunt}});
        }
        a["relations"] = nlohmann::ordered_json::array();
        for (const auto& r : alt.relations) {
            a["relations"].push_back({{"formula", formula_to_json(r.formula)}, {"args", r.args}});
        }
        alts.push_back(std::move(a));
    }
    return {{"canonical", print_description(d)}, {"alternatives", alts}};
}

namespace detail {

inline std::vector<std::string> labels(const std::vector<DescriptionItem>& items, const SubDescription& s) {
    std::vector<std::string> out;
    for (auto k : s.kept) out.push_back(items[k].label);
    return out;
}

inline std::string join(const std::vector<std::string>& xs) {
    std::string s;
    for (const auto& x : xs) s += (s.empty() ? "" : " ") + x;
    return "(" + s + ")";
}

inline nlohmann::ordered_json performance_json(const MatchingPerformance& p) {
    return {{"likelihood", p.likelihood.value()}, {"non_ambiguity", p.non_ambiguity}};
}

} // namespace detail

inline nlohmann::ordered_json report_to_json(const Description& d, const RedundancyReport& r, bool verbose) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["matched"] = r.matched;
    j["alternative"] = r.alternative_index;
    ordered_json items = ordered_json::array();
    for (const auto& it : r.items) items.push_back({{"label", it.label}, {"droppable", it.droppable}});
    j["items"] = items;
    j["full_performance"] = detail::performance_json(r.full_performance);
    j["performance"] = detail::performance_json(r.performance);
    if (r.matched) {
        j["maximal_subd"] = detail::labels(r.items, r.maximal_subd);
        j["maximal_performance"] = detail::performance_json(r.maximal_performance);
        ordered_json cands = ordered_json::array();
        for (const auto& c : r.maximal_candidates) cands.push_back(detail::labels(r.items, c));
        j["maximal_candidates"] = cands;
        ordered_json ks = ordered_json::array();
        for (const auto& k : r.kernels) ks.push_back(detail::labels(r.items, k));
        j["kernels"] = ks;
        j["chosen_kernel"] = detail::labels(r.items, r.chosen_kernel);
        j["delta"] = r.delta;
        j["used_redundancy"] = r.used_redundancy;
        j["dropped_items"] = r.dropped_items;
        j["best_subi"] = hypothesis_to_json(d, *r.best_subi);
    }
    if (verbose) {
        ordered_json trace = ordered_json::array();
        for (const auto& e : r.trace) {
            const auto items_e = description_items(d.alternatives[e.alternative_index]);
            ordered_json t;
            t["alternative"] = e.alternative_index;
            t["kept"] = detail::labels(items_e, SubDescription{e.alternative_index, e.kept});
            t["performance"] = detail::performance_json(e.performance);
            t["acceptable"] = e.acceptable;
            t["leader_hunt"] = e.leader_hunt;
            trace.push_back(std::move(t));
        }
        j["trace"] = trace;
    }
    return j;
}

inline std::string format_report(const Description& d, const RedundancyReport& r, bool verbose) {
    std::string out;
    auto perf = [](const MatchingPerformance& p) {
        return "(" + format_degree(p.likelihood.value()) + ", " + format_degree(p.non_ambiguity) + ")";
    };
    std::vector<std::string> all;
    for (const auto& it : r.items) all.push_back(it.label);
    out += "description items " + detail::join(all) + "\n";
    out += "full description performance " + perf(r.full_performance) + "\n";
    if (!r.matched) {
        out += "no match; best rejected performance " + perf(r.performance) + "\n";
    } else {
        const auto& alt = d.alternatives[r.alternative_index];
        out += "maximal sub-description " + detail::join(detail::labels(r.items, r.maximal_subd)) + " performance " +
               perf(r.maximal_performance) + "\n";
        out += "kernel " + detail::join(detail::labels(r.items, r.chosen_kernel)) + "\n";
        out += "best match " + r.best_subi->hunt + " for " + describe_object(alt.objects[alt.hunt_index()]) + "\n";
        out += "description redundancy " + std::to_string(r.delta) + " " + detail::join(r.dropped_items) + " dropped\n";
        out += "matching performance with redundancy " + perf(r.performance) + "\n";
    }
    if (verbose) {
        out += "lattice:\n";
        for (const auto& e : r.trace) {
            const auto items_e = description_items(d.alternatives[e.alternative_index]);
            out += "  " + detail::join(detail::labels(items_e, SubDescription{e.alternative_index, e.kept})) + " " +
                   perf(e.performance) + (e.acceptable ? " acceptable" : "") +
                   (e.leader_hunt.empty() ? "" : " leader " + e.leader_hunt) + "\n";
        }
    }
    return out;
}

} // namespace scenematch
