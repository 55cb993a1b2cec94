#pragma once

// Shared test helpers: seeded random scenes and descriptions, and
// brute-force oracles that do not share code with the search or lattice.

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "scenematch/scenematch.hpp"

namespace testsupport {

using namespace scenematch;

inline std::string data_path(const std::string& name) { return std::string(SCENEMATCH_DATA_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Scene plant_scene() { return load_scene(read_text(data_path("plant_scene.json"))); }
inline Scene pipe_regions() { return load_scene(read_text(data_path("pipe_regions_scene.json"))); }
inline Description desc_file(const std::string& name) { return parse_description(read_text(data_path(name))); }

// Reference description strings.
inline const std::vector<std::string>& reference_strings() {
    static const std::vector<std::string> v{
        "red floodgate",
        "horizontal pipe on red floodgate",
        "vertical elongated pipe elbow horizontal pipe on red floodgate",
        "red floodgate[hunt]",
        "horizontal pipe on red floodgate[hunt]",
        "vertical elongated pipe elbow horizontal pipe on red floodgate[hunt]",
        "horizontal long blue pipe",
        "horizontal long blue pipe[hunt]",
    };
    return v;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(engine_); }
    // Coarse grid on purpose: ties exercise the ranking tie-breaks.
    double degree() { return static_cast<double>(below(11)) / 10.0; }
    double coord(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    template <typename T>
    const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

private:
    std::mt19937_64 engine_;
};

inline std::vector<std::string> non_type_attributes() {
    std::vector<std::string> out;
    for (const auto& a : kAttributes) {
        if (a.kind != AttributeKind::Type) out.emplace_back(a.name);
    }
    return out;
}

inline std::vector<std::string> relation_names(bool with_depth) {
    std::vector<std::string> out;
    for (const auto& r : kRelations) {
        const std::string n(r.name);
        if (!with_depth && (n == "in_front_of" || n == "behind")) continue;
        out.push_back(n);
    }
    return out;
}

inline Scene random_scene(Rng& rng, std::size_t n) {
    Scene s;
    const auto types = type_names();
    const auto colors = color_names();
    for (std::size_t i = 0; i < n; ++i) {
        PerceivedObject o;
        o.id = "W" + std::to_string(i + 1);
        o.detected_type = rng.below(3) == 0 ? std::string(rng.pick(types)) : (rng.chance(0.5) ? "pipe" : "floodgate");
        o.detection_confidence = Possibility(rng.degree());
        const double x = std::round(rng.coord(0, 80)), y = std::round(rng.coord(0, 80));
        const bool wide = rng.chance(0.5);
        const double w = std::round(wide ? rng.coord(20, 60) : rng.coord(3, 15));
        const double h = std::round(wide ? rng.coord(3, 15) : rng.coord(20, 60));
        o.bbox = BoundingBox(x, x + w, y, y + h);
        for (const auto& c : colors) {
            if (rng.chance(0.3)) o.color_degrees[std::string(c)] = Possibility(rng.degree());
        }
        if (rng.chance(0.2)) o.attribute_overrides["long"] = Possibility(rng.degree());
        s.objects.push_back(std::move(o));
    }
    return s;
}

template <typename Tag>
Formula<Tag> random_formula(Rng& rng, const std::vector<std::string>& atoms, int depth) {
    if (depth == 0 || rng.chance(0.5)) return Formula<Tag>::leaf(rng.pick(atoms));
    const auto op = rng.below(3);
    if (op == 2) return Formula<Tag>::negate(random_formula<Tag>(rng, atoms, depth - 1));
    std::vector<Formula<Tag>> kids;
    const auto n = 2 + rng.below(2);
    for (std::size_t i = 0; i < n; ++i) kids.push_back(random_formula<Tag>(rng, atoms, depth - 1));
    return op == 0 ? Formula<Tag>::conj(std::move(kids)) : Formula<Tag>::disj(std::move(kids));
}

struct AlternativeShape {
    std::size_t max_objects = 3;
    std::size_t max_adjectives = 3;
    std::size_t max_relations = 3;
    int formula_depth = 2;
    bool chain_ids = false;  // o1..on, the chain printer's precondition
    bool with_depth = false;
};

inline Alternative random_alternative(Rng& rng, const AlternativeShape& shape) {
    static const auto adjectives = non_type_attributes();
    const auto types = type_names();
    std::vector<std::string> type_atoms(types.begin(), types.end());
    Alternative alt;
    const auto k = 1 + rng.below(shape.max_objects);
    const auto hunt = rng.below(k);
    for (std::size_t i = 0; i < k; ++i) {
        ExpectedObject o;
        o.id = shape.chain_ids ? "o" + std::to_string(i + 1) : std::string(1, static_cast<char>('a' + i)) + "x";
        auto type = AttributeFormula::leaf(rng.pick(type_atoms));
        const auto extra = rng.below(shape.max_adjectives + 1);
        if (extra == 0) {
            o.formula = type;
        } else {
            std::vector<AttributeFormula> kids;
            for (std::size_t j = 0; j < extra; ++j) {
                kids.push_back(shape.formula_depth > 0 && rng.chance(0.3)
                                   ? random_formula<AttributeTag>(rng, adjectives, shape.formula_depth)
                                   : AttributeFormula::leaf(rng.pick(adjectives)));
            }
            kids.insert(kids.begin() + static_cast<std::ptrdiff_t>(rng.below(kids.size() + 1)), type);
            o.formula = AttributeFormula::conj(std::move(kids));
        }
        o.is_hunt = i == hunt;
        alt.objects.push_back(std::move(o));
    }
    const auto rels = relation_names(shape.with_depth);
    if (k > 1) {
        const auto m = rng.below(shape.max_relations + 1);
        for (std::size_t e = 0; e < m; ++e) {
            const auto a = rng.below(k);
            auto b = rng.below(k - 1);
            if (b >= a) ++b;
            RelationEdge edge;
            edge.formula = shape.formula_depth > 0 && rng.chance(0.3)
                               ? random_formula<RelationTag>(rng, rels, shape.formula_depth)
                               : RelationFormula::leaf(rng.pick(rels));
            edge.args = {alt.objects[a].id, alt.objects[b].id};
            alt.relations.push_back(std::move(edge));
        }
    }
    return alt;
}

// Chain-shaped alternative: objects o1..on linked o(i) -> o(i+1).
inline Alternative random_chain(Rng& rng) {
    static const auto adjectives = non_type_attributes();
    const auto types = type_names();
    std::vector<std::string> type_atoms(types.begin(), types.end());
    Alternative alt;
    const auto k = 1 + rng.below(4);
    const auto hunt = rng.below(k);
    for (std::size_t i = 0; i < k; ++i) {
        ExpectedObject o;
        o.id = "o" + std::to_string(i + 1);
        std::vector<AttributeFormula> kids;
        for (std::size_t j = rng.below(3); j > 0; --j) kids.push_back(AttributeFormula::leaf(rng.pick(adjectives)));
        kids.push_back(AttributeFormula::leaf(rng.pick(type_atoms)));
        o.formula = kids.size() == 1 ? kids.front() : AttributeFormula::conj(std::move(kids));
        o.is_hunt = i == hunt;
        alt.objects.push_back(std::move(o));
        if (i > 0) {
            const auto& ph = relation_phrases()[rng.below(relation_phrases().size())];
            RelationEdge e;
            if (ph.atoms.size() == 1) {
                e.formula = RelationFormula::leaf(std::string(ph.atoms.front()));
            } else {
                std::vector<RelationFormula> kids2;
                for (auto a : ph.atoms) kids2.push_back(RelationFormula::leaf(std::string(a)));
                e.formula = RelationFormula::conj(std::move(kids2));
            }
            e.args = {"o" + std::to_string(i), "o" + std::to_string(i + 1)};
            alt.relations.push_back(std::move(e));
        }
    }
    return alt;
}

inline Description random_description(Rng& rng) {
    Description d;
    const auto n = rng.chance(0.7) ? 1 : 2 + rng.below(2);
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.chance(0.3)) {
            d.alternatives.push_back(random_chain(rng));
        } else {
            AlternativeShape shape;
            shape.max_objects = 4;
            shape.chain_ids = rng.chance(0.3);
            shape.with_depth = true;
            d.alternatives.push_back(random_alternative(rng, shape));
        }
    }
    return d;
}

// ---- oracles ---------------------------------------------------------------

struct OracleHypothesis {
    std::size_t alternative = 0;
    std::map<std::string, std::string> binding;  // expected id -> perceived id
    std::vector<double> items;                   // objects, then edges
    double likelihood = 0;
    std::string hunt;
};

inline double oracle_aggregate(const std::vector<double>& v, Aggregator agg) {
    if (v.empty()) return 1.0;
    const double lo = *std::min_element(v.begin(), v.end());
    if (agg == Aggregator::Min) return lo;
    double p = 1.0;
    for (double x : v) p *= x;
    return std::pow(p, 1.0 / static_cast<double>(v.size()));
}

// Tries every injective map by counting through all k-tuples.
inline std::vector<OracleHypothesis> oracle_enumerate(const Description& d, const Scene& scene,
                                                      const MembershipParams& params, Aggregator agg,
                                                      double threshold) {
    std::vector<OracleHypothesis> out;
    const auto n = scene.objects.size();
    for (std::size_t a = 0; a < d.alternatives.size(); ++a) {
        const auto& alt = d.alternatives[a];
        const auto k = alt.objects.size();
        std::vector<std::size_t> tuple(k, 0);
        std::size_t total = 1;
        for (std::size_t i = 0; i < k; ++i) total *= n;
        for (std::size_t code = 0; code < total && n > 0; ++code) {
            std::size_t c = code;
            for (std::size_t i = 0; i < k; ++i) {
                tuple[i] = c % n;
                c /= n;
            }
            std::vector<std::size_t> sorted = tuple;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
            OracleHypothesis h;
            h.alternative = a;
            for (std::size_t i = 0; i < k; ++i) {
                const auto& w = scene.objects[tuple[i]];
                h.binding[alt.objects[i].id] = w.id;
                h.items.push_back(eval_attribute_formula(alt.objects[i].formula, w, params).value());
                if (alt.objects[i].is_hunt) h.hunt = w.id;
            }
            for (const auto& e : alt.relations) {
                const PerceivedObject* args[2] = {&scene.objects[tuple[alt.index_of(e.args[0])]],
                                                  &scene.objects[tuple[alt.index_of(e.args[1])]]};
                h.items.push_back(eval_relation_formula(e.formula, args, scene, params).value());
            }
            h.likelihood = oracle_aggregate(h.items, agg);
            if (h.likelihood >= threshold) out.push_back(std::move(h));
        }
    }
    std::sort(out.begin(), out.end(), [](const OracleHypothesis& x, const OracleHypothesis& y) {
        if (x.likelihood != y.likelihood) return x.likelihood > y.likelihood;
        if (x.alternative != y.alternative) return x.alternative < y.alternative;
        return x.binding < y.binding;
    });
    return out;
}

struct OraclePerformance {
    bool has_leader = false;
    std::string hunt;
    double likelihood = 0;
    double non_ambiguity = 0;
};

inline OraclePerformance oracle_performance(const Alternative& alt, const Scene& scene,
                                            const MembershipParams& params) {
    Description d{{alt}};
    const auto hs = oracle_enumerate(d, scene, params, Aggregator::Min, 0.0);
    OraclePerformance p;
    if (hs.empty()) return p;
    p.has_leader = true;
    p.hunt = hs.front().hunt;
    p.likelihood = hs.front().likelihood;
    double competitor = 0;
    for (const auto& h : hs) {
        if (h.hunt != p.hunt) {
            competitor = h.likelihood;
            break;
        }
    }
    p.non_ambiguity = snap_degree(p.likelihood - competitor);
    return p;
}

struct OracleLattice {
    std::vector<std::vector<std::size_t>> maximal;                    // kept item indices
    std::map<std::vector<std::size_t>, std::vector<std::vector<std::size_t>>> kernels;  // per maximal
};

// Evaluates every subset of droppable items from scratch.
inline OracleLattice oracle_lattice(const Alternative& alt, const Scene& scene, const MembershipParams& params,
                                    PerformanceThreshold th) {
    const auto items = description_items(alt);
    std::vector<std::size_t> drop;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].droppable) drop.push_back(i);
    }
    const std::size_t count = std::size_t{1} << drop.size();
    auto kept_of = [&](std::size_t m) {
        std::vector<std::size_t> kept;
        for (std::size_t i = 0; i < items.size(); ++i) {
            const auto it = std::find(drop.begin(), drop.end(), i);
            if (it == drop.end() || (m >> (it - drop.begin()) & 1)) kept.push_back(i);
        }
        return kept;
    };
    std::vector<OraclePerformance> perf(count);
    std::vector<bool> ok(count);
    for (std::size_t m = 0; m < count; ++m) {
        perf[m] = oracle_performance(induce(alt, SubDescription{0, kept_of(m)}), scene, params);
        ok[m] = perf[m].has_leader && perf[m].likelihood >= th.min_likelihood &&
                perf[m].non_ambiguity >= th.min_non_ambiguity;
    }
    OracleLattice out;
    for (std::size_t m = 0; m < count; ++m) {
        if (!ok[m]) continue;
        bool maximal = true;
        for (std::size_t b = 0; b < drop.size(); ++b) {
            if (!(m >> b & 1) && ok[m | (std::size_t{1} << b)]) maximal = false;
        }
        if (!maximal) continue;
        const auto dn = kept_of(m);
        out.maximal.push_back(dn);
        auto meets = [&](std::size_t k) {
            const auto& p = perf[k];
            if (!p.has_leader || p.hunt != perf[m].hunt || p.likelihood < th.min_likelihood) return false;
            return th.min_non_ambiguity > 0 ? p.non_ambiguity > 0 : true;
        };
        auto& ks = out.kernels[dn];
        for (std::size_t k = 0; k < count; ++k) {
            if ((k & m) != k || !meets(k)) continue;
            bool minimal = true;
            for (std::size_t b = 0; b < drop.size(); ++b) {
                if ((k >> b & 1) && meets(k & ~(std::size_t{1} << b))) minimal = false;
            }
            if (minimal) ks.push_back(kept_of(k));
        }
        std::sort(ks.begin(), ks.end());
    }
    std::sort(out.maximal.begin(), out.maximal.end());
    return out;
}

} // namespace testsupport
