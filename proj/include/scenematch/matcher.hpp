#pragma once

// Hypothesis enumeration: injective bindings of expected objects to perceived
// objects, scored item by item and aggregated into a likelihood.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scenematch/description.hpp"
#include "scenematch/geometry.hpp"
#include "scenematch/parser.hpp"
#include "scenematch/possibility.hpp"
#include "scenematch/scene.hpp"

namespace scenematch {

enum class Aggregator { Min, GeoMean };

// Who counts as a competitor when measuring non-ambiguity.
enum class CompetitorMode { HuntBinding, AnyBinding };

struct ItemScore {
    enum class Kind { Object, Relation };
    Kind kind;
    std::size_t index;                   // into the alternative's objects or relations
    std::vector<std::string> perceived;  // bound perceived ids
    Possibility value;

    bool operator==(const ItemScore&) const = default;
};

struct MatchHypothesis {
    std::size_t alternative_index = 0;
    // Expected id -> perceived id, in the alternative's object order.
    std::vector<std::pair<std::string, std::string>> binding;
    std::vector<ItemScore> item_scores;
    Possibility likelihood;
    std::string hunt;  // perceived id bound to the hunt object

    std::vector<std::pair<std::string, std::string>> sorted_binding() const {
        auto b = binding;
        std::sort(b.begin(), b.end());
        return b;
    }

    const std::string& bound(const std::string& expected_id) const {
        for (const auto& [e, p] : binding) {
            if (e == expected_id) return p;
        }
        throw Error("no binding for " + expected_id);
    }

    bool operator==(const MatchHypothesis&) const = default;
};

// Descending likelihood, then (alternative, sorted binding) ascending.
inline bool ranks_before(const MatchHypothesis& a, const MatchHypothesis& b) {
    if (a.likelihood != b.likelihood) return a.likelihood > b.likelihood;
    if (a.alternative_index != b.alternative_index) return a.alternative_index < b.alternative_index;
    return a.sorted_binding() < b.sorted_binding();
}

struct RecognizedScene {
    std::vector<MatchHypothesis> hypotheses;
};

struct MatchingPerformance {
    Possibility likelihood;
    double non_ambiguity = 0;

    bool operator==(const MatchingPerformance&) const = default;
};

inline Possibility aggregate(std::span<const Possibility> scores, Aggregator agg) {
    if (scores.empty()) return Possibility::one();
    auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    if (agg == Aggregator::Min || *lo == *hi) return *lo;
    if (lo->value() == 0.0) return Possibility::zero();
    double log_sum = 0;
    for (auto s : scores) log_sum += std::log(s.value());
    const double g = std::exp(log_sum / static_cast<double>(scores.size()));
    return Possibility(std::clamp(g, lo->value(), hi->value()));
}

inline Possibility object_match(const ExpectedObject& o, const PerceivedObject& w, const MembershipParams& params) {
    return eval_attribute_formula(o.formula, w, params);
}

namespace detail {

// Precomputed object scores and lazily filled relation scores for one
// alternative against one scene, plus the depth-first binding search.
class BindingSearch {
public:
    BindingSearch(const Alternative& alt, std::size_t alt_index, const Scene& scene, const MembershipParams& params,
                  const EvalOptions& eval)
        : alt_(alt), alt_index_(alt_index), scene_(scene), params_(params), eval_(eval) {
        const auto k = alt.objects.size();
        const auto n = scene.objects.size();
        object_.assign(k, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                object_[i][j] = object_match(alt.objects[i], scene.objects[j], params).value();
            }
        }
        for (const auto& e : alt.relations) {
            Edge edge;
            for (const auto& id : e.args) edge.args.push_back(static_cast<std::size_t>(alt.index_of(id)));
            if (edge.args.size() != 2) throw EvalError("only binary relation edges can be matched");
            edge.cache.assign(n * n, -1.0);
            edges_.push_back(std::move(edge));
        }
    }

    std::size_t item_count() const { return alt_.objects.size() + alt_.relations.size(); }

    // Visits complete bindings. `floor` is re-read during the search; under
    // MIN a partial binding whose running minimum drops below it is abandoned.
    void run(Aggregator agg, const std::function<double()>& floor,
             const std::function<void(const std::vector<std::size_t>&, const std::vector<Possibility>&)>& visit) {
        const auto k = alt_.objects.size();
        const auto n = scene_.objects.size();
        if (k == 0 || n < k) return;

        // Most constrained expected object first.
        std::vector<std::size_t> order(k);
        for (std::size_t i = 0; i < k; ++i) order[i] = i;
        std::vector<std::size_t> viable(k, 0);
        for (std::size_t i = 0; i < k; ++i) {
            viable[i] = static_cast<std::size_t>(
                std::count_if(object_[i].begin(), object_[i].end(), [](double v) { return v > 0; }));
        }
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return viable[a] < viable[b]; });
        std::vector<std::size_t> depth_of(k);
        for (std::size_t d = 0; d < k; ++d) depth_of[order[d]] = d;
        std::vector<std::vector<std::size_t>> closing(k);
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            closing[std::max(depth_of[edges_[e].args[0]], depth_of[edges_[e].args[1]])].push_back(e);
        }

        std::vector<std::size_t> assign(k, 0);
        std::vector<bool> used(n, false);
        std::vector<Possibility> scores(item_count());
        const bool prune = agg == Aggregator::Min;

        std::function<void(std::size_t, double)> dfs = [&](std::size_t depth, double running) {
            if (depth == k) {
                visit(assign, scores);
                return;
            }
            const auto i = order[depth];
            for (std::size_t j = 0; j < n; ++j) {
                if (used[j]) continue;
                double r = std::min(running, object_[i][j]);
                if (prune && r < floor()) continue;
                assign[i] = j;
                scores[i] = Possibility(object_[i][j]);
                bool alive = true;
                for (auto e : closing[depth]) {
                    const double v = relation(e, assign);
                    scores[k + e] = Possibility(v);
                    r = std::min(r, v);
                    if (prune && r < floor()) {
                        alive = false;
                        break;
                    }
                }
                if (!alive) continue;
                used[j] = true;
                dfs(depth + 1, r);
                used[j] = false;
            }
        };
        dfs(0, 1.0);
    }

    MatchHypothesis hypothesis(const std::vector<std::size_t>& assign, const std::vector<Possibility>& scores,
                               Aggregator agg) const {
        MatchHypothesis h;
        h.alternative_index = alt_index_;
        const auto k = alt_.objects.size();
        for (std::size_t i = 0; i < k; ++i) {
            const auto& pid = scene_.objects[assign[i]].id;
            h.binding.emplace_back(alt_.objects[i].id, pid);
            h.item_scores.push_back({ItemScore::Kind::Object, i, {pid}, scores[i]});
            if (alt_.objects[i].is_hunt) h.hunt = pid;
        }
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            std::vector<std::string> ids;
            for (auto a : edges_[e].args) ids.push_back(scene_.objects[assign[a]].id);
            h.item_scores.push_back({ItemScore::Kind::Relation, e, std::move(ids), scores[k + e]});
        }
        h.likelihood = aggregate(scores, agg);
        return h;
    }

    // Same order as comparing sorted_binding() of the two hypotheses.
    bool binding_less(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) const {
        if (by_id_.empty()) {
            by_id_.resize(alt_.objects.size());
            for (std::size_t i = 0; i < by_id_.size(); ++i) by_id_[i] = i;
            std::sort(by_id_.begin(), by_id_.end(),
                      [&](auto x, auto y) { return alt_.objects[x].id < alt_.objects[y].id; });
        }
        for (auto i : by_id_) {
            if (a[i] == b[i]) continue;
            return scene_.objects[a[i]].id < scene_.objects[b[i]].id;
        }
        return false;
    }

    std::size_t hunt_position() const { return static_cast<std::size_t>(alt_.hunt_index()); }

private:
    struct Edge {
        std::vector<std::size_t> args;
        std::vector<double> cache;
    };

    double relation(std::size_t e, const std::vector<std::size_t>& assign) {
        auto& edge = edges_[e];
        const auto n = scene_.objects.size();
        const auto a = assign[edge.args[0]];
        const auto b = assign[edge.args[1]];
        double& slot = edge.cache[a * n + b];
        if (slot < 0) {
            const PerceivedObject* args[2] = {&scene_.objects[a], &scene_.objects[b]};
            slot = eval_relation_formula(alt_.relations[e].formula, args, scene_, params_, eval_).value();
        }
        return slot;
    }

    const Alternative& alt_;
    std::size_t alt_index_;
    const Scene& scene_;
    const MembershipParams& params_;
    EvalOptions eval_;
    std::vector<std::vector<double>> object_;
    std::vector<Edge> edges_;
    mutable std::vector<std::size_t> by_id_;
};

} // namespace detail

// Scores one explicit binding (expected id -> perceived id).
inline MatchHypothesis score_hypothesis(const Alternative& alt, std::size_t alt_index,
                                        const std::map<std::string, std::string>& binding, const Scene& scene,
                                        const MembershipParams& params, Aggregator agg,
                                        const EvalOptions& eval = {}) {
    std::vector<const PerceivedObject*> bound;
    std::set<std::string> seen;
    for (const auto& o : alt.objects) {
        auto it = binding.find(o.id);
        if (it == binding.end()) throw Error("binding does not cover " + o.id);
        const auto* w = scene.find(it->second);
        if (!w) throw Error("binding references unknown perceived object " + it->second);
        if (!seen.insert(it->second).second) throw Error("binding is not injective on " + it->second);
        bound.push_back(w);
    }
    MatchHypothesis h;
    h.alternative_index = alt_index;
    std::vector<Possibility> scores;
    for (std::size_t i = 0; i < alt.objects.size(); ++i) {
        const auto v = object_match(alt.objects[i], *bound[i], params);
        h.binding.emplace_back(alt.objects[i].id, bound[i]->id);
        h.item_scores.push_back({ItemScore::Kind::Object, i, {bound[i]->id}, v});
        if (alt.objects[i].is_hunt) h.hunt = bound[i]->id;
        scores.push_back(v);
    }
    for (std::size_t e = 0; e < alt.relations.size(); ++e) {
        const auto& edge = alt.relations[e];
        std::vector<const PerceivedObject*> args;
        std::vector<std::string> ids;
        for (const auto& id : edge.args) {
            args.push_back(bound[static_cast<std::size_t>(alt.index_of(id))]);
            ids.push_back(args.back()->id);
        }
        const auto v = eval_relation_formula(edge.formula, args, scene, params, eval);
        h.item_scores.push_back({ItemScore::Kind::Relation, e, std::move(ids), v});
        scores.push_back(v);
    }
    h.likelihood = aggregate(scores, agg);
    return h;
}

struct MatchOptions {
    Aggregator aggregator = Aggregator::Min;
    double min_likelihood = 0.0;
    EvalOptions eval;
};

inline void rank(std::vector<MatchHypothesis>& hs) {
    std::sort(hs.begin(), hs.end(), ranks_before);
}

// Every injective binding of every alternative whose likelihood reaches
// the threshold, ranked.
inline RecognizedScene enumerate_hypotheses(const Description& d, const Scene& scene, const MembershipParams& params,
                                            const MatchOptions& opts = {}) {
    if (!(opts.min_likelihood >= 0.0 && opts.min_likelihood <= 1.0)) throw RangeError("min_likelihood outside [0,1]");
    RecognizedScene rs;
    for (std::size_t a = 0; a < d.alternatives.size(); ++a) {
        detail::BindingSearch search(d.alternatives[a], a, scene, params, opts.eval);
        const double floor = opts.min_likelihood;
        search.run(opts.aggregator, [floor] { return floor; },
                   [&](const std::vector<std::size_t>& assign, const std::vector<Possibility>& scores) {
                       auto h = search.hypothesis(assign, scores, opts.aggregator);
                       if (h.likelihood.value() >= opts.min_likelihood) rs.hypotheses.push_back(std::move(h));
                   });
    }
    rank(rs.hypotheses);
    return rs;
}

namespace detail {

inline bool competes(const MatchHypothesis& leader, const MatchHypothesis& other, CompetitorMode mode) {
    if (mode == CompetitorMode::HuntBinding) return other.hunt != leader.hunt;
    return other.sorted_binding() != leader.sorted_binding();
}

} // namespace detail

// Leader likelihood minus the best competitor's (0 when there is none).
inline double non_ambiguity(const RecognizedScene& rs, CompetitorMode mode = CompetitorMode::HuntBinding) {
    if (rs.hypotheses.empty()) return 0.0;
    const auto& leader = rs.hypotheses.front();
    double competitor = 0.0;
    for (std::size_t i = 1; i < rs.hypotheses.size(); ++i) {
        if (detail::competes(leader, rs.hypotheses[i], mode)) {
            competitor = rs.hypotheses[i].likelihood.value();
            break;
        }
    }
    return likelihood_gap(leader.likelihood.value(), competitor);
}

// Leader and best competitor of one alternative, found with a bounded search
// instead of a full enumeration. Equivalent to enumerate_hypotheses at
// threshold 0 followed by non_ambiguity, under MIN.
struct AlternativeEvaluation {
    std::optional<MatchHypothesis> leader;
    double competitor = 0.0;

    MatchingPerformance performance() const {
        if (!leader) return {};
        return {leader->likelihood, likelihood_gap(leader->likelihood.value(), competitor)};
    }
};

inline AlternativeEvaluation evaluate_alternative(const Alternative& alt, std::size_t alt_index, const Scene& scene,
                                                  const MembershipParams& params,
                                                  CompetitorMode mode = CompetitorMode::HuntBinding,
                                                  const EvalOptions& eval = {}) {
    detail::BindingSearch search(alt, alt_index, scene, params, eval);
    // Best binding per competitor class; the floor is the runner-up class value.
    struct Best {
        double likelihood;
        std::vector<std::size_t> assign;
        std::vector<Possibility> scores;
    };
    const auto hunt = search.hunt_position();
    std::vector<Best> best;
    auto runner_up = [&]() {
        if (best.size() < 2) return 0.0;
        double first = 0, second = 0;
        for (const auto& b : best) {
            if (b.likelihood > first) {
                second = first;
                first = b.likelihood;
            } else if (b.likelihood > second) {
                second = b.likelihood;
            }
        }
        return second;
    };
    double floor = 0.0;
    search.run(Aggregator::Min, [&floor] { return floor; },
               [&](const std::vector<std::size_t>& assign, const std::vector<Possibility>& scores) {
                   const double lik = aggregate(scores, Aggregator::Min).value();
                   if (lik < floor) return;
                   auto it = best.end();
                   if (mode == CompetitorMode::HuntBinding) {
                       it = std::find_if(best.begin(), best.end(),
                                         [&](const Best& b) { return b.assign[hunt] == assign[hunt]; });
                   }
                   if (it == best.end()) {
                       best.push_back({lik, assign, scores});
                   } else if (lik > it->likelihood ||
                              (lik == it->likelihood && search.binding_less(assign, it->assign))) {
                       *it = {lik, assign, scores};
                   } else {
                       return;
                   }
                   floor = runner_up();
                   std::erase_if(best, [&](const Best& b) { return b.likelihood < floor; });
               });
    AlternativeEvaluation out;
    if (best.empty()) return out;
    std::sort(best.begin(), best.end(), [&](const Best& a, const Best& b) {
        if (a.likelihood != b.likelihood) return a.likelihood > b.likelihood;
        return search.binding_less(a.assign, b.assign);
    });
    out.leader = search.hypothesis(best.front().assign, best.front().scores, Aggregator::Min);
    if (best.size() > 1) out.competitor = best[1].likelihood;
    return out;
}

} // namespace scenematch
