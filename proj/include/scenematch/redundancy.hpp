#pragma once

// Description redundancy: the lattice of sub-descriptions, maximal
// sub-descriptions, kernels, the redundancy count and the matching
// performance that credits it.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scenematch/description.hpp"
#include "scenematch/geometry.hpp"
#include "scenematch/matcher.hpp"
#include "scenematch/parser.hpp"
#include "scenematch/scene.hpp"

namespace scenematch {

// One conjunct of an object's formula, or one relation edge.
struct DescriptionItem {
    enum class Kind { Attribute, Relation };
    Kind kind;
    std::size_t object = 0;    // Attribute: object index
    std::size_t conjunct = 0;  // Attribute: top-level conjunct index
    std::size_t relation = 0;  // Relation: edge index
    bool droppable = true;
    std::string label;

    bool operator==(const DescriptionItem&) const = default;
};

namespace detail {

inline std::vector<const AttributeFormula*> conjuncts(const AttributeFormula& f) {
    std::vector<const AttributeFormula*> out;
    if (f.op == FormulaOp::And) {
        for (const auto& c : f.children) out.push_back(&c);
    } else {
        out.push_back(&f);
    }
    return out;
}

inline bool holds_type(const AttributeFormula& f) {
    std::vector<std::string> types;
    collect_positive_types(f, types);
    return !types.empty();
}

} // namespace detail

// Items in a fixed order: each object's conjuncts, then the relation edges.
// The conjunct carrying the type atom is not droppable.
inline std::vector<DescriptionItem> description_items(const Alternative& alt) {
    std::vector<DescriptionItem> items;
    for (std::size_t i = 0; i < alt.objects.size(); ++i) {
        const auto& o = alt.objects[i];
        const auto parts = detail::conjuncts(o.formula);
        for (std::size_t c = 0; c < parts.size(); ++c) {
            DescriptionItem it{DescriptionItem::Kind::Attribute, i, c, 0, !detail::holds_type(*parts[c]), ""};
            std::string text;
            detail::print_formula(*parts[c], text);
            it.label = o.id + "." + (parts[c]->is_leaf() || parts[c]->op == FormulaOp::Not ? text : "(" + text + ")");
            items.push_back(std::move(it));
        }
    }
    for (std::size_t e = 0; e < alt.relations.size(); ++e) {
        const auto& edge = alt.relations[e];
        std::string label = describe_relation(edge.formula);
        if (!edge.formula.is_leaf()) label = "(" + label + ")";
        label += "(";
        for (std::size_t a = 0; a < edge.args.size(); ++a) label += (a ? "," : "") + edge.args[a];
        items.push_back({DescriptionItem::Kind::Relation, 0, 0, e, true, label + ")"});
    }
    return items;
}

struct SubDescription {
    std::size_t alternative_index = 0;
    std::vector<std::size_t> kept;  // sorted indices into description_items()

    bool operator==(const SubDescription&) const = default;
};

// The alternative restricted to the kept items. Objects always stay; an
// object reduced to its type conjunct matches "some object of that type".
inline Alternative induce(const Alternative& parent, const SubDescription& sub) {
    const auto items = description_items(parent);
    std::vector<bool> keep(items.size(), false);
    for (auto k : sub.kept) {
        if (k >= items.size()) throw Error("sub-description item index out of range");
        keep[k] = true;
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (!items[i].droppable && !keep[i]) throw Error("sub-description drops non-droppable item " + items[i].label);
    }
    Alternative out;
    std::vector<std::vector<AttributeFormula>> kept_parts(parent.objects.size());
    std::vector<bool> kept_edges(parent.relations.size(), false);
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (!keep[i]) continue;
        const auto& it = items[i];
        if (it.kind == DescriptionItem::Kind::Attribute) {
            kept_parts[it.object].push_back(*detail::conjuncts(parent.objects[it.object].formula)[it.conjunct]);
        } else {
            kept_edges[it.relation] = true;
        }
    }
    for (std::size_t i = 0; i < parent.objects.size(); ++i) {
        ExpectedObject o = parent.objects[i];
        auto& parts = kept_parts[i];
        o.formula = parts.size() == 1 ? std::move(parts.front()) : AttributeFormula::conj(std::move(parts));
        out.objects.push_back(std::move(o));
    }
    for (std::size_t e = 0; e < parent.relations.size(); ++e) {
        if (kept_edges[e]) out.relations.push_back(parent.relations[e]);
    }
    return out;
}

struct PerformanceThreshold {
    double min_likelihood = 0.6;
    double min_non_ambiguity = 0.3;

    bool accepts(const MatchingPerformance& p) const {
        return p.likelihood.value() >= min_likelihood && p.non_ambiguity >= min_non_ambiguity;
    }

    void validate() const {
        if (!(min_likelihood >= 0.0 && min_likelihood <= 1.0)) throw RangeError("min_likelihood must lie in [0,1]");
        if (!(min_non_ambiguity >= 0.0 && min_non_ambiguity <= 1.0))
            throw RangeError("min_non_ambiguity must lie in [0,1]");
    }
};

struct SubdEvaluation {
    MatchingPerformance performance;
    std::optional<MatchHypothesis> best_subi;
    bool acceptable = false;
};

enum class AmbiguityScope { FullDescription, MaximalSubd };

class RedundancyCapExceeded : public Error {
public:
    using Error::Error;
};

struct LatticeEntry {
    std::size_t alternative_index = 0;
    std::vector<std::size_t> kept;
    MatchingPerformance performance;
    bool acceptable = false;
    std::string leader_hunt;
};

struct RedundancyOptions {
    AmbiguityScope scope = AmbiguityScope::FullDescription;
    CompetitorMode competitor = CompetitorMode::HuntBinding;
    std::size_t max_droppable = 16;
    EvalOptions eval;
};

// Memoised evaluation of the sub-descriptions of one alternative. Subsets
// are addressed by a bit mask over the droppable items. The parent
// alternative and the scene must outlive the lattice.
class SubdLattice {
public:
    using Mask = std::uint32_t;

    SubdLattice(const Alternative& parent, std::size_t alt_index, const Scene& scene, const MembershipParams& params,
                PerformanceThreshold th, const RedundancyOptions& opts = {})
        : parent_(parent),
          alt_index_(alt_index),
          scene_(scene),
          params_(params),
          th_(th),
          opts_(opts),
          items_(description_items(parent)) {
        for (std::size_t i = 0; i < items_.size(); ++i) {
            if (items_[i].droppable) droppable_.push_back(i);
        }
        if (droppable_.size() > opts.max_droppable || droppable_.size() > 31) {
            throw RedundancyCapExceeded("description has " + std::to_string(droppable_.size()) +
                                        " droppable items; cap is " + std::to_string(opts.max_droppable));
        }
    }

    const std::vector<DescriptionItem>& items() const { return items_; }
    std::size_t droppable_count() const { return droppable_.size(); }
    Mask full() const { return droppable_.empty() ? 0 : static_cast<Mask>((std::uint64_t{1} << droppable_.size()) - 1); }

    SubDescription subd(Mask m) const {
        SubDescription s{alt_index_, {}};
        std::size_t bit = 0;
        for (std::size_t i = 0; i < items_.size(); ++i) {
            if (!items_[i].droppable) {
                s.kept.push_back(i);
            } else {
                if (m & (Mask{1} << bit)) s.kept.push_back(i);
                ++bit;
            }
        }
        return s;
    }

    Mask mask_of(const SubDescription& s) const {
        Mask m = 0;
        for (auto k : s.kept) {
            if (k >= items_.size()) throw Error("sub-description item index out of range");
            auto it = std::find(droppable_.begin(), droppable_.end(), k);
            if (it != droppable_.end()) m |= Mask{1} << (it - droppable_.begin());
        }
        induce(parent_, s);  // validates the non-droppable core
        return m;
    }

    const SubdEvaluation& evaluate(Mask m) {
        auto it = memo_.find(m);
        if (it != memo_.end()) return it->second;
        const auto alt = induce(parent_, subd(m));
        auto ev = evaluate_alternative(alt, alt_index_, scene_, params_, opts_.competitor, opts_.eval);
        SubdEvaluation out;
        out.performance = ev.performance();
        out.best_subi = std::move(ev.leader);
        out.acceptable = out.best_subi.has_value() && th_.accepts(out.performance);
        return memo_.emplace(m, std::move(out)).first->second;
    }

    // Acceptable masks none of whose one-item extensions is acceptable,
    // ordered by size desc, likelihood desc, then kept indices.
    std::vector<Mask> maximal() {
        std::vector<Mask> out;
        for (std::uint64_t m = 0; m <= full(); ++m) {
            const auto mask = static_cast<Mask>(m);
            if (!evaluate(mask).acceptable) continue;
            bool extendable = false;
            for (std::size_t b = 0; b < droppable_.size() && !extendable; ++b) {
                const Mask bit = Mask{1} << b;
                if (!(mask & bit)) extendable = evaluate(mask | bit).acceptable;
            }
            if (!extendable) out.push_back(mask);
        }
        std::sort(out.begin(), out.end(), [&](Mask a, Mask b) {
            if (std::popcount(a) != std::popcount(b)) return std::popcount(a) > std::popcount(b);
            const auto la = evaluate(a).performance.likelihood;
            const auto lb = evaluate(b).performance.likelihood;
            if (la != lb) return la > lb;
            return subd(a).kept < subd(b).kept;
        });
        return out;
    }

    // Kernel requirement for a subset of `dn`: the leader is still dn's best
    // SubI, strictly ahead of every competitor, and likely enough.
    bool keeps_leader(Mask k, const MatchHypothesis& leader) {
        const auto& ev = evaluate(k);
        if (!ev.best_subi) return false;
        if (detail::competes(leader, *ev.best_subi, opts_.competitor)) return false;
        if (ev.performance.likelihood.value() < th_.min_likelihood) return false;
        return th_.min_non_ambiguity > 0 ? ev.performance.non_ambiguity > 0 : true;
    }

    // Removal-minimal subsets of dn meeting the kernel requirement, largest
    // first, ties by kept indices.
    std::vector<Mask> kernels(Mask dn) {
        const auto& ev = evaluate(dn);
        if (!ev.acceptable) throw Error("kernels need an acceptable sub-description");
        const MatchHypothesis leader = *ev.best_subi;
        std::vector<Mask> out;
        for (Mask k = dn;; k = (k - 1) & dn) {
            if (keeps_leader(k, leader)) {
                bool minimal = true;
                for (std::size_t b = 0; b < droppable_.size() && minimal; ++b) {
                    const Mask bit = Mask{1} << b;
                    if (k & bit) minimal = !keeps_leader(k & ~bit, leader);
                }
                if (minimal) out.push_back(k);
            }
            if (k == 0) break;
        }
        std::sort(out.begin(), out.end(), [&](Mask a, Mask b) {
            if (std::popcount(a) != std::popcount(b)) return std::popcount(a) > std::popcount(b);
            return subd(a).kept < subd(b).kept;
        });
        return out;
    }

    std::vector<LatticeEntry> trace() const {
        std::vector<LatticeEntry> out;
        std::vector<Mask> masks;
        for (const auto& [m, _] : memo_) masks.push_back(m);
        std::sort(masks.begin(), masks.end(), [](Mask a, Mask b) {
            if (std::popcount(a) != std::popcount(b)) return std::popcount(a) > std::popcount(b);
            return a > b;
        });
        for (auto m : masks) {
            const auto& ev = memo_.at(m);
            out.push_back({alt_index_, subd(m).kept, ev.performance, ev.acceptable,
                           ev.best_subi ? ev.best_subi->hunt : std::string{}});
        }
        return out;
    }

    const Alternative& parent() const { return parent_; }

private:
    const Alternative& parent_;
    std::size_t alt_index_;
    const Scene& scene_;
    MembershipParams params_;
    PerformanceThreshold th_;
    RedundancyOptions opts_;
    std::vector<DescriptionItem> items_;
    std::vector<std::size_t> droppable_;
    std::unordered_map<Mask, SubdEvaluation> memo_;
};

inline SubdEvaluation evaluate_subd(const Alternative& parent, const SubDescription& dn, const Scene& scene,
                                    const MembershipParams& params, PerformanceThreshold th,
                                    const RedundancyOptions& opts = {}) {
    SubdLattice lattice(parent, dn.alternative_index, scene, params, th, opts);
    return lattice.evaluate(lattice.mask_of(dn));
}

inline std::vector<SubDescription> maximal_subds(const Alternative& parent, std::size_t alt_index,
                                                 const Scene& scene, const MembershipParams& params,
                                                 PerformanceThreshold th, const RedundancyOptions& opts = {}) {
    SubdLattice lattice(parent, alt_index, scene, params, th, opts);
    std::vector<SubDescription> out;
    for (auto m : lattice.maximal()) out.push_back(lattice.subd(m));
    return out;
}

inline std::vector<SubDescription> kernels(const Alternative& parent, const SubDescription& dn, const Scene& scene,
                                           const MembershipParams& params, PerformanceThreshold th,
                                           const RedundancyOptions& opts = {}) {
    SubdLattice lattice(parent, dn.alternative_index, scene, params, th, opts);
    std::vector<SubDescription> out;
    for (auto m : lattice.kernels(lattice.mask_of(dn))) out.push_back(lattice.subd(m));
    return out;
}

// Items of the alternative minus items of the kernel.
inline std::size_t description_redundancy(const Alternative& d, const SubDescription& chosen_kernel) {
    return description_items(d).size() - chosen_kernel.kept.size();
}

struct RedundancyReport {
    bool matched = false;
    std::size_t alternative_index = 0;
    std::vector<DescriptionItem> items;
    SubDescription maximal_subd;
    std::vector<SubDescription> maximal_candidates;
    std::optional<MatchHypothesis> best_subi;
    MatchingPerformance maximal_performance;
    std::vector<SubDescription> kernels;
    SubDescription chosen_kernel;
    std::size_t delta = 0;
    std::size_t used_redundancy = 0;
    // Performance with redundancy when matched; best rejected performance otherwise.
    MatchingPerformance performance;
    MatchingPerformance full_performance;
    std::vector<std::string> dropped_items;
    std::vector<LatticeEntry> trace;
};

namespace detail {

inline bool better_performance(const MatchingPerformance& a, const MatchingPerformance& b) {
    if (a.likelihood != b.likelihood) return a.likelihood > b.likelihood;
    return a.non_ambiguity > b.non_ambiguity;
}

// L_D(leader's binding) minus the best competitor's L_D, floored at 0.
inline double full_description_ambiguity(const Alternative& alt, std::size_t alt_index,
                                         const MatchHypothesis& leader, const Scene& scene,
                                         const MembershipParams& params, const RedundancyOptions& opts) {
    std::map<std::string, std::string> binding(leader.binding.begin(), leader.binding.end());
    const auto own = score_hypothesis(alt, alt_index, binding, scene, params, Aggregator::Min, opts.eval);
    Description single{{alt}};
    MatchOptions mo;
    mo.eval = opts.eval;
    const auto rs = enumerate_hypotheses(single, scene, params, mo);
    double competitor = 0.0;
    for (const auto& h : rs.hypotheses) {
        if (competes(leader, h, opts.competitor)) {
            competitor = h.likelihood.value();
            break;
        }
    }
    return likelihood_gap(own.likelihood.value(), competitor);
}

inline RedundancyReport report_for(const Alternative& alt, std::size_t alt_index, const Scene& scene,
                                   const MembershipParams& params, PerformanceThreshold th,
                                   const RedundancyOptions& opts) {
    SubdLattice lattice(alt, alt_index, scene, params, th, opts);
    RedundancyReport r;
    r.alternative_index = alt_index;
    r.items = lattice.items();
    r.full_performance = lattice.evaluate(lattice.full()).performance;

    auto maximal = lattice.maximal();
    for (auto m : maximal) r.maximal_candidates.push_back(lattice.subd(m));

    if (maximal.empty()) {
        // Nothing acceptable: carry the best performance seen anywhere in the lattice.
        MatchingPerformance best = r.full_performance;
        for (std::uint64_t m = 0; m <= lattice.full(); ++m) {
            const auto& p = lattice.evaluate(static_cast<SubdLattice::Mask>(m)).performance;
            if (better_performance(p, best)) best = p;
        }
        r.performance = best;
        r.trace = lattice.trace();
        return r;
    }

    auto chosen = *std::min_element(maximal.begin(), maximal.end(), [&](auto a, auto b) {
        const auto& pa = lattice.evaluate(a).performance;
        const auto& pb = lattice.evaluate(b).performance;
        if (pa != pb) return better_performance(pa, pb);
        if (std::popcount(a) != std::popcount(b)) return std::popcount(a) > std::popcount(b);
        return lattice.subd(a).kept < lattice.subd(b).kept;
    });

    r.matched = true;
    r.maximal_subd = lattice.subd(chosen);
    const auto& ev = lattice.evaluate(chosen);
    r.best_subi = ev.best_subi;
    r.maximal_performance = ev.performance;

    const auto kernel_masks = lattice.kernels(chosen);
    for (auto k : kernel_masks) r.kernels.push_back(lattice.subd(k));
    r.chosen_kernel = r.kernels.front();
    r.delta = description_redundancy(alt, r.chosen_kernel);
    r.used_redundancy = r.items.size() - r.maximal_subd.kept.size();

    std::map<std::string, std::string> binding(r.best_subi->binding.begin(), r.best_subi->binding.end());
    const auto kernel_alt = induce(alt, r.chosen_kernel);
    const auto at_leader = score_hypothesis(kernel_alt, alt_index, binding, scene, params, Aggregator::Min, opts.eval);
    r.performance.likelihood = at_leader.likelihood;
    r.performance.non_ambiguity =
        opts.scope == AmbiguityScope::MaximalSubd
            ? ev.performance.non_ambiguity
            : full_description_ambiguity(alt, alt_index, *r.best_subi, scene, params, opts);

    for (std::size_t i = 0; i < r.items.size(); ++i) {
        if (!std::binary_search(r.maximal_subd.kept.begin(), r.maximal_subd.kept.end(), i)) {
            r.dropped_items.push_back(r.items[i].label);
        }
    }
    r.trace = lattice.trace();
    return r;
}

} // namespace detail

// Best report over the alternatives: matched before unmatched, then by
// performance, then lower alternative index.
inline RedundancyReport redundancy_report(const Description& d, const Scene& scene, const MembershipParams& params,
                                          PerformanceThreshold th, const RedundancyOptions& opts = {}) {
    th.validate();
    std::optional<RedundancyReport> best;
    std::vector<LatticeEntry> trace;
    for (std::size_t a = 0; a < d.alternatives.size(); ++a) {
        auto r = detail::report_for(d.alternatives[a], a, scene, params, th, opts);
        trace.insert(trace.end(), r.trace.begin(), r.trace.end());
        const bool take = !best || (r.matched && !best->matched) ||
                          (r.matched == best->matched && detail::better_performance(r.performance, best->performance));
        if (take) best = std::move(r);
    }
    if (!best) throw Error("description has no alternatives");
    best->trace = std::move(trace);
    return *best;
}

} // namespace scenematch
