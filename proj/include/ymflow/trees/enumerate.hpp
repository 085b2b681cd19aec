#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ymflow/trees/labels.hpp"
#include "ymflow/trees/tree.hpp"

namespace ymflow::trees {

class EnumerationBudgetExceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct EnumerateOptions {
    double k_lo = 1e-9;        // kappa interval (open)
    double k_hi = 0.25 - 1e-9;
    int max_edges = 10;
    int max_node_dec = 4;      // cap on |node decoration|_s
    long long budget = 500000;  // partial-construction budget (divergence guard)
};

namespace detail_enum {

struct Ctx {
    const Rule* rule;
    const LabelSet* ls;
    EnumerateOptions opt;
    double bound_lo, bound_hi;     // bound evaluated at the interval ends
    std::vector<double> mindeg_lo, mindeg_hi;  // minimal planted degree per label
    long long work = 0;

    void tick() {
        if (++work > opt.budget)
            throw EnumerationBudgetExceeded(
                "tree enumeration exceeded budget (rule not subcritical?)");
    }
};

// Minimal degree of a planted subtree of each label, by fixpoint iteration.
inline void compute_mindeg(Ctx& c) {
    const int n = c.ls->size();
    c.mindeg_lo.assign(n, 1e18);
    c.mindeg_hi.assign(n, 1e18);
    for (int l = 0; l < n; ++l)
        if ((*c.ls)[l].is_noise) {
            c.mindeg_lo[l] = (*c.ls)[l].deg.eval(c.opt.k_lo);
            c.mindeg_hi[l] = (*c.ls)[l].deg.eval(c.opt.k_hi);
        }
    for (int pass = 0; pass < 4 * n; ++pass) {
        bool changed = false;
        for (int l = 0; l < n; ++l) {
            if ((*c.ls)[l].is_noise) continue;
            double best_lo = 1e18, best_hi = 1e18;
            for (const NodeType& t : c.rule->types[l]) {
                double slo = (*c.ls)[l].deg.eval(c.opt.k_lo);
                double shi = (*c.ls)[l].deg.eval(c.opt.k_hi);
                bool ok = true;
                for (const auto& [lab, dec] : t) {
                    if (c.mindeg_lo[lab] > 1e17) { ok = false; break; }
                    slo += c.mindeg_lo[lab] - dec.scaled();
                    shi += c.mindeg_hi[lab] - dec.scaled();
                }
                if (!ok) continue;
                best_lo = std::min(best_lo, slo);
                best_hi = std::min(best_hi, shi);
            }
            if (best_lo < c.mindeg_lo[l] - 1e-12 || best_hi < c.mindeg_hi[l] - 1e-12) {
                c.mindeg_lo[l] = std::min(c.mindeg_lo[l], best_lo);
                c.mindeg_hi[l] = std::min(c.mindeg_hi[l], best_hi);
                changed = true;
            }
        }
        if (!changed) break;
    }
}

// All subtrees sitting below an edge of the given label, with node degree
// (excluding the edge's own degree) below the budget at one interval end at
// least, and at most max_edges edges inside.
inline void enumerate_below(Ctx& c, int label, double bud_lo, double bud_hi,
                            int max_edges, std::vector<TreePtr>& out);

// Extend a partially built node: slots[i..] remain to fill.
inline void fill_slots(Ctx& c, const NodeType& type, std::size_t i,
                       std::vector<Tree::Edge>& acc, double deg_lo, double deg_hi,
                       double bud_lo, double bud_hi, int edges_left, Dec3 ndec,
                       std::vector<TreePtr>& out) {
    c.tick();
    if (i == type.size()) {
        out.push_back(Tree::make(ndec, acc));
        return;
    }
    const auto& [lab, dec] = type[i];
    // remaining slots' minimal contribution
    double rem_lo = 0.0, rem_hi = 0.0;
    for (std::size_t j = i + 1; j < type.size(); ++j) {
        rem_lo += c.mindeg_lo[type[j].first] - type[j].second.scaled();
        rem_hi += c.mindeg_hi[type[j].first] - type[j].second.scaled();
    }
    const double here_lo = (*c.ls)[lab].deg.eval(c.opt.k_lo) - dec.scaled();
    const double here_hi = (*c.ls)[lab].deg.eval(c.opt.k_hi) - dec.scaled();
    std::vector<TreePtr> subs;
    enumerate_below(c, lab, bud_lo - deg_lo - rem_lo - here_lo,
                    bud_hi - deg_hi - rem_hi - here_hi, edges_left - 1, subs);
    for (const TreePtr& s : subs) {
        const int se = s->edge_count();
        if (se + 1 > edges_left) continue;
        const double slo = s->degree(*c.ls).eval(c.opt.k_lo);
        const double shi = s->degree(*c.ls).eval(c.opt.k_hi);
        acc.push_back({lab, dec, s, ""});
        fill_slots(c, type, i + 1, acc, deg_lo + here_lo + slo, deg_hi + here_hi + shi,
                   bud_lo, bud_hi, edges_left - 1 - se, ndec, out);
        acc.pop_back();
    }
}

inline void enumerate_below(Ctx& c, int label, double bud_lo, double bud_hi,
                            int max_edges, std::vector<TreePtr>& out) {
    c.tick();
    if (max_edges < 0) return;
    std::vector<TreePtr> raw;
    for (const NodeType& type : c.rule->types[label]) {
        if (int(type.size()) > max_edges) continue;
        // minimal degree of this type
        double tlo = 0.0, thi = 0.0;
        bool feasible = true;
        for (const auto& [lab, dec] : type) {
            if (c.mindeg_lo[lab] > 1e17) { feasible = false; break; }
            tlo += c.mindeg_lo[lab] - dec.scaled();
            thi += c.mindeg_hi[lab] - dec.scaled();
        }
        if (!feasible) continue;
        for (int nd = 0; nd <= c.opt.max_node_dec; ++nd) {
            if (tlo + nd >= bud_lo && thi + nd >= bud_hi) continue;
            for (int t = 0; 2 * t <= nd; ++t)
                for (int x1 = 0; 2 * t + x1 <= nd; ++x1) {
                    const int x2 = nd - 2 * t - x1;
                    Dec3 k{std::uint8_t(t), std::uint8_t(x1), std::uint8_t(x2)};
                    if (k.scaled() != nd) continue;
                    std::vector<Tree::Edge> acc;
                    fill_slots(c, type, 0, acc, double(nd), double(nd), bud_lo,
                               bud_hi, max_edges, k, raw);
                }
        }
    }
    // dedupe by canonical serial
    std::map<std::string, TreePtr> uniq;
    for (const auto& t : raw) uniq.emplace(t->serial, t);
    out.clear();
    for (auto& [s, t] : uniq) out.push_back(t);
}

}  // namespace detail_enum

// All isomorphism classes of trees that strongly conform to the rule and have
// degree < bound for every kappa in the interval; deterministic order
// (canonical serialisation).
inline std::vector<TreePtr> enumerate_trees(const Rule& rule, const DegreeQK& bound,
                                            const EnumerateOptions& opt = {}) {
    detail_enum::Ctx c;
    c.rule = &rule;
    c.ls = rule.labels;
    c.opt = opt;
    c.bound_lo = bound.eval(opt.k_lo);
    c.bound_hi = bound.eval(opt.k_hi);
    detail_enum::compute_mindeg(c);

    std::map<std::string, TreePtr> uniq;
    // distinct node types across all labels define the candidate roots
    std::vector<NodeType> root_types;
    for (int l = 0; l < c.ls->size(); ++l)
        for (const NodeType& t : rule.types[l])
            if (std::find(root_types.begin(), root_types.end(), t) == root_types.end())
                root_types.push_back(t);
    for (const NodeType& type : root_types) {
        std::vector<TreePtr> here;
        for (int nd = 0; nd <= opt.max_node_dec; ++nd) {
            for (int t = 0; 2 * t <= nd; ++t)
                for (int x1 = 0; 2 * t + x1 <= nd; ++x1) {
                    const int x2 = nd - 2 * t - x1;
                    Dec3 k{std::uint8_t(t), std::uint8_t(x1), std::uint8_t(x2)};
                    if (k.scaled() != nd) continue;
                    std::vector<Tree::Edge> acc;
                    detail_enum::fill_slots(c, type, 0, acc, double(nd), double(nd),
                                            c.bound_lo, c.bound_hi, opt.max_edges, k,
                                            here);
                }
        }
        for (const auto& t : here) uniq.emplace(t->serial, t);
    }
    // final exact filter: degree < bound on the whole interval
    std::vector<TreePtr> out;
    const Rational klo(1, 1000000), khi(Rational(1, 4) - Rational(1, 1000000));
    for (auto& [s, t] : uniq) {
        if (t->trivial()) continue;
        const DegreeQK d = t->degree(*rule.labels) - bound;
        if (d.sign_on(klo, khi) == -1) out.push_back(t);
    }
    return out;
}

// Trees relevant for negative renormalisation: degree < 0, unplanted,
// zero root decoration.
inline bool is_planted(const Tree& t) { return t.kids.size() == 1 && t.ndec.zero(); }

inline std::vector<TreePtr> negative_trees(const Rule& rule,
                                           const EnumerateOptions& opt = {}) {
    std::vector<TreePtr> all = enumerate_trees(rule, {Rational(0), Rational(0)}, opt);
    std::vector<TreePtr> out;
    for (const auto& t : all)
        if (!is_planted(*t) && t->ndec.zero()) out.push_back(t);
    return out;
}

}  // namespace ymflow::trees
