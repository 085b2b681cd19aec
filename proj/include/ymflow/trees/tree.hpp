#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "ymflow/trees/labels.hpp"

namespace ymflow::trees {

// Rooted tree with edge types and N^3 decorations on edges and nodes.
// Children are kept sorted by their canonical serialisation, so equal
// serial strings <=> decorated-tree isomorphism.
struct Tree;
using TreePtr = std::shared_ptr<const Tree>;

struct Tree {
    struct Edge {
        int label = 0;
        Dec3 dec{};
        TreePtr sub;
        std::string serial;  // cached edge serialisation
    };
    Dec3 ndec{};
    std::vector<Edge> kids;
    std::string serial;  // canonical node serialisation

    static TreePtr make(Dec3 ndec, std::vector<Edge> kids) {
        auto t = std::make_shared<Tree>();
        t->ndec = ndec;
        for (auto& e : kids)
            e.serial = "(" + std::to_string(e.label) + ";" + e.dec.str() + ";" +
                       e.sub->serial + ")";
        std::sort(kids.begin(), kids.end(),
                  [](const Edge& a, const Edge& b) { return a.serial < b.serial; });
        t->kids = std::move(kids);
        std::string s = "{" + t->ndec.str();
        for (const auto& e : t->kids) s += e.serial;
        s += "}";
        t->serial = s;
        return t;
    }
    static TreePtr leaf(Dec3 ndec = {}) { return make(ndec, {}); }

    bool trivial() const { return kids.empty() && ndec.zero(); }

    int edge_count() const {
        int n = 0;
        for (const auto& e : kids) n += 1 + e.sub->edge_count();
        return n;
    }
    int noise_count(const LabelSet& ls) const {
        int n = 0;
        for (const auto& e : kids) {
            if (ls[e.label].is_noise) ++n;
            n += e.sub->noise_count(ls);
        }
        return n;
    }
    // Decoration parity per spatial axis: (sum of edge decs, sum of node decs).
    void parity_counts(int axis, int& edge_sum, int& node_sum) const {
        node_sum += (axis == 1) ? ndec.x1 : ndec.x2;
        for (const auto& e : kids) {
            edge_sum += (axis == 1) ? e.dec.x1 : e.dec.x2;
            e.sub->parity_counts(axis, edge_sum, node_sum);
        }
    }

    DegreeQK degree(const LabelSet& ls) const {
        DegreeQK d{Rational(ndec.scaled()), Rational(0)};
        for (const auto& e : kids) {
            d = d + ls[e.label].deg -
                DegreeQK{Rational(e.dec.scaled()), Rational(0)} + e.sub->degree(ls);
        }
        return d;
    }

    // Combinatorial symmetry factor
    //   S(tau) = k! prod_j S(tau_j)^{beta_j} beta_j!
    // over distinct child branches (o_j, tau_j) with multiplicities beta_j.
    long long symmetry_factor() const {
        long long s = ndec.factorial();
        std::size_t i = 0;
        while (i < kids.size()) {
            std::size_t j = i;
            while (j < kids.size() && kids[j].serial == kids[i].serial) ++j;
            const long long beta = (long long)(j - i);
            long long fact = 1;
            for (long long b = 2; b <= beta; ++b) fact *= b;
            const long long ssub = kids[i].sub->symmetry_factor();
            long long p = 1;
            for (long long b = 0; b < beta; ++b) p *= ssub;
            s *= p * fact;
            i = j;
        }
        return s;
    }
};

namespace detail_aut {
// Number of decorated-tree isomorphisms between x and y (0 when they are not
// isomorphic), by explicit enumeration of child matchings. Deliberately
// independent of the grouped product formula above.
inline long long iso_count(const Tree& x, const Tree& y) {
    if (!(x.ndec == y.ndec) || x.kids.size() != y.kids.size()) return 0;
    const std::size_t n = x.kids.size();
    if (n == 0) return 1;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    long long total = 0;
    // iterate over all bijections; fine for <= 6-edge trees
    do {
        long long prod = 1;
        for (std::size_t i = 0; i < n && prod != 0; ++i) {
            const auto& ex = x.kids[i];
            const auto& ey = y.kids[perm[i]];
            if (ex.label != ey.label || !(ex.dec == ey.dec)) { prod = 0; break; }
            prod *= iso_count(*ex.sub, *ey.sub);
        }
        total += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}
}  // namespace detail_aut

// Automorphism count times node-decoration factorials (the same convention
// as symmetry_factor, obtained through a genuinely different route).
inline long long dec_factorials(const Tree& t) {
    long long f = t.ndec.factorial();
    for (const auto& e : t.kids) f *= dec_factorials(*e.sub);
    return f;
}
inline long long brute_force_aut(const Tree& t) {
    return detail_aut::iso_count(t, t);
}
inline long long brute_force_sym_factor(const Tree& t) {
    return brute_force_aut(t) * dec_factorials(t);
}

}  // namespace ymflow::trees
