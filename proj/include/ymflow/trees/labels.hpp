#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ymflow/rational.hpp"

namespace ymflow::trees {

// Decoration multi-index (time, x1, x2) with parabolic scaling (2,1,1).
struct Dec3 {
    std::uint8_t t = 0, x1 = 0, x2 = 0;
    int scaled() const { return 2 * int(t) + x1 + x2; }
    bool zero() const { return t == 0 && x1 == 0 && x2 == 0; }
    friend bool operator==(const Dec3& a, const Dec3& b) {
        return a.t == b.t && a.x1 == b.x1 && a.x2 == b.x2;
    }
    friend bool operator<(const Dec3& a, const Dec3& b) {
        if (a.t != b.t) return a.t < b.t;
        if (a.x1 != b.x1) return a.x1 < b.x1;
        return a.x2 < b.x2;
    }
    Dec3 plus(int axis) const {  // axis 0 = time, 1, 2 = space
        Dec3 d = *this;
        if (axis == 0) ++d.t;
        if (axis == 1) ++d.x1;
        if (axis == 2) ++d.x2;
        return d;
    }
    std::string str() const {
        return "(" + std::to_string(t) + "," + std::to_string(x1) + "," +
               std::to_string(x2) + ")";
    }
    long long factorial() const {
        auto f = [](int n) { long long v = 1; for (int i = 2; i <= n; ++i) v *= i; return v; };
        return f(t) * f(x1) * f(x2);
    }
};

struct LabelInfo {
    std::string name;
    bool is_noise = false;
    char cls = 'a';        // class tag: a, m, h, u for kernels; l, b for noises
    int spatial = -1;      // spatial index (0-based), -1 if none
    DegreeQK deg;
    int wkind = 0;         // 0: algebra-valued, 1: operator-valued
};

struct LabelSet {
    std::vector<LabelInfo> labels;
    int d = 2;

    int find(const std::string& n) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i].name == n) return int(i);
        throw std::invalid_argument("unknown label " + n);
    }
    const LabelInfo& operator[](int i) const { return labels[i]; }
    int size() const { return int(labels.size()); }

    // Labels for the single-equation system: kernels a_i (degree 2),
    // noises l_i (degree -d/2 - 1 - k).
    static LabelSet sym() {
        LabelSet ls;
        for (int i = 0; i < 2; ++i)
            ls.labels.push_back({"a" + std::to_string(i + 1), false, 'a', i,
                                 {Rational(2), Rational(0)}, 0});
        for (int i = 0; i < 2; ++i)
            ls.labels.push_back({"l" + std::to_string(i + 1), true, 'l', i,
                                 {Rational(-2), Rational(-1)}, 0});
        return ls;
    }

    // Labels for the gauge-transformed system: a_i, m_i (2 - k), h_i, u (2),
    // noises l_i and lb_i (-2 - k). lb stands for the pre-mollified copy.
    static LabelSet gauge() {
        LabelSet ls;
        const DegreeQK dk{Rational(2), Rational(-1)};
        const DegreeQK d2{Rational(2), Rational(0)};
        const DegreeQK dn{Rational(-2), Rational(-1)};
        for (int i = 0; i < 2; ++i)
            ls.labels.push_back({"a" + std::to_string(i + 1), false, 'a', i, dk, 0});
        for (int i = 0; i < 2; ++i)
            ls.labels.push_back({"m" + std::to_string(i + 1), false, 'm', i, dk, 0});
        for (int i = 0; i < 2; ++i)
            ls.labels.push_back({"h" + std::to_string(i + 1), false, 'h', i, d2, 0});
        ls.labels.push_back({"u", false, 'u', -1, d2, 1});
        for (int i = 0; i < 2; ++i)
            ls.labels.push_back({"l" + std::to_string(i + 1), true, 'l', i, dn, 0});
        for (int i = 0; i < 2; ++i)
            ls.labels.push_back({"lb" + std::to_string(i + 1), true, 'b', i, dn, 0});
        return ls;
    }
};

// A node type: sorted multiset of (label, edge decoration).
using EdgeLabel = std::pair<int, Dec3>;
using NodeType = std::vector<EdgeLabel>;

inline NodeType sorted(NodeType t) {
    std::sort(t.begin(), t.end(), [](const EdgeLabel& a, const EdgeLabel& b) {
        return a.first < b.first || (a.first == b.first && a.second < b.second);
    });
    return t;
}

struct Rule {
    const LabelSet* labels = nullptr;
    std::vector<std::vector<NodeType>> types;  // per label id
    std::vector<std::pair<int, NodeType>> completion_audit;  // types added by closure

    bool allows(int label, const NodeType& t) const {
        const auto& v = types[label];
        return std::find(v.begin(), v.end(), t) != v.end();
    }
    bool allows_some(const NodeType& t) const {
        for (int l = 0; l < labels->size(); ++l)
            if (allows(l, t)) return true;
        return false;
    }
};

inline void add_type(std::vector<NodeType>& v, NodeType t) {
    t = sorted(std::move(t));
    if (std::find(v.begin(), v.end(), t) == v.end()) v.push_back(std::move(t));
}

// Rule for the single (DeTurck-gauged) equation, d = 2:
// R(l_i) = {()};  R(a_i) = { {l_i}, {a_i a_j a_j}, {a_j d_i a_j}, {a_j d_j a_i} }.
inline Rule sym_rule(const LabelSet& ls) {
    Rule r;
    r.labels = &ls;
    r.types.resize(ls.size());
    const int a1 = ls.find("a1"), l1 = ls.find("l1");
    for (int i = 0; i < 2; ++i) {
        add_type(r.types[l1 + i], {});
        auto& v = r.types[a1 + i];
        add_type(v, {{l1 + i, {}}});
        for (int j = 0; j < 2; ++j) {
            add_type(v, {{a1 + i, {}}, {a1 + j, {}}, {a1 + j, {}}});
            Dec3 di; (i == 0 ? di.x1 : di.x2) = 1;
            Dec3 dj; (j == 0 ? dj.x1 : dj.x2) = 1;
            add_type(v, {{a1 + j, {}}, {a1 + j, di}});
            add_type(v, {{a1 + j, {}}, {a1 + i, dj}});
        }
    }
    return r;
}

// Rule for the gauge-transformed system (B / Abar equations, h, u, m), d = 2.
inline Rule gauge_rule(const LabelSet& ls) {
    Rule r;
    r.labels = &ls;
    r.types.resize(ls.size());
    const int a1 = ls.find("a1"), m1 = ls.find("m1"), h1 = ls.find("h1");
    const int u = ls.find("u"), l1 = ls.find("l1"), b1 = ls.find("lb1");
    const int qcand[2] = {a1, m1};
    auto dec = [](int i) { Dec3 d; (i == 0 ? d.x1 : d.x2) = 1; return d; };

    for (int i = 0; i < 2; ++i) {
        add_type(r.types[l1 + i], {});
        add_type(r.types[b1 + i], {});
        // m_i equation: { u l_i }
        add_type(r.types[m1 + i], {{u, {}}, {l1 + i, {}}});
        // h_i equation
        for (int j = 0; j < 2; ++j)
            for (int q : qcand) {
                add_type(r.types[h1 + i], {{h1 + j, {}}, {h1 + i, dec(j)}});
                add_type(r.types[h1 + i], {{q + j, {}}, {h1 + j, {}}, {h1 + i, {}}});
                add_type(r.types[h1 + i], {{h1 + j, {}}, {q + j, dec(i)}});
                add_type(r.types[h1 + i], {{q + j, {}}, {h1 + j, dec(i)}});
            }
        // a_i equation
        {
            auto& v = r.types[a1 + i];
            for (int q : qcand) add_type(v, {{q + i, {}}});
            add_type(v, {{h1 + i, {}}});
            for (int j = 0; j < 2; ++j)
                for (int q : qcand)
                    for (int qh : qcand) {
                        for (int qt : qcand)
                            add_type(v, {{q + i, {}}, {qh + j, {}}, {qt + j, {}}});
                        add_type(v, {{q + j, {}}, {qh + j, dec(i)}});
                        add_type(v, {{q + j, {}}, {qh + i, dec(j)}});
                    }
            add_type(v, {{u, {}}, {l1 + i, {}}});
            add_type(v, {{u, {}}, {b1 + i, {}}});
        }
    }
    // u equation
    for (int j = 0; j < 2; ++j) {
        add_type(r.types[u], {{u, {}}, {h1 + j, {}}, {h1 + j, {}}});
        for (int q : qcand)
            add_type(r.types[u], {{u, {}}, {q + j, {}}, {h1 + j, {}}});
    }
    return r;
}

// Normal closure: close every R(t) under sub-multisets. Noise labels stay
// terminal. Added types are recorded for audit.
inline Rule complete_rule(const Rule& in) {
    Rule r = in;
    for (int l = 0; l < r.labels->size(); ++l) {
        if ((*r.labels)[l].is_noise) continue;
        std::vector<NodeType> frontier = r.types[l];
        while (!frontier.empty()) {
            std::vector<NodeType> next;
            for (const NodeType& t : frontier) {
                for (std::size_t skip = 0; skip < t.size(); ++skip) {
                    NodeType s;
                    for (std::size_t i = 0; i < t.size(); ++i)
                        if (i != skip) s.push_back(t[i]);
                    s = sorted(std::move(s));
                    if (std::find(r.types[l].begin(), r.types[l].end(), s) ==
                        r.types[l].end()) {
                        r.types[l].push_back(s);
                        r.completion_audit.push_back({l, s});
                        next.push_back(s);
                    }
                }
            }
            frontier = std::move(next);
        }
    }
    return r;
}

}  // namespace ymflow::trees
