#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "ymflow/lie.hpp"
#include "ymflow/rng.hpp"
#include "ymflow/trees/labels.hpp"

namespace ymflow::trees {

// A value of a jet component: algebra-valued (coefficient vector) or
// operator-valued (matrix acting on coefficients).
struct JetVal {
    int kind = 0;  // 0: algebra, 1: operator
    Vec v;
    Mat m;
    static JetVal alg(Vec x) { JetVal j; j.kind = 0; j.v = std::move(x); return j; }
    static JetVal op(Mat x) { JetVal j; j.kind = 1; j.m = std::move(x); return j; }
};

// Concrete jet: assignment of a value to every component (label, decoration).
class Jet {
  public:
    Jet(const LieAlgebra* alg, const LabelSet* ls) : alg_(alg), ls_(ls) {}

    const LieAlgebra& algebra() const { return *alg_; }

    void set(const std::string& label, Dec3 dec, JetVal v) {
        vals_[key((*ls_).find(label), dec)] = std::move(v);
    }
    void set(int label, Dec3 dec, JetVal v) { vals_[key(label, dec)] = std::move(v); }

    // Deterministic pseudo-random defaults for components never set
    // explicitly, so derivative expansions are always well-defined.
    void fill_random(std::uint64_t seed, double amplitude = 1.0) {
        seed_ = seed;
        amp_ = amplitude;
        random_fill_ = true;
    }

    JetVal get(int label, Dec3 dec) const {
        auto it = vals_.find(key(label, dec));
        if (it != vals_.end()) return it->second;
        if (!random_fill_)
            return ((*ls_)[label].wkind == 1)
                       ? JetVal::op(Mat::Zero(alg_->dim, alg_->dim))
                       : JetVal::alg(Vec::Zero(alg_->dim));
        Rng rng(seed_, std::uint64_t(key(label, dec)) * 2654435761u + 7);
        if ((*ls_)[label].wkind == 1) {
            Mat m(alg_->dim, alg_->dim);
            for (int i = 0; i < alg_->dim; ++i)
                for (int j = 0; j < alg_->dim; ++j) m(i, j) = amp_ * rng.next_normal();
            return JetVal::op(m);
        }
        Vec v(alg_->dim);
        for (int i = 0; i < alg_->dim; ++i) v(i) = amp_ * rng.next_normal();
        return JetVal::alg(v);
    }

  private:
    static long long key(int label, Dec3 d) {
        return ((long long)label << 24) | ((long long)d.t << 16) |
               ((long long)d.x1 << 8) | (long long)d.x2;
    }
    const LieAlgebra* alg_;
    const LabelSet* ls_;
    std::map<long long, JetVal> vals_;
    bool random_fill_ = false;
    std::uint64_t seed_ = 0;
    double amp_ = 1.0;
};

// Multilinear value with named noise slots: a dense tensor over basis
// assignments of the slots, with JetVal entries.
struct UpsTensor {
    bool zero = true;
    int kind = 0;                  // entry kind
    int dim = 0;
    std::vector<int> slots;        // sorted slot ids
    std::vector<JetVal> entries;   // dim^{slots.size()} entries

    static UpsTensor make_zero() { return UpsTensor{}; }

    static UpsTensor constant(JetVal v, int dim) {
        UpsTensor t;
        t.zero = false;
        t.kind = v.kind;
        t.dim = dim;
        t.entries = {std::move(v)};
        return t;
    }

    // The noise placeholder: one slot, entry at basis index a is e_a.
    static UpsTensor noise_slot(int slot_id, int dim) {
        UpsTensor t;
        t.zero = false;
        t.kind = 0;
        t.dim = dim;
        t.slots = {slot_id};
        t.entries.resize(dim);
        for (int a = 0; a < dim; ++a) {
            Vec e = Vec::Zero(dim);
            e(a) = 1.0;
            t.entries[a] = JetVal::alg(e);
        }
        return t;
    }

    std::size_t count() const {
        std::size_t n = 1;
        for (std::size_t i = 0; i < slots.size(); ++i) n *= dim;
        return n;
    }

    double max_abs() const {
        if (zero) return 0.0;
        double m = 0.0;
        for (const auto& e : entries) {
            if (e.kind == 0) m = std::max(m, e.v.cwiseAbs().maxCoeff());
            else m = std::max(m, e.m.cwiseAbs().maxCoeff());
        }
        return m;
    }
};

namespace tensor_ops {

// index helpers: entries are laid out with the FIRST slot varying slowest.
inline std::size_t offset(const std::vector<int>& slots, int dim,
                          const std::map<int, int>& assign) {
    std::size_t o = 0;
    for (int s : slots) o = o * dim + std::size_t(assign.at(s));
    return o;
}

template <typename F>
UpsTensor combine(const UpsTensor& a, const UpsTensor& b, int out_kind, F&& f) {
    if (a.zero || b.zero) return UpsTensor::make_zero();
    UpsTensor out;
    out.zero = false;
    out.kind = out_kind;
    out.dim = a.dim;
    out.slots = a.slots;
    for (int s : b.slots) out.slots.push_back(s);
    std::sort(out.slots.begin(), out.slots.end());
    out.entries.resize(out.count());
    const int ns = int(out.slots.size());
    std::vector<int> idx(ns, 0);
    std::map<int, int> assign;
    for (std::size_t flat = 0; flat < out.entries.size(); ++flat) {
        std::size_t rem = flat;
        for (int i = ns - 1; i >= 0; --i) { idx[i] = int(rem % a.dim); rem /= a.dim; }
        assign.clear();
        for (int i = 0; i < ns; ++i) assign[out.slots[i]] = idx[i];
        const auto& ea = a.entries[offset(a.slots, a.dim, assign)];
        const auto& eb = b.entries[offset(b.slots, b.dim, assign)];
        out.entries[flat] = f(ea, eb);
    }
    return out;
}

inline UpsTensor bracket(const LieAlgebra& alg, const UpsTensor& a, const UpsTensor& b) {
    return combine(a, b, 0, [&alg](const JetVal& x, const JetVal& y) {
        return JetVal::alg(alg.bracket(x.v, y.v));
    });
}
inline UpsTensor apply(const UpsTensor& op, const UpsTensor& x) {
    return combine(op, x, 0, [](const JetVal& o, const JetVal& v) {
        return JetVal::alg((o.m * v.v).eval());
    });
}
inline UpsTensor compose(const UpsTensor& a, const UpsTensor& b) {
    return combine(a, b, 1, [](const JetVal& x, const JetVal& y) {
        return JetVal::op((x.m * y.m).eval());
    });
}
inline UpsTensor ad_op(const LieAlgebra& alg, const UpsTensor& g) {
    if (g.zero) return UpsTensor::make_zero();
    UpsTensor out = g;
    out.kind = 1;
    for (auto& e : out.entries) e = JetVal::op(alg.ad(e.v));
    return out;
}
inline UpsTensor scale(UpsTensor t, double c) {
    if (t.zero) return t;
    for (auto& e : t.entries) {
        if (e.kind == 0) e.v *= c;
        else e.m *= c;
    }
    return t;
}
inline void add_into(UpsTensor& acc, const UpsTensor& t) {
    if (t.zero) return;
    if (acc.zero) { acc = t; return; }
    if (acc.slots != t.slots)
        throw std::logic_error("UpsTensor: adding tensors with different slots");
    for (std::size_t i = 0; i < acc.entries.size(); ++i) {
        if (acc.kind == 0) acc.entries[i].v += t.entries[i].v;
        else acc.entries[i].m += t.entries[i].m;
    }
}

// Casimir pairing of a two-slot algebra-valued tensor: sum_a entry(a,a).
inline Vec cas_contract(const UpsTensor& t) {
    if (t.zero) return Vec::Zero(1);
    if (t.slots.size() != 2 || t.kind != 0)
        throw std::logic_error("cas_contract: need a two-slot algebra-valued tensor");
    Vec acc = Vec::Zero(t.dim);
    for (int a = 0; a < t.dim; ++a) acc += t.entries[std::size_t(a) * t.dim + a].v;
    return acc;
}
inline Mat cas_contract_op(const UpsTensor& t) {
    if (t.zero) return Mat::Zero(1, 1);
    if (t.slots.size() != 2 || t.kind != 1)
        throw std::logic_error("cas_contract_op: need a two-slot operator tensor");
    Mat acc = Mat::Zero(t.dim, t.dim);
    for (int a = 0; a < t.dim; ++a) acc += t.entries[std::size_t(a) * t.dim + a].m;
    return acc;
}

}  // namespace tensor_ops

// ---------------------------------------------------------------------------
// Symbolic polynomial terms in the jet components, with argument markers for
// derivative slots. Supports the bracket/apply/compose grammar needed by the
// right-hand sides here.
// ---------------------------------------------------------------------------
struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    enum Kind { Zero, Var, Arg, Bracket, Apply, Compose, AdOp, Scale, Sum };
    Kind k = Zero;
    int wkind = 0;          // value kind of this term
    int label = -1;         // Var
    Dec3 dec{};             // Var
    int arg = -1;           // Arg index
    double c = 1.0;         // Scale
    TermPtr a, b;
    std::vector<TermPtr> terms;  // Sum

    static TermPtr zero() {
        static TermPtr z = std::make_shared<Term>();
        return z;
    }
    static TermPtr var(int label, Dec3 dec, int wkind) {
        auto t = std::make_shared<Term>();
        t->k = Var; t->label = label; t->dec = dec; t->wkind = wkind;
        return t;
    }
    static TermPtr arg_ref(int idx, int wkind) {
        auto t = std::make_shared<Term>();
        t->k = Arg; t->arg = idx; t->wkind = wkind;
        return t;
    }
    static TermPtr bracket(TermPtr x, TermPtr y) {
        if (x->k == Zero || y->k == Zero) return zero();
        auto t = std::make_shared<Term>();
        t->k = Bracket; t->a = std::move(x); t->b = std::move(y); t->wkind = 0;
        return t;
    }
    static TermPtr apply(TermPtr op, TermPtr x) {
        if (op->k == Zero || x->k == Zero) return zero();
        auto t = std::make_shared<Term>();
        t->k = Apply; t->a = std::move(op); t->b = std::move(x); t->wkind = 0;
        return t;
    }
    static TermPtr compose(TermPtr x, TermPtr y) {
        if (x->k == Zero || y->k == Zero) return zero();
        auto t = std::make_shared<Term>();
        t->k = Compose; t->a = std::move(x); t->b = std::move(y); t->wkind = 1;
        return t;
    }
    static TermPtr ad_op(TermPtr g) {
        if (g->k == Zero) return zero();
        auto t = std::make_shared<Term>();
        t->k = AdOp; t->a = std::move(g); t->wkind = 1;
        return t;
    }
    static TermPtr scale(double c, TermPtr x) {
        if (x->k == Zero || c == 0.0) return zero();
        auto t = std::make_shared<Term>();
        t->k = Scale; t->c = c; t->a = std::move(x); t->wkind = x ? 0 : 0;
        t->wkind = t->a->wkind;
        return t;
    }
    static TermPtr sum(std::vector<TermPtr> xs) {
        std::vector<TermPtr> keep;
        for (auto& x : xs)
            if (x->k != Zero) keep.push_back(std::move(x));
        if (keep.empty()) return zero();
        if (keep.size() == 1) return keep[0];
        auto t = std::make_shared<Term>();
        t->k = Sum; t->wkind = keep[0]->wkind; t->terms = std::move(keep);
        return t;
    }
};

// Derivative with respect to the component (label, dec): every occurrence of
// that variable is replaced, one at a time, by the argument marker.
inline TermPtr d_component(const TermPtr& t, int label, Dec3 dec, int arg_idx) {
    switch (t->k) {
        case Term::Zero: return Term::zero();
        case Term::Var:
            if (t->label == label && t->dec == dec)
                return Term::arg_ref(arg_idx, t->wkind);
            return Term::zero();
        case Term::Arg: return Term::zero();
        case Term::Bracket:
            return Term::sum({Term::bracket(d_component(t->a, label, dec, arg_idx), t->b),
                              Term::bracket(t->a, d_component(t->b, label, dec, arg_idx))});
        case Term::Apply:
            return Term::sum({Term::apply(d_component(t->a, label, dec, arg_idx), t->b),
                              Term::apply(t->a, d_component(t->b, label, dec, arg_idx))});
        case Term::Compose:
            return Term::sum({Term::compose(d_component(t->a, label, dec, arg_idx), t->b),
                              Term::compose(t->a, d_component(t->b, label, dec, arg_idx))});
        case Term::AdOp: return Term::ad_op(d_component(t->a, label, dec, arg_idx));
        case Term::Scale: return Term::scale(t->c, d_component(t->a, label, dec, arg_idx));
        case Term::Sum: {
            std::vector<TermPtr> xs;
            for (auto& x : t->terms) xs.push_back(d_component(x, label, dec, arg_idx));
            return Term::sum(std::move(xs));
        }
    }
    return Term::zero();
}

// Space-time derivative along axis (0 = time, 1,2 = space): shifts variable
// decorations and obeys Leibniz; argument markers are constants.
inline TermPtr d_spacetime(const TermPtr& t, int axis) {
    switch (t->k) {
        case Term::Zero: return Term::zero();
        case Term::Var: return Term::var(t->label, t->dec.plus(axis), t->wkind);
        case Term::Arg: return Term::zero();
        case Term::Bracket:
            return Term::sum({Term::bracket(d_spacetime(t->a, axis), t->b),
                              Term::bracket(t->a, d_spacetime(t->b, axis))});
        case Term::Apply:
            return Term::sum({Term::apply(d_spacetime(t->a, axis), t->b),
                              Term::apply(t->a, d_spacetime(t->b, axis))});
        case Term::Compose:
            return Term::sum({Term::compose(d_spacetime(t->a, axis), t->b),
                              Term::compose(t->a, d_spacetime(t->b, axis))});
        case Term::AdOp: return Term::ad_op(d_spacetime(t->a, axis));
        case Term::Scale: return Term::scale(t->c, d_spacetime(t->a, axis));
        case Term::Sum: {
            std::vector<TermPtr> xs;
            for (auto& x : t->terms) xs.push_back(d_spacetime(x, axis));
            return Term::sum(std::move(xs));
        }
    }
    return Term::zero();
}

struct EvalCtx {
    const LieAlgebra* alg;
    const Jet* jet;
    const std::vector<UpsTensor>* args;
};

inline UpsTensor eval_term(const TermPtr& t, const EvalCtx& c) {
    using namespace tensor_ops;
    switch (t->k) {
        case Term::Zero: return UpsTensor::make_zero();
        case Term::Var:
            return UpsTensor::constant(c.jet->get(t->label, t->dec), c.alg->dim);
        case Term::Arg: return (*c.args)[t->arg];
        case Term::Bracket:
            return bracket(*c.alg, eval_term(t->a, c), eval_term(t->b, c));
        case Term::Apply: return apply(eval_term(t->a, c), eval_term(t->b, c));
        case Term::Compose: return compose(eval_term(t->a, c), eval_term(t->b, c));
        case Term::AdOp: return ad_op(*c.alg, eval_term(t->a, c));
        case Term::Scale: return scale(eval_term(t->a, c), t->c);
        case Term::Sum: {
            UpsTensor acc = UpsTensor::make_zero();
            for (auto& x : t->terms) add_into(acc, eval_term(x, c));
            return acc;
        }
    }
    return UpsTensor::make_zero();
}

// ---------------------------------------------------------------------------
// Right-hand sides.
// ---------------------------------------------------------------------------
struct NonlinearitySpec {
    const LabelSet* labels = nullptr;
    std::map<int, TermPtr> F;  // per kernel label

    TermPtr of(int label) const {
        auto it = F.find(label);
        if (it == F.end()) return Term::zero();
        return it->second;
    }
};

// F for the single equation:
//   F_{a_i} = xi_i + sum_j [A_j, 2 d_j A_i - d_i A_j + [A_j, A_i]].
inline NonlinearitySpec sym_nonlinearity(const LabelSet& ls) {
    NonlinearitySpec spec;
    spec.labels = &ls;
    const int a1 = ls.find("a1"), l1 = ls.find("l1");
    auto A = [&](int j, int der) {
        Dec3 d{};
        if (der == 1) d.x1 = 1;
        if (der == 2) d.x2 = 1;
        return Term::var(a1 + j, d, 0);
    };
    for (int i = 0; i < 2; ++i) {
        std::vector<TermPtr> terms;
        terms.push_back(Term::var(l1 + i, {}, 0));
        for (int j = 0; j < 2; ++j) {
            TermPtr inner = Term::sum({Term::scale(2.0, A(i, j + 1)),
                                       Term::scale(-1.0, A(j, i + 1)),
                                       Term::bracket(A(j, 0), A(i, 0))});
            terms.push_back(Term::bracket(A(j, 0), inner));
        }
        spec.F[a1 + i] = Term::sum(std::move(terms));
    }
    return spec;
}

// F for the gauge-transformed system. `barred` selects the variant where the
// mollified-kernel component carries the noise (and the a-components carry
// the combination A_a + A_m).
inline NonlinearitySpec gauge_nonlinearity(const LabelSet& ls, bool barred,
                                           double c1 = 0.3, double c2 = 0.7) {
    NonlinearitySpec spec;
    spec.labels = &ls;
    const int a1 = ls.find("a1"), m1 = ls.find("m1"), h1 = ls.find("h1");
    const int u = ls.find("u"), l1 = ls.find("l1"), b1 = ls.find("lb1");
    auto dd = [&](int der) {
        Dec3 d{};
        if (der == 1) d.x1 = 1;
        if (der == 2) d.x2 = 1;
        return d;
    };
    // the gauge-field component seen by the brackets
    auto B = [&](int j, int der) -> TermPtr {
        if (!barred) return Term::var(a1 + j, dd(der), 0);
        return Term::sum({Term::var(a1 + j, dd(der), 0), Term::var(m1 + j, dd(der), 0)});
    };
    auto H = [&](int j, int der) { return Term::var(h1 + j, dd(der), 0); };
    const TermPtr U = Term::var(u, {}, 1);

    for (int i = 0; i < 2; ++i) {
        // a_i equation
        std::vector<TermPtr> ta;
        for (int j = 0; j < 2; ++j) {
            TermPtr inner = Term::sum({Term::scale(2.0, B(i, j + 1)),
                                       Term::scale(-1.0, B(j, i + 1)),
                                       Term::bracket(B(j, 0), B(i, 0))});
            ta.push_back(Term::bracket(B(j, 0), inner));
        }
        ta.push_back(Term::scale(c1, B(i, 0)));
        ta.push_back(Term::scale(c2, H(i, 0)));
        if (!barred) ta.push_back(Term::apply(U, Term::var(b1 + i, {}, 0)));
        spec.F[a1 + i] = Term::sum(std::move(ta));
        // m_i equation
        spec.F[m1 + i] = barred ? Term::apply(U, Term::var(l1 + i, {}, 0)) : Term::zero();
        // h_i equation: -[h_j, d_j h_i] + [[B_j,h_j],h_i] + d_i [B_j,h_j]
        std::vector<TermPtr> th;
        for (int j = 0; j < 2; ++j) {
            th.push_back(Term::scale(-1.0, Term::bracket(H(j, 0), H(i, j + 1))));
            th.push_back(Term::bracket(Term::bracket(B(j, 0), H(j, 0)), H(i, 0)));
            th.push_back(Term::bracket(B(j, i + 1), H(j, 0)));
            th.push_back(Term::bracket(B(j, 0), H(j, i + 1)));
        }
        spec.F[h1 + i] = Term::sum(std::move(th));
    }
    // u equation: sum_j (-[h_j,[h_j, .]] + [[B_j,h_j], .]) o U
    std::vector<TermPtr> tu;
    for (int j = 0; j < 2; ++j) {
        tu.push_back(Term::scale(
            -1.0, Term::compose(Term::compose(Term::ad_op(H(j, 0)), Term::ad_op(H(j, 0))), U)));
        tu.push_back(Term::compose(Term::ad_op(Term::bracket(B(j, 0), H(j, 0))), U));
    }
    spec.F[u] = Term::sum(std::move(tu));
    return spec;
}

}  // namespace ymflow::trees
