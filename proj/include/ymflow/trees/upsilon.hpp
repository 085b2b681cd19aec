#pragma once

#include <map>
#include <string>
#include <vector>

#include "ymflow/trees/jet.hpp"
#include "ymflow/trees/tree.hpp"

namespace ymflow::trees {

// ---------------------------------------------------------------------------
// The elementary-differential recursion: for tau = X^k prod_i I_{o_i}(tau_i),
//   Y_t[tau] = X^k [ d^k D_{o_1} ... D_{o_m} F_t ](Y_{o_1}[tau_1], ...),
// with Y_t[1] = F_t and noise components contributing placeholder slots.
// Values are multilinear tensors over the noise leaves of the concrete tree.
// ---------------------------------------------------------------------------
class UpsilonEvaluator {
  public:
    UpsilonEvaluator(const NonlinearitySpec& spec, const Jet& jet)
        : spec_(spec), jet_(jet) {}

    // Ybar_t[tau] evaluated at the jet; slot ids follow traversal order.
    UpsTensor upsilon_bar(int t_label, const Tree& tau) const {
        int counter = 0;
        return ups(t_label, tau, counter);
    }

    // bold version: divided by the symmetry factor.
    UpsTensor upsilon_bar_bold(int t_label, const Tree& tau) const {
        UpsTensor u = upsilon_bar(t_label, tau);
        return tensor_ops::scale(std::move(u), 1.0 / double(tau.symmetry_factor()));
    }

  private:
    UpsTensor ups(int t_label, const Tree& tau, int& counter) const {
        const LabelSet& ls = *spec_.labels;
        const LieAlgebra& alg = jet_.algebra();
        if (ls[t_label].is_noise) {
            if (tau.trivial()) return UpsTensor::noise_slot(counter++, alg.dim);
            return UpsTensor::make_zero();
        }
        TermPtr term = spec_.of(t_label);
        if (term->k == Term::Zero) return UpsTensor::make_zero();
        // derivative markers, one per child, in traversal order
        std::vector<UpsTensor> args;
        for (std::size_t i = 0; i < tau.kids.size(); ++i) {
            const auto& e = tau.kids[i];
            term = d_component(term, e.label, e.dec, int(i));
            if (term->k == Term::Zero) return UpsTensor::make_zero();
        }
        for (const auto& e : tau.kids) {
            args.push_back(ups(e.label, *e.sub, counter));
        }
        for (int ax = 0; ax < 3; ++ax) {
            const int reps = (ax == 0) ? tau.ndec.t : (ax == 1 ? tau.ndec.x1 : tau.ndec.x2);
            for (int r = 0; r < reps; ++r) term = d_spacetime(term, ax);
            if (term->k == Term::Zero) return UpsTensor::make_zero();
        }
        for (const auto& a : args)
            if (a.zero) return UpsTensor::make_zero();
        EvalCtx ctx{&alg, &jet_, &args};
        return eval_term(term, ctx);
    }

    const NonlinearitySpec& spec_;
    const Jet& jet_;
};

// ---------------------------------------------------------------------------
// Alternative route: expand the algebraic fixed point
//   A_t^{(n+1)} = A_t + I_t( F_t(A^{(n)}) )
// as a formal tree series and read off coefficients. Subcriticality makes
// every fixed-tree coefficient stabilise after finitely many iterations; the
// result must match the direct recursion divided by the symmetry factor.
// Supports bracket-polynomial right-hand sides (the single-equation system).
// ---------------------------------------------------------------------------
class FixedPointExpansion {
  public:
    // series: canonical unplanted tree serial -> (tree, tensor value)
    using Series = std::map<std::string, std::pair<TreePtr, UpsTensor>>;

    FixedPointExpansion(const NonlinearitySpec& spec, const Jet& jet, int max_edges,
                        int max_poly = 2)
        : spec_(spec), jet_(jet), max_edges_(max_edges), max_poly_(max_poly) {}

    // Iterate to stabilisation; returns per kernel label the map from
    // unplanted trees sigma to the coefficient of I_t(sigma).
    std::map<int, Series> run(int max_iter = 8) {
        const LabelSet& ls = *spec_.labels;
        std::map<int, Series> coeff;
        for (int it = 0; it < max_iter; ++it) {
            std::map<int, Series> next;
            for (const auto& [t, term] : spec_.F) {
                if (term->k == Term::Zero) continue;
                int slot_counter = 1000 * (it + 1);
                next[t] = eval_series(term, coeff, slot_counter);
            }
            if (series_equal(coeff, next)) return next;
            coeff = std::move(next);
        }
        return coeff;
    }

  private:
    static bool tensors_close(const UpsTensor& a, const UpsTensor& b, double tol) {
        if (a.zero != b.zero) return a.max_abs() < tol && b.max_abs() < tol;
        if (a.zero) return true;
        if (a.slots.size() != b.slots.size()) return false;
        // compare symmetrised evaluations (slot ids differ between routes)
        if (a.entries.size() != b.entries.size()) return false;
        const int dim = a.dim;
        const int ns = int(a.slots.size());
        if (ns > 2) return false;
        auto sym_vals = [&](const UpsTensor& t) {
            std::vector<Vec> out;
            if (ns == 0) { out.push_back(t.entries[0].v); return out; }
            if (ns == 1) {
                for (int x = 0; x < dim; ++x) out.push_back(t.entries[x].v);
                return out;
            }
            for (int x = 0; x < dim; ++x)
                for (int y = x; y < dim; ++y)
                    out.push_back(t.entries[std::size_t(x) * dim + y].v +
                                  t.entries[std::size_t(y) * dim + x].v);
            return out;
        };
        auto va = sym_vals(a), vb = sym_vals(b);
        for (std::size_t i = 0; i < va.size(); ++i)
            if ((va[i] - vb[i]).cwiseAbs().maxCoeff() > tol) return false;
        return true;
    }

    bool series_equal(const std::map<int, Series>& x, const std::map<int, Series>& y) {
        auto sub = [&](const std::map<int, Series>& p, const std::map<int, Series>& q) {
            for (const auto& [t, s] : p)
                for (const auto& [key, val] : s) {
                    auto it = q.find(t);
                    if (it == q.end()) return val.second.max_abs() < 1e-12;
                    auto jt = it->second.find(key);
                    if (jt == it->second.end()) {
                        if (val.second.max_abs() > 1e-12) return false;
                        continue;
                    }
                    if (!tensors_close(val.second, jt->second.second, 1e-10)) return false;
                }
            return true;
        };
        return sub(x, y) && sub(y, x);
    }

    void accumulate(Series& s, const TreePtr& tree, const UpsTensor& val) {
        if (val.zero) return;
        if (tree->edge_count() > max_edges_ || tree->ndec.scaled() > max_poly_) return;
        auto it = s.find(tree->serial);
        if (it == s.end()) {
            s.emplace(tree->serial, std::make_pair(tree, val));
        } else {
            tensor_ops::add_into(it->second.second, val);
        }
    }

    // Evaluate a bracket-polynomial term over tree series. Each variable
    // (t,p) expands as sum_k X^k/k! A_{(t,p+k)} plus the planted tree parts
    // I_{(t,p)}(sigma) with the current coefficients.
    Series eval_series(const TermPtr& term, const std::map<int, Series>& coeff,
                       int& slot_counter) {
        const LabelSet& ls = *spec_.labels;
        const LieAlgebra& alg = jet_.algebra();
        Series out;
        switch (term->k) {
            case Term::Zero: return out;
            case Term::Var: {
                const int lab = term->label;
                if (ls[lab].is_noise) {
                    // noise expansion: the placeholder only (zero polynomial part)
                    if (term->dec.zero()) {
                        TreePtr noise_tree =
                            Tree::make({}, {{lab, {}, Tree::leaf(), ""}});
                        accumulate(out, noise_tree,
                                   UpsTensor::noise_slot(slot_counter++, alg.dim));
                    }
                    return out;
                }
                // polynomial parts
                for (int nd = 0; nd <= max_poly_; ++nd)
                    for (int tt = 0; 2 * tt <= nd; ++tt)
                        for (int x1 = 0; 2 * tt + x1 <= nd; ++x1) {
                            const int x2 = nd - 2 * tt - x1;
                            Dec3 k{std::uint8_t(tt), std::uint8_t(x1), std::uint8_t(x2)};
                            if (k.scaled() != nd) continue;
                            Dec3 shifted = term->dec;
                            shifted.t += k.t; shifted.x1 += k.x1; shifted.x2 += k.x2;
                            UpsTensor c = UpsTensor::constant(
                                jet_.get(lab, shifted), alg.dim);
                            c = tensor_ops::scale(std::move(c), 1.0 / double(k.factorial()));
                            accumulate(out, Tree::leaf(k), c);
                        }
                // planted tree parts
                auto it = coeff.find(lab);
                if (it != coeff.end())
                    for (const auto& [key, tv] : it->second) {
                        TreePtr wrapped = Tree::make(
                            {}, {{lab, term->dec, tv.first, ""}});
                        // re-assign fresh slot ids to keep them disjoint
                        UpsTensor v = tv.second;
                        std::vector<int> fresh;
                        for (std::size_t i = 0; i < v.slots.size(); ++i)
                            fresh.push_back(slot_counter++);
                        v.slots = fresh;
                        accumulate(out, wrapped, v);
                    }
                return out;
            }
            case Term::Bracket: {
                Series sa = eval_series(term->a, coeff, slot_counter);
                Series sb = eval_series(term->b, coeff, slot_counter);
                for (const auto& [ka, va] : sa)
                    for (const auto& [kb, vb] : sb) {
                        // product tree: merge roots
                        Dec3 nd = va.first->ndec;
                        nd.t += vb.first->ndec.t;
                        nd.x1 += vb.first->ndec.x1;
                        nd.x2 += vb.first->ndec.x2;
                        std::vector<Tree::Edge> kids;
                        for (const auto& e : va.first->kids) kids.push_back(e);
                        for (const auto& e : vb.first->kids) kids.push_back(e);
                        TreePtr prod = Tree::make(nd, std::move(kids));
                        UpsTensor v = tensor_ops::bracket(alg, va.second, vb.second);
                        accumulate(out, prod, v);
                    }
                return out;
            }
            case Term::Scale: {
                Series s = eval_series(term->a, coeff, slot_counter);
                for (auto& [k, tv] : s)
                    tv.second = tensor_ops::scale(std::move(tv.second), term->c);
                return s;
            }
            case Term::Sum: {
                for (const auto& x : term->terms) {
                    Series s = eval_series(x, coeff, slot_counter);
                    for (auto& [k, tv] : s) accumulate(out, tv.first, tv.second);
                }
                return out;
            }
            default:
                throw std::logic_error(
                    "FixedPointExpansion: unsupported term kind for series evaluation");
        }
    }

    const NonlinearitySpec& spec_;
    const Jet& jet_;
    int max_edges_;
    int max_poly_;
};

}  // namespace ymflow::trees
