#pragma once

#include <fftw3.h>

#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ymflow/gauge.hpp"
#include "ymflow/lattice.hpp"
#include "ymflow/lie.hpp"
#include "ymflow/she.hpp"

namespace ymflow {

// Cached-plan helper for the semi-implicit heat solve: given a real N x N
// field f, replaces it by the inverse of (1 + dt * (-Lap_discrete)) applied
// spectrally, where Lap_discrete is the 5-point Laplacian.
class HeatSolver {
  public:
    explicit HeatSolver(int n) : n_(n) {
        buf_ = fftw_alloc_real(std::size_t(n) * n);
        spec_ = fftw_alloc_complex(std::size_t(n) * (n / 2 + 1));
        fwd_ = fftw_plan_dft_r2c_2d(n, n, buf_, spec_, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_2d(n, n, spec_, buf_, FFTW_ESTIMATE);
    }
    ~HeatSolver() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
        fftw_free(spec_);
    }
    HeatSolver(const HeatSolver&) = delete;
    HeatSolver& operator=(const HeatSolver&) = delete;

    // in-place: f <- (1 - dt Lap)^{-1} f on the torus of spacing a = 1/n
    void implicit_heat(std::vector<double>& f, double dt) {
        const double a = 1.0 / n_;
        const double c = 4.0 / (a * a);
        for (int i = 0; i < n_ * n_; ++i) buf_[i] = f[i];
        fftw_execute(fwd_);
        const int nc = n_ / 2 + 1;
        for (int k1 = 0; k1 < n_; ++k1) {
            const double s1 = std::sin(M_PI * k1 / n_);
            for (int k2 = 0; k2 < nc; ++k2) {
                const double s2 = std::sin(M_PI * k2 / n_);
                const double lam = c * (s1 * s1 + s2 * s2);
                const double fac = 1.0 / (1.0 + dt * lam);
                spec_[std::size_t(k1) * nc + k2][0] *= fac;
                spec_[std::size_t(k1) * nc + k2][1] *= fac;
            }
        }
        fftw_execute(bwd_);
        const double norm = 1.0 / double(n_ * n_);
        for (int i = 0; i < n_ * n_; ++i) f[i] = buf_[i] * norm;
    }

  private:
    int n_;
    double* buf_;
    fftw_complex* spec_;
    fftw_plan fwd_, bwd_;
};

inline HeatSolver& heat_solver(int n) {
    static std::map<int, std::unique_ptr<HeatSolver>> cache;
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, std::make_unique<HeatSolver>(n)).first;
    return *it->second;
}

// Central differences on the lattice.
inline Vec central_diff(const LatticeGaugeField& f, int comp, int axis, int i, int j) {
    const int n = f.n();
    const double inv2a = 0.5 * n;
    const int ip = (axis == 0) ? (i + 1) % n : i;
    const int im = (axis == 0) ? (i + n - 1) % n : i;
    const int jp = (axis == 1) ? (j + 1) % n : j;
    const int jm = (axis == 1) ? (j + n - 1) % n : j;
    return (f.get(comp, ip, jp) - f.get(comp, im, jm)) * inv2a;
}

// The bracket nonlinearity [A_j, 2 d_j A_i - d_i A_j + [A_j, A_i]].
inline LatticeGaugeField bracket_nonlinearity(const LatticeGaugeField& A) {
    const LieAlgebra& alg = A.algebra();
    const int n = A.n();
    LatticeGaugeField out(&alg, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Vec a[2] = {A.get(0, i, j), A.get(1, i, j)};
            for (int ci = 0; ci < 2; ++ci) {
                Vec acc = Vec::Zero(alg.dim);
                for (int cj = 0; cj < 2; ++cj) {
                    Vec inner = 2.0 * central_diff(A, ci, cj, i, j) -
                                central_diff(A, cj, ci, i, j) +
                                alg.bracket(a[cj], a[ci]);
                    acc += alg.bracket(a[cj], inner);
                }
                out.set(ci, i, j, acc);
            }
        }
    return out;
}

struct SymState {
    LatticeGaugeField A;
    double t = 0.0;
    double dt = 0.0;
    double eps = 0.0;
    double C = 0.0;
    double blowup_threshold = 1e8;
    std::optional<double> blowup_time;
};

// One semi-implicit Euler step: implicit 5-point heat solve, explicit
// nonlinearity, central first differences. `noise` is the (already
// mollified) forcing slice for this step; pass a zero field for none.
inline void step_sym(SymState& s, const LatticeGaugeField& noise) {
    if (s.blowup_time) return;
    const LieAlgebra& alg = s.A.algebra();
    const int n = s.A.n();
    LatticeGaugeField nl = bracket_nonlinearity(s.A);
    std::vector<double> comp(std::size_t(n) * n);
    for (int ci = 0; ci < 2; ++ci)
        for (int a = 0; a < alg.dim; ++a) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    comp[std::size_t(i) * n + j] =
                        s.A.at(ci, i, j, a) +
                        s.dt * (nl.at(ci, i, j, a) + s.C * s.A.at(ci, i, j, a) +
                                noise.at(ci, i, j, a));
            heat_solver(n).implicit_heat(comp, s.dt);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    s.A.at(ci, i, j, a) = comp[std::size_t(i) * n + j];
        }
    s.t += s.dt;
    if (s.A.max_abs() > s.blowup_threshold) s.blowup_time = s.t;
}

// Mollified space-time noise on the lattice: a seeded stream of white-noise
// slices convolved with the discrete mollifier stencil. Slices are cached;
// slice index m corresponds to time m*dt. For indices < 0 the noise is still
// defined (the stream extends to negative times).
class MollifiedNoise {
  public:
    MollifiedNoise(const LieAlgebra& alg, int n, double dt, double eps,
                   const MollifierSpec& chi, std::uint64_t seed)
        : alg_(&alg), n_(n), dt_(dt), seed_(seed),
          stencil_(build_noise_stencil(chi, eps, 1.0 / n, dt)) {}

    const NoiseStencil& stencil() const { return stencil_; }

    const LatticeGaugeField& raw(int m) const {
        auto it = cache_.find(m);
        if (it == cache_.end()) {
            it = cache_.emplace(m, sample_white_noise(*alg_, n_, dt_, seed_,
                                                      std::uint64_t(m + (1 << 20))))
                     .first;
        }
        return it->second;
    }

    // chi^eps * xi at slice index nstep.
    LatticeGaugeField slice(int nstep) const {
        LatticeGaugeField out(alg_, n_);
        convolve(nstep, nullptr, out);
        return out;
    }

    // chi^eps * (Ad_g xi) with a caller-supplied conjugation per slice:
    // conj(m) returns the gauge transform at slice m (identity for m < 0).
    LatticeGaugeField slice_conjugated(
        int nstep, const std::function<const GaugeTransform*(int)>& conj) const {
        LatticeGaugeField out(alg_, n_);
        convolve(nstep, &conj, out);
        return out;
    }

  private:
    void convolve(int nstep, const std::function<const GaugeTransform*(int)>* conj,
                  LatticeGaugeField& out) const {
        const double cellvol = dt_ / double(n_ * n_);
        for (int m = stencil_.t_lo; m <= stencil_.t_hi; ++m) {
            const int src = nstep - m;
            const LatticeGaugeField& xi = raw(src);
            const GaugeTransform* g = nullptr;
            if (conj && src >= 0) g = (*conj)(src);
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j) {
                    Vec acc[2] = {Vec::Zero(alg_->dim), Vec::Zero(alg_->dim)};
                    for (int di = -stencil_.r; di <= stencil_.r; ++di)
                        for (int dj = -stencil_.r; dj <= stencil_.r; ++dj) {
                            const double w = stencil_.at(m, di, dj);
                            if (w == 0.0) continue;
                            const int si = ((i - di) % n_ + n_) % n_;
                            const int sj = ((j - dj) % n_ + n_) % n_;
                            if (g) {
                                const GroupElement ge{g->at(si, sj)};
                                acc[0] += w * alg_->Ad(ge, xi.get(0, si, sj));
                                acc[1] += w * alg_->Ad(ge, xi.get(1, si, sj));
                            } else {
                                acc[0] += w * xi.get(0, si, sj);
                                acc[1] += w * xi.get(1, si, sj);
                            }
                        }
                    out.set(0, i, j, (acc[0] * cellvol).eval());
                    out.set(1, i, j, (acc[1] * cellvol).eval());
                }
        }
    }

    const LieAlgebra* alg_;
    int n_;
    double dt_;
    std::uint64_t seed_;
    NoiseStencil stencil_;
    mutable std::map<int, LatticeGaugeField> cache_;
};

// Discrete logarithmic derivative (d_j g) g^{-1} by central log-ratio.
inline LatticeGaugeField log_derivative(const GaugeTransform& g, int axis) {
    const LieAlgebra& alg = g.algebra();
    const int n = g.n();
    const double inv2a = 0.5 * n;
    LatticeGaugeField out(&alg, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const CMat& gp = (axis == 0) ? g.at(i + 1, j) : g.at(i, j + 1);
            const CMat& gm = (axis == 0) ? g.at(i - 1 + n, j) : g.at(i, j - 1 + n);
            const CMat ratio = gp * gm.adjoint();
            out.set(0, i, j, (alg.coeffs_of(logm_unitary(ratio)) * inv2a).eval());
        }
    return out;
}

struct CoupledState {
    LatticeGaugeField B;   // or Abar
    GaugeTransform g;
    double t = 0.0;
    double dt = 0.0;
    double C = 0.0;        // mass constant on the field
    double Ch = 0.0;       // constant multiplying (dg)g^{-1} in the field eq.
    double blowup_threshold = 1e8;
    std::optional<double> blowup_time;
};

namespace spde_detail {

// shared stepping core for both coupled systems; `noise` is the forcing for
// the field equation (already conjugated/mollified as appropriate).
inline void step_coupled_core(CoupledState& s, const LatticeGaugeField& noise) {
    if (s.blowup_time) return;
    const LieAlgebra& alg = s.B.algebra();
    const int n = s.B.n();
    // w_j = (d_j g) g^{-1}
    LatticeGaugeField w0 = log_derivative(s.g, 0);
    LatticeGaugeField w1 = log_derivative(s.g, 1);
    // field update
    LatticeGaugeField nl = bracket_nonlinearity(s.B);
    std::vector<double> comp(std::size_t(n) * n);
    for (int ci = 0; ci < 2; ++ci) {
        const LatticeGaugeField& w = (ci == 0) ? w0 : w1;
        for (int a = 0; a < alg.dim; ++a) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    comp[std::size_t(i) * n + j] =
                        s.B.at(ci, i, j, a) +
                        s.dt * (nl.at(ci, i, j, a) + s.C * s.B.at(ci, i, j, a) +
                                s.Ch * w.at(0, i, j, a) + noise.at(ci, i, j, a));
            heat_solver(n).implicit_heat(comp, s.dt);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    s.B.at(ci, i, j, a) = comp[std::size_t(i) * n + j];
        }
    }
    // g update: (d_t g) g^{-1} = d_j w_j + [B_j, w_j]; exponential step keeps
    // g exactly in the group.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Vec rhs = central_diff(w0, 0, 0, i, j) + central_diff(w1, 0, 1, i, j);
            rhs += alg.bracket(s.B.get(0, i, j), w0.get(0, i, j));
            rhs += alg.bracket(s.B.get(1, i, j), w1.get(0, i, j));
            s.g.at(i, j) = expm(alg.rep_of((s.dt * rhs).eval())) * s.g.at(i, j);
        }
    s.t += s.dt;
    if (s.B.max_abs() > s.blowup_threshold) s.blowup_time = s.t;
}

}  // namespace spde_detail

// B-system step: noise enters as g xi^eps g^{-1} (conjugation after
// mollification) plus C B + C (dg) g^{-1}.
inline void step_coupled_Bg(CoupledState& s, const LatticeGaugeField& xi_eps) {
    const LieAlgebra& alg = s.B.algebra();
    const int n = s.B.n();
    LatticeGaugeField conj(&alg, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const GroupElement ge{s.g.at(i, j)};
            conj.set(0, i, j, alg.Ad(ge, xi_eps.get(0, i, j)));
            conj.set(1, i, j, alg.Ad(ge, xi_eps.get(1, i, j)));
        }
    spde_detail::step_coupled_core(s, conj);
}

// Abar-system step: the forcing chi^eps * (g xi g^{-1}) must be formed by the
// caller (conjugation happens before mollification); the mass structure is
// identical otherwise.
inline void step_coupled_barA(CoupledState& s, const LatticeGaugeField& conjugated_noise) {
    spde_detail::step_coupled_core(s, conjugated_noise);
}

// State for the linearised transport pair (h, U) evolved directly.
struct UhState {
    LatticeGaugeField h;         // h_i, i = 1,2 in the two components
    std::vector<Mat> U;          // per site, operators on the algebra
    double t = 0.0, dt = 0.0;
    int n = 0;
};

inline UhState derive_Uh(const LieAlgebra& alg, const GaugeTransform& g) {
    UhState s;
    s.n = g.n();
    s.h = LatticeGaugeField(&alg, s.n);
    LatticeGaugeField w0 = log_derivative(g, 0);
    LatticeGaugeField w1 = log_derivative(g, 1);
    for (int i = 0; i < s.n; ++i)
        for (int j = 0; j < s.n; ++j) {
            s.h.set(0, i, j, w0.get(0, i, j));
            s.h.set(1, i, j, w1.get(0, i, j));
        }
    s.U.resize(std::size_t(s.n) * s.n);
    for (int i = 0; i < s.n; ++i)
        for (int j = 0; j < s.n; ++j)
            s.U[std::size_t(i) * s.n + j] = alg.Ad_matrix(GroupElement{g.at(i, j)});
    return s;
}

// One IMEX step of the (h, U) system driven by the field B:
//   d_t h_i = Lap h_i - [h_j, d_j h_i] + [[B_j,h_j],h_i] + d_i [B_j,h_j]
//   d_t U   = Lap U - [h_j,[h_j,.]] o U + [[B_j,h_j],.] o U.
inline void step_Uh(UhState& s, const LatticeGaugeField& B) {
    const LieAlgebra& alg = B.algebra();
    const int n = s.n;
    const double inv2a = 0.5 * n;
    // precompute p = [B_j, h_j] (sum over j) and its central gradients
    LatticeGaugeField p(&alg, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Vec v = alg.bracket(B.get(0, i, j), s.h.get(0, i, j)) +
                    alg.bracket(B.get(1, i, j), s.h.get(1, i, j));
            p.set(0, i, j, v);
        }
    LatticeGaugeField hn(&alg, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int ci = 0; ci < 2; ++ci) {
                Vec rhs = Vec::Zero(alg.dim);
                for (int cj = 0; cj < 2; ++cj)
                    rhs -= alg.bracket(s.h.get(cj, i, j), central_diff(s.h, ci, cj, i, j));
                rhs += alg.bracket(p.get(0, i, j), s.h.get(ci, i, j));
                rhs += central_diff(p, 0, ci, i, j);
                hn.set(ci, i, j, (s.h.get(ci, i, j) + s.dt * rhs).eval());
            }
    // U explicit part
    std::vector<Mat> Un(s.U.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Mat& U = s.U[std::size_t(i) * n + j];
            Mat rhs = Mat::Zero(alg.dim, alg.dim);
            for (int cj = 0; cj < 2; ++cj) {
                const Mat adh = alg.ad(s.h.get(cj, i, j));
                rhs -= adh * adh * U;
            }
            rhs += alg.ad(p.get(0, i, j)) * U;
            Un[std::size_t(i) * n + j] = U + s.dt * rhs;
        }
    // implicit heat on every component
    std::vector<double> comp(std::size_t(n) * n);
    for (int ci = 0; ci < 2; ++ci)
        for (int a = 0; a < alg.dim; ++a) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    comp[std::size_t(i) * n + j] = hn.at(ci, i, j, a);
            heat_solver(n).implicit_heat(comp, s.dt);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    hn.at(ci, i, j, a) = comp[std::size_t(i) * n + j];
        }
    for (int a = 0; a < alg.dim; ++a)
        for (int b = 0; b < alg.dim; ++b) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    comp[std::size_t(i) * n + j] = Un[std::size_t(i) * n + j](a, b);
            heat_solver(n).implicit_heat(comp, s.dt);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    Un[std::size_t(i) * n + j](a, b) = comp[std::size_t(i) * n + j];
        }
    s.h = std::move(hn);
    s.U = std::move(Un);
    s.t += s.dt;
}

// Pathwise consistency of the DeTurck construction with smooth forcing: the
// gauge transform of the A-flow must match the directly solved B-system with
// conjugated forcing. Returns the final sup discrepancy.
struct DeturckReport {
    double discrepancy = 0.0;
    double final_time = 0.0;
    bool blew_up = false;
};

inline DeturckReport deturck_consistency(
    const LieAlgebra& alg, int n, double T, double dt,
    const std::function<void(double, const Point2&, Vec&, Vec&)>& forcing,
    const LatticeGaugeField& A0, const GaugeTransform& g0, double C) {
    // run 1: A-system + g driven by B = A^g
    SymState sa{A0, 0.0, dt, 0.0, C};
    GaugeTransform g = g0;
    // run 2: B-system with conjugated forcing
    CoupledState sb;
    sb.B = apply_gauge(A0, g0);
    sb.g = g0;
    sb.dt = dt;
    sb.C = C;
    sb.Ch = C;
    const int steps = int(std::round(T / dt));
    LatticeGaugeField f(&alg, n), fc(&alg, n);
    Vec v1(alg.dim), v2(alg.dim);
    for (int step = 0; step < steps; ++step) {
        const double t = step * dt;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                forcing(t, f.site(i, j), v1, v2);
                f.set(0, i, j, v1);
                f.set(1, i, j, v2);
            }
        // advance g with B = A^g (before advancing A, matching the B-run order)
        LatticeGaugeField Bg = apply_gauge(sa.A, g);
        {
            CoupledState tmp;
            tmp.B = Bg;
            tmp.g = g;
            tmp.dt = dt;
            // only the g-half of the coupled step: reuse the core on a copy
            // of the field with zero forcing and zero constants, then keep g.
            LatticeGaugeField w0 = log_derivative(tmp.g, 0);
            LatticeGaugeField w1 = log_derivative(tmp.g, 1);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Vec rhs = central_diff(w0, 0, 0, i, j) + central_diff(w1, 0, 1, i, j);
                    rhs += alg.bracket(Bg.get(0, i, j), w0.get(0, i, j));
                    rhs += alg.bracket(Bg.get(1, i, j), w1.get(0, i, j));
                    g.at(i, j) = expm(alg.rep_of((dt * rhs).eval())) * g.at(i, j);
                }
        }
        step_sym(sa, f);
        // B-run forcing: conjugated by its own gauge field
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const GroupElement ge{sb.g.at(i, j)};
                fc.set(0, i, j, alg.Ad(ge, f.get(0, i, j)));
                fc.set(1, i, j, alg.Ad(ge, f.get(1, i, j)));
            }
        spde_detail::step_coupled_core(sb, fc);
        if (sa.blowup_time || sb.blowup_time) {
            return {0.0, std::min(sa.t, sb.t), true};
        }
    }
    LatticeGaugeField Ag = apply_gauge(sa.A, g);
    DeturckReport rep;
    rep.final_time = sa.t;
    rep.discrepancy = (Ag - sb.B).max_abs();
    return rep;
}

}  // namespace ymflow
