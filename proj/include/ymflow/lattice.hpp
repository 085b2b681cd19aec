#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ymflow/lie.hpp"
#include "ymflow/rng.hpp"
#include "ymflow/torus.hpp"

namespace ymflow {

// N x N torus grid of pairs (A_1, A_2) of algebra coefficient vectors,
// grid spacing a = 1/N. Sites live at x = (-1/2 + i*a, -1/2 + j*a).
class LatticeGaugeField {
  public:
    LatticeGaugeField() = default;
    LatticeGaugeField(const LieAlgebra* alg, int n)
        : alg_(alg), n_(n), data_(std::size_t(2) * n * n * alg->dim, 0.0) {}

    const LieAlgebra& algebra() const { return *alg_; }
    int n() const { return n_; }
    double spacing() const { return 1.0 / n_; }

    double& at(int comp, int i, int j, int a) {
        return data_[idx(comp, i, j, a)];
    }
    double at(int comp, int i, int j, int a) const {
        return data_[idx(comp, i, j, a)];
    }

    Vec get(int comp, int i, int j) const {
        Vec v(alg_->dim);
        for (int a = 0; a < alg_->dim; ++a) v(a) = at(comp, i, j, a);
        return v;
    }
    void set(int comp, int i, int j, const Vec& v) {
        for (int a = 0; a < alg_->dim; ++a) at(comp, i, j, a) = v(a);
    }

    Point2 site(int i, int j) const {
        const double a = spacing();
        return {-0.5 + i * a, -0.5 + j * a};
    }

    // Bilinear interpolation, periodic.
    Vec interp(int comp, const Point2& x) const {
        const double a = spacing();
        double u = (x[0] + 0.5) / a;
        double v = (x[1] + 0.5) / a;
        u -= std::floor(u / n_) * n_;
        v -= std::floor(v / n_) * n_;
        const int i0 = int(std::floor(u)) % n_;
        const int j0 = int(std::floor(v)) % n_;
        const double fu = u - std::floor(u);
        const double fv = v - std::floor(v);
        const int i1 = (i0 + 1) % n_;
        const int j1 = (j0 + 1) % n_;
        Vec out(alg_->dim);
        for (int c = 0; c < alg_->dim; ++c) {
            out(c) = (1 - fu) * (1 - fv) * at(comp, i0, j0, c) +
                     fu * (1 - fv) * at(comp, i1, j0, c) +
                     (1 - fu) * fv * at(comp, i0, j1, c) +
                     fu * fv * at(comp, i1, j1, c);
        }
        return out;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    friend LatticeGaugeField operator-(const LatticeGaugeField& x,
                                       const LatticeGaugeField& y) {
        LatticeGaugeField out = x;
        for (std::size_t k = 0; k < out.data_.size(); ++k)
            out.data_[k] -= y.data_[k];
        return out;
    }

  private:
    std::size_t idx(int comp, int i, int j, int a) const {
        return ((std::size_t(comp) * n_ + i) * n_ + j) * alg_->dim + a;
    }
    const LieAlgebra* alg_ = nullptr;
    int n_ = 0;
    std::vector<double> data_;
};

// Independent N(0, 1/(a^2 dt)) coefficient per site, spatial index and basis
// direction; deterministic for a fixed (seed, stream).
inline LatticeGaugeField sample_white_noise(const LieAlgebra& alg, int n,
                                            double dt, std::uint64_t seed,
                                            std::uint64_t stream = 0) {
    if (n < 2) throw std::invalid_argument("sample_white_noise: N >= 2 required");
    if (!(dt > 0.0)) throw std::invalid_argument("sample_white_noise: dt > 0 required");
    LatticeGaugeField xi(&alg, n);
    const double a = 1.0 / n;
    const double sd = 1.0 / std::sqrt(a * a * dt);
    Rng rng(seed, stream);
    for (double& v : xi.raw()) v = sd * rng.next_normal();
    return xi;
}

// Smooth random trigonometric field: a handful of Fourier modes with
// Gaussian coefficients, per component and basis direction.
inline LatticeGaugeField random_trig_field(const LieAlgebra& alg, int n,
                                           int kmax, double amplitude,
                                           std::uint64_t seed) {
    LatticeGaugeField f(&alg, n);
    Rng rng(seed, 17);
    struct Mode { int k1, k2; double c, s; };
    std::vector<std::vector<std::vector<Mode>>> modes(
        2, std::vector<std::vector<Mode>>(alg.dim));
    for (int comp = 0; comp < 2; ++comp)
        for (int a = 0; a < alg.dim; ++a)
            for (int k1 = -kmax; k1 <= kmax; ++k1)
                for (int k2 = -kmax; k2 <= kmax; ++k2) {
                    if (k1 == 0 && k2 == 0) continue;
                    modes[comp][a].push_back(
                        {k1, k2, amplitude * rng.next_normal(),
                         amplitude * rng.next_normal()});
                }
    const double twopi = 2.0 * M_PI;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Point2 x = f.site(i, j);
            for (int comp = 0; comp < 2; ++comp)
                for (int a = 0; a < alg.dim; ++a) {
                    double v = 0.0;
                    for (const Mode& m : modes[comp][a]) {
                        const double ph = twopi * (m.k1 * x[0] + m.k2 * x[1]);
                        v += m.c * std::cos(ph) + m.s * std::sin(ph);
                    }
                    f.at(comp, i, j, a) = v;
                }
        }
    return f;
}

// Evaluate a closed-form 1-form on the lattice.
inline LatticeGaugeField field_from_function(
    const LieAlgebra& alg, int n,
    const std::function<void(const Point2&, Vec&, Vec&)>& fn) {
    LatticeGaugeField f(&alg, n);
    Vec a1(alg.dim), a2(alg.dim);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            fn(f.site(i, j), a1, a2);
            f.set(0, i, j, a1);
            f.set(1, i, j, a2);
        }
    return f;
}

}  // namespace ymflow
