#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "ymflow/lattice.hpp"
#include "ymflow/lie.hpp"
#include "ymflow/mollifier.hpp"
#include "ymflow/oneform.hpp"
#include "ymflow/rng.hpp"

namespace ymflow {

using cplx = std::complex<double>;

// Variance of a single Fourier mode of the stochastic heat equation started
// from zero: each mode is a scalar OU process with rate (2 pi |k|)^2, so
// Var_k(t) = (1 - e^{-2 (2pi|k|)^2 t}) / (2 (2pi|k|)^2) and Var_0(t) = t.
inline double she_mode_variance(int k1, int k2, double t) {
    const double mu = 4.0 * M_PI * M_PI * double(k1 * k1 + k2 * k2);
    if (mu == 0.0) return t;
    return -std::expm1(-2.0 * mu * t) / (2.0 * mu);
}

// Stationary limit of the mode variance.
inline double gff_mode_variance(int k1, int k2) {
    const double mu = 4.0 * M_PI * M_PI * double(k1 * k1 + k2 * k2);
    if (mu == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / (2.0 * mu);
}

// Covariance of one mode between times s <= t.
inline double she_mode_covariance(int k1, int k2, double s, double t) {
    const double mu = 4.0 * M_PI * M_PI * double(k1 * k1 + k2 * k2);
    if (s > t) std::swap(s, t);
    if (mu == 0.0) return s;
    return std::exp(-mu * (t - s)) * she_mode_variance(k1, k2, s);
}

// Fourier representation of the heat-equation field at a fixed time:
// coefficients for modes k in {-K..K}^2, per spatial index i in {1,2} and
// basis direction a, with the reality constraint coeff(-k) = conj(coeff(k)).
class SpectralField {
  public:
    SpectralField(const LieAlgebra* alg, int kmax, double t)
        : alg_(alg), kmax_(kmax), t_(t),
          c_(std::size_t(2) * alg->dim * side() * side(), cplx(0, 0)) {}

    int kmax() const { return kmax_; }
    double time() const { return t_; }
    const LieAlgebra& algebra() const { return *alg_; }

    cplx& at(int comp, int a, int k1, int k2) { return c_[idx(comp, a, k1, k2)]; }
    cplx at(int comp, int a, int k1, int k2) const { return c_[idx(comp, a, k1, k2)]; }

    // Exact line integral of the trigonometric field along a segment,
    // per basis direction: sum_k sum_i c_i(k) v_i e^{2pi i k.x} E(2pi k.v),
    // E(u) = (e^{iu}-1)/(iu).
    Vec segment_integral(const Segment& l) const {
        Vec out = Vec::Zero(alg_->dim);
        for (int k1 = -kmax_; k1 <= kmax_; ++k1)
            for (int k2 = -kmax_; k2 <= kmax_; ++k2) {
                const double kx = k1 * l.x[0] + k2 * l.x[1];
                const double kv = k1 * l.v[0] + k2 * l.v[1];
                const cplx phase = std::polar(1.0, 2.0 * M_PI * kx);
                cplx E;
                const double u = 2.0 * M_PI * kv;
                if (std::abs(u) < 1e-12) {
                    E = cplx(1.0, 0.0);
                } else {
                    E = (std::polar(1.0, u) - 1.0) / cplx(0.0, u);
                }
                for (int a = 0; a < alg_->dim; ++a) {
                    const cplx amp = at(0, a, k1, k2) * l.v[0] + at(1, a, k1, k2) * l.v[1];
                    out(a) += (amp * phase * E).real();
                }
            }
        return out;
    }

    // Boundary sum over a triangle via the curl pairing with the indicator.
    Vec triangle_boundary(const std::array<Point2, 3>& verts) const;

  private:
    int side() const { return 2 * kmax_ + 1; }
    std::size_t idx(int comp, int a, int k1, int k2) const {
        return ((std::size_t(comp) * alg_->dim + a) * side() + (k1 + kmax_)) * side() +
               (k2 + kmax_);
    }
    const LieAlgebra* alg_;
    int kmax_;
    double t_;
    std::vector<cplx> c_;
};

// Draw the field at time t with zero initial condition: independent
// mean-zero complex Gaussians per mode and basis direction with variance
// Var_k(t), respecting the reality constraint. Deterministic under the seed.
inline SpectralField sample_she(const LieAlgebra& alg, double t, int kmax,
                                std::uint64_t seed, std::uint64_t stream = 0) {
    if (t < 0.0) throw std::invalid_argument("sample_she: t >= 0 required");
    SpectralField f(&alg, kmax, t);
    Rng rng(seed, stream);
    for (int comp = 0; comp < 2; ++comp)
        for (int a = 0; a < alg.dim; ++a)
            for (int k1 = -kmax; k1 <= kmax; ++k1)
                for (int k2 = -kmax; k2 <= kmax; ++k2) {
                    // take each conjugate pair once
                    if (k1 < 0 || (k1 == 0 && k2 < 0)) continue;
                    const double var = she_mode_variance(k1, k2, t);
                    if (k1 == 0 && k2 == 0) {
                        f.at(comp, a, 0, 0) = cplx(std::sqrt(var) * rng.next_normal(), 0.0);
                        continue;
                    }
                    const double sd = std::sqrt(var / 2.0);
                    const cplx z(sd * rng.next_normal(), sd * rng.next_normal());
                    f.at(comp, a, k1, k2) = z;
                    f.at(comp, a, -k1, -k2) = std::conj(z);
                }
    return f;
}

// Fourier coefficient of the indicator of a planar polygon (counterclockwise
// vertices): hat1_P(k) = int_P e^{-2 pi i k.x} dx, by the boundary formula.
inline cplx polygon_indicator_hat(const std::vector<Point2>& v, int k1, int k2) {
    const double q1 = 2.0 * M_PI * k1;
    const double q2 = 2.0 * M_PI * k2;
    const std::size_t n = v.size();
    if (k1 == 0 && k2 == 0) {
        double area = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            area += cross2(v[i], v[(i + 1) % n]);
        return cplx(0.5 * area, 0.0);
    }
    auto Efun = [](cplx z) -> cplx {
        if (std::abs(z) < 1e-9) return cplx(1.0, 0.0) + 0.5 * z;
        return (std::exp(z) - 1.0) / z;
    };
    cplx acc(0, 0);
    const bool use1 = std::abs(q1) >= std::abs(q2);
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = v[i];
        const Point2& b = v[(i + 1) % n];
        const cplx ea = std::exp(cplx(0, -(q1 * a[0] + q2 * a[1])));
        const cplx z = cplx(0, -(q1 * (b[0] - a[0]) + q2 * (b[1] - a[1])));
        if (use1) {
            acc += (b[1] - a[1]) / cplx(0, -q1) * ea * Efun(z);
        } else {
            acc += (b[0] - a[0]) / cplx(0, q2) * ea * Efun(z);
        }
    }
    return acc;
}

inline Vec SpectralField::triangle_boundary(const std::array<Point2, 3>& verts) const {
    // orient counterclockwise in the lifted plane
    std::vector<Point2> v = {{0, 0}, tsub(verts[1], verts[0]), tsub(verts[2], verts[0])};
    if (cross2(v[1], v[2]) < 0) std::swap(v[1], v[2]);
    const Point2 base = verts[0];
    Vec out = Vec::Zero(alg_->dim);
    for (int k1 = -kmax_; k1 <= kmax_; ++k1)
        for (int k2 = -kmax_; k2 <= kmax_; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            // shift the indicator to the true location of the triangle
            const cplx shift = std::exp(cplx(0, -2.0 * M_PI * (k1 * base[0] + k2 * base[1])));
            const cplx ind = std::conj(polygon_indicator_hat(v, k1, k2) * shift);
            for (int a = 0; a < alg_->dim; ++a) {
                const cplx curl = cplx(0, 2.0 * M_PI) *
                                  (double(k1) * at(1, a, k1, k2) - double(k2) * at(0, a, k1, k2));
                out(a) += (curl * ind).real();
            }
        }
    return out;
}

struct SecondMomentResult {
    double value = 0.0;       // per basis direction
    double tail_bound = 0.0;  // estimate of the truncation tail
};

// E |Psi(t)(l)|^2 per basis direction as a truncated Fourier sum
// sum_k |hat{delta_l}(k)|^2 Var_k(t).
inline SecondMomentResult segment_second_moment(const Segment& l, double t, int kmax) {
    SecondMomentResult res;
    double shell = 0.0;
    const int shell_lo = kmax / 2;
    for (int k1 = -kmax; k1 <= kmax; ++k1)
        for (int k2 = -kmax; k2 <= kmax; ++k2) {
            const double kv = k1 * l.v[0] + k2 * l.v[1];
            const double u = 2.0 * M_PI * kv;
            double phi2;
            if (std::abs(u) < 1e-12) {
                phi2 = 1.0;
            } else {
                // |E(iu)|^2 = (2 - 2cos u)/u^2
                phi2 = (2.0 - 2.0 * std::cos(u)) / (u * u);
            }
            const double len2 = l.v[0] * l.v[0] + l.v[1] * l.v[1];
            const double term = len2 * phi2 * she_mode_variance(k1, k2, t);
            res.value += term;
            if (std::max(std::abs(k1), std::abs(k2)) > shell_lo) shell += term;
        }
    res.tail_bound = 2.0 * shell;  // outer-shell extrapolation
    return res;
}

// E |Psi(t)(boundary P)|^2 per basis direction:
// sum_k |hat1_P(k)|^2 |2 pi k|^2 Var_k(t) (two noise components).
inline SecondMomentResult triangle_second_moment(const std::array<Point2, 3>& verts,
                                                 double t, int kmax) {
    std::vector<Point2> v = {{0, 0}, tsub(verts[1], verts[0]), tsub(verts[2], verts[0])};
    const double sa = 0.5 * cross2(v[1], v[2]);
    SecondMomentResult res;
    if (std::abs(sa) == 0.0) return res;
    if (sa < 0) std::swap(v[1], v[2]);
    double shell = 0.0;
    const int shell_lo = kmax / 2;
    for (int k1 = -kmax; k1 <= kmax; ++k1)
        for (int k2 = -kmax; k2 <= kmax; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            const double ind2 = std::norm(polygon_indicator_hat(v, k1, k2));
            const double q2 = 4.0 * M_PI * M_PI * double(k1 * k1 + k2 * k2);
            const double term = ind2 * q2 * she_mode_variance(k1, k2, t);
            res.value += term;
            if (std::max(std::abs(k1), std::abs(k2)) > shell_lo) shell += term;
        }
    res.tail_bound = 2.0 * shell;
    return res;
}

// Discrete space-time mollification stencil on an (a, dt) grid, normalised
// so that sum * a^2 * dt = 1 exactly.
struct NoiseStencil {
    int t_lo = 0, t_hi = 0;   // slice offsets (inclusive); weight index m-t_lo
    int r = 0;                // spatial radius in cells
    std::vector<double> w;    // [(t_hi-t_lo+1) x (2r+1) x (2r+1)]

    double at(int m, int di, int dj) const {
        return w[(std::size_t(m - t_lo) * (2 * r + 1) + (di + r)) * (2 * r + 1) + (dj + r)];
    }
};

inline NoiseStencil build_noise_stencil(const MollifierSpec& chi, double eps,
                                        double a, double dt) {
    if (eps < 2.0 * a)
        throw std::invalid_argument("mollifier under-resolved: eps < 2 grid cells");
    NoiseStencil s;
    const double tmin = chi.t_min() * eps * eps;
    const double tmax = chi.t_max() * eps * eps;
    s.t_lo = int(std::floor(tmin / dt));
    s.t_hi = int(std::ceil(tmax / dt));
    s.r = int(std::ceil(chi.r0 * eps / a));
    const int side = 2 * s.r + 1;
    s.w.assign(std::size_t(s.t_hi - s.t_lo + 1) * side * side, 0.0);
    double total = 0.0;
    for (int m = s.t_lo; m <= s.t_hi; ++m)
        for (int di = -s.r; di <= s.r; ++di)
            for (int dj = -s.r; dj <= s.r; ++dj) {
                const double v = chi.chi_eps(eps, m * dt, di * a, dj * a);
                s.w[(std::size_t(m - s.t_lo) * side + (di + s.r)) * side + (dj + s.r)] = v;
                total += v;
            }
    const double mass = total * a * a * dt;
    if (mass <= 0.0)
        throw std::invalid_argument("mollifier under-resolved: empty stencil");
    for (double& v : s.w) v /= mass;
    return s;
}

}  // namespace ymflow
