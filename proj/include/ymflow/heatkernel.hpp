#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ymflow/mollifier.hpp"

namespace ymflow {

// ---------------------------------------------------------------------------
// Truncated heat kernel on R x R^2:
//   K(t,x) = G(t,x) * S(|z|_s),  |z|_s = sqrt(t) + |x|,
// where G is the 2d Gaussian heat kernel and S is a generalised smoothstep
// descending from 1 to 0 on [1/2, 1]. K = G inside |z|_s <= 1/2, K = 0
// outside |z|_s >= 1, K(t,.) = 0 for t <= 0, and K has full spatial
// reflection and swap symmetry (radial).
// ---------------------------------------------------------------------------
struct KernelSpec {
    int order = 5;  // smoothstep order (C^order at the seams)

    KernelSpec() { build_coeffs(); }
    explicit KernelSpec(int ord) : order(ord) {
        if (ord < 2)
            throw std::invalid_argument("KernelSpec: cutoff profile not smooth enough (order < 2)");
        build_coeffs();
    }

    // Generalised smoothstep on [0,1] (rising), degree 2*order+1.
    double smoothstep(double w) const {
        if (w <= 0.0) return 0.0;
        if (w >= 1.0) return 1.0;
        double acc = 0.0;
        for (int k = order; k >= 0; --k) acc = acc * w + coef_[k];
        return acc * std::pow(w, order + 1);
    }
    double smoothstep_d1(double w) const {
        if (w <= 0.0 || w >= 1.0) return 0.0;
        double acc = 0.0, dacc = 0.0;
        for (int k = order; k >= 0; --k) {
            dacc = dacc * w + acc;
            acc = acc * w + coef_[k];
        }
        const double wp = std::pow(w, order);
        return wp * (w * dacc + (order + 1) * acc);
    }
    double smoothstep_d2(double w) const {
        const double h = 1e-6;
        return (smoothstep_d1(w + h) - smoothstep_d1(w - h)) / (2.0 * h);
    }

    // Descending cutoff S(u): 1 for u <= 1/2, 0 for u >= 1.
    double cutoff(double u) const { return 1.0 - smoothstep(2.0 * (u - 0.5)); }
    double cutoff_d1(double u) const { return -2.0 * smoothstep_d1(2.0 * (u - 0.5)); }
    double cutoff_d2(double u) const { return -4.0 * smoothstep_d2(2.0 * (u - 0.5)); }

    static double G(double t, double r) {
        if (t <= 0.0) return 0.0;
        return std::exp(-r * r / (4.0 * t)) / (4.0 * M_PI * t);
    }

    double K_radial(double t, double r) const {
        if (t <= 0.0) return 0.0;
        return G(t, r) * cutoff(std::sqrt(t) + r);
    }
    double K(double t, double x1, double x2) const {
        return K_radial(t, std::hypot(x1, x2));
    }
    // Spatial derivative d_j K.
    double dK(int j, double t, double x1, double x2) const {
        if (t <= 0.0) return 0.0;
        const double r = std::hypot(x1, x2);
        const double xj = (j == 1) ? x1 : x2;
        const double g = G(t, r);
        const double u = std::sqrt(t) + r;
        double val = -xj / (2.0 * t) * g * cutoff(u);
        if (r > 1e-300) val += g * cutoff_d1(u) * xj / r;
        return val;
    }

    // Q = (d_t - Lap) K - delta_0, smooth and supported away from the origin:
    // Q = G (d_t S~ - Lap S~) - 2 grad G . grad S~ with S~(t,x) = S(sqrt t + |x|).
    double Q_radial(double t, double r) const {
        if (t <= 0.0) return 0.0;
        const double u = std::sqrt(t) + r;
        const double s1 = cutoff_d1(u);
        if (s1 == 0.0 && cutoff_d2(u) == 0.0) return 0.0;
        const double g = G(t, r);
        const double s2 = cutoff_d2(u);
        // d_t S~ = s1/(2 sqrt t); Lap S~ = s2 + s1/r; d_r G = -(r/2t) G.
        double val = g * (s1 / (2.0 * std::sqrt(t)) - s2) + (r / t) * g * s1;
        if (r > 1e-300) val -= g * s1 / r;
        else return 0.0;  // radial Laplacian singularity only when s1(u)!=0 at r=0
        return val;
    }
    // r * Q(t,r), with the 1/r singularity cancelled analytically; this is
    // the natural integrand for radial transforms.
    double rQ_radial(double t, double r) const {
        if (t <= 0.0) return 0.0;
        const double u = std::sqrt(t) + r;
        const double s1 = cutoff_d1(u);
        const double s2 = cutoff_d2(u);
        if (s1 == 0.0 && s2 == 0.0) return 0.0;
        const double g = G(t, r);
        return g * (r * s1 / (2.0 * std::sqrt(t)) - r * s2 - s1 + r * r * s1 / t);
    }

    // Spatial Fourier transform (angular frequency q):
    // Khat(t,q) = 2 pi int r K(t,r) J0(qr) dr. For t below t_an the cutoff is
    // invisible to machine precision and Khat = exp(-q^2 t).
    static constexpr double t_an = 0.002;

    double Khat(double t, double q) const {
        if (t <= 0.0) return 0.0;
        if (t <= t_an) return std::exp(-q * q * t);
        // Hankel transform by composite midpoint on a fine radial grid.
        double acc = 0.0;
        const int n = 6000;
        const double dr = 1.0 / n;
        for (int i = 0; i < n; ++i) {
            const double r = (i + 0.5) * dr;
            acc += 2.0 * M_PI * r * K_radial(t, r) * std::cyl_bessel_j(0, q * r) * dr;
        }
        return acc;
    }

    // Total spatial mass of K(t,.) (exact 1d quadrature).
    double mass(double t) const {
        if (t <= 0.0) return 0.0;
        double acc = 0.0;
        const int n = 4000;
        const double dr = 1.0 / n;
        for (int i = 0; i < n; ++i) {
            const double r = (i + 0.5) * dr;
            acc += 2.0 * M_PI * r * K_radial(t, r) * dr;
        }
        return acc;
    }

    // Pointwise K*chi_eps by a tensor Gauss rule over the mollifier support.
    double K_eps(const MollifierSpec& chi, double eps, double t, double x1,
                 double x2, int n1d = 12) const;

  private:
    void build_coeffs() {
        coef_.assign(order + 1, 0.0);
        auto binom = [](int n, int k) {
            double v = 1.0;
            for (int i = 0; i < k; ++i) v = v * (n - i) / (i + 1);
            return v;
        };
        for (int k = 0; k <= order; ++k) {
            coef_[k] = binom(order + k, k) * binom(2 * order + 1, order - k) *
                       ((k % 2) ? -1.0 : 1.0);
        }
    }
    std::vector<double> coef_;
};

namespace quad {

// Composite Gauss-Legendre grid (nodes + weights).
struct Grid {
    std::vector<double> x, w;
    void add_panel(double a, double b, int m) {
        static const double n12[6] = {0.9815606342467192, 0.9041172563704749,
                                      0.7699026741943047, 0.5873179542866175,
                                      0.3678314989981802, 0.1252334085114689};
        static const double w12[6] = {0.0471753363865118, 0.1069393259953184,
                                      0.1600783285433462, 0.2031674267230659,
                                      0.2334925365383548, 0.2491470458134028};
        if (m != 12) throw std::invalid_argument("Grid: only 12-pt panels supported");
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (int i = 5; i >= 0; --i) { x.push_back(c - h * n12[i]); w.push_back(h * w12[i]); }
        for (int i = 0; i < 6; ++i) { x.push_back(c + h * n12[i]); w.push_back(h * w12[i]); }
    }
    std::size_t size() const { return x.size(); }
};

// Geometric panel layout from 0 to T resolving an exp(-q^2 t)-type scale.
inline Grid graded_exp_grid(double T, double q, int panels_per_decade = 3) {
    Grid g;
    if (T <= 0.0) return g;
    const double scale = (q > 1.0) ? 1.0 / (q * q) : 1.0;
    double lo = std::min(T, std::max(1e-10, 1e-3 * scale));
    g.add_panel(0.0, lo, 12);
    while (lo < T) {
        double hi = std::min(T, lo * std::pow(10.0, 1.0 / panels_per_decade));
        if (hi - lo < 1e-14) break;
        g.add_panel(lo, hi, 12);
        lo = hi;
    }
    return g;
}

// int_a^b e^{-alpha t} dt, stable for alpha >= 0.
inline double I0(double a, double b, double alpha) {
    if (b <= a) return 0.0;
    if (alpha <= 0.0) return b - a;
    return (std::exp(-alpha * a) - std::exp(-alpha * b)) / alpha;
}
// int_a^b (t + c) e^{-alpha t} dt.
inline double I1(double a, double b, double alpha, double c) {
    if (b <= a) return 0.0;
    if (alpha <= 0.0) return 0.5 * (b * b - a * a) + c * (b - a);
    const double ea = std::exp(-alpha * a), eb = std::exp(-alpha * b);
    return (ea * (a + c + 1.0 / alpha) - eb * (b + c + 1.0 / alpha)) / alpha;
}

}  // namespace quad

// ---------------------------------------------------------------------------
// Per-q tables of the cutoff corrections, on a shared uniform time grid:
//   D(t,q)  = Khat(t,q) - e^{-q^2 t} 1_{(0,1]}(t)      (zero for q > q_stop)
//   Qh(t,q) = spatial FT of Q(t,.)
//   VD(tau,q) = (Khat *_t Khat)(tau,q) - w(tau) e^{-q^2 tau}, w = tau ^ (2-tau)
//   Zt(t,q) = (Qh *_t Khat)(t,q)
// Everything fast-varying is handled in closed form; these tables carry only
// smooth, compactly supported corrections.
// ---------------------------------------------------------------------------
class KernelTables {
  public:
    static constexpr double q_stop = 200.0;  // corrections vanish beyond this

    KernelTables(const KernelSpec& ker, const std::vector<double>& qs, double ht = 0.002)
        : ker_(ker), qs_(qs), ht_(ht) {
        nt_ = int(std::round(1.02 / ht_)) + 1;       // t in [0, 1.02]
        ntau_ = int(std::round(2.04 / ht_)) + 1;     // tau in [0, 2.04]
        nq_ = 0;
        for (double q : qs_) if (q <= q_stop) ++nq_;
        build();
    }

    double ht() const { return ht_; }
    int nq_corr() const { return nq_; }

    // Linear interpolation helpers on the uniform grids. Out-of-range: 0.
    double D(int iq, double t) const { return interp(Dtab_, iq, t, nt_); }
    double Qh(int iq, double t) const { return interp(Qtab_, iq, t, nt_); }
    double VD(int iq, double tau) const { return interp(Vtab_, iq, tau, ntau_); }
    double Zt(int iq, double t) const { return interp(Ztab_, iq, t, nt_); }

    double D_node(int iq, int it) const { return Dtab_[std::size_t(iq) * nt_ + it]; }
    double Qh_node(int iq, int it) const { return Qtab_[std::size_t(iq) * nt_ + it]; }
    double Zt_node(int iq, int it) const { return Ztab_[std::size_t(iq) * nt_ + it]; }
    double V_node(int iq, int it) const { return Vtab_[std::size_t(iq) * ntau_ + it]; }
    int nt() const { return nt_; }
    int ntau() const { return ntau_; }

    // Simpson weight on the uniform grid (composite, n odd-interval safe).
    static double simpson_w(int i, int n) {
        if (i == 0 || i == n - 1) return 1.0 / 3.0;
        return (i % 2 == 1) ? 4.0 / 3.0 : 2.0 / 3.0;
    }

  private:
    double interp(const std::vector<double>& tab, int iq, double t, int n) const {
        if (iq >= nq_ || t <= 0.0) return 0.0;
        const double u = t / ht_;
        if (u >= n - 1) return 0.0;
        const int i = int(u);
        const double f = u - i;
        const double* row = tab.data() + std::size_t(iq) * n;
        return row[i] * (1.0 - f) + row[i + 1] * f;
    }

    void build();

    const KernelSpec& ker_;
    std::vector<double> qs_;
    double ht_;
    int nt_, ntau_, nq_;
    std::vector<double> Dtab_, Qtab_, Vtab_, Ztab_;
};

inline void KernelTables::build() {
    // radial quadrature grid for the Hankel transforms
    quad::Grid rg;
    for (int p = 0; p < 50; ++p) rg.add_panel(p * 0.02, (p + 1) * 0.02, 12);
    const int nr = int(rg.size());

    Eigen::MatrixXd J(nr, nq_);
    for (int ir = 0; ir < nr; ++ir)
        for (int iq = 0; iq < nq_; ++iq)
            J(ir, iq) = std::cyl_bessel_j(0, qs_[iq] * rg.x[ir]);

    Eigen::MatrixXd MD(nt_, nr), MQ(nt_, nr);
    for (int it = 0; it < nt_; ++it) {
        const double t = it * ht_;
        for (int ir = 0; ir < nr; ++ir) {
            const double r = rg.x[ir];
            if (t <= KernelSpec::t_an || t >= 1.0) {
                MD(it, ir) = 0.0;
                MQ(it, ir) = (t > 0.0 && t < 1.02)
                                 ? 2.0 * M_PI * rg.w[ir] * ker_.rQ_radial(t, r)
                                 : 0.0;
                continue;
            }
            const double corr = KernelSpec::G(t, r) *
                                (ker_.cutoff(std::sqrt(t) + r) - 1.0);
            MD(it, ir) = 2.0 * M_PI * rg.w[ir] * r * corr;
            MQ(it, ir) = 2.0 * M_PI * rg.w[ir] * ker_.rQ_radial(t, r);
        }
    }
    Eigen::MatrixXd Dm = MD * J;  // nt x nq
    Eigen::MatrixXd Qm = MQ * J;
    Dtab_.assign(std::size_t(nq_) * nt_, 0.0);
    Qtab_.assign(std::size_t(nq_) * nt_, 0.0);
    for (int iq = 0; iq < nq_; ++iq)
        for (int it = 0; it < nt_; ++it) {
            const double t = it * ht_;
            double d = Dm(it, iq);
            // beyond t=1 the kernel vanishes; inside (t_an,1) subtract nothing
            // extra (the e-part is already excluded from the correction).
            if (t >= 1.0) d = 0.0;
            Dtab_[std::size_t(iq) * nt_ + it] = d;
            Qtab_[std::size_t(iq) * nt_ + it] = Qm(it, iq);
        }

    // VD(tau,q) = 2 (Ge * D)(tau) + (D * D)(tau) on the tau grid
    Vtab_.assign(std::size_t(nq_) * ntau_, 0.0);
    for (int iq = 0; iq < nq_; ++iq) {
        const double q2 = qs_[iq] * qs_[iq];
        for (int itau = 0; itau < ntau_; ++itau) {
            const double tau = itau * ht_;
            if (tau <= 0.0) continue;
            // (Ge * D)(tau) = int_0^min(tau,1) e^{-q^2 b} D(tau - b) db
            double ged = 0.0;
            {
                quad::Grid bg = quad::graded_exp_grid(std::min(tau, 1.0), qs_[iq]);
                for (std::size_t i = 0; i < bg.size(); ++i)
                    ged += bg.w[i] * std::exp(-q2 * bg.x[i]) * D(iq, tau - bg.x[i]);
            }
            // (D * D)(tau) by Simpson over the overlap
            double dd = 0.0;
            {
                const int n = nt_;
                for (int i = 0; i < n; ++i) {
                    const double a = i * ht_;
                    if (a > tau) break;
                    dd += simpson_w(i, n) * ht_ * D_node(iq, i) * D(iq, tau - a);
                }
            }
            Vtab_[std::size_t(iq) * ntau_ + itau] = 2.0 * ged + dd;
        }
    }

    // Zt(t,q) = (Qh * Khat)(t,q)
    //          = int e^{-q^2 b} Qh(t-b) db + int Qh(a) D(t-a) da
    Ztab_.assign(std::size_t(nq_) * nt_, 0.0);
    for (int iq = 0; iq < nq_; ++iq) {
        const double q2 = qs_[iq] * qs_[iq];
        for (int it = 0; it < nt_; ++it) {
            const double t = it * ht_;
            if (t <= 0.0) continue;
            double ge = 0.0;
            {
                quad::Grid bg = quad::graded_exp_grid(std::min(t, 1.0), qs_[iq]);
                for (std::size_t i = 0; i < bg.size(); ++i)
                    ge += bg.w[i] * std::exp(-q2 * bg.x[i]) * Qh(iq, t - bg.x[i]);
            }
            double qd = 0.0;
            for (int i = 0; i < nt_; ++i) {
                const double a = i * ht_;
                if (a > t) break;
                qd += simpson_w(i, nt_) * ht_ * Qh_node(iq, i) * D(iq, t - a);
            }
            Ztab_[std::size_t(iq) * nt_ + it] = ge + qd;
        }
    }
}

inline double KernelSpec::K_eps(const MollifierSpec& chi, double eps, double t,
                                double x1, double x2, int n1d) const {
    // (K * chi_eps)(t,x) over the compact mollifier support
    const double tlo = chi.t_min() * eps * eps, thi = chi.t_max() * eps * eps;
    const double rr = chi.r0 * eps;
    double acc = 0.0;
    for (int a = 0; a < n1d; ++a)
        for (int b = 0; b < n1d; ++b)
            for (int c = 0; c < n1d; ++c) {
                const double u = (a + 0.5) / n1d, v = (b + 0.5) / n1d, w = (c + 0.5) / n1d;
                const double s = tlo + (thi - tlo) * u;
                const double y1 = -rr + 2.0 * rr * v;
                const double y2 = -rr + 2.0 * rr * w;
                const double jac = (thi - tlo) * (2 * rr) * (2 * rr) / double(n1d * n1d * n1d);
                acc += jac * chi.chi_eps(eps, s, y1, y2) * K(t - s, x1 - y1, x2 - y2);
            }
    return acc;
}

}  // namespace ymflow
