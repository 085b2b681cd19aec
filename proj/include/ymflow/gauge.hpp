#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "ymflow/curve.hpp"
#include "ymflow/lattice.hpp"
#include "ymflow/lie.hpp"
#include "ymflow/oneform.hpp"

namespace ymflow {

// Gauge transformation: a lattice of group elements with an off-site
// evaluation rule. Fields built from a closed-form map evaluate exactly
// off-site; lattice-only fields interpolate (bilinear + polar projection).
class GaugeTransform {
  public:
    GaugeTransform() = default;

    static GaugeTransform from_function(const LieAlgebra& alg, int n,
                                        std::function<CMat(const Point2&)> fn) {
        GaugeTransform g;
        g.alg_ = &alg;
        g.n_ = n;
        g.fn_ = std::move(fn);
        g.sites_.resize(std::size_t(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                g.sites_[std::size_t(i) * n + j] = g.fn_(g.site(i, j));
        return g;
    }

    static GaugeTransform identity(const LieAlgebra& alg, int n) {
        const int nr = int(alg.rep[0].rows());
        return from_function(alg, n, [nr](const Point2&) {
            return CMat(CMat::Identity(nr, nr));
        });
    }

    static GaugeTransform constant(const LieAlgebra& alg, int n, const GroupElement& g0) {
        CMat m = g0.matrix;
        return from_function(alg, n, [m](const Point2&) { return m; });
    }

    static GaugeTransform from_lattice(const LieAlgebra& alg, int n,
                                       std::vector<CMat> sites) {
        GaugeTransform g;
        g.alg_ = &alg;
        g.n_ = n;
        g.sites_ = std::move(sites);
        return g;
    }

    const LieAlgebra& algebra() const { return *alg_; }
    int n() const { return n_; }
    double spacing() const { return 1.0 / n_; }
    Point2 site(int i, int j) const {
        const double a = spacing();
        return {-0.5 + i * a, -0.5 + j * a};
    }

    const CMat& at(int i, int j) const {
        return sites_[std::size_t(((i % n_) + n_) % n_) * n_ + (((j % n_) + n_) % n_)];
    }
    CMat& at(int i, int j) {
        return sites_[std::size_t(((i % n_) + n_) % n_) * n_ + (((j % n_) + n_) % n_)];
    }

    CMat eval(const Point2& x) const {
        if (fn_) return fn_(x);
        // bilinear on matrix entries, projected back to the unitary group
        const double a = spacing();
        double u = (x[0] + 0.5) / a;
        double v = (x[1] + 0.5) / a;
        u -= std::floor(u / n_) * n_;
        v -= std::floor(v / n_) * n_;
        const int i0 = int(std::floor(u)) % n_;
        const int j0 = int(std::floor(v)) % n_;
        const double fu = u - std::floor(u);
        const double fv = v - std::floor(v);
        CMat m = (1 - fu) * (1 - fv) * at(i0, j0) + fu * (1 - fv) * at(i0 + 1, j0) +
                 (1 - fu) * fv * at(i0, j0 + 1) + fu * fv * at(i0 + 1, j0 + 1);
        Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
        return svd.matrixU() * svd.matrixV().adjoint();
    }

    double holder_seminorm(double alpha) const {
        double worst = 0.0;
        const double a = spacing();
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
                worst = std::max(worst, (at(i + 1, j) - at(i, j)).norm() / std::pow(a, alpha));
                worst = std::max(worst, (at(i, j + 1) - at(i, j)).norm() / std::pow(a, alpha));
            }
        return worst;
    }

  private:
    const LieAlgebra* alg_ = nullptr;
    int n_ = 0;
    std::vector<CMat> sites_;
    std::function<CMat(const Point2&)> fn_;
};

// A^g = Ad_g A - (dg) g^{-1}, with the discrete logarithmic derivative
// computed as log(g(x + a e_i) g(x)^{-1}) / a. Throws on matrix-log branch
// failures (refine the grid).
inline LatticeGaugeField apply_gauge(const LatticeGaugeField& f, const GaugeTransform& g) {
    if (f.n() != g.n())
        throw std::invalid_argument("apply_gauge: incompatible grids");
    const LieAlgebra& alg = f.algebra();
    const double a = f.spacing();
    LatticeGaugeField out(&alg, f.n());
    for (int i = 0; i < f.n(); ++i)
        for (int j = 0; j < f.n(); ++j) {
            const CMat& gij = g.at(i, j);
            const CMat ginv = gij.adjoint();
            for (int comp = 0; comp < 2; ++comp) {
                const CMat& gfwd = (comp == 0) ? g.at(i + 1, j) : g.at(i, j + 1);
                const CMat ratio = gfwd * ginv;
                const Vec dlog = alg.coeffs_of(logm_unitary(ratio)) / a;
                const Vec ad = alg.Ad(GroupElement{gij}, f.get(comp, i, j));
                out.set(comp, i, j, ad - dlog);
            }
        }
    return out;
}

// Holonomy along a curve: ordered product of exp(A(sub-segment)) left to
// right, sub-segments no longer than `mesh`.
inline GroupElement holonomy(const SegmentFunction& a, const CurveSpec& g, double mesh) {
    if (!(mesh > 0.0)) throw std::invalid_argument("holonomy: mesh must be positive");
    const LieAlgebra& alg = a.algebra();
    const int nr = int(alg.rep[0].rows());
    CMat y = CMat::Identity(nr, nr);
    // subdivide each partition piece so chords are at most `mesh` long
    for (size_t p = 0; p + 1 < g.partition.size(); ++p) {
        const double s = g.partition[p], t = g.partition[p + 1];
        const double chord = tdist(g.gamma(s), g.gamma(t));
        int m = std::max(1, int(std::ceil(chord / mesh)));
        // also bound parameter step for curved pieces
        if (g.kind == CurveSpec::Kind::Smooth)
            m = std::max(m, int(std::ceil((t - s) / mesh)));
        for (int i = 0; i < m; ++i) {
            const Point2 p0 = g.gamma(s + (t - s) * double(i) / m);
            const Point2 p1 = g.gamma(s + (t - s) * double(i + 1) / m);
            const Point2 d = tsub(p1, p0);
            const Vec val = a(Segment(p0, d));
            y = y * expm(alg.rep_of(val));
        }
    }
    return GroupElement{y};
}

// || hol(A^g, gamma) - g(gamma_0) hol(A, gamma) g(gamma_1)^{-1} ||.
inline double holonomy_covariance_residual(const SegmentFunction& a,
                                           const SegmentFunction& a_gauged,
                                           const GaugeTransform& g,
                                           const CurveSpec& curve, double mesh) {
    const GroupElement hg = holonomy(a_gauged, curve, mesh);
    const GroupElement h = holonomy(a, curve, mesh);
    const CMat g0 = g.eval(curve.gamma(0.0));
    const CMat g1 = g.eval(curve.gamma(1.0));
    return (hg.matrix - g0 * h.matrix * g1.adjoint()).norm();
}

// Normalised real trace of the holonomy around a closed loop.
inline double wilson_loop(const SegmentFunction& a, const CurveSpec& loop, double mesh) {
    if (!loop.closed(1e-9))
        throw std::invalid_argument("wilson_loop: curve is not closed");
    const GroupElement h = holonomy(a, loop, mesh);
    const double n = double(h.matrix.rows());
    return h.matrix.trace().real() / n;
}

class NotGaugeEquivalent : public std::runtime_error {
  public:
    NotGaugeEquivalent(std::string msg, double residual)
        : std::runtime_error(std::move(msg)), residual(residual) {}
    double residual;
};

struct RecoveredGauge {
    GaugeTransform g;
    double path_independence_residual = 0.0;
};

// Recover the gauge transformation between A and Abar = A^g from holonomies
// along axis-parallel staircase paths out of the base site (i0,j0):
// g(y) = hol(Abar, p)^{-1} g0 hol(A, p). Path independence is measured by
// comparing row-first and column-first staircases at every site.
inline RecoveredGauge recover_gauge(const SegmentFunction& a, const SegmentFunction& abar,
                                    int n, int i0, int j0, const GroupElement& g0,
                                    double mesh, double tol = 1e-2) {
    const LieAlgebra& alg = a.algebra();
    const double h = 1.0 / n;
    const int nr = int(alg.rep[0].rows());

    auto axis_hol = [&](const SegmentFunction& f, Point2 from, int axis, int steps) {
        CMat y = CMat::Identity(nr, nr);
        Point2 p = from;
        const double dir = steps >= 0 ? 1.0 : -1.0;
        for (int s = 0; s < std::abs(steps); ++s) {
            Point2 v = {0, 0};
            v[axis] = dir * h;
            // holonomy over one lattice link, refined to `mesh`
            const int m = std::max(1, int(std::ceil(h / mesh)));
            for (int q = 0; q < m; ++q) {
                const Point2 x = wrap_point({p[0] + v[0] * q / m, p[1] + v[1] * q / m});
                y = y * expm(alg.rep_of(f(Segment(x, {v[0] / m, v[1] / m}))));
            }
            p = wrap_point({p[0] + v[0], p[1] + v[1]});
        }
        return y;
    };

    const Point2 base = {-0.5 + i0 * h, -0.5 + j0 * h};
    std::vector<CMat> sites(std::size_t(n) * n);
    double resid = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int di = i - i0, dj = j - j0;
            // row-first staircase
            CMat ha = axis_hol(a, base, 0, di);
            Point2 mid = wrap_point({base[0] + di * h, base[1]});
            ha = ha * axis_hol(a, mid, 1, dj);
            CMat hb = axis_hol(abar, base, 0, di);
            hb = hb * axis_hol(abar, mid, 1, dj);
            const CMat g_row = hb.adjoint() * g0.matrix * ha;
            // column-first staircase
            CMat ha2 = axis_hol(a, base, 1, dj);
            Point2 mid2 = wrap_point({base[0], base[1] + dj * h});
            ha2 = ha2 * axis_hol(a, mid2, 0, di);
            CMat hb2 = axis_hol(abar, base, 1, dj);
            hb2 = hb2 * axis_hol(abar, mid2, 0, di);
            const CMat g_col = hb2.adjoint() * g0.matrix * ha2;
            resid = std::max(resid, (g_row - g_col).norm());
            sites[std::size_t(i) * n + j] = g_row;
        }
    if (resid > tol)
        throw NotGaugeEquivalent("recover_gauge: path-independence residual above tolerance", resid);
    return {GaugeTransform::from_lattice(alg, n, std::move(sites)), resid};
}

}  // namespace ymflow
