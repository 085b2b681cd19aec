#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ymflow/oneform.hpp"
#include "ymflow/torus.hpp"

namespace ymflow {

// Piecewise-C^{1,beta} or piecewise-affine curve on the torus, given by a
// parametrisation and a base partition. Pieces must have diameter <= 1/4.
struct CurveSpec {
    enum class Kind { PiecewiseAffine, Smooth };

    std::function<Point2(double)> gamma;
    Kind kind = Kind::Smooth;
    std::vector<double> partition;  // breakpoints, starts 0, ends 1

    static CurveSpec from_function(std::function<Point2(double)> g, int base_pieces) {
        CurveSpec c;
        c.gamma = std::move(g);
        c.kind = Kind::Smooth;
        c.partition.resize(base_pieces + 1);
        for (int i = 0; i <= base_pieces; ++i)
            c.partition[i] = double(i) / base_pieces;
        return c;
    }

    static CurveSpec polyline(const std::vector<Point2>& vertices) {
        if (vertices.size() < 2)
            throw std::invalid_argument("polyline: need at least two vertices");
        CurveSpec c;
        const int m = int(vertices.size()) - 1;
        c.kind = Kind::PiecewiseAffine;
        c.partition.resize(m + 1);
        for (int i = 0; i <= m; ++i) c.partition[i] = double(i) / m;
        auto verts = vertices;
        c.gamma = [verts, m](double t) -> Point2 {
            t = std::min(std::max(t, 0.0), 1.0);
            const double s = t * m;
            int i = std::min(int(std::floor(s)), m - 1);
            const double u = s - i;
            const Point2 d = tsub(verts[i + 1], verts[i]);
            return wrap_point({verts[i][0] + u * d[0], verts[i][1] + u * d[1]});
        };
        return c;
    }

    bool closed(double tol = 1e-12) const {
        return tdist(gamma(0.0), gamma(1.0)) <= tol;
    }
};

namespace detail {

// Lift gamma(u), gamma(t) to the plane of gamma(s) by minimal wraps.
inline void lift3(const Point2& gs, const Point2& gu, const Point2& gt,
                  Point2& a, Point2& b, Point2& c) {
    a = {0, 0};
    const Point2 du = tsub(gu, gs);
    const Point2 dt = tsub(gt, gs);
    b = du;
    c = dt;
}

// Signed area of the triangle (a,b,c).
inline double signed_area(const Point2& a, const Point2& b, const Point2& c) {
    return 0.5 * cross2({b[0] - a[0], b[1] - a[1]}, {c[0] - a[0], c[1] - a[1]});
}

// Convex polygon clipping (Sutherland-Hodgman) of triangle p by triangle q,
// both given counterclockwise; returns the intersection area.
inline double tri_intersection_area(std::vector<Point2> p, const std::vector<Point2>& q) {
    for (size_t k = 0; k < q.size(); ++k) {
        const Point2 e0 = q[k];
        const Point2 e1 = q[(k + 1) % q.size()];
        std::vector<Point2> out;
        const size_t n = p.size();
        for (size_t i = 0; i < n; ++i) {
            const Point2& cur = p[i];
            const Point2& nxt = p[(i + 1) % n];
            const double dc = cross2({e1[0] - e0[0], e1[1] - e0[1]},
                                     {cur[0] - e0[0], cur[1] - e0[1]});
            const double dn = cross2({e1[0] - e0[0], e1[1] - e0[1]},
                                     {nxt[0] - e0[0], nxt[1] - e0[1]});
            if (dc >= 0) out.push_back(cur);
            if ((dc >= 0) != (dn >= 0)) {
                const double t = dc / (dc - dn);
                out.push_back({cur[0] + t * (nxt[0] - cur[0]),
                               cur[1] + t * (nxt[1] - cur[1])});
            }
        }
        p = std::move(out);
        if (p.empty()) return 0.0;
    }
    double area = 0.0;
    for (size_t i = 0; i < p.size(); ++i)
        area += cross2(p[i], p[(i + 1) % p.size()]);
    return 0.5 * std::abs(area);
}

}  // namespace detail

// Distance |P1; P2| between the triangles of two triangle processes at a
// common (s,u,t): symmetric-difference area when equally oriented, sum of
// areas otherwise. Points are lifted to a common plane at gamma(s).
inline double triangle_process_dist(const CurveSpec& g1, const CurveSpec& g2,
                                    double s, double u, double t) {
    Point2 a1, b1, c1, a2, b2, c2;
    detail::lift3(g1.gamma(s), g1.gamma(u), g1.gamma(t), a1, b1, c1);
    detail::lift3(g2.gamma(s), g2.gamma(u), g2.gamma(t), a2, b2, c2);
    // Lift the second triangle relative to the first base point.
    const Point2 off = tsub(g2.gamma(s), g1.gamma(s));
    a2 = off;
    b2 = {off[0] + b2[0], off[1] + b2[1]};
    c2 = {off[0] + c2[0], off[1] + c2[1]};
    const double s1 = detail::signed_area(a1, b1, c1);
    const double s2 = detail::signed_area(a2, b2, c2);
    const double ar1 = std::abs(s1), ar2 = std::abs(s2);
    if (ar1 == 0.0 || ar2 == 0.0) return ar1 + ar2;
    if ((s1 > 0) != (s2 > 0)) return ar1 + ar2;
    std::vector<Point2> p = {a1, b1, c1};
    std::vector<Point2> q = {a2, b2, c2};
    if (s1 < 0) std::swap(p[1], p[2]);
    if (s2 < 0) std::swap(q[1], q[2]);
    const double inter = detail::tri_intersection_area(p, q);
    return ar1 + ar2 - 2.0 * inter;
}

// sup_u |P_sut ; Pbar_sut|^{1/2} over sampled u in [s,t].
inline double curve_pair_window(const CurveSpec& g1, const CurveSpec& g2,
                                double s, double t, int u_samples = 17) {
    double sup = 0.0;
    for (int i = 1; i < u_samples; ++i) {
        const double u = s + (t - s) * double(i) / u_samples;
        sup = std::max(sup, triangle_process_dist(g1, g2, s, u, t));
    }
    return std::sqrt(sup);
}

// Estimate of |gamma; gammabar|_{alpha; [s,t]}: max over dyadic partition
// levels of the partition sum of windowed suprema.
inline double curve_control(const CurveSpec& g1, const CurveSpec& g2,
                            double alpha, double s = 0.0, double t = 1.0,
                            int max_level = 4, int u_samples = 17) {
    double best = 0.0;
    for (int lev = 0; lev <= max_level; ++lev) {
        const int m = 1 << lev;
        double sum = 0.0;
        for (int i = 0; i < m; ++i) {
            const double a = s + (t - s) * double(i) / m;
            const double b = s + (t - s) * double(i + 1) / m;
            sum += std::pow(curve_pair_window(g1, g2, a, b, u_samples), alpha);
        }
        best = std::max(best, sum);
    }
    return best;
}

inline double curve_control_self(const CurveSpec& g, double alpha,
                                 double s = 0.0, double t = 1.0,
                                 int max_level = 4, int u_samples = 17) {
    CurveSpec constant;
    const Point2 p0 = g.gamma(s);
    constant.gamma = [p0](double) { return p0; };
    constant.kind = CurveSpec::Kind::Smooth;
    constant.partition = {0.0, 1.0};
    return curve_control(g, constant, alpha, s, t, max_level, u_samples);
}

// Evaluate A on the chord from p to q, splitting long chords by additivity.
inline Vec eval_chord(const SegmentFunction& a, const Point2& p, const Point2& q) {
    const Point2 d = tsub(q, p);
    const double len = norm2(d);
    const int pieces = std::max(1, int(std::ceil(len / 0.24)));
    Vec acc = Vec::Zero(a.algebra().dim);
    for (int i = 0; i < pieces; ++i) {
        const Point2 x = wrap_point({p[0] + d[0] * i / pieces, p[1] + d[1] * i / pieces});
        acc += a(Segment(x, {d[0] / pieces, d[1] / pieces}));
    }
    return acc;
}

// A evaluated on the piecewise-affine interpolation of gamma along a
// partition given as parameter values.
inline Vec eval_on_partition(const SegmentFunction& a, const CurveSpec& g,
                             const std::vector<double>& ts) {
    Vec acc = Vec::Zero(a.algebra().dim);
    for (size_t i = 0; i + 1 < ts.size(); ++i)
        acc += eval_chord(a, g.gamma(ts[i]), g.gamma(ts[i + 1]));
    return acc;
}

class RefinementDiverged : public std::runtime_error {
  public:
    RefinementDiverged(std::string msg, std::vector<double> bounds)
        : std::runtime_error(std::move(msg)), bounds(std::move(bounds)) {}
    std::vector<double> bounds;
};

struct CurveExtension {
    Vec value;
    double error_bound = 0.0;
    int levels = 0;
};

// Limit of A(gamma^D) under dyadic refinement, stopped when the sewing-type
// remainder bound drops below the tolerance. `a_tri` is a (sampled) triangle
// seminorm estimate of A used in the bound.
inline CurveExtension extend_to_curve(const SegmentFunction& a, const CurveSpec& g,
                                      double alpha, double alpha_bar, double a_tri,
                                      double tol = 1e-6, int max_levels = 10) {
    if (!(0.0 < alpha && alpha < alpha_bar && alpha_bar <= 1.0))
        throw std::invalid_argument("extend_to_curve: need 0 < alpha < alpha_bar <= 1");
    const double theta = alpha_bar / alpha;
    const double zeta = std::riemann_zeta(theta);
    const double pref = std::pow(2.0, theta) * zeta * a_tri;

    std::vector<double> bounds;
    Vec value;
    int grow_count = 0;
    for (int lev = 0; lev <= max_levels; ++lev) {
        // refine the base partition 2^lev times
        std::vector<double> ts;
        for (size_t i = 0; i + 1 < g.partition.size(); ++i) {
            const double s = g.partition[i], t = g.partition[i + 1];
            const int m = 1 << lev;
            for (int j = 0; j < m; ++j) ts.push_back(s + (t - s) * double(j) / m);
        }
        ts.push_back(1.0);
        value = eval_on_partition(a, g, ts);
        double ctrl_sum = 0.0;
        for (size_t i = 0; i + 1 < ts.size(); ++i)
            ctrl_sum += std::pow(curve_control_self(g, alpha, ts[i], ts[i + 1], 3, 9), theta);
        const double bound = pref * ctrl_sum;
        bounds.push_back(bound);
        if (bound < tol) return {value, bound, lev};
        if (bounds.size() >= 2 && bound > bounds[bounds.size() - 2] * 1.01) {
            if (++grow_count >= 2)
                throw RefinementDiverged("extend_to_curve: partition control not summable", bounds);
        }
    }
    return {value, bounds.back(), max_levels};
}

}  // namespace ymflow
