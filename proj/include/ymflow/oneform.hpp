#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ymflow/lattice.hpp"
#include "ymflow/lie.hpp"
#include "ymflow/rng.hpp"
#include "ymflow/torus.hpp"

namespace ymflow {

// Oriented line segment (x, v) on the torus; |v| <= 1/4.
struct Segment {
    Point2 x{0, 0};
    Point2 v{0, 0};

    Segment() = default;
    Segment(Point2 x_, Point2 v_) : x(wrap_point(x_)), v(v_) {
        if (norm2(v) > 0.25 + 1e-12)
            throw std::invalid_argument("Segment: |v| must be <= 1/4");
    }
    double length() const { return norm2(v); }
    Point2 initial() const { return x; }
    Point2 final() const { return wrap_point({x[0] + v[0], x[1] + v[1]}); }
    Segment reversed() const { return Segment(final(), {-v[0], -v[1]}); }
    // Sub-segment between parameters s < t in [0,1].
    Segment sub(double s, double t) const {
        return Segment(wrap_point({x[0] + s * v[0], x[1] + s * v[1]}),
                       {(t - s) * v[0], (t - s) * v[1]});
    }
};

// Endpoint distance d and the "far" predicate.
inline double seg_d(const Segment& l, const Segment& m) {
    return std::max(tdist(l.initial(), m.initial()), tdist(l.final(), m.final()));
}
inline bool seg_far(const Segment& l, const Segment& m) {
    return seg_d(l, m) > 0.25 * std::min(l.length(), m.length());
}

// Semimetric blending endpoint distances with the square root of the area of
// the convex hull of the four endpoints (lifted to the plane of l when the
// segments are not far).
inline double rho(const Segment& l, const Segment& m) {
    if (seg_far(l, m)) return l.length() + m.length();
    // Lift m's endpoints next to l's in the covering plane.
    const Point2 li = l.initial();
    const Point2 di = tsub(m.initial(), li);
    const Point2 df = tsub(m.final(), li);
    const Point2 p0 = {0, 0};
    const Point2 p1 = {l.v[0], l.v[1]};
    const Point2 q0 = di;
    const Point2 q1 = df;
    const double area = convex_hull_area({p0, p1, q1, q0});
    return norm2(di) + std::hypot(p1[0] - q1[0], p1[1] - q1[1]) + std::sqrt(area);
}

// Triangle: three joinable segments forming a 3-gon.
struct Triangle {
    std::array<Segment, 3> edge;

    Triangle() = default;
    explicit Triangle(const std::array<Point2, 3>& vtx) {
        for (int k = 0; k < 3; ++k) {
            const Point2 d = tsub(vtx[(k + 1) % 3], vtx[k]);
            edge[k] = Segment(vtx[k], d);
        }
    }
    // Enclosed area, computed in the plane lifted at vertex 0.
    double area() const {
        const Point2 a = {0, 0};
        const Point2 b = edge[0].v;
        const Point2 c = {edge[0].v[0] + edge[1].v[0], edge[0].v[1] + edge[1].v[1]};
        return triangle_area(a, b, c);
    }
    double diameter() const {
        double d = 0.0;
        for (const auto& e : edge) d = std::max(d, e.length());
        return d;
    }
};

// Additive algebra-valued function on segments: backed by a lattice field
// through line-integral embedding, or by a closed-form 1-form.
class SegmentFunction {
  public:
    using Eval = std::function<Vec(const Segment&)>;

    SegmentFunction() = default;
    SegmentFunction(const LieAlgebra* alg, Eval eval)
        : alg_(alg), eval_(std::move(eval)) {}

    const LieAlgebra& algebra() const { return *alg_; }

    Vec operator()(const Segment& l) const { return eval_(l); }

    Vec boundary(const Triangle& t) const {
        return eval_(t.edge[0]) + eval_(t.edge[1]) + eval_(t.edge[2]);
    }

    SegmentFunction scaled(double c) const {
        auto e = eval_;
        return SegmentFunction(alg_, [e, c](const Segment& l) { return (c * e(l)).eval(); });
    }
    friend SegmentFunction operator-(const SegmentFunction& a, const SegmentFunction& b) {
        auto ea = a.eval_, eb = b.eval_;
        return SegmentFunction(a.alg_,
                               [ea, eb](const Segment& l) { return (ea(l) - eb(l)).eval(); });
    }

  private:
    const LieAlgebra* alg_ = nullptr;
    Eval eval_;
};

namespace detail {
// 8-point Gauss-Legendre nodes/weights on [0,1].
inline const std::array<double, 8>& gl8_nodes() {
    static const std::array<double, 8> x = {
        0.01985507175123188, 0.10166676129318664, 0.2372337950418355,
        0.40828267875217505, 0.5917173212478249,  0.7627662049581645,
        0.8983332387068134,  0.9801449282487681};
    return x;
}
inline const std::array<double, 8>& gl8_weights() {
    static const std::array<double, 8> w = {
        0.05061426814518813, 0.11119051722668724, 0.15685332293894363,
        0.18134189168918097, 0.18134189168918097, 0.15685332293894363,
        0.11119051722668724, 0.05061426814518813};
    return w;
}
}  // namespace detail

// Line-integral embedding of a continuous 1-form given by a pointwise
// evaluator (x -> (A_1(x), A_2(x))): composite 8-point Gauss quadrature of
// sum_i A_i(x+tv) v_i over [0,1], with panels sized to the lattice cell.
inline SegmentFunction embed_pointwise(
    const LieAlgebra& alg,
    std::function<void(const Point2&, Vec&, Vec&)> fn, double cell) {
    auto eval = [&alg, fn, cell](const Segment& l) -> Vec {
        const double len = l.length();
        Vec acc = Vec::Zero(alg.dim);
        if (len == 0.0) return acc;
        const int panels = std::max(1, int(std::ceil(len / cell)));
        Vec a1(alg.dim), a2(alg.dim);
        const auto& xs = detail::gl8_nodes();
        const auto& ws = detail::gl8_weights();
        for (int p = 0; p < panels; ++p) {
            const double t0 = double(p) / panels, t1 = double(p + 1) / panels;
            for (int q = 0; q < 8; ++q) {
                const double t = t0 + (t1 - t0) * xs[q];
                const Point2 pt = wrap_point({l.x[0] + t * l.v[0], l.x[1] + t * l.v[1]});
                fn(pt, a1, a2);
                acc += ws[q] * (t1 - t0) * (a1 * l.v[0] + a2 * l.v[1]);
            }
        }
        return acc;
    };
    return SegmentFunction(&alg, eval);
}

// Line-integral embedding of a lattice field with bilinear interpolation.
inline SegmentFunction embed_lattice(const LatticeGaugeField& f) {
    const LieAlgebra& alg = f.algebra();
    auto shared = std::make_shared<LatticeGaugeField>(f);
    auto fn = [shared](const Point2& x, Vec& a1, Vec& a2) {
        a1 = shared->interp(0, x);
        a2 = shared->interp(1, x);
    };
    return embed_pointwise(alg, fn, f.spacing());
}

struct NormEstimate {
    double value = 0.0;
    int sample_count = 0;
    std::string witness;
};

// Deterministic sampler for norm estimation: dyadic segment lengths with
// random positions/orientations plus axis-aligned families. Fixed seed keeps
// comparisons between different norms meaningful (shared families).
struct NormSampler {
    std::uint64_t seed = 1;
    int k_min = 2;   // lengths 2^-k
    int k_max = 6;
    int per_scale = 60;

    std::vector<Segment> segments() const {
        Rng rng(seed, 101);
        std::vector<Segment> out;
        for (int k = k_min; k <= k_max; ++k) {
            const double len = std::pow(2.0, -k);
            for (int s = 0; s < per_scale; ++s) {
                const Point2 x = {rng.next_double() - 0.5, rng.next_double() - 0.5};
                const double th = 2.0 * M_PI * rng.next_double();
                out.emplace_back(x, Point2{len * std::cos(th), len * std::sin(th)});
            }
            // axis-aligned members
            for (int s = 0; s < per_scale / 4; ++s) {
                const Point2 x = {rng.next_double() - 0.5, rng.next_double() - 0.5};
                out.emplace_back(x, Point2{len, 0.0});
                out.emplace_back(x, Point2{0.0, len});
            }
        }
        return out;
    }

    // Pairs for the rho-norm: near pairs (perturbed copies) and far pairs.
    std::vector<std::pair<Segment, Segment>> pairs() const {
        Rng rng(seed, 102);
        std::vector<std::pair<Segment, Segment>> out;
        for (int k = k_min; k <= k_max; ++k) {
            const double len = std::pow(2.0, -k);
            for (int s = 0; s < per_scale; ++s) {
                const Point2 x = {rng.next_double() - 0.5, rng.next_double() - 0.5};
                const double th = 2.0 * M_PI * rng.next_double();
                Segment l(x, {len * std::cos(th), len * std::sin(th)});
                const double mag = 0.2 * len * rng.next_double();
                const double phi = 2.0 * M_PI * rng.next_double();
                Point2 dx = {mag * std::cos(phi), mag * std::sin(phi)};
                const double dth = 0.3 * (rng.next_double() - 0.5);
                Segment m(wrap_point({x[0] + dx[0], x[1] + dx[1]}),
                          {len * std::cos(th + dth), len * std::sin(th + dth)});
                out.emplace_back(l, m);
            }
            for (int s = 0; s < per_scale / 3; ++s) {
                const Point2 x = {rng.next_double() - 0.5, rng.next_double() - 0.5};
                const Point2 y = {rng.next_double() - 0.5, rng.next_double() - 0.5};
                const double th = 2.0 * M_PI * rng.next_double();
                out.emplace_back(Segment(x, {len * std::cos(th), len * std::sin(th)}),
                                 Segment(y, {len * std::sin(th), len * std::cos(th)}));
            }
        }
        return out;
    }

    // Vees: same initial point, same length, small angle between them.
    std::vector<std::pair<Segment, Segment>> vees() const {
        Rng rng(seed, 103);
        std::vector<std::pair<Segment, Segment>> out;
        for (int k = k_min; k <= k_max; ++k) {
            const double len = std::pow(2.0, -k);
            for (int s = 0; s < per_scale; ++s) {
                const Point2 x = {rng.next_double() - 0.5, rng.next_double() - 0.5};
                const double th = 2.0 * M_PI * rng.next_double();
                const double dth = 0.45 * rng.next_double() + 1e-3;
                Segment l(x, {len * std::cos(th), len * std::sin(th)});
                Segment m(x, {len * std::cos(th + dth), len * std::sin(th + dth)});
                if (!seg_far(l, m)) out.emplace_back(l, m);
            }
        }
        return out;
    }

    std::vector<Triangle> triangles() const {
        Rng rng(seed, 104);
        std::vector<Triangle> out;
        for (int k = k_min; k <= k_max; ++k) {
            const double len = std::pow(2.0, -k);
            for (int s = 0; s < per_scale; ++s) {
                const Point2 x = {rng.next_double() - 0.5, rng.next_double() - 0.5};
                const double th = 2.0 * M_PI * rng.next_double();
                const double u = 0.3 + 0.7 * rng.next_double();
                const double w = 0.3 + 0.7 * rng.next_double();
                const Point2 b = {x[0] + len * std::cos(th), x[1] + len * std::sin(th)};
                const Point2 c = {x[0] + u * len * std::cos(th + 1.0),
                                  x[1] + w * len * std::sin(th + 1.0)};
                Triangle t({x, b, c});
                if (t.area() > 0.0 && t.diameter() <= 0.25) out.push_back(t);
            }
        }
        return out;
    }
};

namespace detail {
inline void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("alpha must lie in (0,1]");
}
inline std::string seg_str(const Segment& l) {
    return "(" + std::to_string(l.x[0]) + "," + std::to_string(l.x[1]) + ";" +
           std::to_string(l.v[0]) + "," + std::to_string(l.v[1]) + ")";
}
}  // namespace detail

// Lower-bound estimate of sup |A(l)-A(m)| / rho(l,m)^alpha over the sampled
// pair family.
inline NormEstimate norm_alpha(const SegmentFunction& a, double alpha,
                               const NormSampler& sampler) {
    detail::check_alpha(alpha);
    NormEstimate est;
    for (const auto& [l, m] : sampler.pairs()) {
        const double r = rho(l, m);
        if (r <= 0.0) continue;
        const double val = (a(l) - a(m)).norm() / std::pow(r, alpha);
        ++est.sample_count;
        if (val > est.value) {
            est.value = val;
            est.witness = detail::seg_str(l) + "|" + detail::seg_str(m);
        }
    }
    return est;
}

inline NormEstimate norm_gr(const SegmentFunction& a, double alpha,
                            const NormSampler& sampler) {
    detail::check_alpha(alpha);
    NormEstimate est;
    for (const auto& l : sampler.segments()) {
        if (l.length() <= 0.0) continue;
        const double val = a(l).norm() / std::pow(l.length(), alpha);
        ++est.sample_count;
        if (val > est.value) {
            est.value = val;
            est.witness = detail::seg_str(l);
        }
    }
    return est;
}

inline NormEstimate norm_vee(const SegmentFunction& a, double alpha,
                             const NormSampler& sampler) {
    detail::check_alpha(alpha);
    NormEstimate est;
    for (const auto& [l, m] : sampler.vees()) {
        const Point2 p1 = l.v;
        const Point2 q1 = m.v;
        const double area = convex_hull_area({{0, 0}, p1, q1});
        if (area <= 0.0) continue;
        const double val = (a(l) - a(m)).norm() / std::pow(area, alpha / 2.0);
        ++est.sample_count;
        if (val > est.value) {
            est.value = val;
            est.witness = detail::seg_str(l) + "|" + detail::seg_str(m);
        }
    }
    return est;
}

inline NormEstimate norm_tri(const SegmentFunction& a, double alpha,
                             const NormSampler& sampler) {
    detail::check_alpha(alpha);
    NormEstimate est;
    for (const auto& t : sampler.triangles()) {
        const double ar = t.area();
        if (ar <= 0.0) continue;
        const double val = a.boundary(t).norm() / std::pow(ar, alpha / 2.0);
        ++est.sample_count;
        if (val > est.value) {
            est.value = val;
            est.witness = detail::seg_str(t.edge[0]);
        }
    }
    return est;
}

// Diagnostic for membership in the closure of smooth forms: the small-scale
// decay sup_{|l| < eps} |A(l)| / |l|^alpha, per scale.
inline std::vector<double> vanishing_rate(const SegmentFunction& a, double alpha,
                                          const std::vector<double>& scales,
                                          std::uint64_t seed = 7,
                                          int samples_per_scale = 200) {
    std::vector<double> out;
    Rng rng(seed, 105);
    for (double eps : scales) {
        double sup = 0.0;
        for (int s = 0; s < samples_per_scale; ++s) {
            const Point2 x = {rng.next_double() - 0.5, rng.next_double() - 0.5};
            const double th = 2.0 * M_PI * rng.next_double();
            const double len = eps * (0.5 + 0.5 * rng.next_double());
            Segment l(x, {len * std::cos(th), len * std::sin(th)});
            sup = std::max(sup, a(l).norm() / std::pow(len, alpha));
        }
        out.push_back(sup);
    }
    return out;
}

}  // namespace ymflow
