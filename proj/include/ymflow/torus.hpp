#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace ymflow {

using Point2 = std::array<double, 2>;

// Reduce a coordinate difference to the fundamental domain [-1/2, 1/2).
inline double wrap_diff(double d) {
    d -= std::floor(d + 0.5);
    if (d >= 0.5) d -= 1.0;
    return d;
}

inline Point2 wrap_point(Point2 p) {
    for (double& c : p) {
        c -= std::floor(c + 0.5);
        if (c >= 0.5) c -= 1.0;
    }
    return p;
}

inline Point2 tsub(const Point2& a, const Point2& b) {
    return {wrap_diff(a[0] - b[0]), wrap_diff(a[1] - b[1])};
}

inline double tdist(const Point2& a, const Point2& b) {
    const Point2 d = tsub(a, b);
    return std::hypot(d[0], d[1]);
}

inline double norm2(const Point2& v) { return std::hypot(v[0], v[1]); }

inline double cross2(const Point2& a, const Point2& b) {
    return a[0] * b[1] - a[1] * b[0];
}

// Area of the convex hull of a small planar point set (shoelace on the hull).
inline double convex_hull_area(std::vector<Point2> pts) {
    const size_t n = pts.size();
    if (n < 3) return 0.0;
    std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
        return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    std::vector<Point2> hull(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 &&
               cross2({hull[k - 1][0] - hull[k - 2][0], hull[k - 1][1] - hull[k - 2][1]},
                      {pts[i][0] - hull[k - 2][0], pts[i][1] - hull[k - 2][1]}) <= 0)
            --k;
        hull[k++] = pts[i];
    }
    const size_t lower = k + 1;
    for (size_t i = n - 1; i-- > 0;) {
        while (k >= lower &&
               cross2({hull[k - 1][0] - hull[k - 2][0], hull[k - 1][1] - hull[k - 2][1]},
                      {pts[i][0] - hull[k - 2][0], pts[i][1] - hull[k - 2][1]}) <= 0)
            --k;
        hull[k++] = pts[i];
    }
    double area = 0.0;
    for (size_t i = 0; i + 1 < k; ++i) area += cross2(hull[i], hull[i + 1]);
    return 0.5 * std::abs(area);
}

// Area of a planar triangle from its vertices.
inline double triangle_area(const Point2& a, const Point2& b, const Point2& c) {
    return 0.5 * std::abs(cross2({b[0] - a[0], b[1] - a[1]},
                                 {c[0] - a[0], c[1] - a[1]}));
}

}  // namespace ymflow
