#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ymflow/oneform.hpp"

namespace ymflow {

// One-step comparison function used by the orbit pseudo-metric:
// K(A,B) = (| |A| - |B| | + 1) / ((|A| /\ |B|) + 1) * (|A - B| /\ 1),
// expressed in terms of norm values.
inline double orbit_K(double na, double nb, double nab) {
    return (std::abs(na - nb) + 1.0) / (std::min(na, nb) + 1.0) * std::min(nab, 1.0);
}

struct OrbitDistanceReport {
    double upper = 0.0;  // best chain upper bound
    double lower = 0.0;  // norm-gap logarithmic lower bound
    std::string witness;
};

// Bounds for the chaining pseudo-metric between A and B built on the sampled
// alpha-norm. Upper bound: the best of the direct step and chains through
// scalar multiples tA, tB on a fixed grid. Lower bound: log(1 + h/(r+1))
// from the norm gap (r = min norm, h = gap). The true infimum over all
// chains is not computable; only lower <= reported <= chain-upper is
// certified.
inline OrbitDistanceReport orbit_distance_bounds(const SegmentFunction& a,
                                                 const SegmentFunction& b,
                                                 double alpha,
                                                 const NormSampler& sampler,
                                                 int t_grid = 8) {
    auto nrm = [&](const SegmentFunction& f) {
        return norm_alpha(f, alpha, sampler).value;
    };
    const double na = nrm(a);
    const double nb = nrm(b);
    const double nab = nrm(a - b);

    OrbitDistanceReport rep;
    const double r = std::min(na, nb);
    const double h = std::abs(na - nb);
    rep.lower = std::log1p(h / (r + 1.0));

    double best = orbit_K(na, nb, nab);
    rep.witness = "direct";
    // chains A -> tA -> tB -> B through scalar rescalings
    for (int q = 1; q < t_grid; ++q) {
        const double t = double(q) / t_grid;
        const double nta = t * na, ntb = t * nb, ntab = t * nab;
        double chain = orbit_K(na, nta, (1.0 - t) * na) +
                       orbit_K(nta, ntb, ntab) +
                       orbit_K(ntb, nb, (1.0 - t) * nb);
        if (chain < best) {
            best = chain;
            rep.witness = "rescale t=" + std::to_string(t);
        }
    }
    rep.upper = best;
    return rep;
}

}  // namespace ymflow
