#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <complex>
#include <stdexcept>

namespace ymflow {

using CMat = Eigen::MatrixXcd;

// Matrix exponential by scaling-and-squaring with a fixed [13/13] Pade
// approximant (Higham's coefficients). Accurate to ~1e-14 for the small
// anti-Hermitian matrices used here.
inline CMat expm(const CMat& a) {
    static const double b[] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};
    const int n = int(a.rows());
    const double nrm = a.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
    int squarings = 0;
    double theta13 = 5.371920351148152;
    CMat as = a;
    if (nrm > theta13) {
        squarings = int(std::ceil(std::log2(nrm / theta13)));
        as = a / std::pow(2.0, squarings);
    }
    const CMat id = CMat::Identity(n, n);
    const CMat a2 = as * as;
    const CMat a4 = a2 * a2;
    const CMat a6 = a2 * a4;
    CMat u = as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                   b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    CMat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
             b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
    CMat r = (v - u).partialPivLu().solve(v + u);
    for (int i = 0; i < squarings; ++i) r = r * r;
    return r;
}

// Principal logarithm of a unitary matrix via eigendecomposition (unitary
// matrices are normal, so this is exact and stable). Throws if an eigenvalue
// sits within `branch_tol` of the branch cut at -1.
inline CMat logm_unitary(const CMat& g, double branch_tol = 1e-10) {
    Eigen::ComplexEigenSolver<CMat> es(g);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("logm_unitary: eigendecomposition failed");
    const int n = int(g.rows());
    Eigen::VectorXcd lam = es.eigenvalues();
    CMat v = es.eigenvectors();
    // Re-orthonormalise the eigenbasis (defensively handles clustered
    // eigenvalues where Eigen returns a nearly but not exactly unitary V).
    Eigen::HouseholderQR<CMat> qr(v);
    CMat q = qr.householderQ() * CMat::Identity(n, n);
    // Columns of q span the same invariant subspaces only if eigenvalues are
    // distinct; for repeated eigenvalues any orthonormal basis works. Use
    // q when v is far from unitary, otherwise keep v.
    if ((v.adjoint() * v - CMat::Identity(n, n)).norm() > 1e-8) v = q;
    Eigen::VectorXcd loglam(n);
    for (int i = 0; i < n; ++i) {
        const std::complex<double> l = lam(i);
        if (std::abs(l + 1.0) < branch_tol)
            throw std::runtime_error("logm_unitary: eigenvalue at branch cut (-1)");
        loglam(i) = std::complex<double>(0.0, std::atan2(l.imag(), l.real()));
    }
    return v * loglam.asDiagonal() * v.adjoint();
}

}  // namespace ymflow
