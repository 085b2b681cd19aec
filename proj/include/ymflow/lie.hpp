#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "ymflow/matexp.hpp"

namespace ymflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Coefficient vector in a fixed orthonormal basis of the algebra.
using AlgebraElement = Vec;

struct GroupElement {
    CMat matrix;
    double unitarity_defect() const {
        const int n = int(matrix.rows());
        return (matrix.adjoint() * matrix - CMat::Identity(n, n)).norm();
    }
};

class NotSimpleError : public std::runtime_error {
  public:
    NotSimpleError(std::string msg, Mat ad_cas)
        : std::runtime_error(std::move(msg)), ad_cas(std::move(ad_cas)) {}
    Mat ad_cas;
};

struct CasimirReport {
    double lambda = 0.0;     // scalar with ad_cas ~ lambda * id
    double residual = 0.0;   // max-norm of ad_cas - lambda*id
    bool simple = false;     // whether ad_cas is a scalar matrix
    Mat ad_cas;
};

// Compact Lie algebra in an orthonormal basis: structure constants
// f[a][b][c] with [e_a, e_b] = sum_c f_abc e_c, and anti-Hermitian
// fundamental-representation matrices for each basis vector. The inner
// product is <X,Y> = -2 tr(rho(X) rho(Y)), under which the stock bases
// below are orthonormal.
class LieAlgebra {
  public:
    std::string name;
    int dim = 0;
    std::vector<Mat> f;        // f[a](b,c) = f_abc
    std::vector<CMat> rep;     // rep[a] anti-Hermitian
    bool special = true;       // det=1 constraint for the group

    static const LieAlgebra& su2() {
        static LieAlgebra alg = make_su2();
        return alg;
    }
    static const LieAlgebra& su3() {
        static LieAlgebra alg = make_su3();
        return alg;
    }
    // One-dimensional abelian algebra, admitted for zero-bracket regression
    // baselines only (enable explicitly in configs as "abelian-test").
    static const LieAlgebra& abelian_test() {
        static LieAlgebra alg = make_abelian();
        return alg;
    }
    static const LieAlgebra& by_name(const std::string& n) {
        if (n == "su2") return su2();
        if (n == "su3") return su3();
        if (n == "abelian-test") return abelian_test();
        throw std::invalid_argument("unknown algebra: " + n);
    }

    AlgebraElement zero() const { return Vec::Zero(dim); }

    AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) const {
        if (x.size() != dim || y.size() != dim)
            throw std::invalid_argument("bracket: dimension mismatch");
        Vec out = Vec::Zero(dim);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) {
                const double xy = x(a) * y(b);
                if (xy == 0.0) continue;
                for (int c = 0; c < dim; ++c) out(c) += f[a](b, c) * xy;
            }
        return out;
    }

    double inner(const AlgebraElement& x, const AlgebraElement& y) const {
        return x.dot(y);
    }

    // Matrix of ad_x in the basis: (ad_x)_{cb} = sum_a x_a f_abc.
    Mat ad(const AlgebraElement& x) const {
        Mat m = Mat::Zero(dim, dim);
        for (int a = 0; a < dim; ++a) {
            if (x(a) == 0.0) continue;
            for (int b = 0; b < dim; ++b)
                for (int c = 0; c < dim; ++c) m(c, b) += x(a) * f[a](b, c);
        }
        return m;
    }

    CMat rep_of(const AlgebraElement& x) const {
        CMat m = CMat::Zero(rep[0].rows(), rep[0].cols());
        for (int a = 0; a < dim; ++a) m += x(a) * rep[a];
        return m;
    }

    // Expand an anti-Hermitian matrix back into basis coefficients using
    // the orthonormality <e_a, e_b> = -2 Re tr(rep_a rep_b) = delta_ab.
    AlgebraElement coeffs_of(const CMat& m) const {
        Vec out(dim);
        for (int a = 0; a < dim; ++a)
            out(a) = -2.0 * (rep[a] * m).trace().real();
        return out;
    }

    GroupElement exp_map(const AlgebraElement& x) const {
        return GroupElement{expm(rep_of(x))};
    }

    AlgebraElement log_group(const GroupElement& g, double branch_tol = 1e-10) const {
        return coeffs_of(logm_unitary(g.matrix, branch_tol));
    }

    AlgebraElement Ad(const GroupElement& g, const AlgebraElement& x) const {
        return coeffs_of(g.matrix * rep_of(x) * g.matrix.adjoint());
    }

    // Matrix of Ad_g on the algebra in the orthonormal basis.
    Mat Ad_matrix(const GroupElement& g) const {
        Mat u(dim, dim);
        for (int a = 0; a < dim; ++a) {
            Vec col = Ad(g, basis(a));
            u.col(a) = col;
        }
        return u;
    }

    AlgebraElement basis(int a) const {
        Vec e = Vec::Zero(dim);
        e(a) = 1.0;
        return e;
    }

    // Brute-force quadratic Casimir in the adjoint representation:
    // ad_Cas = sum_a ad_{e_a}^2.
    CasimirReport casimir() const {
        Mat c = Mat::Zero(dim, dim);
        for (int a = 0; a < dim; ++a) {
            Mat ada = ad(basis(a));
            c += ada * ada;
        }
        CasimirReport rep;
        rep.ad_cas = c;
        rep.lambda = c.trace() / double(dim);
        rep.residual = (c - rep.lambda * Mat::Identity(dim, dim))
                           .cwiseAbs()
                           .maxCoeff();
        rep.simple = rep.residual <= 1e-12 && std::abs(rep.lambda) > 1e-12;
        if (!rep.simple && c.cwiseAbs().maxCoeff() <= 1e-14) rep.lambda = 0.0;
        return rep;
    }

    double casimir_lambda() const {
        CasimirReport rep = casimir();
        if (!rep.simple)
            throw NotSimpleError("casimir_lambda: ad_Cas is not a scalar matrix", rep.ad_cas);
        return rep.lambda;
    }

    // max over basis h of ||[ad_h, ad_Cas]||.
    double centrality_defect() const {
        const Mat c = casimir().ad_cas;
        double worst = 0.0;
        for (int a = 0; a < dim; ++a) {
            Mat ada = ad(basis(a));
            worst = std::max(worst, (ada * c - c * ada).cwiseAbs().maxCoeff());
        }
        return worst;
    }

    // Residual of the Jacobi identity on given elements.
    double jacobi_defect(const AlgebraElement& x, const AlgebraElement& y,
                         const AlgebraElement& z) const {
        Vec r = bracket(x, bracket(y, z)) + bracket(y, bracket(z, x)) +
                bracket(z, bracket(x, y));
        return r.norm();
    }

  private:
    static LieAlgebra make_su2() {
        LieAlgebra alg;
        alg.name = "su2";
        alg.dim = 3;
        alg.special = true;
        const std::complex<double> I(0, 1);
        CMat s1(2, 2), s2(2, 2), s3(2, 2);
        s1 << 0, 1, 1, 0;
        s2 << 0, -I, I, 0;
        s3 << 1, 0, 0, -1;
        alg.rep = {-0.5 * I * s1, -0.5 * I * s2, -0.5 * I * s3};
        alg.f.assign(3, Mat::Zero(3, 3));
        // Levi-Civita structure constants
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c) {
                    int eps = (a - b) * (b - c) * (c - a);
                    double v = 0.0;
                    if (eps == 2) v = 1.0;
                    if (eps == -2) v = -1.0;
                    alg.f[a](b, c) = v;
                }
        return alg;
    }

    static LieAlgebra make_su3() {
        LieAlgebra alg;
        alg.name = "su3";
        alg.dim = 8;
        alg.special = true;
        const std::complex<double> I(0, 1);
        std::vector<CMat> lam(8, CMat::Zero(3, 3));
        lam[0] << 0, 1, 0, 1, 0, 0, 0, 0, 0;
        lam[1] << 0, -I, 0, I, 0, 0, 0, 0, 0;
        lam[2] << 1, 0, 0, 0, -1, 0, 0, 0, 0;
        lam[3] << 0, 0, 1, 0, 0, 0, 1, 0, 0;
        lam[4] << 0, 0, -I, 0, 0, 0, I, 0, 0;
        lam[5] << 0, 0, 0, 0, 0, 1, 0, 1, 0;
        lam[6] << 0, 0, 0, 0, 0, -I, 0, I, 0;
        const double s3 = 1.0 / std::sqrt(3.0);
        lam[7] << s3, 0, 0, 0, s3, 0, 0, 0, -2 * s3;
        alg.rep.resize(8);
        for (int a = 0; a < 8; ++a) alg.rep[a] = -0.5 * I * lam[a];
        // Structure constants from the representation itself:
        // f_abc = <[e_a,e_b], e_c> = -2 Re tr([rep_a,rep_b] rep_c).
        alg.f.assign(8, Mat::Zero(8, 8));
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b) {
                CMat com = alg.rep[a] * alg.rep[b] - alg.rep[b] * alg.rep[a];
                for (int c = 0; c < 8; ++c) {
                    double v = -2.0 * (com * alg.rep[c]).trace().real();
                    if (std::abs(v) < 1e-14) v = 0.0;
                    alg.f[a](b, c) = v;
                }
            }
        return alg;
    }

    static LieAlgebra make_abelian() {
        LieAlgebra alg;
        alg.name = "abelian-test";
        alg.dim = 1;
        alg.special = false;
        CMat e(1, 1);
        e(0, 0) = std::complex<double>(0, 1.0 / std::sqrt(2.0));
        alg.rep = {e};
        alg.f.assign(1, Mat::Zero(1, 1));
        return alg;
    }
};

}  // namespace ymflow
