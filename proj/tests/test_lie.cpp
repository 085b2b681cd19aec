#include <catch2/catch_amalgamated.hpp>

#include "ymflow/lattice.hpp"
#include "ymflow/lie.hpp"
#include "ymflow/rng.hpp"

using namespace ymflow;

namespace {
Vec random_elem(const LieAlgebra& alg, Rng& rng, double amp = 1.0) {
    Vec v(alg.dim);
    for (int i = 0; i < alg.dim; ++i) v(i) = amp * rng.next_normal();
    return v;
}
}  // namespace

TEST_CASE("su2 structure constants are Levi-Civita", "[lie]") {
    const LieAlgebra& su2 = LieAlgebra::su2();
    // oracle: brackets of the representation matrices re-expanded in the basis
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            CMat com = su2.rep[a] * su2.rep[b] - su2.rep[b] * su2.rep[a];
            Vec expect = su2.coeffs_of(com);
            Vec got = su2.bracket(su2.basis(a), su2.basis(b));
            REQUIRE((expect - got).cwiseAbs().maxCoeff() < 1e-13);
        }
    // e1 x e2 = e3, e1 x e3 = -e2
    Vec b12 = su2.bracket(su2.basis(0), su2.basis(1));
    REQUIRE(b12(2) == Catch::Approx(1.0).margin(1e-14));
    Vec b13 = su2.bracket(su2.basis(0), su2.basis(2));
    REQUIRE(b13(1) == Catch::Approx(-1.0).margin(1e-14));
    // antisymmetry: [X,X] = 0
    Rng rng(5);
    Vec x = random_elem(su2, rng);
    REQUIRE(su2.bracket(x, x).norm() < 1e-14);
}

TEST_CASE("basis orthonormality under the declared inner product", "[lie]") {
    for (const LieAlgebra* alg :
         {&LieAlgebra::su2(), &LieAlgebra::su3(), &LieAlgebra::abelian_test()}) {
        for (int a = 0; a < alg->dim; ++a)
            for (int b = 0; b < alg->dim; ++b) {
                const double ip = -2.0 * (alg->rep[a] * alg->rep[b]).trace().real();
                REQUIRE(ip == Catch::Approx(a == b ? 1.0 : 0.0).margin(1e-12));
            }
    }
}

TEST_CASE("Jacobi identity on random triples", "[lie]") {
    Rng rng(7);
    for (const LieAlgebra* alg : {&LieAlgebra::su2(), &LieAlgebra::su3()}) {
        for (int trial = 0; trial < 50; ++trial) {
            Vec x = random_elem(*alg, rng), y = random_elem(*alg, rng),
                z = random_elem(*alg, rng);
            const double scale = x.norm() * y.norm() * z.norm();
            REQUIRE(alg->jacobi_defect(x, y, z) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("representation matrices reproduce the structure constants", "[lie]") {
    for (const LieAlgebra* alg : {&LieAlgebra::su2(), &LieAlgebra::su3()}) {
        for (int a = 0; a < alg->dim; ++a)
            for (int b = 0; b < alg->dim; ++b) {
                CMat com = alg->rep[a] * alg->rep[b] - alg->rep[b] * alg->rep[a];
                CMat expect = CMat::Zero(com.rows(), com.cols());
                for (int c = 0; c < alg->dim; ++c) expect += alg->f[a](b, c) * alg->rep[c];
                REQUIRE((com - expect).norm() < 1e-12);
            }
    }
}

TEST_CASE("quadratic Casimir scalar", "[lie]") {
    SECTION("su2 gives -2 with scalar residual below 1e-12") {
        CasimirReport rep = LieAlgebra::su2().casimir();
        REQUIRE(rep.simple);
        REQUIRE(rep.lambda == Catch::Approx(-2.0).margin(1e-12));
        REQUIRE(rep.residual <= 1e-12);
        REQUIRE(LieAlgebra::su2().casimir_lambda() < 0.0);
    }
    SECTION("su3 gives a negative scalar") {
        CasimirReport rep = LieAlgebra::su3().casimir();
        REQUIRE(rep.simple);
        REQUIRE(rep.lambda < 0.0);
        REQUIRE(rep.residual <= 1e-12);
        // brute-force oracle: apply sum_a ad_{e_a}^2 to each basis vector
        const LieAlgebra& alg = LieAlgebra::su3();
        for (int b = 0; b < alg.dim; ++b) {
            Vec v = Vec::Zero(alg.dim);
            for (int a = 0; a < alg.dim; ++a)
                v += alg.bracket(alg.basis(a), alg.bracket(alg.basis(a), alg.basis(b)));
            REQUIRE((v - rep.lambda * alg.basis(b)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SECTION("abelian test algebra reports the not-simple path with zero matrix") {
        CasimirReport rep = LieAlgebra::abelian_test().casimir();
        REQUIRE_FALSE(rep.simple);
        REQUIRE(rep.lambda == 0.0);
        REQUIRE(rep.ad_cas.cwiseAbs().maxCoeff() < 1e-14);
        REQUIRE_THROWS_AS(LieAlgebra::abelian_test().casimir_lambda(), NotSimpleError);
        try {
            LieAlgebra::abelian_test().casimir_lambda();
        } catch (const NotSimpleError& e) {
            REQUIRE(e.ad_cas.rows() == 1);
        }
    }
}

TEST_CASE("Casimir centrality", "[lie]") {
    REQUIRE(LieAlgebra::su2().centrality_defect() < 1e-14);
    REQUIRE(LieAlgebra::su3().centrality_defect() <= 1e-12);
    REQUIRE(LieAlgebra::abelian_test().centrality_defect() == 0.0);
}

TEST_CASE("exponential map and adjoint action", "[lie]") {
    const LieAlgebra& su2 = LieAlgebra::su2();
    SECTION("exp(0) is the identity") {
        GroupElement g = su2.exp_map(su2.zero());
        REQUIRE((g.matrix - CMat::Identity(2, 2)).norm() < 1e-15);
    }
    SECTION("Pade exponential matches the eigendecomposition oracle") {
        Rng rng(11);
        for (int trial = 0; trial < 20; ++trial) {
            Vec x = random_elem(su2, rng, 2.0);
            CMat m = su2.rep_of(x);
            Eigen::ComplexEigenSolver<CMat> es(m);
            CMat oracle = es.eigenvectors() *
                          es.eigenvalues().array().exp().matrix().asDiagonal() *
                          es.eigenvectors().inverse();
            REQUIRE((expm(m) - oracle).norm() < 1e-12);
        }
    }
    SECTION("exp lands in the group") {
        Rng rng(13);
        for (const LieAlgebra* alg : {&LieAlgebra::su2(), &LieAlgebra::su3()}) {
            Vec x = random_elem(*alg, rng);
            GroupElement g = alg->exp_map(x);
            REQUIRE(g.unitarity_defect() < 1e-12);
            if (alg->special)
                REQUIRE(std::abs(g.matrix.determinant() - 1.0) < 1e-12);
        }
    }
    SECTION("Ad(1, X) = X and Ad_g fixes log g") {
        Rng rng(17);
        Vec x = random_elem(su2, rng);
        GroupElement id{CMat::Identity(2, 2)};
        REQUIRE((su2.Ad(id, x) - x).norm() < 1e-14);
        GroupElement g = su2.exp_map(su2.basis(0));
        REQUIRE((su2.Ad(g, su2.basis(0)) - su2.basis(0)).norm() < 1e-12);
    }
    SECTION("Ad is an isometry") {
        Rng rng(19);
        for (const LieAlgebra* alg : {&LieAlgebra::su2(), &LieAlgebra::su3()}) {
            for (int trial = 0; trial < 20; ++trial) {
                GroupElement g = alg->exp_map(random_elem(*alg, rng));
                Vec x = random_elem(*alg, rng), y = random_elem(*alg, rng);
                const double lhs = alg->inner(alg->Ad(g, x), alg->Ad(g, y));
                REQUIRE(lhs == Catch::Approx(alg->inner(x, y)).margin(1e-10));
            }
        }
    }
    SECTION("log inverts exp near the identity") {
        Rng rng(23);
        Vec x = 0.4 * random_elem(su2, rng);
        GroupElement g = su2.exp_map(x);
        REQUIRE((su2.log_group(g) - x).norm() < 1e-11);
    }
}

TEST_CASE("white noise sampling", "[lie][noise]") {
    const LieAlgebra& su2 = LieAlgebra::su2();
    const int n = 8;
    const double dt = 0.01;
    SECTION("deterministic replay under a fixed seed") {
        LatticeGaugeField a = sample_white_noise(su2, n, dt, 42);
        LatticeGaugeField b = sample_white_noise(su2, n, dt, 42);
        REQUIRE(a.raw() == b.raw());
        LatticeGaugeField c = sample_white_noise(su2, n, dt, 43);
        REQUIRE(a.raw() != c.raw());
    }
    SECTION("site variance matches 1/(a^2 dt) within 3 standard errors") {
        const double expect = double(n * n) / dt;
        double sum2 = 0.0;
        long long count = 0;
        for (int rep = 0; rep < 120; ++rep) {
            LatticeGaugeField xi = sample_white_noise(su2, n, dt, 1000, rep);
            for (double v : xi.raw()) { sum2 += v * v; ++count; }
        }
        const double mean2 = sum2 / double(count);
        // Var(v^2) = 2 sigma^4 for a Gaussian
        const double se = expect * std::sqrt(2.0 / double(count));
        REQUIRE(std::abs(mean2 - expect) < 3.0 * se);
    }
    SECTION("distinct basis components uncorrelated within 3 s.e.") {
        double cross = 0.0;
        long long count = 0;
        const double var = double(n * n) / dt;
        for (int rep = 0; rep < 200; ++rep) {
            LatticeGaugeField xi = sample_white_noise(su2, n, dt, 2000, rep);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    cross += xi.at(0, i, j, 0) * xi.at(0, i, j, 1);
                    ++count;
                }
        }
        const double se = var / std::sqrt(double(count));
        REQUIRE(std::abs(cross / double(count)) < 3.0 * se);
    }
    SECTION("precondition failures") {
        REQUIRE_THROWS_AS(sample_white_noise(su2, 8, -1.0, 1), std::invalid_argument);
        REQUIRE_THROWS_AS(sample_white_noise(su2, 1, 0.1, 1), std::invalid_argument);
    }
}
