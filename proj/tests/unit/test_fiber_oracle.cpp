#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tllab/errors.hpp"
#include "tllab/fiber_oracle.hpp"
#include "tllab/gram_recursion.hpp"
#include "tllab/jones_wenzl.hpp"

using namespace tllab;

namespace {

FiberOracle& oracle3() {
    static FiberOracle o(3);
    return o;
}

CMatrix random_ccirc(FiberOracle& o, int n, std::mt19937_64& rng) {
    const CcircBasis& b = o.ccirc_basis(n);
    std::normal_distribution<double> g;
    CMatrix X = CMatrix::Zero(b.vectors[0].rows(), b.vectors[0].cols());
    for (const CMatrix& v : b.vectors) X += cplx(g(rng), g(rng)) * v;
    return X;
}

}  // namespace

TEST_CASE("realize elementary diagrams") {
    CHECK((realize(tl::id(3), 3).entries - CMatrix::Identity(27, 27)).norm() == 0.0);
    const DenseOperator e = realize(tl::cupcap(), 3);
    CHECK(e.entries.trace() == cplx(3.0));
    CHECK((e.entries * e.entries - 3.0 * e.entries).norm() == 0.0);
    const DenseOperator t = realize(tl::cup(), 4);
    CHECK(t.entries.rows() == 16);
    CHECK(t.entries.cols() == 1);
    CHECK(t.entries.squaredNorm() == doctest::Approx(4.0));
    CHECK_THROWS_AS(realize(tl::id(9), 3), BudgetExceeded);
    CHECK_NOTHROW(checked_side(3, 8));
}

TEST_CASE("realize is a functor") {
    const ScalarContext c = ScalarContext::from_N(3);
    const auto ds = tl::enumerate_nc2(3, 3);
    for (const auto& a : ds)
        for (const auto& b : ds) {
            const tl::Element ea(a), eb(b);
            const CMatrix lhs = realize(tl::compose(ea, eb, c), 3).entries;
            const CMatrix rhs = realize(ea, 3).entries * realize(eb, 3).entries;
            CHECK((lhs - rhs).norm() <= 1e-12);
        }
}

TEST_CASE("projections have rank d_n") {
    FiberOracle& o = oracle3();
    const ProjectionCheck pc = check_projection(o.projection(3));
    CHECK(pc.rank == 21);
    CHECK(pc.hermitian_residual <= 1e-12);
    CHECK(pc.idempotent_residual <= 1e-10);
    CHECK(o.range_basis(3).cols() == 21);
    CHECK(check_projection(o.projection(5)).rank == static_cast<long>(std::lround(qdim(5, o.ctx()))));
}

TEST_CASE("ccirc dimensions and basis invariants") {
    FiberOracle& o = oracle3();
    CHECK(o.ccirc_basis(1).vectors.size() == 8);
    const CcircBasis& b = o.ccirc_basis(2);
    CHECK(b.vectors.size() == 47);
    CHECK(b.expected_dim == 47);
    CHECK(b.kernel_gap >= 1e-6);
    CHECK(b.unitarity_residual <= 1e-8);
    CHECK(b.period_residual <= 1e-8);
    const CMatrix& P = o.projection(2);
    for (std::size_t i = 0; i < b.vectors.size(); ++i) {
        const CMatrix& X = b.vectors[i];
        CHECK((P * X * P - X).norm() <= 1e-9);
        CHECK(partial_trace_right(X, 3, 2, 1).norm() <= 1e-9);
        CHECK(partial_trace_left(X, 3, 2, 1).norm() <= 1e-9);
        CHECK(std::abs(std::pow(b.rho_eigenvalues[i], 4) - 1.0) <= 1e-8);
        CHECK(std::abs(b.rho_eigenvalues[i] - std::polar(1.0, std::numbers::pi * b.root_index[i] / 2)) <= 1e-8);
    }
    FiberOracle o4(4);
    CHECK(o4.ccirc_basis(2).vectors.size() == 194);
}

TEST_CASE("rotation preserves the Hilbert-Schmidt form and has period 2n") {
    FiberOracle& o = oracle3();
    std::mt19937_64 rng(3);
    for (int t = 0; t < 5; ++t) {
        const CMatrix X = random_ccirc(o, 2, rng), Y = random_ccirc(o, 2, rng);
        const cplx before = hs_inner(X, Y), after = hs_inner(o.rotation(X, 2), o.rotation(Y, 2));
        CHECK(std::abs(before - after) <= 1e-9 * std::abs(before) + 1e-9);
        CMatrix Z = X;
        for (int r = 0; r < 4; ++r) Z = o.rotation(Z, 2);
        CHECK((Z - X).norm() <= 1e-8 * X.norm());
    }
    // A traceless diagonal on one strand: rho squares to the identity.
    CMatrix D = CMatrix::Zero(3, 3);
    D(0, 0) = 1.0;
    D(1, 1) = -1.0;
    CHECK((o.rotation(o.rotation(D, 1), 1) - D).norm() <= 1e-12);
    CHECK_THROWS_AS(o.rotation(CMatrix::Identity(9, 9), 2), std::invalid_argument);
}

TEST_CASE("rotated eigenvectors pair with exponent s - r") {
    // Tr[rho^r(X)^* rho^t(X)] for rho X = mu X. With k = 2 and mu = i the two
    // candidate exponents t - r and t - k give different values at (r, t) = (1, 2).
    FiberOracle& o = oracle3();
    const int k = 2, s = 1;
    const cplx mu = std::polar(1.0, std::numbers::pi * s / k);
    const CMatrix X = o.eigenvector(k, s);
    const double nx = X.squaredNorm();
    std::vector<CMatrix> rot{X};
    for (int r = 1; r <= 3; ++r) rot.push_back(o.rotation(rot.back(), k));
    for (int r = 0; r <= 3; ++r)
        for (int t = 0; t <= 3; ++t) {
            const cplx inner = hs_inner(rot[r], rot[t]);
            CHECK(std::abs(inner - std::pow(mu, t - r) * nx) <= 1e-8 * nx);
        }
    CHECK(std::abs(hs_inner(rot[1], rot[2]) - std::pow(mu, 2 - k) * nx) > 0.5 * nx);
}

TEST_CASE("adjoint eigenvectors keep mu and the Gram blocks") {
    FiberOracle& o = oracle3();
    for (int k = 1; k <= 2; ++k)
        for (int s = 0; s < 2 * k; ++s) {
            const CMatrix X = o.eigenvector(k, s), Xs = X.adjoint();
            const cplx mu = std::polar(1.0, std::numbers::pi * s / k);
            CHECK((o.rotation(Xs, k) - mu * Xs).norm() <= 1e-10 * Xs.norm());
            for (int n = k + 1; n <= k + 3; ++n) {
                const Eigen::MatrixXd g = o.gram_direct(X, k, n).entries, gs = o.gram_direct(Xs, k, n).entries;
                CHECK((g - gs).cwiseAbs().maxCoeff() <= 1e-12);
                CHECK((g - g.reverse()).cwiseAbs().maxCoeff() <= 1e-12);
            }
        }
}

TEST_CASE("embeddings") {
    FiberOracle& o = oracle3();
    const CMatrix X = o.eigenvector(1, 0);
    CHECK(X.squaredNorm() == doctest::Approx(3.0));
    CHECK((o.embed_x(X, 1, 0, 0) - X).norm() <= 1e-12);
    for (int i = 0; i <= 2; ++i)
        for (int j = 0; i + j <= 3; ++j) {
            const double lhs = o.embed_x(X, 1, i, j).norm();
            CHECK(lhs <= std::sqrt(qdim(i, o.ctx()) * qdim(j, o.ctx())) * X.norm() * (1 + 1e-12));
        }
    const ProjectionCheck pc = check_projection(o.projection(3));
    Eigen::FullPivLU<CMatrix> lu(o.embed_x(X, 1, 1, 1));
    CHECK(lu.rank() <= pc.rank);
}

TEST_CASE("direct Gram blocks") {
    FiberOracle& o = oracle3();
    for (int s = 0; s < 2; ++s) {
        const OracleGram g = o.gram_direct(1, s, 1);
        CHECK(g.entries.rows() == 1);
        CHECK(g.entries(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
        for (int n = 2; n <= 4; ++n) {
            const OracleGram gn = o.gram_direct(1, s, n);
            CHECK(gn.hermitian_residual <= 1e-10);
            CHECK(gn.max_imag <= 1e-8);
            const GramBlock rec = gram_recursive(1, RecCoeffParams::from_root(1, s).mu_re, o.ctx().q(), n).back();
            CHECK((gn.entries - rec.entries).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
    CHECK_THROWS_AS(o.gram_direct(2, 0, 1), std::out_of_range);
    CHECK_THROWS_AS(o.eigenvector(1, 1, 99), std::out_of_range);
}

TEST_CASE("one-step trace identity") {
    FiberOracle& o = oracle3();
    for (int s = 0; s < 2; ++s) {
        CHECK(o.check_general_rec(1, s, 0, 0) <= 1e-10);
        for (auto [p, q] : {std::pair{1, 0}, {0, 1}, {1, 1}, {2, 1}}) CHECK(o.check_general_rec(1, s, p, q) <= 1e-9);
    }
    CHECK(o.check_general_rec(2, 0, 1, 1) <= 1e-9);
    const CMatrix X = o.eigenvector(2, 2);
    CHECK(o.check_general_rec(X, 2, -1.0, 1, 1) <= 1e-9);
}

TEST_CASE("left multiplication by chi_1 follows the structure constants") {
    // chi_1 w_{a,b} splits into the fusion channels of H_1 (x) H_n. Channel n+1 is
    // w_{a+1,b}; channel n-1 is kappa^2 (id_1 *_1 X_{a,b}), which must expand as
    // (1 - A^n_b) w_{a-1,b} + B^n_b w_{a,b-1} + C^n_b w_{a+1,b-2}.
    FiberOracle& o = oracle3();
    const ScalarContext& c = o.ctx();
    const CMatrix id1 = CMatrix::Identity(3, 3);
    for (int s = 0; s < 2; ++s) {
        const CMatrix X = o.eigenvector(1, s);
        const RecCoeffParams params = RecCoeffParams::from_root(1, s);
        for (auto [a, b] : {std::pair{1, 0}, {0, 1}, {1, 1}, {0, 2}, {2, 1}, {1, 2}}) {
            const int n = a + 1 + b;
            const double kap = o.kappa(1, n, 1);
            CHECK(kap * kap == doctest::Approx(qdim(n - 1, c) / qdim(n, c)).epsilon(1e-10));
            const CMatrix Xab = o.embed_x(X, 1, a, b);
            CHECK((o.convolve(id1, 1, Xab, n, 0) - o.embed_x(X, 1, a + 1, b)).norm() <= 1e-9);

            const CMatrix Z = kap * kap * o.convolve(id1, 1, Xab, n, 1);
            const auto coef = o.expand_in_x_basis(Z, X, 1, n - 1);
            const ABC abc = coeff_ABCD(n, b, params, c);
            std::vector<double> expected(coef.size(), 0.0);
            if (a > 0) expected[a - 1] += 1.0 - abc.A;
            if (b > 0) expected[a] += abc.B;
            if (b > 1) expected[a + 1] += abc.C;
            for (std::size_t i = 0; i < coef.size(); ++i) CHECK(std::abs(coef[i] - expected[i]) <= 1e-7);
        }
    }
}

TEST_CASE("Pi near-scalarity") {
    FiberOracle& o = oracle3();
    CHECK(o.pi_abc(2, 2, 0).deviation <= 1e-12);
    CHECK(o.pi_abc(0, 3, 2).deviation <= 1e-12);
    double prev = 1.0;
    const double q = o.ctx().q();
    for (int b = 1; b <= 4; ++b) {
        const PiResult r = o.pi_abc(1, b, 1);
        CHECK(r.deviation < prev);
        if (b > 1) CHECK(r.deviation / prev <= 1.2 * q);
        CHECK(std::abs(r.best_lambda - r.lambda_limit) <= 0.2 * r.lambda_limit);
        prev = r.deviation;
    }
}

TEST_CASE("kappa constants and convolution") {
    FiberOracle& o = oracle3();
    CHECK(o.kappa(2, 1, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(o.kappa(1, 1, 1) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    for (int k = 1; k <= 3; ++k)
        for (int l = 1; k + l <= 6 && l <= 3; ++l)
            for (int a = 0; a <= std::min(k, l); ++a)
                CHECK(std::sqrt(qdim(a, o.ctx())) * o.kappa(k, l, a) >= 1.0 - 1e-10);
    CHECK_THROWS_AS(o.kappa(1, 1, 2), std::out_of_range);

    std::mt19937_64 rng(5);
    const CMatrix X = random_ccirc(o, 1, rng), Y = random_ccirc(o, 2, rng);
    // a = 0 is the inclusion of H_3 into H_1 (x) H_2.
    const CMatrix c0 = o.convolve(X, 1, Y, 2, 0);
    const CMatrix& P3 = o.projection(3);
    CHECK((c0 - P3 * kron(X, Y) * P3).norm() <= 1e-10 * c0.norm());
    for (int a = 0; a <= 1; ++a) {
        const CMatrix c = o.convolve(X, 1, Y, 2, a);
        const double kap = o.kappa(1, 2, a);
        const double op = c.jacobiSvd().singularValues()(0);
        const double bound = X.jacobiSvd().singularValues()(0) * Y.jacobiSvd().singularValues()(0) / (kap * kap);
        CHECK(op <= bound * (1 + 1e-10));
    }
}

TEST_CASE("orthogonality probe decays away from the corner") {
    FiberOracle& o = oracle3();
    const auto rows = o.orthogonality_probe({1, 1, 3, 1});
    CHECK_FALSE(rows.empty());
    const auto prof = probe_profile(rows);
    REQUIRE(prof.size() >= 2);
    for (std::size_t s = 1; s < prof.size(); ++s) CHECK(prof[s] <= prof[s - 1]);
}
