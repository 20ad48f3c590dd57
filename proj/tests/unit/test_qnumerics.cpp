#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "tllab/qnumerics.hpp"

using namespace tllab;

TEST_CASE("q_from_N is the smaller root of q^2 - Nq + 1") {
    CHECK(q_from_N(3) == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-15));
    CHECK(q_from_N(3) == doctest::Approx(0.38196601125).epsilon(1e-10));
    CHECK(q_from_N(7) == doctest::Approx(0.14589803375).epsilon(1e-10));
    for (int N = 3; N <= 20; ++N) {
        const double q = q_from_N(N);
        CHECK(std::abs(q + 1.0 / q - N) <= 1e-14 * N);
    }
    CHECK_THROWS_AS(q_from_N(2), std::domain_error);
}

TEST_CASE("qdim small values and conventions") {
    const ScalarContext c3 = ScalarContext::from_N(3);
    CHECK(qdim(-1, c3) == 0.0);
    CHECK(qdim(-5, c3) == 0.0);
    CHECK(qdim(0, c3) == 1.0);
    CHECK(qdim(1, c3) == 3.0);
    CHECK(qdim(2, c3) == 8.0);
    CHECK(qdim(4, c3) == 55.0);  // N^4 - 3N^2 + 1
    CHECK(qdim(4, ScalarContext::from_N(4)) == 209.0);
}

TEST_CASE("qdim in q-mode agrees with the integer recurrence") {
    for (int N : {3, 4, 7, 12}) {
        const ScalarContext cn = ScalarContext::from_N(N);
        const ScalarContext cq = ScalarContext::from_q(cn.q());
        for (int k = 0; k <= 30; ++k) CHECK(qdim(k, cq) == doctest::Approx(qdim(k, cn)).epsilon(1e-12));
    }
}

TEST_CASE("qdim bounds, fusion identity and the square identity") {
    for (double q : {0.05, 0.2, 0.38, 0.6, 0.9}) {
        const ScalarContext c = ScalarContext::from_q(q);
        for (int k = 0; k <= 40; ++k) {
            const double d = qdim(k, c), lo = std::pow(q, -k);
            CHECK(d >= lo * (1 - 1e-14));
            CHECK(d <= lo / (1 - q * q) * (1 + 1e-14));
        }
        for (int n = 1; n <= 40; ++n) {
            const double lhs = c.delta() * qdim(n - 1, c), rhs = qdim(n, c) + qdim(n - 2, c);
            CHECK(std::abs(lhs - rhs) <= 1e-12 * rhs);
        }
        for (int n = 3; n <= 30; ++n) {
            const double lhs = qdim(n - 2, c) * qdim(n - 2, c);
            const double rhs = qdim(n - 3, c) * qdim(n - 1, c) + 1.0;
            CHECK(std::abs(lhs - rhs) <= 1e-11 * lhs);
        }
    }
}

TEST_CASE("qdim overflow is an error") {
    CHECK_THROWS_AS(qdim(5000, ScalarContext::from_q(0.1)), std::overflow_error);
}

TEST_CASE("qdim_ratio matches the quotient") {
    const ScalarContext c = ScalarContext::from_N(5);
    for (int a = -2; a <= 12; ++a)
        for (int b = 0; b <= 12; ++b)
            CHECK(qdim_ratio(a, b, c) == doctest::Approx(qdim(a, c) / qdim(b, c)).epsilon(1e-13));
}

TEST_CASE("coefficient boundary values") {
    const ScalarContext c = ScalarContext::from_N(3);
    for (int k = 1; k <= 3; ++k)
        for (int s = 0; s < 2 * k; ++s) {
            const RecCoeffParams p = RecCoeffParams::from_root(k, s);
            for (int n = k; n <= 12; ++n) {
                CHECK(coeff_ABCD(n, n - k, p, c).A == doctest::Approx(1.0).epsilon(1e-14));
                CHECK(coeff_ABCD(n, 0, p, c).B == 0.0);
                CHECK(coeff_ABCD(n, 0, p, c).C == 0.0);
                CHECK(coeff_ABCD(n, 1, p, c).C == 0.0);
            }
        }
    // k=1, N=3, n=2, p=1: B = -2 mu_re d_1 d_0 / (d_2 d_1) = -2 mu_re / 8.
    for (int s = 0; s < 2; ++s) {
        const RecCoeffParams p = RecCoeffParams::from_root(1, s);
        CHECK(coeff_ABCD(2, 1, p, c).B == doctest::Approx(-2.0 * p.mu_re / 8.0).epsilon(1e-14));
    }
}

TEST_CASE("coeff_D is 1 - A_j - B_{n-k-j}") {
    const ScalarContext c = ScalarContext::from_N(4);
    const RecCoeffParams p = RecCoeffParams::from_root(2, 1);
    for (int n = 3; n <= 10; ++n)
        for (int j = -1; j <= n; ++j)
            CHECK(coeff_D(n, j, p, c) ==
                  doctest::Approx(1.0 - coeff_ABCD(n, j, p, c).A - coeff_ABCD(n, n - 2 - j, p, c).B));
}

TEST_CASE("alpha_of_q") {
    CHECK(std::abs(alpha_of_q(0.15) - 0.25) <= 0.02);
    for (int i = 1; i < 99; ++i) CHECK(alpha_of_q(i / 100.0) > alpha_of_q((i + 1) / 100.0));
    const double q = 1e-6;
    const double ratio = std::pow(q, alpha_of_q(q)) / std::cbrt(q);
    CHECK(std::abs(ratio / std::exp(2 * std::numbers::ln2 / 9) - 1.0) <= 0.01);
    CHECK_THROWS(alpha_of_q(1.0));
}

TEST_CASE("dimension inequality") {
    const ScalarContext c = ScalarContext::from_N(3);
    for (int n = 3; n <= 50; ++n) CHECK(check_dim_inequality(n, c));
}
