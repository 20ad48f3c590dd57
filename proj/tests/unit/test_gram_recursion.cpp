#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "tllab/gram_recursion.hpp"

using namespace tllab;

TEST_CASE("hand-evaluated G_2 for k = 1, N = 3, mu = 1") {
    const double q = q_from_N(3);
    const auto blocks = gram_recursive(1, 1.0, q, 2);
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[0].entries.rows() == 1);
    CHECK(blocks[0].entries(0, 0) == 1.0);
    const Eigen::MatrixXd& g = blocks[1].entries;
    CHECK(g(0, 0) == doctest::Approx(7.0 / 8).epsilon(1e-14));
    CHECK(g(0, 1) == doctest::Approx(-1.0 / 4).epsilon(1e-14));
    CHECK(g(1, 0) == doctest::Approx(-1.0 / 4).epsilon(1e-14));
    CHECK(g(1, 1) == doctest::Approx(7.0 / 8).epsilon(1e-14));
    const GramNorms nm = norms(blocks[1]);
    CHECK(nm.norm == doctest::Approx(9.0 / 8).epsilon(1e-14));
    CHECK(nm.inv_norm == doctest::Approx(8.0 / 5).epsilon(1e-14));
    CHECK(nm.cond == doctest::Approx(9.0 / 5).epsilon(1e-14));
    const GramNorms one = norms(blocks[0]);
    CHECK(one.norm == 1.0);
    CHECK(one.inv_norm == 1.0);
    CHECK(one.cond == 1.0);
}

TEST_CASE("block shape, symmetry and the corner product formula") {
    for (int N : {3, 5, 8}) {
        const ScalarContext c = ScalarContext::from_N(N);
        for (int k = 1; k <= 3; ++k)
            for (int s = 0; s < 2 * k; ++s) {
                const RecCoeffParams params = RecCoeffParams::from_root(k, s);
                const auto blocks = gram_recursive(k, params.mu_re, c.q(), k + 25);
                double product = 1.0, prev = 1.0 + 1e-15;
                double floor = 1.0;
                for (int i = 1; i < 200; ++i) floor *= 1.0 - std::pow(c.q(), 2 * i);
                for (const GramBlock& g : blocks) {
                    const int side = g.n - k + 1;
                    CHECK(g.entries.rows() == side);
                    CHECK((g.entries - g.entries.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
                    const double a0 = g.n > k ? coeff_ABCD(g.n, 0, params, c).A : 0.0;
                    product *= 1.0 - a0;
                    const double g00 = g.entries(0, 0);
                    CHECK(g00 == doctest::Approx(product).epsilon(1e-12));
                    CHECK(g.entries(side - 1, side - 1) == doctest::Approx(product).epsilon(1e-12));
                    CHECK(g00 > 0.0);
                    // Strict decrease until the factor 1 - A rounds to one.
                    if (a0 > 1e-15) CHECK(g00 < prev);
                    CHECK(g00 <= prev);
                    CHECK(g00 >= floor * (1 - 1e-12));
                    prev = g00;
                }
            }
    }
}

TEST_CASE("persymmetry of the recursive blocks") {
    // Not asserted by the recursion itself; measured here at a tolerance that
    // allows for accumulated rounding over 30 steps.
    for (int N : {3, 7}) {
        const double q = q_from_N(N);
        for (int k = 1; k <= 3; ++k)
            for (int s = 0; s < 2 * k; ++s) {
                const auto blocks = gram_recursive(k, RecCoeffParams::from_root(k, s).mu_re, q, k + 30);
                for (const GramBlock& g : blocks) CHECK(persymmetry_residual(g) <= 1e-10);
            }
    }
}

TEST_CASE("norm sits between the diagonal and the triangle bound") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 30; ++t) {
        const int k = 1 + rng() % 3, s = rng() % (2 * k), N = 3 + rng() % 6;
        const auto blocks = gram_recursive(k, RecCoeffParams::from_root(k, s).mu_re, q_from_N(N), k + 12);
        const GramBlock& g = blocks.back();
        const Eigen::MatrixXd diag = g.entries.diagonal().asDiagonal();
        const Eigen::MatrixXd off = g.entries - diag;
        const double bound = diag.diagonal().cwiseAbs().maxCoeff() + off.jacobiSvd().singularValues()(0);
        const GramNorms nm = norms(g);
        CHECK(nm.norm <= bound * (1 + 1e-12));
        CHECK(nm.norm >= diag.diagonal().maxCoeff() * (1 - 1e-12));
        CHECK(nm.cond == doctest::Approx(nm.norm * nm.inv_norm));
    }
}

TEST_CASE("decay profile") {
    const double q5 = q_from_N(5);
    for (int k = 1; k <= 3; ++k) {
        const auto blocks = gram_recursive(k, 1.0, q5, 30);
        const DecayProfile d = decay_profile(blocks.back());
        CHECK(d.bands.front().band == 0);
        CHECK(d.bands.front().max_abs <= 1.0 / std::pow(1 - q5 * q5, 3));
        CHECK(d.log_slope < 0.0);
    }
    const DecayProfile one = decay_profile(gram_recursive(2, 1.0, q5, 2).back());
    CHECK(one.bands.size() == 1);
    CHECK(one.bands[0].band == 0);
}

TEST_CASE("Riesz margin") {
    const double q7 = q_from_N(7);
    for (int k = 1; k <= 4; ++k)
        for (int s = 0; s < 2 * k; ++s) {
            const RieszMargin r = riesz_margin(k, RecCoeffParams::from_root(k, s).mu_re, q7, 40);
            CHECK(r.margin < 1.0);
            CHECK(std::isfinite(r.sup_cond));
            CHECK(r.min_diag > 0.5);
        }
    // Conjugate roots share Re(mu), hence the same blocks.
    const auto a = gram_recursive(3, RecCoeffParams::from_root(3, 1).mu_re, q7, 15);
    const auto b = gram_recursive(3, RecCoeffParams::from_root(3, 5).mu_re, q7, 15);
    CHECK((a.back().entries - b.back().entries).cwiseAbs().maxCoeff() <= 1e-15);

    GramBlock bad = gram_recursive(1, 1.0, q7, 3).back();
    bad.entries(1, 1) = 0.0;
    CHECK_THROWS_AS(diagonal_dominance_margin(bad), std::domain_error);
    CHECK(diagonal_dominance_margin(gram_recursive(1, 1.0, q7, 1).back()) == 0.0);
}

TEST_CASE("N0 sweep") {
    const N0Report rep = estimate_N0(2, 20, 3, 8);
    REQUIRE(rep.rows.size() == 6);
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        CHECK(rep.rows[i].N == 3 + static_cast<int>(i));
        CHECK(std::isfinite(rep.rows[i].sup_cond));
        if (i > 0) CHECK(rep.rows[i].margin <= rep.rows[i - 1].margin);
    }
    CHECK(rep.monotone);
    REQUIRE(rep.smallest_N.has_value());
    CHECK(*rep.smallest_N == 3);
}

TEST_CASE("parameter domain errors") {
    CHECK_THROWS(gram_recursive(0, 1.0, 0.3, 3));
    CHECK_THROWS(gram_recursive(1, 1.5, 0.3, 3));
    CHECK_THROWS(gram_recursive(1, 1.0, 1.0, 3));
    CHECK_THROWS(gram_recursive(2, 1.0, 0.3, 1));
}
