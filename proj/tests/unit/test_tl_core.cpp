#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "tllab/tl_core.hpp"

using namespace tllab;
using tl::Diagram;
using tl::Element;

namespace {

Element random_element(int k, int l, std::mt19937_64& rng, int terms) {
    const auto all = tl::enumerate_nc2(k, l);
    std::vector<Element::Term> t;
    for (int i = 0; i < terms; ++i) {
        const auto& d = all[rng() % all.size()];
        t.push_back({d.key(), {static_cast<double>(rng() % 7) - 3.0, static_cast<double>(rng() % 5) - 2.0}});
    }
    return Element::from_terms(k, l, std::move(t));
}

bool crossing(int a, int b, int c, int d) {
    if (a > b) std::swap(a, b);
    return (a < c && c < b) != (a < d && d < b);
}

int circular(const Diagram& d, int p) { return p < d.top() ? p : d.top() + d.bot() - 1 - (p - d.top()); }

}  // namespace

TEST_CASE("enumeration counts follow Catalan numbers") {
    CHECK(tl::enumerate_nc2(0, 0).size() == 1);
    CHECK(tl::enumerate_nc2(2, 2).size() == 2);
    CHECK(tl::enumerate_nc2(3, 3).size() == 5);
    CHECK(tl::enumerate_nc2(1, 2).empty());
    const std::size_t catalan[] = {1, 1, 2, 5, 14, 42, 132, 429, 1430};
    for (int n = 0; n <= 8; ++n) CHECK(tl::enumerate_nc2(n, n).size() == catalan[n]);
    CHECK(tl::enumerate_nc2(0, 6).size() == 5);
}

TEST_CASE("enumerated diagrams are non-crossing involutions with distinct keys") {
    for (auto [k, l] : {std::pair{3, 3}, {4, 2}, {5, 3}, {6, 6}}) {
        const auto all = tl::enumerate_nc2(k, l);
        std::set<std::uint64_t> keys;
        for (const auto& d : all) {
            keys.insert(d.key());
            CHECK(Diagram::from_key(k, l, d.key()) == d);
            const auto pairs = d.pairs();
            for (auto [a, b] : pairs) CHECK(d.partner(a) == b);
            for (auto [a, b] : pairs)
                for (auto [c, e] : pairs)
                    CHECK_FALSE(crossing(circular(d, a), circular(d, b), circular(d, c), circular(d, e)));
        }
        CHECK(keys.size() == all.size());
    }
    CHECK_THROWS(Diagram::from_pairs(2, 2, {{0, 3}, {1, 2}}));
}

TEST_CASE("elementary compositions") {
    const double delta = 3.0;
    const Element e = tl::cupcap();
    CHECK(tl::max_coeff_distance(tl::compose(e, e, delta), delta * e) == 0.0);
    const Element d(tl::enumerate_nc2(3, 3)[2]);
    CHECK(tl::max_coeff_distance(tl::compose(tl::id(3), d, delta), d) == 0.0);
    CHECK(tl::max_coeff_distance(tl::compose(d, tl::id(3), delta), d) == 0.0);
    // Conjugate equation: (id (x) t*)(t (x) id) = id on one strand.
    const Element zig = tl::compose(tl::tensor(tl::id(1), tl::cap()), tl::tensor(tl::cup(), tl::id(1)), delta);
    CHECK(tl::max_coeff_distance(zig, tl::id(1)) == 0.0);
    // Closing a cup with a cap is one loop.
    CHECK(tl::compose(tl::cap(), tl::cup(), delta).coeff(Diagram::identity(0)) == tl::cplx(delta));
}

TEST_CASE("tensor arities") {
    CHECK(tl::max_coeff_distance(tl::tensor(tl::id(2), tl::id(3)), tl::id(5)) == 0.0);
    const Element tc = tl::tensor(tl::cup(), tl::cap());
    CHECK(tc.top() == 2);
    CHECK(tc.bot() == 2);
    CHECK(tl::max_coeff_distance(tc, tl::cupcap()) == 0.0);
}

TEST_CASE("partial and Markov traces") {
    const ScalarContext ctx = ScalarContext::from_N(3);
    for (int n = 1; n <= 6; ++n) {
        CHECK(tl::max_coeff_distance(tl::partial_trace_right(tl::id(n), 1, ctx), 3.0 * tl::id(n - 1)) == 0.0);
        CHECK(tl::markov_trace(tl::id(n), ctx) == tl::cplx(std::pow(3.0, n)));
    }
    CHECK(tl::max_coeff_distance(tl::partial_trace_right(tl::cupcap(), 1, ctx), tl::id(1)) == 0.0);
    CHECK(tl::max_coeff_distance(tl::partial_trace_left(tl::cupcap(), 1, ctx), tl::id(1)) == 0.0);
    CHECK(tl::markov_trace(tl::cupcap(), ctx) == tl::cplx(3.0));
}

TEST_CASE("compose is associative and matches the pairwise reference") {
    std::mt19937_64 rng(7);
    const double delta = 2.5;
    for (int t = 0; t < 20; ++t) {
        const int k = 2 * (rng() % 3), l = 2 * (rng() % 3), m = 2 * (rng() % 3), n = 2 * (rng() % 3);
        const Element h = random_element(k, l, rng, 4);
        const Element g = random_element(l, m, rng, 4);
        const Element f = random_element(m, n, rng, 4);
        const Element left = tl::compose(tl::compose(f, g, delta), h, delta);
        const Element right = tl::compose(f, tl::compose(g, h, delta), delta);
        CHECK(tl::max_coeff_distance(left, right) <= 1e-12 * std::max(1.0, left.max_abs_coeff()));
        const Element fast = tl::compose(g, h, delta), ref = tl::detail::compose_pairwise(g, h, delta);
        CHECK(tl::max_coeff_distance(fast, ref) <= 1e-12 * std::max(1.0, ref.max_abs_coeff()));
    }
    for (int n = 3; n <= 7; ++n) {
        const Element a = random_element(n, n, rng, 30), b = random_element(n, n, rng, 30);
        const Element fast = tl::compose(a, b, delta), ref = tl::detail::compose_pairwise(a, b, delta);
        CHECK(tl::max_coeff_distance(fast, ref) <= 1e-12 * ref.max_abs_coeff());
    }
}

TEST_CASE("trace is cyclic, partial trace of a tensor, adjoint reverses composition") {
    std::mt19937_64 rng(11);
    const ScalarContext ctx = ScalarContext::from_N(4);
    for (int t = 0; t < 20; ++t) {
        const int n = 1 + rng() % 5;
        const Element f = random_element(n, n, rng, 5), g = random_element(n, n, rng, 5);
        const tl::cplx a = tl::markov_trace(tl::compose(f, g, ctx), ctx);
        const tl::cplx b = tl::markov_trace(tl::compose(g, f, ctx), ctx);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));

        const int r = 1 + rng() % 2;
        const Element closed = tl::partial_trace_right(tl::tensor(f, tl::id(r)), r, ctx);
        CHECK(tl::max_coeff_distance(closed, std::pow(ctx.delta(), r) * f) <= 1e-12 * f.max_abs_coeff() * 16);

        CHECK(tl::max_coeff_distance(tl::adjoint(tl::adjoint(f)), f) == 0.0);
        const Element lhs = tl::adjoint(tl::compose(f, g, ctx));
        const Element rhs = tl::compose(tl::adjoint(g), tl::adjoint(f), ctx);
        CHECK(tl::max_coeff_distance(lhs, rhs) <= 1e-12 * std::max(1.0, lhs.max_abs_coeff()));
    }
}

TEST_CASE("shape errors") {
    CHECK_THROWS(tl::compose(tl::id(2), tl::id(3), 2.0));
    CHECK_THROWS(tl::id(2) + tl::id(3));
    CHECK_THROWS(Diagram::from_pairs(1, 1, {{0, 0}}));
}
