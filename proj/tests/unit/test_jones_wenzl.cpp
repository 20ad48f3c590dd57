#include <stdexcept>

#include "doctest.h"
#include "tllab/jones_wenzl.hpp"

using namespace tllab;

TEST_CASE("small Jones-Wenzl projections") {
    const ScalarContext c = ScalarContext::from_N(3);
    CHECK(tl::max_coeff_distance(jw(1, c), tl::id(1)) == 0.0);
    const tl::Element p2 = tl::id(2) - tl::cplx(1.0 / 3.0) * tl::cupcap();
    CHECK(tl::max_coeff_distance(jw(2, c), p2) <= 1e-15);
    CHECK(jw(0, c).size() == 1);
    CHECK(jw(4, c).size() == 14);
}

TEST_CASE("P_n is an idempotent self-adjoint projection killed by caps") {
    for (int N : {3, 4, 5, 7}) {
        const ScalarContext c = ScalarContext::from_N(N);
        for (int n = 1; n <= 7; ++n) {
            const tl::Element& p = jw(n, c);
            CHECK(tl::max_coeff_distance(tl::compose(p, p, c), p) <= 1e-12);
            CHECK(tl::max_coeff_distance(tl::adjoint(p), p) <= 1e-14);
            if (n >= 2) CHECK(jw_annihilation_check(n, c) <= 1e-12);
            const double tr = std::abs(tl::markov_trace(p, c));
            CHECK(std::abs(tr - qdim(n, c)) <= 1e-11 * qdim(n, c));
        }
    }
}

TEST_CASE("one-sided and bilateral recursions agree") {
    for (int N : {3, 4}) {
        const ScalarContext c = ScalarContext::from_N(N);
        for (int n = 3; n <= 7; ++n) CHECK(tl::max_coeff_distance(jw_bilateral(n, c), jw(n, c)) <= 1e-12);
    }
    const ScalarContext cq = ScalarContext::from_q(0.3);
    CHECK(tl::max_coeff_distance(jw_bilateral(3, cq), jw(3, cq)) <= 1e-12);
    CHECK_THROWS_AS(jw_bilateral(2, cq), std::out_of_range);
    CHECK_THROWS_AS(jw_annihilation_check(1, cq), std::out_of_range);
}

TEST_CASE("partial traces of P_n") {
    const ScalarContext c = ScalarContext::from_N(3);
    CHECK(jw_partial_trace_check(2, c) <= 1e-13);
    for (int n = 2; n <= 7; ++n)
        for (int b = 1; b <= n; ++b) CHECK(jw_partial_trace_check(n, c, b) <= 1e-11);
}

TEST_CASE("cache returns stable references") {
    JWCache cache(ScalarContext::from_N(5));
    const tl::Element& a = cache.get(5);
    const tl::Element& b = cache.get(6);
    CHECK(&cache.get(5) == &a);
    CHECK(b.top() == 6);
    CHECK_THROWS(cache.get(kMaxJW + 1));
    CHECK_THROWS(cache.get(-1));
}
