#include "tllab/qnumerics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tllab {

double q_from_N(int N) {
    if (N < 3) throw std::domain_error("q_from_N: N must be at least 3, got " + std::to_string(N));
    const double n = N;
    return 2.0 / (n + std::sqrt(n * n - 4.0));
}

ScalarContext ScalarContext::from_N(int N) { return ScalarContext(q_from_N(N), N); }

ScalarContext ScalarContext::from_q(double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("ScalarContext: q must lie in (0,1)");
    return ScalarContext(q, std::nullopt);
}

double ScalarContext::delta() const {
    if (N_) return static_cast<double>(*N_);
    return q_ + 1.0 / q_;
}

RecCoeffParams RecCoeffParams::from_root(int k, int s) {
    if (k < 1) throw std::domain_error("RecCoeffParams: k must be at least 1");
    return RecCoeffParams{k, std::cos(std::numbers::pi * s / k)};
}

double qdim(int k, const ScalarContext& ctx) {
    if (k < 0) return 0.0;
    const double q = ctx.q();
    if (k == 0) return 1.0;
    if (ctx.N()) {
        // Integer N: d_k = N d_{k-1} - d_{k-2} is an integer, exact while below 2^53.
        const double N = *ctx.N();
        double prev = 1.0, cur = N;
        int i = 1;
        while (i < k && cur * N <= 0x1p53) {
            const double next = cur * N - prev;
            prev = cur;
            cur = next;
            ++i;
        }
        if (i == k) return cur;
    }
    const double head = std::pow(q, -static_cast<double>(k));
    if (!std::isfinite(head)) throw std::overflow_error("qdim: d_" + std::to_string(k) + " overflows");
    const double q2 = q * q;
    return head * (1.0 - std::pow(q2, k + 1)) / (1.0 - q2);
}

double qdim_ratio(int a, int b, const ScalarContext& ctx) {
    if (b < 0) throw std::domain_error("qdim_ratio: denominator d_b vanishes for b < 0");
    if (a < 0) return 0.0;
    const double q = ctx.q();
    const double q2 = q * q;
    return std::pow(q, b - a) * (1.0 - std::pow(q2, a + 1)) / (1.0 - std::pow(q2, b + 1));
}

ABC coeff_ABCD(int n, int p, const RecCoeffParams& params, const ScalarContext& ctx) {
    if (n < 1) throw std::domain_error("coeff_ABCD: n must be at least 1");
    const int k = params.k;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    ABC c{};
    c.A = qdim_ratio(p + k, n, ctx) * qdim_ratio(p + k - 1, n - 1, ctx);
    c.B = 2.0 * sign * params.mu_re * qdim_ratio(p + k - 1, n, ctx) * qdim_ratio(p - 1, n - 1, ctx);
    c.C = -qdim_ratio(p - 1, n, ctx) * qdim_ratio(p - 2, n - 1, ctx);
    return c;
}

double coeff_D(int n, int j, const RecCoeffParams& params, const ScalarContext& ctx) {
    return 1.0 - coeff_ABCD(n, j, params, ctx).A - coeff_ABCD(n, n - params.k - j, params, ctx).B;
}

double alpha_of_q(double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("alpha_of_q: q must lie in (0,1)");
    const double lq = std::log(q);
    const double bracket =
        1.0 - 2.0 * std::numbers::ln2 / (3.0 * lq) - 2.0 / (3.0 * lq) * std::log((1.0 + q * q) / (1.0 - q));
    return 1.0 / (3.0 * bracket);
}

bool check_dim_inequality(int n, const ScalarContext& ctx) {
    if (n < 3) throw std::domain_error("check_dim_inequality: n must be at least 3");
    const double d1 = qdim(1, ctx);
    const double dn1 = qdim(n - 1, ctx);
    const double dn2 = qdim(n - 2, ctx);
    const double dn3 = qdim(n - 3, ctx);
    const double lhs = d1 - 2.0 * dn2 / dn1;
    const double rhs = 2.0 / dn1 + d1 * (d1 + dn3 * dn2) / (dn1 * dn2);
    return lhs > rhs;
}

} // namespace tllab
