#pragma once

#include <optional>

namespace tllab {

// Deformation parameter with the tolerances used by the identity checks.
// q lies in (0,1); when built from N we have q + 1/q = N.
class ScalarContext {
public:
    static ScalarContext from_N(int N);
    static ScalarContext from_q(double q);

    double q() const { return q_; }
    std::optional<int> N() const { return N_; }
    // Loop value of the diagram calculus, q + 1/q.
    double delta() const;

    double tol_identity = 1e-10;
    double tol_oracle = 1e-8;

private:
    ScalarContext(double q, std::optional<int> N) : q_(q), N_(N) {}
    double q_;
    std::optional<int> N_;
};

// k is the weight of the generating vector x in B(H_k); mu_re = Re(mu) for the
// rotation eigenvalue mu, a 2k-th root of unity.
struct RecCoeffParams {
    int k = 1;
    double mu_re = 1.0;

    // mu = exp(i*pi*s/k).
    static RecCoeffParams from_root(int k, int s);
};

struct ABC {
    double A;
    double B;
    double C;
};

double q_from_N(int N);

// Quantum dimension d_k = [k+1]_q; zero for k < 0. Throws std::overflow_error
// when the value leaves the double range.
double qdim(int k, const ScalarContext& ctx);

// d_a / d_b without forming either factor; zero when a < 0.
double qdim_ratio(int a, int b, const ScalarContext& ctx);

ABC coeff_ABCD(int n, int p, const RecCoeffParams& params, const ScalarContext& ctx);
double coeff_D(int n, int j, const RecCoeffParams& params, const ScalarContext& ctx);

double alpha_of_q(double q);

bool check_dim_inequality(int n, const ScalarContext& ctx);

} // namespace tllab
