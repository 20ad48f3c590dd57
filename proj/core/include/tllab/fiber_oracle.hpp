#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "tllab/qnumerics.hpp"
#include "tllab/tl_core.hpp"

namespace tllab {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

// Largest matrix side the oracle will allocate (3^8).
inline constexpr long kOracleBudget = 6561;

// Matrix of a diagram element on (C^N)^(x)in -> (C^N)^(x)out. Multi-indices are
// flattened with the first leg most significant.
struct DenseOperator {
    int in_strands = 0;
    int out_strands = 0;
    int N = 0;
    CMatrix entries;

    int n_strands() const { return in_strands; }
};

long ipow(long base, int exp);
// Throws BudgetExceeded when N^strands exceeds kOracleBudget.
long checked_side(int N, int strands);

DenseOperator realize(const tl::Element& e, int N);

// Leg-level helpers on square matrices over n legs of dimension N.
CMatrix partial_trace_right(const CMatrix& X, int N, int n, int r);
CMatrix partial_trace_left(const CMatrix& X, int N, int n, int r);
// Traces the middle b legs of an (a + b + c)-leg operator.
CMatrix partial_trace_middle(const CMatrix& X, int N, int a, int b, int c);
// (id_i (x) X (x) id_j) M for X acting on k legs.
CMatrix apply_middle(const CMatrix& X, int N, int i, int k, int j, const CMatrix& M);
CMatrix kron(const CMatrix& A, const CMatrix& B);
cplx hs_inner(const CMatrix& A, const CMatrix& B);  // Tr(A* B)

struct ProjectionCheck {
    double hermitian_residual = 0.0;
    double idempotent_residual = 0.0;
    double trace = 0.0;
    long rank = 0;
    bool by_eigendecomposition = false;
};

// Rank of a numerically orthogonal projection. Small matrices are diagonalized;
// larger ones are checked for hermiticity exactly and for idempotence on random
// probe vectors, and the rank is then the rounded trace.
ProjectionCheck check_projection(const CMatrix& P, std::uint64_t seed = 1);

struct CcircBasis {
    int n = 0;
    int N = 0;
    long expected_dim = 0;
    // HS-orthonormal rho-eigenvectors spanning the kernel of both one-strand partial traces.
    std::vector<CMatrix> vectors;
    std::vector<cplx> rho_eigenvalues;
    // rho_eigenvalues[i] = exp(i pi root_index[i] / n).
    std::vector<int> root_index;
    // Diagnostics of rho on this basis.
    double unitarity_residual = 0.0;
    double period_residual = 0.0;
    double max_snap_distance = 0.0;
    double kernel_gap = 0.0;
};

struct OracleGram {
    int k = 0;
    int n = 0;
    int mu_index = 0;
    Eigen::MatrixXd entries;  // real part of the Gram matrix
    double max_imag = 0.0;
    double hermitian_residual = 0.0;
};

struct PiResult {
    CMatrix restricted;  // Pi_{a,b,c} compressed to H_a (x) H_c
    double best_lambda = 0.0;
    double deviation = 0.0;
    double lambda_limit = 0.0;  // q^{-a-c} / (d_a d_c)
};

struct ProbeRow {
    int k, kp, n, i, j, ip, jp;
    double abs_inner;
};

struct ProbeConfig {
    int k = 1;
    int n = 1;
    int max_sum = 4;  // i + j and i' + j' range over 0..max_sum
    std::uint64_t seed = 1;
};

// Dense ground truth at a fixed integer N. Realized projections and intertwiners
// are cached; the object is safe to share across threads.
class FiberOracle {
public:
    explicit FiberOracle(int N);

    int N() const { return N_; }
    const ScalarContext& ctx() const { return ctx_; }

    const CMatrix& projection(int n);
    // Isometry onto the range of P_n (N^n x d_n).
    const CMatrix& range_basis(int n);

    CMatrix rotation(const CMatrix& X, int k);
    const CcircBasis& ccirc_basis(int n);
    // rho-eigenvector with eigenvalue exp(i pi s / k), scaled so ||X||_2^2 = d_k.
    CMatrix eigenvector(int k, int s, int which = 0);

    CMatrix embed_x(const CMatrix& X, int k, int i, int j);
    // embed_x of eigenvector(k, s), memoized.
    const CMatrix& embedded_eigenvector(int k, int s, int i, int j);
    OracleGram gram_direct(int k, int s, int n);
    OracleGram gram_direct(const CMatrix& X, int k, int n);

    // Frobenius residual of the one-step trace identity at (p, q).
    double check_general_rec(const CMatrix& X, int k, double mu_re, int p, int q);
    double check_general_rec(int k, int s, int p, int q);
    // Least-squares coefficients c_i with Z ~ sum_i c_i X_{i, n-k-i}, via the Gram matrix.
    std::vector<cplx> expand_in_x_basis(const CMatrix& Z, const CMatrix& X, int k, int n);

    PiResult pi_abc(int a, int b, int c);
    const CMatrix& intertwiner(int k, int l, int a);  // V_m^{k,l}
    double kappa(int k, int l, int a);
    CMatrix convolve(const CMatrix& X, int k, const CMatrix& Y, int l, int a);

    std::vector<ProbeRow> orthogonality_probe(const ProbeConfig& cfg);

    // Drops memoized embeddings (projections and bases are kept).
    void clear_embeddings();

private:
    int N_;
    ScalarContext ctx_;
    std::recursive_mutex mu_;
    std::map<int, CMatrix> proj_;
    std::map<int, CMatrix> range_;
    std::map<int, CcircBasis> ccirc_;
    std::map<std::tuple<int, int, int>, CMatrix> inter_;
    std::map<std::tuple<int, int, int>, double> kappa_;
    std::map<std::tuple<int, int, int, int>, CMatrix> embedded_;
};

// Maximum over s of the probe magnitudes with min(i, j, i', j') = s, indexed by s.
std::vector<double> probe_profile(const std::vector<ProbeRow>& rows);

} // namespace tllab
