#include "tllab/fiber_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "tllab/errors.hpp"
#include "tllab/jones_wenzl.hpp"

namespace tllab {

namespace {

constexpr double kKernelThreshold = 1e-8;
constexpr double kMinGap = 1e-6;
constexpr double kSnapTolerance = 1e-6;
constexpr long kEigenRankLimit = 1024;

using StridedMap = Eigen::Map<CMatrix, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;
using ConstStridedMap = Eigen::Map<const CMatrix, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;

double uniform_pm1(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

CMatrix random_matrix(long rows, long cols, std::mt19937_64& rng) {
    CMatrix M(rows, cols);
    for (long j = 0; j < cols; ++j)
        for (long i = 0; i < rows; ++i) M(i, j) = cplx(uniform_pm1(rng), uniform_pm1(rng));
    return M;
}

struct Kernel {
    CMatrix basis;  // orthonormal columns
    double gap;
};

Kernel kernel_from_svd(const Eigen::VectorXd& sv, const CMatrix& V, const std::string& what) {
    long rank = 0;
    while (rank < sv.size() && sv(rank) > kKernelThreshold) ++rank;
    const double kept = rank > 0 ? sv(rank - 1) : std::numeric_limits<double>::infinity();
    const double discarded = rank < sv.size() ? sv(rank) : 0.0;
    const double gap = kept - discarded;
    if (!(gap >= kMinGap))
        throw RankAmbiguity(what + ": singular value gap " + std::to_string(gap) + " below " + std::to_string(kMinGap));
    return {V.rightCols(V.cols() - rank), gap};
}

// Orthonormal basis of ker(L) with the spectral gap guard. Divide and conquer
// first; Eigen's BDCSVD occasionally returns NaNs, in which case Jacobi is used.
Kernel numerical_kernel(const CMatrix& L, const std::string& what) {
    Eigen::BDCSVD<CMatrix> fast(L, Eigen::ComputeFullV);
    if (fast.singularValues().allFinite() && fast.matrixV().allFinite())
        return kernel_from_svd(fast.singularValues(), fast.matrixV(), what);
    Eigen::JacobiSVD<CMatrix> slow(L, Eigen::ComputeFullV);
    return kernel_from_svd(slow.singularValues(), slow.matrixV(), what);
}

// Eigenspace of a normal matrix R for the eigenvalue lam, from the Hermitian
// matrix (R - lam)^* (R - lam). Eigenvalues of R closer to lam than
// `separation` / sqrt(2) count as lam.
Kernel normal_eigenspace(const CMatrix& R, cplx lam, double separation, const std::string& what) {
    const CMatrix S = R - lam * CMatrix::Identity(R.rows(), R.cols());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(S.adjoint() * S);
    if (es.info() != Eigen::Success) throw RankAmbiguity(what + ": eigensolver failed");
    const auto& ev = es.eigenvalues();  // ascending
    const double cut = 0.5 * separation * separation;
    long dim = 0;
    while (dim < ev.size() && ev(dim) < cut) ++dim;
    const double below = dim > 0 ? std::sqrt(std::max(ev(dim - 1), 0.0)) : 0.0;
    const double above = dim < ev.size() ? std::sqrt(ev(dim)) : std::numeric_limits<double>::infinity();
    const double gap = above - below;
    if (!(gap >= kMinGap))
        throw RankAmbiguity(what + ": eigenvalue gap " + std::to_string(gap) + " below " + std::to_string(kMinGap));
    return {es.eigenvectors().leftCols(dim), gap};
}

} // namespace

long ipow(long base, int exp) {
    long r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

long checked_side(int N, int strands) {
    long side = 1;
    for (int i = 0; i < strands; ++i) {
        side *= N;
        if (side > kOracleBudget)
            throw BudgetExceeded("oracle budget: " + std::to_string(N) + "^" + std::to_string(strands) + " exceeds " +
                                 std::to_string(kOracleBudget));
    }
    return side;
}

DenseOperator realize(const tl::Element& e, int N) {
    if (N < 2) throw std::domain_error("realize: N must be at least 2");
    const int k = e.top(), l = e.bot();
    const long cols = checked_side(N, k), rows = checked_side(N, l);
    DenseOperator op{k, l, N, CMatrix::Zero(rows, cols)};
    std::vector<long> row_w, col_w;
    for (std::size_t t = 0; t < e.size(); ++t) {
        const tl::Diagram d = e.diagram(t);
        const cplx c = e.terms()[t].second;
        // Each block contributes its common index to the row (bottom points)
        // and column (top points) offsets.
        row_w.clear();
        col_w.clear();
        for (auto [a, b] : d.pairs()) {
            long rw = 0, cw = 0;
            for (int p : {a, b}) {
                if (p < k) cw += ipow(N, k - 1 - p);
                else rw += ipow(N, l - 1 - (p - k));
            }
            row_w.push_back(rw);
            col_w.push_back(cw);
        }
        const std::size_t blocks = row_w.size();
        std::vector<int> val(blocks, 0);
        long r = 0, cidx = 0;
        for (;;) {
            op.entries(r, cidx) += c;
            std::size_t b = 0;
            while (b < blocks) {
                if (++val[b] < N) {
                    r += row_w[b];
                    cidx += col_w[b];
                    break;
                }
                r -= row_w[b] * (N - 1);
                cidx -= col_w[b] * (N - 1);
                val[b] = 0;
                ++b;
            }
            if (b == blocks) break;
        }
    }
    return op;
}

CMatrix partial_trace_right(const CMatrix& X, int N, int n, int r) {
    if (r < 0 || r > n) throw std::out_of_range("partial_trace_right: r out of range");
    const long inner = ipow(N, r), outer = ipow(N, n - r);
    CMatrix Y = CMatrix::Zero(outer, outer);
    for (long b = 0; b < outer; ++b)
        for (long a = 0; a < outer; ++a) {
            cplx s = 0.0;
            for (long c = 0; c < inner; ++c) s += X(a * inner + c, b * inner + c);
            Y(a, b) = s;
        }
    return Y;
}

CMatrix partial_trace_left(const CMatrix& X, int N, int n, int r) {
    if (r < 0 || r > n) throw std::out_of_range("partial_trace_left: r out of range");
    const long inner = ipow(N, r), outer = ipow(N, n - r);
    CMatrix Y = CMatrix::Zero(outer, outer);
    for (long c = 0; c < inner; ++c) Y += X.block(c * outer, c * outer, outer, outer);
    return Y;
}

CMatrix partial_trace_middle(const CMatrix& X, int N, int a, int b, int c) {
    const long A = ipow(N, a), B = ipow(N, b), C = ipow(N, c);
    CMatrix Y = CMatrix::Zero(A * C, A * C);
    for (long x2 = 0; x2 < A; ++x2)
        for (long z2 = 0; z2 < C; ++z2)
            for (long x1 = 0; x1 < A; ++x1)
                for (long z1 = 0; z1 < C; ++z1) {
                    cplx s = 0.0;
                    for (long y = 0; y < B; ++y) s += X((x1 * B + y) * C + z1, (x2 * B + y) * C + z2);
                    Y(x1 * C + z1, x2 * C + z2) = s;
                }
    return Y;
}

CMatrix apply_middle(const CMatrix& X, int N, int i, int k, int j, const CMatrix& M) {
    const long I = ipow(N, i), K = ipow(N, k), J = ipow(N, j);
    if (X.rows() != K || X.cols() != K || M.rows() != I * K * J)
        throw ArityMismatch("apply_middle: shapes do not match the leg counts");
    CMatrix out(M.rows(), M.cols());
    const long R = M.rows();
    for (long a = 0; a < I; ++a)
        for (long c = 0; c < J; ++c) {
            const long off = a * K * J + c;
            ConstStridedMap in(M.data() + off, K, M.cols(), Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(R, J));
            StridedMap dst(out.data() + off, K, M.cols(), Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(R, J));
            dst.noalias() = X * in;
        }
    return out;
}

CMatrix kron(const CMatrix& A, const CMatrix& B) {
    CMatrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (long j = 0; j < A.cols(); ++j)
        for (long i = 0; i < A.rows(); ++i) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

cplx hs_inner(const CMatrix& A, const CMatrix& B) { return (A.conjugate().cwiseProduct(B)).sum(); }

ProjectionCheck check_projection(const CMatrix& P, std::uint64_t seed) {
    ProjectionCheck out;
    out.hermitian_residual = (P - P.adjoint()).cwiseAbs().maxCoeff();
    out.trace = P.diagonal().real().sum();
    if (P.rows() <= kEigenRankLimit) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(P, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        double worst = 0.0;
        for (long i = 0; i < ev.size(); ++i) {
            worst = std::max(worst, std::min(std::abs(ev(i)), std::abs(ev(i) - 1.0)));
            if (ev(i) > 0.5) ++out.rank;
        }
        out.idempotent_residual = worst;
        out.by_eigendecomposition = true;
        return out;
    }
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int probe = 0; probe < 4; ++probe) {
        const CMatrix v = random_matrix(P.rows(), 1, rng);
        const CMatrix w = P * v;
        const CMatrix z = P * w;
        worst = std::max(worst, (z - w).norm() / v.norm());
    }
    out.idempotent_residual = worst;
    out.rank = std::lround(out.trace);
    return out;
}

// ---------------------------------------------------------------------------

FiberOracle::FiberOracle(int N) : N_(N), ctx_(ScalarContext::from_N(N)) {}

const CMatrix& FiberOracle::projection(int n) {
    std::lock_guard lock(mu_);
    if (auto it = proj_.find(n); it != proj_.end()) return it->second;
    checked_side(N_, n);
    return proj_.emplace(n, realize(jw(n, ctx_), N_).entries).first->second;
}

const CMatrix& FiberOracle::range_basis(int n) {
    std::lock_guard lock(mu_);
    if (auto it = range_.find(n); it != range_.end()) return it->second;
    const CMatrix& P = projection(n);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(P);
    const long d = std::lround(qdim(n, ctx_));
    const auto& ev = es.eigenvalues();
    const long side = P.rows();
    // Eigenvalues are ascending; the last d belong to the range.
    if (d > side || (d < side && ev(side - d) - ev(side - d - 1) < 0.5))
        throw RankAmbiguity("range_basis: P_" + std::to_string(n) + " spectrum is not a clean projection");
    return range_.emplace(n, es.eigenvectors().rightCols(d)).first->second;
}

CMatrix FiberOracle::rotation(const CMatrix& X, int k) {
    const CMatrix& P = projection(k);
    if ((P * X * P - X).norm() > ctx_.tol_oracle * std::max(1.0, X.norm()))
        throw std::invalid_argument("rotation: X is not supported in B(H_k)");
    const long side = ipow(N_, k), tail = ipow(N_, k - 1);
    // rho(X)[(a1..ak),(b1..bk)] = X[(a2..ak, bk), (a1, b1..b(k-1))] before compressing by P_k.
    CMatrix Y(side, side);
    for (long b = 0; b < side; ++b) {
        const long b_head = b / N_, b_last = b % N_;
        for (long a = 0; a < side; ++a) {
            const long a1 = a / tail, a_rest = a % tail;
            Y(a, b) = X(a_rest * N_ + b_last, a1 * tail + b_head);
        }
    }
    return P * Y * P;
}

const CcircBasis& FiberOracle::ccirc_basis(int n) {
    std::lock_guard lock(mu_);
    if (auto it = ccirc_.find(n); it != ccirc_.end()) return it->second;
    if (n < 1) throw std::out_of_range("ccirc_basis: n must be at least 1");

    CcircBasis out;
    out.n = n;
    out.N = N_;
    out.expected_dim = n == 1 ? std::lround(qdim(2, ctx_))
                              : std::lround(qdim(2 * n, ctx_)) - std::lround(qdim(2 * n - 2, ctx_));

    // Parametrize X = V Y V* with V an isometry onto H_n and impose both traces.
    const CMatrix& V = range_basis(n);
    const long d = V.cols();
    const long half = ipow(N_, n - 1);
    CMatrix L(2 * half * half, d * d);
    for (long b = 0; b < d; ++b)
        for (long a = 0; a < d; ++a) {
            const CMatrix X = V.col(a) * V.col(b).adjoint();
            const CMatrix left = partial_trace_left(X, N_, n, 1);
            const CMatrix right = partial_trace_right(X, N_, n, 1);
            const long col = a + b * d;
            L.col(col).head(half * half) = Eigen::Map<const Eigen::VectorXcd>(left.data(), half * half);
            L.col(col).tail(half * half) = Eigen::Map<const Eigen::VectorXcd>(right.data(), half * half);
        }
    const Kernel ker = numerical_kernel(L, "ccirc_basis(" + std::to_string(n) + ")");
    out.kernel_gap = ker.gap;
    const long dim = ker.basis.cols();

    std::vector<CMatrix> raw(dim);
    for (long c = 0; c < dim; ++c) {
        const CMatrix Y = Eigen::Map<const CMatrix>(ker.basis.col(c).data(), d, d);
        raw[c] = V * Y * V.adjoint();
    }

    // rho in the HS-orthonormal basis.
    CMatrix R(dim, dim);
    for (long b = 0; b < dim; ++b) {
        const CMatrix rb = rotation(raw[b], n);
        for (long a = 0; a < dim; ++a) R(a, b) = hs_inner(raw[a], rb);
    }
    const CMatrix Id = CMatrix::Identity(dim, dim);
    out.unitarity_residual = (R.adjoint() * R - Id).cwiseAbs().maxCoeff();
    CMatrix Rp = Id;
    for (int i = 0; i < 2 * n; ++i) Rp = R * Rp;
    out.period_residual = (Rp - Id).cwiseAbs().maxCoeff();

    Eigen::ComplexEigenSolver<CMatrix> es(R, false);
    std::vector<int> multiplicity(2 * n, 0);
    for (long i = 0; i < dim; ++i) {
        const cplx lam = es.eigenvalues()(i);
        int best = 0;
        double dist = std::numeric_limits<double>::infinity();
        for (int s = 0; s < 2 * n; ++s) {
            const double dd = std::abs(lam - std::polar(1.0, std::numbers::pi * s / n));
            if (dd < dist) {
                dist = dd;
                best = s;
            }
        }
        if (dist > kSnapTolerance)
            throw RankAmbiguity("ccirc_basis: rho eigenvalue is not a 2n-th root of unity within tolerance");
        out.max_snap_distance = std::max(out.max_snap_distance, dist);
        ++multiplicity[best];
    }

    for (int s = 0; s < 2 * n; ++s) {
        if (multiplicity[s] == 0) continue;
        const cplx lam = std::polar(1.0, std::numbers::pi * s / n);
        const Kernel eig = normal_eigenspace(R, lam, 2.0 * std::sin(std::numbers::pi / (2.0 * n)), "rho eigenspace");
        if (eig.basis.cols() != multiplicity[s])
            throw RankAmbiguity("ccirc_basis: rho eigenspace dimension disagrees with eigenvalue count");
        for (long c = 0; c < eig.basis.cols(); ++c) {
            CMatrix X = CMatrix::Zero(raw[0].rows(), raw[0].cols());
            for (long b = 0; b < dim; ++b) X += eig.basis(b, c) * raw[b];
            out.vectors.push_back(std::move(X));
            out.rho_eigenvalues.push_back(lam);
            out.root_index.push_back(s);
        }
    }
    return ccirc_.emplace(n, std::move(out)).first->second;
}

CMatrix FiberOracle::eigenvector(int k, int s, int which) {
    const CcircBasis& basis = ccirc_basis(k);
    const int s_norm = ((s % (2 * k)) + 2 * k) % (2 * k);
    int seen = 0;
    for (std::size_t i = 0; i < basis.vectors.size(); ++i) {
        if (basis.root_index[i] != s_norm) continue;
        if (seen++ == which) return std::sqrt(qdim(k, ctx_)) * basis.vectors[i];
    }
    throw std::out_of_range("eigenvector: no rho-eigenvector with root index " + std::to_string(s) + " for k = " +
                            std::to_string(k));
}

CMatrix FiberOracle::embed_x(const CMatrix& X, int k, int i, int j) {
    const int n = i + k + j;
    checked_side(N_, n);
    const CMatrix& P = projection(n);
    return P * apply_middle(X, N_, i, k, j, P);
}

const CMatrix& FiberOracle::embedded_eigenvector(int k, int s, int i, int j) {
    std::lock_guard lock(mu_);
    const auto key = std::make_tuple(k, s, i, j);
    if (auto it = embedded_.find(key); it != embedded_.end()) return it->second;
    return embedded_.emplace(key, embed_x(eigenvector(k, s), k, i, j)).first->second;
}

void FiberOracle::clear_embeddings() {
    std::lock_guard lock(mu_);
    embedded_.clear();
}

OracleGram FiberOracle::gram_direct(int k, int s, int n) {
    if (n < k) throw std::out_of_range("gram_direct: n must be at least k");
    const int side = n - k + 1;
    std::vector<const CMatrix*> Xs;
    for (int i = 0; i < side; ++i) Xs.push_back(&embedded_eigenvector(k, s, i, n - k - i));
    CMatrix G(side, side);
    const double dn = qdim(n, ctx_);
    for (int i = 0; i < side; ++i)
        for (int p = 0; p < side; ++p) G(i, p) = hs_inner(*Xs[i], *Xs[p]) / dn;
    OracleGram out;
    out.k = k;
    out.n = n;
    out.mu_index = s;
    out.entries = G.real();
    out.max_imag = G.imag().cwiseAbs().maxCoeff();
    out.hermitian_residual = (G - G.adjoint()).cwiseAbs().maxCoeff();
    return out;
}

OracleGram FiberOracle::gram_direct(const CMatrix& X, int k, int n) {
    if (n < k) throw std::out_of_range("gram_direct: n must be at least k");
    const int side = n - k + 1;
    std::vector<CMatrix> Xs;
    Xs.reserve(side);
    for (int i = 0; i < side; ++i) Xs.push_back(embed_x(X, k, i, n - k - i));
    CMatrix G(side, side);
    const double dn = qdim(n, ctx_);
    for (int i = 0; i < side; ++i)
        for (int p = 0; p < side; ++p) G(i, p) = hs_inner(Xs[i], Xs[p]) / dn;
    OracleGram out;
    out.k = k;
    out.n = n;
    out.entries = G.real();
    out.max_imag = G.imag().cwiseAbs().maxCoeff();
    out.hermitian_residual = (G - G.adjoint()).cwiseAbs().maxCoeff();
    return out;
}

double FiberOracle::check_general_rec(const CMatrix& X, int k, double mu_re, int p, int q) {
    const int n = p + k + q;
    const RecCoeffParams params{k, mu_re};
    const ABC c = coeff_ABCD(n, p, params, ctx_);
    const CMatrix lhs = (qdim(n - 1, ctx_) / qdim(n, ctx_)) * partial_trace_right(embed_x(X, k, p, q), N_, n, 1);
    CMatrix rhs = CMatrix::Zero(lhs.rows(), lhs.cols());
    if (q > 0) rhs += (1.0 - c.A) * embed_x(X, k, p, q - 1);
    if (p > 0) rhs += c.B * embed_x(X, k, p - 1, q);
    if (p > 1) rhs += c.C * embed_x(X, k, p - 2, q + 1);
    return (lhs - rhs).norm();
}

double FiberOracle::check_general_rec(int k, int s, int p, int q) {
    const int n = p + k + q;
    const ABC c = coeff_ABCD(n, p, RecCoeffParams::from_root(k, s), ctx_);
    const CMatrix lhs =
        (qdim(n - 1, ctx_) / qdim(n, ctx_)) * partial_trace_right(embedded_eigenvector(k, s, p, q), N_, n, 1);
    CMatrix rhs = CMatrix::Zero(lhs.rows(), lhs.cols());
    if (q > 0) rhs += (1.0 - c.A) * embedded_eigenvector(k, s, p, q - 1);
    if (p > 0) rhs += c.B * embedded_eigenvector(k, s, p - 1, q);
    if (p > 1) rhs += c.C * embedded_eigenvector(k, s, p - 2, q + 1);
    return (lhs - rhs).norm();
}

std::vector<cplx> FiberOracle::expand_in_x_basis(const CMatrix& Z, const CMatrix& X, int k, int n) {
    const int side = n - k + 1;
    std::vector<CMatrix> Xs;
    for (int i = 0; i < side; ++i) Xs.push_back(embed_x(X, k, i, n - k - i));
    CMatrix G(side, side);
    Eigen::VectorXcd rhs(side);
    for (int i = 0; i < side; ++i) {
        for (int p = 0; p < side; ++p) G(i, p) = hs_inner(Xs[i], Xs[p]);
        rhs(i) = hs_inner(Xs[i], Z);
    }
    const Eigen::VectorXcd c = G.ldlt().solve(rhs);
    return std::vector<cplx>(c.data(), c.data() + side);
}

PiResult FiberOracle::pi_abc(int a, int b, int c) {
    const int n = a + b + c;
    checked_side(N_, n);
    const CMatrix T = partial_trace_middle(projection(n), N_, a, b, c) / qdim(b, ctx_);
    const CMatrix Va = a > 0 ? range_basis(a) : CMatrix::Ones(1, 1);
    const CMatrix Vc = c > 0 ? range_basis(c) : CMatrix::Ones(1, 1);
    const CMatrix W = kron(Va, Vc);
    PiResult out;
    out.restricted = W.adjoint() * T * W;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(out.restricted, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    out.best_lambda = 0.5 * (hi + lo);
    out.deviation = 0.5 * (hi - lo);
    out.lambda_limit = std::pow(ctx_.q(), -(a + c)) / (qdim(a, ctx_) * qdim(c, ctx_));
    return out;
}

const CMatrix& FiberOracle::intertwiner(int k, int l, int a) {
    std::lock_guard lock(mu_);
    const auto key = std::make_tuple(k, l, a);
    if (auto it = inter_.find(key); it != inter_.end()) return it->second;
    if (a < 0 || a > std::min(k, l)) throw std::out_of_range("intertwiner: a outside [0, min(k,l)]");
    const int m = k + l - 2 * a;
    checked_side(N_, k + l);

    // t_a = (P_a (x) P_a) t_1^a with t_1^a the nested cups on 2a points.
    std::vector<std::pair<int, int>> rainbow;
    for (int i = 0; i < a; ++i) rainbow.emplace_back(i, 2 * a - 1 - i);
    const CMatrix nested = realize(tl::Element(tl::Diagram::from_pairs(0, 2 * a, rainbow)), N_).entries;
    const CMatrix Pa = a > 0 ? projection(a) : CMatrix::Ones(1, 1);
    const CMatrix ta = kron(Pa, Pa) * nested;
    const CMatrix mid = kron(CMatrix::Identity(ipow(N_, k - a), ipow(N_, k - a)),
                             kron(ta, CMatrix::Identity(ipow(N_, l - a), ipow(N_, l - a))));
    const CMatrix V = kron(projection(k), projection(l)) * mid * projection(m);
    return inter_.emplace(key, V).first->second;
}

double FiberOracle::kappa(int k, int l, int a) {
    std::lock_guard lock(mu_);
    const auto key = std::make_tuple(k, l, a);
    if (auto it = kappa_.find(key); it != kappa_.end()) return it->second;
    const CMatrix& V = intertwiner(k, l, a);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(V.adjoint() * V, Eigen::EigenvaluesOnly);
    const double kap = 1.0 / std::sqrt(es.eigenvalues().maxCoeff());
    kappa_.emplace(key, kap);
    return kap;
}

CMatrix FiberOracle::convolve(const CMatrix& X, int k, const CMatrix& Y, int l, int a) {
    const CMatrix& V = intertwiner(k, l, a);
    return V.adjoint() * kron(X, Y) * V;
}

std::vector<ProbeRow> FiberOracle::orthogonality_probe(const ProbeConfig& cfg) {
    const int k = cfg.k, n = cfg.n;
    const CMatrix x = eigenvector(k, 0);
    // y: a normalized traceless element of B(H_n).
    std::mt19937_64 rng(cfg.seed);
    const CMatrix& Pn = projection(n);
    CMatrix Y = Pn * random_matrix(Pn.rows(), Pn.cols(), rng) * Pn;
    Y -= (Y.trace() / qdim(n, ctx_)) * Pn;
    Y *= std::sqrt(qdim(n, ctx_)) / Y.norm();

    struct Side {
        int i, j;
        std::map<int, CMatrix> by_m;  // kappa^2 (A *_m B) for each fusion channel m
    };
    std::vector<Side> left, right;
    for (int s = 0; s <= cfg.max_sum; ++s)
        for (int i = 0; i <= s; ++i) {
            const int j = s - i;
            const int n1 = i + k + j;
            const CMatrix Xij = embed_x(x, k, i, j);
            Side L{i, j, {}}, R{i, j, {}};
            for (int a = 0; a <= std::min(n1, n); ++a) {
                const int m = n1 + n - 2 * a;
                const double kl = kappa(n1, n, a), kr = kappa(n, n1, a);
                L.by_m[m] = kl * kl * convolve(Xij, n1, Y, n, a);
                R.by_m[m] = kr * kr * convolve(Y, n, Xij, n1, a);
            }
            left.push_back(std::move(L));
            right.push_back(std::move(R));
        }

    std::vector<ProbeRow> rows;
    for (const auto& L : left)
        for (const auto& R : right) {
            cplx inner = 0.0;
            bool overlap = false;
            for (const auto& [m, A] : L.by_m) {
                auto it = R.by_m.find(m);
                if (it == R.by_m.end()) continue;
                overlap = true;
                inner += hs_inner(A, it->second) / qdim(m, ctx_);
            }
            if (!overlap) continue;
            rows.push_back({k, k, n, L.i, L.j, R.i, R.j, std::abs(inner)});
        }
    return rows;
}

std::vector<double> probe_profile(const std::vector<ProbeRow>& rows) {
    std::vector<double> out;
    for (const auto& r : rows) {
        const int s = std::min({r.i, r.j, r.ip, r.jp});
        if (s >= static_cast<int>(out.size())) out.resize(s + 1, 0.0);
        out[s] = std::max(out[s], r.abs_inner);
    }
    return out;
}

} // namespace tllab
