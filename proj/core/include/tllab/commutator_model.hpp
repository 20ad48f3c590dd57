#pragma once

#include <complex>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "tllab/qnumerics.hpp"

namespace tllab {

using cplx = std::complex<double>;

// Coefficients z_{i,j} of a vector z = sum z_{i,j} w_{i,j} in the cyclic bimodule
// of one rho-eigenvector w of weight k. Entries outside the stored support,
// including every negative index, read as zero.
class CoeffGrid {
public:
    using Index = std::pair<int, int>;

    CoeffGrid(const RecCoeffParams& params, double q);

    const RecCoeffParams& params() const { return params_; }
    double q() const { return ctx_.q(); }
    const ScalarContext& ctx() const { return ctx_; }

    cplx at(int i, int j) const;
    // Throws std::out_of_range for negative indices.
    void set(int i, int j, cplx v);
    void add(int i, int j, cplx v);
    const std::map<Index, cplx>& support() const { return support_; }

    double norm_squared() const;
    double norm() const;

    // Entries uniform in [-1,1] + i[-1,1] on [0,extent]^2.
    static CoeffGrid random(const RecCoeffParams& params, double q, int extent, std::mt19937_64& rng);

private:
    RecCoeffParams params_;
    ScalarContext ctx_;
    std::map<Index, cplx> support_;
};

double max_abs_difference(const CoeffGrid& a, const CoeffGrid& b);

CoeffGrid left_mult_chi(const CoeffGrid& z);
CoeffGrid right_mult_chi(const CoeffGrid& z);
// Closed formula with D^n_j = 1 - A^n_j - B^n_{n-k-j}; independent of the two products.
CoeffGrid commutator(const CoeffGrid& z);

// E_m keeps i >= m and j >= m; Q_m keeps i == m, j >= m.
CoeffGrid project_Em(const CoeffGrid& z, int m);
CoeffGrid project_Qm(const CoeffGrid& z, int m);

struct PhiTable {
    int m = 0;
    int l = 0;
    int p_max = 0;
    RecCoeffParams params;
    double q = 0.0;
    // rows[p][i + p] = phi^{l,p}_i for -p <= i <= m + p.
    std::vector<std::vector<double>> rows;

    double at(int p, int i) const;
};

// f^{l,p} and g^{l,p} for fixed (m, l) and p = 0..p_max, built level by level.
struct MoveTables {
    int m = 0;
    int l = 0;
    int p_max = 0;
    RecCoeffParams params;
    double q = 0.0;
    // f_diag[p][i] = f^{l,p}_{i, m+l+2p-i} for 0 <= i <= m+2p.
    std::vector<std::vector<double>> f_diag;
    // g_diag[r][i] = g_{i, m+l+2r+1-i} for 0 <= i <= m+2r; g^{l,p} uses r < p.
    std::vector<std::vector<double>> g_diag;
    PhiTable phi;

    double f(int p, int i, int j) const;
    double g(int p, int i, int j) const;
};

MoveTables fg_tables(int m, int l, int p_max, const RecCoeffParams& params, double q);
PhiTable phi_table(int m, int l, int p_max, const RecCoeffParams& params, double q);
// Same values from the closed one-level recursion on phi, without f and g.
PhiTable phi_table_direct(int m, int l, int p_max, const RecCoeffParams& params, double q);

// |z_{m,l} - sum f^{l,p} z - sum g^{l,p} [chi_1, z]|.
double verify_iterated_move(const CoeffGrid& z, int m, int l, int p);
double verify_iterated_move(const CoeffGrid& z, const MoveTables& tables, int p);

// Admissible R satisfy 3.4 < R < 0.995 / (2 q^2).
bool admissible_R(double R, double q);
double default_R(double q);
// S = sum over all integers i of q^{2|i|} (2R)^i.
double series_S(double q, double R);

struct PhiBound {
    double K_empirical = 0.0;
    bool stable = false;
    // Relative growth of the running maximum over the last p_max/2 levels.
    double window_growth = 0.0;
    // running_max[p]: max of |phi| q^{-2|i|} (2R)^{-i} over levels <= p.
    std::vector<double> running_max;
};

inline constexpr int kDefaultLSpan = 20;
inline constexpr double kStabilityTolerance = 1e-12;

// Scans l = m..m+l_span. Throws std::domain_error when R is not admissible.
PhiBound phi_bound_check(int m, const RecCoeffParams& params, double q, int p_max, double R,
                         int l_span = kDefaultLSpan, int jobs = 1);

struct LocalizationConstants {
    double q = 0.0;
    double R = 0.0;
    double S = 0.0;
    std::vector<double> K;  // K[m'] from phi_bound_check

    // 16 S^2 sum_{m' < m} K[m']^2.
    double L(int m) const;
};

LocalizationConstants localization_constants(const RecCoeffParams& params, double q, int m_max, int p_max,
                                             double R, int l_span = kDefaultLSpan);

struct LocalizationResult {
    double lhs = 0.0;  // ||(1 - E_m) z||^2
    double rhs = 0.0;  // L_m/p ||z||^2 + L_m p ||[chi_1, z]||^2
    double L_m = 0.0;
    bool ok = false;
};

LocalizationResult support_localization_check(const CoeffGrid& z, int m, int p, const LocalizationConstants& c);

} // namespace tllab
