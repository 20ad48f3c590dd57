#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tllab/qnumerics.hpp"

namespace tllab {

// G_n for one generating vector: entry (i, p) pairs the vectors with i and p
// left chi_1-powers, 0 <= i, p <= n - k.
struct GramBlock {
    int k = 1;
    double mu_re = 1.0;
    double q = 0.5;
    int n = 1;
    Eigen::MatrixXd entries;
};

// Blocks for n = k..n_max from the recursion; the last row comes from symmetry
// and the corner from the product formula.
std::vector<GramBlock> gram_recursive(int k, double mu_re, double q, int n_max);

struct GramNorms {
    double norm = 0.0;
    double inv_norm = 0.0;  // +inf when the smallest eigenvalue is not positive
    double cond = 0.0;
    bool singular = false;
};

GramNorms norms(const GramBlock& g);

// Largest |G(i,p) - G(n-k-i, n-k-p)|.
double persymmetry_residual(const GramBlock& g);

// || Gcheck_n Ghat_n^{-1} || with Ghat_n the diagonal part and Gcheck_n the rest.
// Throws std::domain_error naming (n, p) when a diagonal entry is not positive.
double diagonal_dominance_margin(const GramBlock& g);

struct RieszMargin {
    double margin = 0.0;      // max_n || Gcheck_n Ghat_n^{-1} ||
    double sup_norm = 0.0;
    double sup_inv_norm = 0.0;
    double sup_cond = 0.0;
    double min_diag = 0.0;
    int worst_n = 0;
};

RieszMargin riesz_margin(int k, double mu_re, double q, int n_max);

struct BandMax {
    int band;
    double max_abs;
};

struct DecayProfile {
    std::vector<BandMax> bands;
    // Least-squares slope of log(max_abs) against the band index, over nonzero bands.
    double log_slope = 0.0;
};

DecayProfile decay_profile(const GramBlock& g);

struct N0Row {
    int N;
    double q;
    double margin;
    double sup_norm;
    double sup_inv_norm;
    double sup_cond;
    bool pass;  // margin < 1 for every k and root
};

struct N0Report {
    std::vector<N0Row> rows;
    std::optional<int> smallest_N;
    // Per (k, root): margin non-increasing in N.
    bool monotone = true;
    std::vector<std::string> monotonicity_violations;
};

N0Report estimate_N0(int k_max, int n_max, int N_min, int N_max, int jobs = 1);

} // namespace tllab
