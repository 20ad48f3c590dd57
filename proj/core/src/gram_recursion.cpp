#include "tllab/gram_recursion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>

namespace tllab {

std::vector<GramBlock> gram_recursive(int k, double mu_re, double q, int n_max) {
    if (k < 1) throw std::domain_error("gram_recursive: k must be at least 1");
    if (std::abs(mu_re) > 1.0) throw std::domain_error("gram_recursive: |Re mu| must be at most 1");
    if (n_max < k) throw std::domain_error("gram_recursive: n_max must be at least k");
    const ScalarContext ctx = ScalarContext::from_q(q);
    const RecCoeffParams params{k, mu_re};

    std::vector<GramBlock> out;
    out.reserve(n_max - k + 1);
    out.push_back({k, mu_re, q, k, Eigen::MatrixXd::Ones(1, 1)});
    double corner = 1.0;
    for (int n = k + 1; n <= n_max; ++n) {
        const Eigen::MatrixXd& prev = out.back().entries;
        const int last = n - k;
        Eigen::MatrixXd G(last + 1, last + 1);
        for (int p = 0; p <= last; ++p) {
            const ABC c = coeff_ABCD(n, p, params, ctx);
            for (int i = 0; i < last; ++i) {
                double v = 0.0;
                if (p < last) v += (1.0 - c.A) * prev(i, p);
                if (p > 0) v += c.B * prev(i, p - 1);
                if (p > 1) v += c.C * prev(i, p - 2);
                G(i, p) = v;
            }
        }
        for (int p = 0; p < last; ++p) G(last, p) = G(p, last);
        corner *= 1.0 - coeff_ABCD(n, 0, params, ctx).A;
        G(last, last) = corner;
        out.push_back({k, mu_re, q, n, std::move(G)});
    }
    return out;
}

GramNorms norms(const GramBlock& g) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.entries, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("norms: eigensolver failed");
    const auto& ev = es.eigenvalues();
    GramNorms out;
    out.norm = ev.cwiseAbs().maxCoeff();
    const double lo = ev.minCoeff();
    if (lo <= 0.0) {
        out.singular = true;
        out.inv_norm = std::numeric_limits<double>::infinity();
    } else {
        out.inv_norm = 1.0 / lo;
    }
    out.cond = out.norm * out.inv_norm;
    return out;
}

double persymmetry_residual(const GramBlock& g) {
    const long s = g.entries.rows();
    double worst = 0.0;
    for (long i = 0; i < s; ++i)
        for (long p = 0; p < s; ++p)
            worst = std::max(worst, std::abs(g.entries(i, p) - g.entries(s - 1 - i, s - 1 - p)));
    return worst;
}

double diagonal_dominance_margin(const GramBlock& g) {
    const Eigen::VectorXd diag = g.entries.diagonal();
    for (long p = 0; p < diag.size(); ++p)
        if (!(diag(p) > 0.0))
            throw std::domain_error("diagonal_dominance_margin: non-positive diagonal entry at n = " +
                                    std::to_string(g.n) + ", p = " + std::to_string(p));
    if (diag.size() < 2) return 0.0;
    Eigen::MatrixXd off = g.entries;
    off.diagonal().setZero();
    // Scale column p by 1 / G(p,p).
    const Eigen::MatrixXd ratio = off * diag.cwiseInverse().asDiagonal();
    return Eigen::JacobiSVD<Eigen::MatrixXd>(ratio).singularValues()(0);
}

RieszMargin riesz_margin(int k, double mu_re, double q, int n_max) {
    RieszMargin out;
    out.min_diag = std::numeric_limits<double>::infinity();
    for (const GramBlock& g : gram_recursive(k, mu_re, q, n_max)) {
        const double m = diagonal_dominance_margin(g);
        out.min_diag = std::min(out.min_diag, g.entries.diagonal().minCoeff());
        if (m > out.margin) {
            out.margin = m;
            out.worst_n = g.n;
        }
        const GramNorms gn = norms(g);
        out.sup_norm = std::max(out.sup_norm, gn.norm);
        out.sup_inv_norm = std::max(out.sup_inv_norm, gn.inv_norm);
        out.sup_cond = std::max(out.sup_cond, gn.cond);
    }
    return out;
}

DecayProfile decay_profile(const GramBlock& g) {
    const long s = g.entries.rows();
    DecayProfile out;
    for (long b = 0; b < s; ++b) {
        double m = 0.0;
        for (long i = 0; i + b < s; ++i) m = std::max({m, std::abs(g.entries(i, i + b)), std::abs(g.entries(i + b, i))});
        out.bands.push_back({static_cast<int>(b), m});
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const auto& bm : out.bands) {
        if (!(bm.max_abs > std::numeric_limits<double>::min())) continue;
        const double x = bm.band, y = std::log(bm.max_abs);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt >= 2) out.log_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return out;
}

N0Report estimate_N0(int k_max, int n_max, int N_min, int N_max, int jobs) {
    if (N_min < 3 || N_max < N_min) throw std::domain_error("estimate_N0: need 3 <= N_min <= N_max");
    if (k_max < 1 || n_max < k_max) throw std::domain_error("estimate_N0: need 1 <= k_max <= n_max");
    const int count = N_max - N_min + 1;
    // Distinct values of Re mu come from s = 0..k.
    struct Cell {
        double margin = 0, sup_norm = 0, sup_inv_norm = 0, sup_cond = 0;
        std::map<std::pair<int, int>, double> per_branch;
    };
    std::vector<Cell> cells(count);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int idx = next++; idx < count; idx = next++) {
            const double q = q_from_N(N_min + idx);
            Cell& c = cells[idx];
            for (int k = 1; k <= k_max; ++k)
                for (int s = 0; s <= k; ++s) {
                    const RieszMargin r = riesz_margin(k, RecCoeffParams::from_root(k, s).mu_re, q, n_max);
                    c.per_branch[{k, s}] = r.margin;
                    c.margin = std::max(c.margin, r.margin);
                    c.sup_norm = std::max(c.sup_norm, r.sup_norm);
                    c.sup_inv_norm = std::max(c.sup_inv_norm, r.sup_inv_norm);
                    c.sup_cond = std::max(c.sup_cond, r.sup_cond);
                }
        }
    };
    const int threads = std::clamp(jobs, 1, count);
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    N0Report rep;
    for (int idx = 0; idx < count; ++idx) {
        const Cell& c = cells[idx];
        const int N = N_min + idx;
        const bool pass = c.margin < 1.0;
        rep.rows.push_back({N, q_from_N(N), c.margin, c.sup_norm, c.sup_inv_norm, c.sup_cond, pass});
        if (pass && !rep.smallest_N) rep.smallest_N = N;
        if (idx > 0)
            for (const auto& [branch, m] : c.per_branch) {
                const double before = cells[idx - 1].per_branch.at(branch);
                if (m > before * (1.0 + 1e-12)) {
                    rep.monotone = false;
                    rep.monotonicity_violations.push_back("k=" + std::to_string(branch.first) + " s=" +
                                                          std::to_string(branch.second) + " N=" + std::to_string(N));
                }
            }
    }
    return rep;
}

} // namespace tllab
