#include "tllab/commutator_model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>

namespace tllab {

namespace {

// Structure constants at a fixed (params, q). Indices follow the d_{<0} = 0 convention.
struct Coeffs {
    const RecCoeffParams& params;
    const ScalarContext& ctx;

    double A(int n, int j) const { return coeff_ABCD(n, j, params, ctx).A; }
    double B(int n, int j) const { return coeff_ABCD(n, j, params, ctx).B; }
    double C(int n, int j) const { return coeff_ABCD(n, j, params, ctx).C; }
    double D(int n, int j) const { return coeff_D(n, j, params, ctx); }
};

double uniform_pm1(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

using Targets = std::set<CoeffGrid::Index>;

void add_target(Targets& t, int i, int j) {
    if (i >= 0 && j >= 0) t.emplace(i, j);
}

Targets left_targets(const CoeffGrid& z) {
    Targets t;
    for (const auto& [ij, v] : z.support()) {
        const auto [a, b] = ij;
        add_target(t, a + 1, b);
        add_target(t, a - 1, b);
        add_target(t, a, b - 1);
        add_target(t, a + 1, b - 2);
    }
    return t;
}

Targets right_targets(const CoeffGrid& z) {
    Targets t;
    for (const auto& [ij, v] : z.support()) {
        const auto [a, b] = ij;
        add_target(t, a, b + 1);
        add_target(t, a, b - 1);
        add_target(t, a - 1, b);
        add_target(t, a - 2, b + 1);
    }
    return t;
}

void check_admissible(double R, double q) {
    if (!admissible_R(R, q))
        throw std::domain_error("R = " + std::to_string(R) + " is outside (3.4, 0.995/(2q^2)) for q = " +
                                std::to_string(q));
}

} // namespace

CoeffGrid::CoeffGrid(const RecCoeffParams& params, double q) : params_(params), ctx_(ScalarContext::from_q(q)) {
    if (params.k < 1) throw std::domain_error("CoeffGrid: k must be at least 1");
}

cplx CoeffGrid::at(int i, int j) const {
    if (i < 0 || j < 0) return 0.0;
    auto it = support_.find({i, j});
    return it == support_.end() ? cplx(0.0) : it->second;
}

void CoeffGrid::set(int i, int j, cplx v) {
    if (i < 0 || j < 0) throw std::out_of_range("CoeffGrid::set: negative index");
    if (v == cplx(0.0)) support_.erase({i, j});
    else support_[{i, j}] = v;
}

void CoeffGrid::add(int i, int j, cplx v) { set(i, j, at(i, j) + v); }

double CoeffGrid::norm_squared() const {
    double s = 0.0;
    for (const auto& [ij, v] : support_) s += std::norm(v);
    return s;
}

double CoeffGrid::norm() const { return std::sqrt(norm_squared()); }

CoeffGrid CoeffGrid::random(const RecCoeffParams& params, double q, int extent, std::mt19937_64& rng) {
    CoeffGrid z(params, q);
    for (int i = 0; i <= extent; ++i)
        for (int j = 0; j <= extent; ++j) {
            const double re = uniform_pm1(rng);
            const double im = uniform_pm1(rng);
            z.set(i, j, {re, im});
        }
    return z;
}

double max_abs_difference(const CoeffGrid& a, const CoeffGrid& b) {
    double worst = 0.0;
    for (const auto& [ij, v] : a.support()) worst = std::max(worst, std::abs(v - b.at(ij.first, ij.second)));
    for (const auto& [ij, v] : b.support()) worst = std::max(worst, std::abs(v - a.at(ij.first, ij.second)));
    return worst;
}

CoeffGrid left_mult_chi(const CoeffGrid& z) {
    const Coeffs c{z.params(), z.ctx()};
    const int k = z.params().k;
    CoeffGrid out(z.params(), z.q());
    for (const auto& [i, j] : left_targets(z)) {
        const int n1 = i + k + j + 1;
        out.set(i, j,
                z.at(i - 1, j) + (1.0 - c.A(n1, j)) * z.at(i + 1, j) + c.B(n1, j + 1) * z.at(i, j + 1) +
                    c.C(n1, j + 2) * z.at(i - 1, j + 2));
    }
    return out;
}

CoeffGrid right_mult_chi(const CoeffGrid& z) {
    const Coeffs c{z.params(), z.ctx()};
    const int k = z.params().k;
    CoeffGrid out(z.params(), z.q());
    for (const auto& [i, j] : right_targets(z)) {
        const int n1 = i + k + j + 1;
        out.set(i, j,
                z.at(i, j - 1) + (1.0 - c.A(n1, i)) * z.at(i, j + 1) + c.B(n1, i + 1) * z.at(i + 1, j) +
                    c.C(n1, i + 2) * z.at(i + 2, j - 1));
    }
    return out;
}

CoeffGrid commutator(const CoeffGrid& z) {
    const Coeffs c{z.params(), z.ctx()};
    const int k = z.params().k;
    Targets t = left_targets(z);
    t.merge(right_targets(z));
    CoeffGrid out(z.params(), z.q());
    for (const auto& [i, j] : t) {
        const int n1 = i + k + j + 1;
        out.set(i, j,
                z.at(i - 1, j) - z.at(i, j - 1) + c.D(n1, j) * z.at(i + 1, j) - c.D(n1, i) * z.at(i, j + 1) +
                    c.C(n1, j + 2) * z.at(i - 1, j + 2) - c.C(n1, i + 2) * z.at(i + 2, j - 1));
    }
    return out;
}

CoeffGrid project_Em(const CoeffGrid& z, int m) {
    CoeffGrid out(z.params(), z.q());
    for (const auto& [ij, v] : z.support())
        if (ij.first >= m && ij.second >= m) out.set(ij.first, ij.second, v);
    return out;
}

CoeffGrid project_Qm(const CoeffGrid& z, int m) {
    CoeffGrid out(z.params(), z.q());
    for (const auto& [ij, v] : z.support())
        if (ij.first == m && ij.second >= m) out.set(ij.first, ij.second, v);
    return out;
}

// ---------------------------------------------------------------------------

double PhiTable::at(int p, int i) const {
    if (p < 0 || p > p_max || i < -p || i > m + p) return 0.0;
    return rows[p][i + p];
}

double MoveTables::f(int p, int i, int j) const {
    if (p < 0 || p > p_max || i < 0 || j < 0 || i + j != m + l + 2 * p || i > m + 2 * p) return 0.0;
    return f_diag[p][i];
}

double MoveTables::g(int p, int i, int j) const {
    if (i < 0 || j < 0) return 0.0;
    const int excess = i + j - (m + l + 1);
    if (excess < 0 || excess % 2 != 0) return 0.0;
    const int r = excess / 2;
    if (r >= p || r >= static_cast<int>(g_diag.size()) || i > m + 2 * r) return 0.0;
    return g_diag[r][i];
}

MoveTables fg_tables(int m, int l, int p_max, const RecCoeffParams& params, double q) {
    if (m < 0 || l < m) throw std::domain_error("fg_tables: need l >= m >= 0");
    if (p_max < 0) throw std::domain_error("fg_tables: p_max must be non-negative");
    const ScalarContext ctx = ScalarContext::from_q(q);
    const Coeffs c{params, ctx};
    const int k = params.k;

    MoveTables t{m, l, p_max, params, q, {}, {}, PhiTable{m, l, p_max, params, q, {}}};
    std::vector<double> f0(m + 1, 0.0);
    f0[m] = 1.0;
    t.f_diag.push_back(std::move(f0));

    for (int p = 0;; ++p) {
        // phi^{l,p}_i = -sum_{s=-p}^{i} f^{l,p}_{m+p-s, l+p+s}
        const std::vector<double>& f = t.f_diag[p];
        std::vector<double> phi(m + 2 * p + 1);
        double acc = 0.0;
        for (int s = -p; s <= m + p; ++s) {
            acc -= f[m + p - s];
            phi[s + p] = acc;
        }
        t.phi.rows.push_back(phi);
        if (p == p_max) break;

        auto ph = [&](int i) { return (i < -p || i > m + p) ? 0.0 : phi[i + p]; };
        std::vector<double> g(m + 2 * p + 1);
        for (int i = 0; i <= m + 2 * p; ++i) g[i] = ph(m + p - i);
        t.g_diag.push_back(std::move(g));

        const int diag = m + l + 2 * p + 2;
        const int n = diag + k;
        std::vector<double> next(m + 2 * p + 3);
        for (int i = 0; i <= m + 2 * p + 2; ++i) {
            const int j = diag - i;
            next[i] = c.D(n, i) * ph(m + p - i) - c.D(n, j) * ph(m + p - i + 1) + c.C(n, i) * ph(m + p - i + 2) -
                      c.C(n, j) * ph(m + p - i - 1);
        }
        t.f_diag.push_back(std::move(next));
    }
    return t;
}

PhiTable phi_table(int m, int l, int p_max, const RecCoeffParams& params, double q) {
    return fg_tables(m, l, p_max, params, q).phi;
}

PhiTable phi_table_direct(int m, int l, int p_max, const RecCoeffParams& params, double q) {
    if (m < 0 || l < m) throw std::domain_error("phi_table_direct: need l >= m >= 0");
    const ScalarContext ctx = ScalarContext::from_q(q);
    const Coeffs c{params, ctx};
    PhiTable t{m, l, p_max, params, q, {}};
    t.rows.push_back(std::vector<double>(m + 1, -1.0));
    for (int p = 0; p < p_max; ++p) {
        const int n = m + l + 2 * p + params.k + 2;
        auto ph = [&](int i) { return t.at(p, i); };
        // The inner sum over s <= i-1 has weights that depend on s only, so it is
        // carried as two running sums (the C_{l+p+s+3} part stops at s = i-2).
        double run_w = 0.0, run_c = 0.0, lag_c = 0.0;
        std::vector<double> next(m + 2 * p + 3);
        for (int i = -p - 1; i <= m + p + 1; ++i) {
            next[i + p + 1] = ph(i) * (c.D(n, l + p + 1 + i) - c.C(n, m + p - i + 2)) -
                              ph(i + 1) * c.C(n, m + p - i + 1) + run_w + lag_c;
            if (i >= -p) {
                run_w += ph(i) * (c.D(n, l + p + 1 + i) - c.D(n, m + p - i) - c.C(n, m + p - i + 2));
                lag_c = run_c;
                run_c += ph(i) * c.C(n, l + p + i + 3);
            }
        }
        t.rows.push_back(std::move(next));
        t.p_max = p + 1;
    }
    t.p_max = p_max;
    return t;
}

double verify_iterated_move(const CoeffGrid& z, const MoveTables& t, int p) {
    if (p < 0 || p > t.p_max) throw std::out_of_range("verify_iterated_move: p outside the table");
    const CoeffGrid comm = commutator(z);
    cplx sum = 0.0;
    const int diag = t.m + t.l + 2 * p;
    for (int i = 0; i <= t.m + 2 * p; ++i) sum += t.f_diag[p][i] * z.at(i, diag - i);
    for (int r = 0; r < p; ++r) {
        const int d = t.m + t.l + 2 * r + 1;
        for (int i = 0; i <= t.m + 2 * r; ++i) sum += t.g_diag[r][i] * comm.at(i, d - i);
    }
    return std::abs(z.at(t.m, t.l) - sum);
}

double verify_iterated_move(const CoeffGrid& z, int m, int l, int p) {
    return verify_iterated_move(z, fg_tables(m, l, p, z.params(), z.q()), p);
}

// ---------------------------------------------------------------------------

bool admissible_R(double R, double q) { return R > 3.4 && R < 0.995 / (2.0 * q * q); }

double default_R(double q) {
    const double upper = 0.995 / (2.0 * q * q);
    if (!(upper > 3.4)) throw std::domain_error("default_R: no admissible R for q = " + std::to_string(q));
    const double R = std::min(4.0, 0.9 * upper);
    return R > 3.4 ? R : 0.5 * (3.4 + upper);
}

double series_S(double q, double R) {
    check_admissible(R, q);
    const double x = 2.0 * R * q * q;
    const double y = q * q / (2.0 * R);
    return 1.0 / (1.0 - x) + y / (1.0 - y);
}

PhiBound phi_bound_check(int m, const RecCoeffParams& params, double q, int p_max, double R, int l_span, int jobs) {
    check_admissible(R, q);
    if (p_max < 1) throw std::domain_error("phi_bound_check: p_max must be at least 1");
    if (l_span < 0) throw std::domain_error("phi_bound_check: l_span must be non-negative");
    const double lq = std::log(q), l2R = std::log(2.0 * R);

    const int count = l_span + 1;
    std::vector<std::vector<double>> level_max(count, std::vector<double>(p_max + 1, 0.0));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int idx = next++; idx < count; idx = next++) {
            const PhiTable t = phi_table(m, m + idx, p_max, params, q);
            for (int p = 0; p <= p_max; ++p)
                for (int i = -p; i <= m + p; ++i) {
                    const double a = std::abs(t.at(p, i));
                    if (a == 0.0) continue;
                    const double psi = std::exp(std::log(a) - 2.0 * std::abs(i) * lq - i * l2R);
                    level_max[idx][p] = std::max(level_max[idx][p], psi);
                }
        }
    };
    const int threads = std::clamp(jobs, 1, count);
    std::vector<std::thread> pool;
    for (int th = 1; th < threads; ++th) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    PhiBound out;
    double run = 0.0;
    for (int p = 0; p <= p_max; ++p) {
        for (int idx = 0; idx < count; ++idx) run = std::max(run, level_max[idx][p]);
        out.running_max.push_back(run);
    }
    out.K_empirical = run;
    const double before = out.running_max[p_max - p_max / 2];
    out.window_growth = before > 0.0 ? (run - before) / before : 0.0;
    out.stable = std::isfinite(run) && out.window_growth <= kStabilityTolerance;
    return out;
}

double LocalizationConstants::L(int m) const {
    if (m < 0 || m > static_cast<int>(K.size()))
        throw std::out_of_range("LocalizationConstants::L: no K for m = " + std::to_string(m));
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += K[i] * K[i];
    return 16.0 * S * S * s;
}

LocalizationConstants localization_constants(const RecCoeffParams& params, double q, int m_max, int p_max,
                                             double R, int l_span) {
    LocalizationConstants c;
    c.q = q;
    c.R = R;
    c.S = series_S(q, R);
    for (int mp = 0; mp < m_max; ++mp) c.K.push_back(phi_bound_check(mp, params, q, p_max, R, l_span).K_empirical);
    return c;
}

LocalizationResult support_localization_check(const CoeffGrid& z, int m, int p, const LocalizationConstants& c) {
    if (p < 1) throw std::domain_error("support_localization_check: p must be at least 1");
    LocalizationResult out;
    for (const auto& [ij, v] : z.support())
        if (ij.first < m || ij.second < m) out.lhs += std::norm(v);
    out.L_m = c.L(m);
    out.rhs = out.L_m / p * z.norm_squared() + out.L_m * p * commutator(z).norm_squared();
    out.ok = out.lhs <= out.rhs;
    return out;
}

} // namespace tllab
