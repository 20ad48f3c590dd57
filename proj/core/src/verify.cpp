#include "tllab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "tllab/commutator_model.hpp"
#include "tllab/errors.hpp"
#include "tllab/fiber_oracle.hpp"
#include "tllab/gram_recursion.hpp"
#include "tllab/jones_wenzl.hpp"
#include "tllab/qnumerics.hpp"
#include "tllab/tl_core.hpp"

namespace tllab {

namespace {

using Params = std::vector<std::pair<std::string, std::string>>;

std::string str(int v) { return std::to_string(v); }
std::string str(long v) { return std::to_string(v); }
std::string str(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

CaseResult at_most(int criterion, std::string name, Params params, double residual, double tol) {
    return {criterion, std::move(name), std::move(params), residual, tol, residual <= tol};
}

// Strict comparison for margins and qualitative decay checks.
CaseResult below(int criterion, std::string name, Params params, double residual, double tol) {
    return {criterion, std::move(name), std::move(params), residual, tol, residual < tol};
}

std::mt19937_64 criterion_rng(std::uint64_t seed, int criterion) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(criterion)};
    return std::mt19937_64(seq);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

class DiagramPool {
public:
    tl::Diagram pick(int k, int l, std::mt19937_64& rng) {
        auto& all = pool_[{k, l}];
        if (all.empty()) all = tl::enumerate_nc2(k, l);
        return all[rng() % all.size()];
    }

private:
    std::map<std::pair<int, int>, std::vector<tl::Diagram>> pool_;
};

// Largest n with N^n inside the oracle budget.
int budget_strands(int N) {
    int n = 0;
    long side = 1;
    while (side * N <= kOracleBudget) {
        side *= N;
        ++n;
    }
    return n;
}

const std::vector<int> kJwNs{3, 5, 7};
constexpr int kJwMaxN = 10;
constexpr double kIdentityTol = 1e-10;

std::vector<CaseResult> jw_battery(bool timing) {
    const int c = 1;
    Stopwatch sw;
    std::vector<CaseResult> out;
    for (int N : kJwNs) {
        const ScalarContext ctx = ScalarContext::from_N(N);
        double idem = 0, adj = 0, ann = 0, markov = 0, bil = 0;
        for (int n = 1; n <= kJwMaxN; ++n) {
            const tl::Element& P = jw(n, ctx);
            idem = std::max(idem, tl::max_coeff_distance(tl::compose(P, P, ctx), P));
            adj = std::max(adj, tl::max_coeff_distance(tl::adjoint(P), P));
            if (n >= 2) ann = std::max(ann, jw_annihilation_check(n, ctx));
            const double dn = qdim(n, ctx);
            markov = std::max(markov, std::abs(tl::markov_trace(P, ctx) - dn) / dn);
            if (n >= 3) bil = std::max(bil, tl::max_coeff_distance(jw_bilateral(n, ctx), P));
        }
        const Params p{{"N", str(N)}, {"n_max", str(kJwMaxN)}};
        out.push_back(at_most(c, "jw_idempotence", p, idem, kIdentityTol));
        out.push_back(at_most(c, "jw_self_adjoint", p, adj, kIdentityTol));
        out.push_back(at_most(c, "jw_cap_annihilation", p, ann, kIdentityTol));
        out.push_back(at_most(c, "jw_markov_trace_relative", p, markov, kIdentityTol));
        out.push_back(at_most(c, "jw_bilateral", p, bil, kIdentityTol));
    }
    if (timing) out.push_back(at_most(c, "jw_runtime_seconds", {}, sw.seconds(), 60.0));
    return out;
}

std::vector<CaseResult> partial_trace_battery() {
    const int c = 2;
    std::vector<CaseResult> out;
    for (int N : kJwNs) {
        const ScalarContext ctx = ScalarContext::from_N(N);
        double one = 0, many = 0;
        for (int n = 1; n <= kJwMaxN; ++n)
            for (int b = 1; b <= n; ++b) {
                // Relative to the scale d_n / d_{n-b} of the right-hand side.
                const double r = jw_partial_trace_check(n, ctx, b) / (qdim(n, ctx) / qdim(n - b, ctx));
                (b == 1 ? one : many) = std::max(b == 1 ? one : many, r);
            }
        const Params p{{"N", str(N)}, {"n_max", str(kJwMaxN)}};
        out.push_back(at_most(c, "partial_trace_one_strand", p, one, kIdentityTol));
        out.push_back(at_most(c, "partial_trace_b_strands", p, many, kIdentityTol));
    }
    return out;
}

std::vector<CaseResult> functoriality_battery(int N, std::mt19937_64& rng) {
    const int c = 3;
    const int n_max = std::min(6, budget_strands(N));
    const ScalarContext ctx = ScalarContext::from_N(N);
    DiagramPool pool;
    constexpr int kPairs = 200;
    double comp = 0, tens = 0, trace = 0, ptrace = 0;
    for (int t = 0; t < kPairs; ++t) {
        {
            const int l = uniform_int(rng, 0, n_max);
            const int k = l % 2 + 2 * uniform_int(rng, 0, (n_max - l % 2) / 2);
            const int m = l % 2 + 2 * uniform_int(rng, 0, (n_max - l % 2) / 2);
            const tl::Element g(pool.pick(k, l, rng)), f(pool.pick(l, m, rng));
            const CMatrix lhs = realize(tl::compose(f, g, ctx), N).entries;
            const CMatrix rhs = realize(f, N).entries * realize(g, N).entries;
            comp = std::max(comp, (lhs - rhs).cwiseAbs().maxCoeff());
        }
        {
            const int half = n_max / 2;
            const int k1 = uniform_int(rng, 0, half), k2 = uniform_int(rng, 0, half);
            const int l1 = k1 % 2 + 2 * uniform_int(rng, 0, (half - k1 % 2) / 2);
            const int l2 = k2 % 2 + 2 * uniform_int(rng, 0, (half - k2 % 2) / 2);
            const tl::Element f(pool.pick(k1, l1, rng)), g(pool.pick(k2, l2, rng));
            const CMatrix lhs = realize(tl::tensor(f, g), N).entries;
            const CMatrix rhs = kron(realize(f, N).entries, realize(g, N).entries);
            tens = std::max(tens, (lhs - rhs).cwiseAbs().maxCoeff());
        }
        {
            const int n = uniform_int(rng, 1, n_max);
            const tl::Element f(pool.pick(n, n, rng));
            const CMatrix F = realize(f, N).entries;
            trace = std::max(trace, std::abs(tl::markov_trace(f, ctx) - F.trace()));
            const CMatrix lhs = realize(tl::partial_trace_right(f, 1, ctx), N).entries;
            ptrace = std::max(ptrace, (lhs - partial_trace_right(F, N, n, 1)).cwiseAbs().maxCoeff());
        }
    }
    constexpr double kExact = 1e-12;
    const Params p{{"N", str(N)}, {"n_max", str(n_max)}, {"pairs", str(kPairs)}};
    std::vector<CaseResult> out;
    out.push_back(at_most(c, "realize_composition", p, comp, kExact));
    out.push_back(at_most(c, "realize_tensor", p, tens, kExact));
    out.push_back(at_most(c, "realize_markov_trace", p, trace, kExact));
    out.push_back(at_most(c, "realize_partial_trace", p, ptrace, kExact));
    return out;
}

std::vector<CaseResult> rank_grid() {
    const int c = 3;
    std::vector<CaseResult> out;
    // N = 3..9 covers every N with at least four strands inside the budget.
    for (int N = 3; N <= 9; ++N) {
        const ScalarContext ctx = ScalarContext::from_N(N);
        long mismatches = 0;
        double herm = 0, idem = 0;
        const int n_max = budget_strands(N);
        for (int n = 1; n <= n_max; ++n) {
            const ProjectionCheck pc = check_projection(realize(jw(n, ctx), N).entries);
            if (pc.rank != std::lround(qdim(n, ctx))) ++mismatches;
            herm = std::max(herm, pc.hermitian_residual);
            idem = std::max(idem, pc.idempotent_residual);
        }
        const Params p{{"N", str(N)}, {"n_max", str(n_max)}};
        out.push_back(at_most(c, "rank_equals_qdim", p, static_cast<double>(mismatches), 0.0));
        out.push_back(at_most(c, "projection_hermitian", p, herm, 1e-12));
        out.push_back(at_most(c, "projection_idempotent", p, idem, 1e-10));
    }
    return out;
}

}  // namespace

std::string criterion_title(int criterion) {
    static const char* titles[kCriteriaCount] = {
        "Jones-Wenzl battery",
        "JW partial traces",
        "fiber functoriality and projection ranks",
        "dimension of the doubly traceless space",
        "rotation on the doubly traceless space",
        "Gram recursion vs dense oracle",
        "one-step trace identity",
        "Riesz certification at N=7",
        "iterated-move identity",
        "phi-bound stability",
        "support localization",
        "qualitative decay probes",
        "alpha(q)",
    };
    if (criterion < 1 || criterion > kCriteriaCount)
        throw std::out_of_range("criterion_title: no criterion " + std::to_string(criterion));
    return titles[criterion - 1];
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"all", "jw", "oracle", "gram", "commutator", "probes", "alpha"};
    return names;
}

std::vector<int> suite_criteria(const std::string& suite) {
    if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13};
    if (suite == "jw") return {1, 2};
    if (suite == "oracle") return {3, 4, 5};
    if (suite == "gram") return {6, 7, 8};
    if (suite == "commutator") return {9, 10, 11};
    if (suite == "probes") return {12};
    if (suite == "alpha") return {13};
    throw std::invalid_argument("unknown suite '" + suite + "'");
}

VerifySession::VerifySession(VerifyOptions opt) : opt_(opt) {
    if (opt_.oracle_N < 3) throw std::invalid_argument("VerifySession: oracle N must be at least 3");
}

VerifySession::~VerifySession() = default;

FiberOracle& VerifySession::oracle(int N) {
    auto& slot = oracles_[N];
    if (!slot) slot = std::make_unique<FiberOracle>(N);
    return *slot;
}

std::vector<CaseResult> VerifySession::run_suite(const std::string& suite) {
    std::vector<CaseResult> out;
    for (int c : suite_criteria(suite)) {
        auto part = run(c);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

std::vector<CaseResult> VerifySession::run(int criterion) {
    std::mt19937_64 rng = criterion_rng(opt_.seed, criterion);
    const int c = criterion;
    std::vector<CaseResult> out;
    switch (criterion) {
    case 1:
        return jw_battery(opt_.include_timing);
    case 2:
        return partial_trace_battery();
    case 3: {
        out = functoriality_battery(opt_.oracle_N, rng);
        auto ranks = rank_grid();
        out.insert(out.end(), ranks.begin(), ranks.end());
        return out;
    }
    case 4:
    case 5: {
        const std::vector<std::pair<int, int>> grid =
            c == 4 ? std::vector<std::pair<int, int>>{{1, 3}, {2, 3}, {2, 4}, {3, 3}}
                   : std::vector<std::pair<int, int>>{{1, 3}, {2, 3}, {3, 3}};
        for (auto [n, N] : grid) {
            const CcircBasis& b = oracle(N).ccirc_basis(n);
            const Params p{{"n", str(n)}, {"N", str(N)}};
            if (c == 4) {
                const long dim = static_cast<long>(b.vectors.size());
                Params pd = p;
                pd.emplace_back("dim", str(dim));
                pd.emplace_back("expected", str(b.expected_dim));
                out.push_back(at_most(c, "ccirc_dimension", pd, static_cast<double>(std::labs(dim - b.expected_dim)), 0.0));
                out.push_back(CaseResult{c, "ccirc_kernel_gap", p, b.kernel_gap, 1e-6, b.kernel_gap >= 1e-6});
            } else {
                out.push_back(at_most(c, "rho_unitary", p, b.unitarity_residual, 1e-8));
                out.push_back(at_most(c, "rho_period", p, b.period_residual, 1e-8));
                out.push_back(at_most(c, "rho_roots_of_unity", p, b.max_snap_distance, 1e-6));
            }
        }
        return out;
    }
    case 6: {
        Stopwatch sw;
        const int N = opt_.oracle_N;
        FiberOracle& o = oracle(N);
        const int n_max = std::min(6, budget_strands(N));
        for (int k = 1; k <= 2; ++k)
            for (int s = 0; s < 2 * k; ++s) {
                double dev = 0, imag = 0;
                const double mu_re = RecCoeffParams::from_root(k, s).mu_re;
                const auto rec = gram_recursive(k, mu_re, o.ctx().q(), n_max);
                for (int n = k; n <= n_max; ++n) {
                    const OracleGram g = o.gram_direct(k, s, n);
                    dev = std::max(dev, (g.entries - rec[n - k].entries).cwiseAbs().maxCoeff());
                    imag = std::max(imag, g.max_imag);
                }
                const Params p{{"N", str(N)}, {"k", str(k)}, {"mu_index", str(s)}, {"n_max", str(n_max)}};
                out.push_back(at_most(c, "gram_oracle_deviation", p, dev, 1e-8));
                out.push_back(at_most(c, "gram_oracle_imaginary", p, imag, 1e-8));
            }
        if (opt_.include_timing) out.push_back(at_most(c, "gram_oracle_runtime_seconds", {}, sw.seconds(), 120.0));
        return out;
    }
    case 7: {
        const int N = opt_.oracle_N;
        FiberOracle& o = oracle(N);
        const int n_max = std::min(6, budget_strands(N));
        for (int k = 1; k <= 2; ++k)
            for (int s = 0; s < 2 * k; ++s) {
                double worst = 0;
                for (int p = 0; p + k <= n_max; ++p)
                    for (int q = 0; p + k + q <= n_max; ++q)
                        if (p + q > 0) worst = std::max(worst, o.check_general_rec(k, s, p, q));
                out.push_back(at_most(c, "trace_step_residual",
                                      {{"N", str(N)}, {"k", str(k)}, {"mu_index", str(s)}, {"n_max", str(n_max)}}, worst,
                                      1e-9));
            }
        o.clear_embeddings();
        return out;
    }
    case 8: {
        Stopwatch sw;
        const double q = q_from_N(7);
        for (int k = 1; k <= 4; ++k)
            for (int s = 0; s < 2 * k; ++s) {
                const RieszMargin r = riesz_margin(k, RecCoeffParams::from_root(k, s).mu_re, q, 40);
                const Params p{{"N", "7"}, {"k", str(k)}, {"mu_index", str(s)}, {"n_max", "40"},
                               {"sup_cond", str(r.sup_cond)}};
                out.push_back(below(c, "riesz_margin", p, r.margin, 1.0));
                out.push_back(CaseResult{c, "riesz_sup_cond_finite", p, r.sup_cond,
                                         std::numeric_limits<double>::max(), std::isfinite(r.sup_cond)});
            }
        if (opt_.include_timing) out.push_back(at_most(c, "riesz_runtime_seconds", {}, sw.seconds(), 30.0));
        return out;
    }
    case 9: {
        const std::vector<int> Ns{3, 7};
        constexpr int kInstances = 500;
        double worst = 0;
        for (int t = 0; t < kInstances; ++t) {
            const int N = Ns[rng() % Ns.size()];
            const int k = uniform_int(rng, 1, 3);
            const int s = uniform_int(rng, 0, 2 * k - 1);
            const int m = uniform_int(rng, 0, 3);
            const int l = uniform_int(rng, m, 6);
            const int p = uniform_int(rng, 0, 8);
            const CoeffGrid z = CoeffGrid::random(RecCoeffParams::from_root(k, s), q_from_N(N), 12, rng);
            worst = std::max(worst, verify_iterated_move(z, m, l, p) / z.norm());
        }
        out.push_back(at_most(c, "iterated_move_relative", {{"instances", str(kInstances)}}, worst, 1e-9));

        // The closed commutator formula against the difference of the two products.
        constexpr int kGrids = 100;
        const std::vector<int> Ms{3, 5, 7};
        double comm = 0;
        for (int t = 0; t < kGrids; ++t) {
            const int N = Ms[rng() % Ms.size()];
            const int k = uniform_int(rng, 1, 4);
            const int s = uniform_int(rng, 0, 2 * k - 1);
            const CoeffGrid z = CoeffGrid::random(RecCoeffParams::from_root(k, s), q_from_N(N), 12, rng);
            CoeffGrid diff = left_mult_chi(z);
            const CoeffGrid right = right_mult_chi(z);
            for (const auto& [ij, v] : right.support()) diff.add(ij.first, ij.second, -v);
            comm = std::max(comm, max_abs_difference(diff, commutator(z)));
        }
        out.push_back(at_most(c, "commutator_vs_products", {{"grids", str(kGrids)}}, comm, 1e-12));
        return out;
    }
    case 10: {
        const double q = q_from_N(7);
        constexpr double R = 4.0;
        constexpr int kPMax = 60;
        for (int m = 0; m <= 2; ++m) {
            double growth = 0, K = 0;
            bool stable = true;
            for (int k = 1; k <= 3; ++k)
                for (int s = 0; s <= k; ++s) {
                    const PhiBound b = phi_bound_check(m, RecCoeffParams::from_root(k, s), q, kPMax, R, kDefaultLSpan,
                                                       opt_.jobs);
                    growth = std::max(growth, b.window_growth);
                    K = std::max(K, b.K_empirical);
                    stable = stable && b.stable;
                }
            const Params p{{"N", "7"}, {"m", str(m)}, {"R", str(R)}, {"p_max", str(kPMax)}, {"K_empirical", str(K)}};
            out.push_back(CaseResult{c, "phi_bound_window_growth", p, growth, kStabilityTolerance,
                                     stable && std::isfinite(K)});
        }
        return out;
    }
    case 11: {
        const double q = q_from_N(7);
        const double R = 4.0;
        constexpr int kInstances = 200, kPMax = 20, kExtent = 10;
        std::map<std::pair<int, int>, LocalizationConstants> consts;
        double worst = 0, tightest = std::numeric_limits<double>::infinity();
        for (int t = 0; t < kInstances; ++t) {
            const int k = uniform_int(rng, 1, 3);
            const int s = uniform_int(rng, 0, 2 * k - 1);
            const int m = uniform_int(rng, 1, 2);
            const RecCoeffParams params = RecCoeffParams::from_root(k, s);
            auto it = consts.find({k, s});
            if (it == consts.end())
                it = consts.emplace(std::make_pair(k, s), localization_constants(params, q, 2, 60, R)).first;
            const CoeffGrid z = CoeffGrid::random(params, q, kExtent, rng);
            for (int p = 1; p <= kPMax; ++p) {
                const LocalizationResult r = support_localization_check(z, m, p, it->second);
                worst = std::max(worst, r.lhs / r.rhs);
                if (r.lhs > 0) tightest = std::min(tightest, r.rhs / r.lhs);
            }
        }
        out.push_back(at_most(c, "support_localization_lhs_over_rhs",
                              {{"N", "7"}, {"instances", str(kInstances)}, {"p_max", str(kPMax)},
                               {"min_rhs_over_lhs", str(tightest)}},
                              worst, 1.0));
        return out;
    }
    case 12: {
        FiberOracle& o = oracle(opt_.oracle_N);
        const int bmax = std::min(4, budget_strands(opt_.oracle_N) - 2);
        double ratio = 0;
        std::string devs;
        double prev = o.pi_abc(1, 1, 1).deviation;
        devs = str(prev);
        for (int b = 2; b <= bmax; ++b) {
            const double d = o.pi_abc(1, b, 1).deviation;
            ratio = std::max(ratio, d / prev);
            devs += " " + str(d);
            prev = d;
        }
        out.push_back(below(c, "pi_deviation_ratio", {{"N", str(opt_.oracle_N)}, {"b_max", str(bmax)}, {"deviations", devs}},
                            ratio, 1.0));

        const double q5 = q_from_N(5);
        double slope = -std::numeric_limits<double>::infinity();
        for (int k = 1; k <= 3; ++k)
            for (int s = 0; s <= k; ++s) {
                const auto blocks = gram_recursive(k, RecCoeffParams::from_root(k, s).mu_re, q5, 30);
                slope = std::max(slope, decay_profile(blocks.back()).log_slope);
            }
        out.push_back(below(c, "gram_band_log_slope", {{"N", "5"}, {"k_max", "3"}, {"n", "30"}}, slope, 0.0));

        const std::vector<double> prof = probe_profile(o.orthogonality_probe({1, 1, 4, opt_.seed}));
        double rise = 0;
        std::string vals = prof.empty() ? "" : str(prof[0]);
        for (std::size_t i = 1; i < prof.size(); ++i) {
            rise = std::max(rise, prof[i] - prof[i - 1]);
            vals += " " + str(prof[i]);
        }
        out.push_back(at_most(c, "probe_nonincreasing",
                              {{"N", str(opt_.oracle_N)}, {"k", "1"}, {"n", "1"}, {"max_sum", "4"}, {"profile", vals}},
                              rise, 0.0));
        return out;
    }
    case 13: {
        out.push_back(at_most(c, "alpha_at_0.15", {{"q", "0.15"}}, std::abs(alpha_of_q(0.15) - 0.25), 0.02));
        const double q = 1e-6;
        const double ratio = std::pow(q, alpha_of_q(q)) / std::cbrt(q);
        const double target = std::exp(2.0 * std::numbers::ln2 / 9.0);
        out.push_back(at_most(c, "alpha_small_q_constant", {{"q", "1e-06"}}, std::abs(ratio / target - 1.0), 0.01));
        double rise = -std::numeric_limits<double>::infinity();
        for (int i = 1; i < 99; ++i) rise = std::max(rise, alpha_of_q((i + 1) / 100.0) - alpha_of_q(i / 100.0));
        out.push_back(below(c, "alpha_decreasing", {{"grid", "0.01..0.99"}}, rise, 0.0));
        return out;
    }
    default:
        throw std::out_of_range("no acceptance criterion " + std::to_string(criterion));
    }
}

} // namespace tllab
