// tllab: experiments and verification suites for the Temperley-Lieb lab.
//
// Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 oracle budget
// exceeded, 4 numerical rank ambiguity.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "tllab/commutator_model.hpp"
#include "tllab/errors.hpp"
#include "tllab/fiber_oracle.hpp"
#include "tllab/gram_recursion.hpp"
#include "tllab/jones_wenzl.hpp"
#include "tllab/qnumerics.hpp"
#include "tllab/tl_core.hpp"
#include "tllab/verify.hpp"

namespace {

using nlohmann::json;
using namespace tllab;

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kBudget = 3, kRank = 4 };

struct Common {
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string format;  // empty: the subcommand's default
    std::string path;
};

struct Scalar {
    std::optional<int> N;
    std::optional<double> q;

    ScalarContext context() const {
        if (N.has_value() == q.has_value()) throw std::invalid_argument("give exactly one of --N and --q");
        if (N) return ScalarContext::from_N(*N);
        return ScalarContext::from_q(*q);
    }
};

// Rows of named columns, rendered as CSV (summary on stderr) or as one JSON document.
struct Report {
    Report(std::string cmd, std::vector<std::string> cols) : command(std::move(cmd)), header(std::move(cols)) {}

    std::string command;
    std::vector<std::string> header;
    std::vector<std::vector<json>> rows;
    json params = json::object();
    json summary = json::object();
};

std::string cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    return v.dump();
}

// JSON has no infinities; they are written as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << text;
}

void write_report(const Report& r, const Common& c, const std::string& default_format) {
    const std::string format = c.format.empty() ? default_format : c.format;
    std::ostringstream os;
    if (format == "csv") {
        for (std::size_t i = 0; i < r.header.size(); ++i) os << (i ? "," : "") << r.header[i];
        os << '\n';
        for (const auto& row : r.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell(row[i]);
            os << '\n';
        }
        for (const auto& [k, v] : r.summary.items()) std::cerr << "# " << k << " = " << cell(v) << '\n';
    } else {
        json doc{{"command", r.command}, {"params", r.params}, {"summary", r.summary}};
        json rows = json::array();
        for (const auto& row : r.rows) {
            json obj = json::object();
            for (std::size_t i = 0; i < row.size(); ++i) obj[r.header[i]] = row[i];
            rows.push_back(std::move(obj));
        }
        doc["rows"] = std::move(rows);
        os << doc.dump(2) << '\n';
    }
    emit(os.str(), c.path);
}

json n_or_null(const std::optional<int>& N) { return N ? json(*N) : json(nullptr); }

void add_common(CLI::App* app, Common& c) {
    app->add_option("--seed", c.seed, "Seed of the single random generator")->capture_default_str();
    app->add_option("--jobs", c.jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--out", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("-o,--output", c.path, "Output file (default stdout)");
}

void add_scalar(CLI::App* app, Scalar& s) {
    auto* n = app->add_option("--N", s.N, "Fiber dimension, q + 1/q = N")->check(CLI::Range(3, 1 << 20));
    auto* q = app->add_option("--q", s.q, "Deformation parameter in (0,1)");
    n->excludes(q);
}

int check_mu_index(int k, int s) {
    if (k < 1) throw std::invalid_argument("--k must be at least 1");
    if (s < 0 || s >= 2 * k) throw std::invalid_argument("--mu-index must lie in [0, 2k)");
    return s;
}

// ---------------------------------------------------------------------------

struct JwArgs {
    Scalar scalar;
    int n_max = 10;
};

Report run_jw(const JwArgs& a) {
    const ScalarContext ctx = a.scalar.context();
    if (a.n_max < 1 || a.n_max > kMaxJW)
        throw std::invalid_argument("--n-max must lie in [1, " + std::to_string(kMaxJW) + "]");
    Report r{"jw",
             {"N", "q", "n", "terms", "idempotence", "self_adjoint", "annihilation", "markov_trace_rel", "bilateral",
              "partial_trace"}};
    r.params = {{"N", n_or_null(a.scalar.N)}, {"q", ctx.q()}, {"n_max", a.n_max}};
    for (int n = 1; n <= a.n_max; ++n) {
        const tl::Element& P = jw(n, ctx);
        const double dn = qdim(n, ctx);
        r.rows.push_back({n_or_null(a.scalar.N), ctx.q(), n, P.size(),
                          tl::max_coeff_distance(tl::compose(P, P, ctx), P),
                          tl::max_coeff_distance(tl::adjoint(P), P),
                          n >= 2 ? json(jw_annihilation_check(n, ctx)) : json(nullptr),
                          std::abs(tl::markov_trace(P, ctx) - dn) / dn,
                          n >= 3 ? json(tl::max_coeff_distance(jw_bilateral(n, ctx), P)) : json(nullptr),
                          jw_partial_trace_check(n, ctx, 1) / (dn / qdim(n - 1, ctx))});
    }
    return r;
}

struct OracleArgs {
    int N = 3;
    int n_max = 0;  // 0: as many strands as the budget allows
    int ccirc = 0;
};

Report run_oracle(const OracleArgs& a) {
    int n_max = a.n_max;
    if (n_max == 0)
        while (ipow(a.N, n_max + 1) <= kOracleBudget) ++n_max;
    checked_side(a.N, n_max);
    if (a.ccirc > 0) checked_side(a.N, 2 * a.ccirc);
    FiberOracle o(a.N);
    Report r{"oracle", {"N", "n", "side", "qdim", "rank", "hermitian_residual", "idempotent_residual"}};
    r.params = {{"N", a.N}, {"n_max", n_max}, {"ccirc", a.ccirc}};
    for (int n = 1; n <= n_max; ++n) {
        const ProjectionCheck pc = check_projection(realize(jw(n, o.ctx()), a.N).entries);
        r.rows.push_back({a.N, n, ipow(a.N, n), std::lround(qdim(n, o.ctx())), pc.rank, pc.hermitian_residual,
                          pc.idempotent_residual});
    }
    if (a.ccirc > 0) {
        const CcircBasis& b = o.ccirc_basis(a.ccirc);
        r.summary = {{"ccirc_n", a.ccirc},
                     {"ccirc_dim", b.vectors.size()},
                     {"ccirc_expected_dim", b.expected_dim},
                     {"rho_unitarity_residual", b.unitarity_residual},
                     {"rho_period_residual", b.period_residual},
                     {"rho_max_snap_distance", b.max_snap_distance},
                     {"kernel_gap", b.kernel_gap}};
    }
    return r;
}

struct GramArgs {
    Scalar scalar;
    int k = 1;
    int mu_index = 0;
    int n_max = 40;
};

Report run_gram(const GramArgs& a) {
    const ScalarContext ctx = a.scalar.context();
    check_mu_index(a.k, a.mu_index);
    const double mu_re = RecCoeffParams::from_root(a.k, a.mu_index).mu_re;
    Report r{"gram", {"N", "q", "k", "mu_re", "n", "norm", "inv_norm", "cond", "margin"}};
    r.params = {{"N", n_or_null(a.scalar.N)}, {"q", ctx.q()}, {"k", a.k}, {"mu_index", a.mu_index}, {"n_max", a.n_max}};
    for (const GramBlock& g : gram_recursive(a.k, mu_re, ctx.q(), a.n_max)) {
        const GramNorms gn = norms(g);
        r.rows.push_back({n_or_null(a.scalar.N), ctx.q(), a.k, mu_re, g.n, gn.norm, num(gn.inv_norm), num(gn.cond),
                          diagonal_dominance_margin(g)});
    }
    return r;
}

struct SweepArgs {
    int N_min = 3;
    int N_max = 20;
    int k_max = 4;
    int n_max = 40;
};

Report run_sweep(const SweepArgs& a, const Common& c) {
    const N0Report rep = estimate_N0(a.k_max, a.n_max, a.N_min, a.N_max, c.jobs);
    Report r{"sweep", {"N", "q", "margin", "sup_norm", "sup_inv_norm", "pass"}};
    r.params = {{"N_min", a.N_min}, {"N_max", a.N_max}, {"k_max", a.k_max}, {"n_max", a.n_max}};
    for (const N0Row& row : rep.rows)
        r.rows.push_back({row.N, row.q, row.margin, row.sup_norm, num(row.sup_inv_norm), row.pass});
    r.summary = {{"smallest_N", rep.smallest_N ? json(*rep.smallest_N) : json(nullptr)},
                 {"monotone", rep.monotone},
                 {"monotonicity_violations", rep.monotonicity_violations}};
    return r;
}

struct CoeffsArgs {
    Scalar scalar;
    int k = 1;
    int mu_index = 0;
    int m = 0;
    int l = 0;
    int p_max = 40;
    std::optional<double> R;
    int l_span = kDefaultLSpan;
};

Report run_coeffs(const CoeffsArgs& a, const Common& c) {
    const ScalarContext ctx = a.scalar.context();
    check_mu_index(a.k, a.mu_index);
    if (a.m < 0 || a.l < a.m) throw std::invalid_argument("need --l >= --m >= 0");
    if (a.p_max < 1) throw std::invalid_argument("--p-max must be at least 1");
    const RecCoeffParams params = RecCoeffParams::from_root(a.k, a.mu_index);
    const double R = a.R ? *a.R : default_R(ctx.q());
    if (!admissible_R(R, ctx.q()))
        throw std::invalid_argument("--R must lie in (3.4, 0.995/(2q^2)) = (3.4, " +
                                    std::to_string(0.995 / (2 * ctx.q() * ctx.q())) + ")");
    const PhiTable t = phi_table(a.m, a.l, a.p_max, params, ctx.q());
    Report r{"coeffs", {"m", "l", "p", "i", "phi_re", "phi_im"}};
    r.params = {{"N", n_or_null(a.scalar.N)}, {"q", ctx.q()}, {"k", a.k}, {"mu_index", a.mu_index}, {"m", a.m},
                {"l", a.l}, {"p_max", a.p_max}, {"R", R}, {"l_span", a.l_span}};
    for (int p = 0; p <= a.p_max; ++p)
        for (int i = -p; i <= a.m + p; ++i) r.rows.push_back({a.m, a.l, p, i, t.at(p, i), 0.0});
    const PhiBound b = phi_bound_check(a.m, params, ctx.q(), a.p_max, R, a.l_span, c.jobs);
    r.summary = {{"K_empirical", num(b.K_empirical)}, {"stable", b.stable}, {"window_growth", b.window_growth}};
    return r;
}

struct ProbeArgs {
    int N = 3;
    int k = 1;
    int n = 1;
    int max_sum = 4;
};

Report run_probe(const ProbeArgs& a, const Common& c) {
    if (a.k < 1 || a.n < 1 || a.max_sum < 0) throw std::invalid_argument("need --k, --n >= 1 and --max-sum >= 0");
    // The widest convolution acts on (k + max_sum) + n strands on each side.
    checked_side(a.N, a.k + a.max_sum + a.n);
    FiberOracle o(a.N);
    const auto rows = o.orthogonality_probe({a.k, a.n, a.max_sum, c.seed});
    Report r{"probe-orth", {"k", "kp", "n", "i", "j", "ip", "jp", "abs_inner"}};
    r.params = {{"N", a.N}, {"k", a.k}, {"n", a.n}, {"max_sum", a.max_sum}, {"seed", c.seed}};
    for (const ProbeRow& p : rows) r.rows.push_back({p.k, p.kp, p.n, p.i, p.j, p.ip, p.jp, p.abs_inner});
    r.summary = {{"profile_by_min_index", probe_profile(rows)}};
    return r;
}

struct VerifyArgs {
    std::string suite = "all";
    int N = 3;
    bool timing = false;
};

int run_verify(const VerifyArgs& a, const Common& c) {
    suite_criteria(a.suite);  // validates the name before any work
    VerifySession session({c.seed, a.N, c.jobs, a.timing});
    const std::vector<CaseResult> cases = session.run_suite(a.suite);
    bool all = true;
    std::ostringstream os;
    const std::string format = c.format.empty() ? "json" : c.format;
    if (format == "json") {
        json arr = json::array();
        for (const CaseResult& cr : cases) {
            json params = json::object();
            params["criterion"] = cr.criterion;
            for (const auto& [k, v] : cr.params) params[k] = v;
            arr.push_back({{"name", cr.name}, {"params", params}, {"residual", num(cr.residual)}, {"tol", num(cr.tol)},
                           {"pass", cr.pass}});
            all = all && cr.pass;
        }
        os << json{{"suite", a.suite}, {"cases", arr}}.dump(2) << '\n';
    } else {
        os << "criterion,name,residual,tol,pass\n";
        for (const CaseResult& cr : cases) {
            os << cr.criterion << ',' << cr.name << ',' << cell(cr.residual) << ',' << cell(cr.tol) << ','
               << (cr.pass ? "true" : "false") << '\n';
            all = all && cr.pass;
        }
    }
    emit(os.str(), c.path);
    if (!all) std::cerr << "verify: at least one case failed\n";
    return all ? kOk : kVerifyFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temperley-Lieb diagrams, Jones-Wenzl projections, Gram recursion and commutator model"};
    app.require_subcommand(1);
    Common common;

    JwArgs jw_args;
    auto* jw_cmd = app.add_subcommand("jw", "Jones-Wenzl identity residuals per n");
    add_scalar(jw_cmd, jw_args.scalar);
    jw_cmd->add_option("--n-max", jw_args.n_max)->capture_default_str();
    add_common(jw_cmd, common);

    OracleArgs oracle_args;
    auto* oracle_cmd = app.add_subcommand("oracle", "Ranks of realized projections on (C^N)^n");
    oracle_cmd->add_option("--N", oracle_args.N)->check(CLI::Range(3, 1 << 20))->capture_default_str();
    oracle_cmd->add_option("--n-max", oracle_args.n_max, "0 uses the whole budget")->capture_default_str();
    oracle_cmd->add_option("--ccirc", oracle_args.ccirc, "Also build the doubly traceless basis on n strands");
    add_common(oracle_cmd, common);

    GramArgs gram_args;
    auto* gram_cmd = app.add_subcommand("gram", "Gram blocks from the recursion");
    add_scalar(gram_cmd, gram_args.scalar);
    gram_cmd->add_option("--k", gram_args.k)->capture_default_str();
    gram_cmd->add_option("--mu-index", gram_args.mu_index, "s in mu = exp(i pi s / k)")->capture_default_str();
    gram_cmd->add_option("--n-max", gram_args.n_max)->capture_default_str();
    add_common(gram_cmd, common);

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "Riesz margin per N and the smallest passing N");
    sweep_cmd->add_option("--N-min", sweep_args.N_min)->capture_default_str();
    sweep_cmd->add_option("--N-max", sweep_args.N_max)->capture_default_str();
    sweep_cmd->add_option("--k-max", sweep_args.k_max)->capture_default_str();
    sweep_cmd->add_option("--n-max", sweep_args.n_max)->capture_default_str();
    add_common(sweep_cmd, common);

    CoeffsArgs coeffs_args;
    auto* coeffs_cmd = app.add_subcommand("coeffs", "phi coefficients of the iterated move and the phi bound");
    add_scalar(coeffs_cmd, coeffs_args.scalar);
    coeffs_cmd->add_option("--k", coeffs_args.k)->capture_default_str();
    coeffs_cmd->add_option("--mu-index", coeffs_args.mu_index)->capture_default_str();
    coeffs_cmd->add_option("--m", coeffs_args.m)->capture_default_str();
    coeffs_cmd->add_option("--l", coeffs_args.l)->capture_default_str();
    coeffs_cmd->add_option("--p-max", coeffs_args.p_max)->capture_default_str();
    coeffs_cmd->add_option("--R", coeffs_args.R, "Default min(4, 0.9 * 0.995/(2q^2)), kept above 3.4");
    coeffs_cmd->add_option("--l-span", coeffs_args.l_span, "Bound check scans l = m..m+span")->capture_default_str();
    add_common(coeffs_cmd, common);

    ProbeArgs probe_args;
    auto* probe_cmd = app.add_subcommand("probe-orth", "Inner products of convolved vectors on the oracle");
    probe_cmd->add_option("--N", probe_args.N)->check(CLI::Range(3, 1 << 20))->capture_default_str();
    probe_cmd->add_option("--k", probe_args.k)->capture_default_str();
    probe_cmd->add_option("--n", probe_args.n)->capture_default_str();
    probe_cmd->add_option("--max-sum", probe_args.max_sum)->capture_default_str();
    add_common(probe_cmd, common);

    VerifyArgs verify_args;
    auto* verify_cmd = app.add_subcommand("verify", "Acceptance battery; exits 1 when a case fails");
    verify_cmd->add_option("--suite", verify_args.suite)
        ->check(CLI::IsMember(suite_names()))
        ->capture_default_str();
    verify_cmd->add_option("--N", verify_args.N, "Fiber dimension of the single-N oracle checks")
        ->check(CLI::Range(3, 1 << 20))
        ->capture_default_str();
    verify_cmd->add_flag("--timing", verify_args.timing, "Include wall-clock budget cases");
    add_common(verify_cmd, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*jw_cmd) write_report(run_jw(jw_args), common, "csv");
        else if (*oracle_cmd) write_report(run_oracle(oracle_args), common, "csv");
        else if (*gram_cmd) write_report(run_gram(gram_args), common, "csv");
        else if (*sweep_cmd) write_report(run_sweep(sweep_args, common), common, "csv");
        else if (*coeffs_cmd) write_report(run_coeffs(coeffs_args, common), common, "csv");
        else if (*probe_cmd) write_report(run_probe(probe_args, common), common, "csv");
        else if (*verify_cmd) return run_verify(verify_args, common);
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return kBudget;
    } catch (const RankAmbiguity& e) {
        std::cerr << "rank ambiguity: " << e.what() << '\n';
        return kRank;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage: " << e.what() << '\n';
        return kUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "usage: " << e.what() << '\n';
        return kUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "usage: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kVerifyFailed;
    }
    return kOk;
}
