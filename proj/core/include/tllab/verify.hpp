#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace tllab {

class FiberOracle;

// One checked identity. Serialization lives in the tools.
struct CaseResult {
    int criterion = 0;
    std::string name;
    std::vector<std::pair<std::string, std::string>> params;
    double residual = 0.0;
    double tol = 0.0;
    bool pass = false;
};

struct VerifyOptions {
    std::uint64_t seed = 1;
    // Fiber dimension for the oracle-backed checks that run at a single N
    // (functoriality, Gram vs oracle, trace step, oracle probes).
    int oracle_N = 3;
    int jobs = 1;
    // Wall-clock budget checks make reports run-dependent, so they are opt-in.
    bool include_timing = false;
};

inline constexpr int kCriteriaCount = 13;

std::string criterion_title(int criterion);

// Suites group criteria: all, jw, oracle, gram, commutator, probes, alpha.
const std::vector<std::string>& suite_names();
// Throws std::invalid_argument for an unknown suite.
std::vector<int> suite_criteria(const std::string& suite);

// Runs criteria against shared oracle caches. Each criterion draws from its own
// generator seeded by (seed, criterion), so results do not depend on run order.
// BudgetExceeded and RankAmbiguity propagate to the caller.
class VerifySession {
public:
    explicit VerifySession(VerifyOptions opt);
    ~VerifySession();

    const VerifyOptions& options() const { return opt_; }
    std::vector<CaseResult> run(int criterion);
    std::vector<CaseResult> run_suite(const std::string& suite);

private:
    FiberOracle& oracle(int N);

    VerifyOptions opt_;
    std::map<int, std::unique_ptr<FiberOracle>> oracles_;
};

} // namespace tllab
