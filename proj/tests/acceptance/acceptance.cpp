// One PASS/FAIL line per acceptance criterion. Failing cases are listed under
// their criterion; the exit status is nonzero when any criterion fails.
#include <chrono>
#include <cstdio>
#include <exception>
#include <string>

#include "tllab/verify.hpp"

int main() {
    using clock = std::chrono::steady_clock;
    tllab::VerifyOptions opt;
    opt.include_timing = true;
    tllab::VerifySession session(opt);

    const auto start = clock::now();
    int failed = 0;
    for (int c = 1; c <= tllab::kCriteriaCount; ++c) {
        const auto t0 = clock::now();
        bool pass = true;
        std::string detail;
        std::size_t cases = 0;
        try {
            const auto results = session.run(c);
            cases = results.size();
            pass = !results.empty();
            for (const auto& r : results) {
                if (r.pass) continue;
                pass = false;
                detail += "    failed " + r.name;
                for (const auto& [k, v] : r.params) detail += " " + k + "=" + v;
                char buf[96];
                std::snprintf(buf, sizeof buf, " residual=%.3e tol=%.3e\n", r.residual, r.tol);
                detail += buf;
            }
        } catch (const std::exception& e) {
            pass = false;
            detail = std::string("    error: ") + e.what() + "\n";
        }
        const double secs = std::chrono::duration<double>(clock::now() - t0).count();
        std::printf("%s criterion %d: %s (%zu cases, %.1f s)\n", pass ? "PASS" : "FAIL", c,
                    tllab::criterion_title(c).c_str(), cases, secs);
        std::fputs(detail.c_str(), stdout);
        std::fflush(stdout);
        if (!pass) ++failed;
    }
    const double total = std::chrono::duration<double>(clock::now() - start).count();
    const bool in_budget = total < 300.0;
    std::printf("%s total runtime %.1f s (budget 300 s)\n", in_budget ? "PASS" : "FAIL", total);
    if (!in_budget) ++failed;
    std::printf("%d of %d checks failed\n", failed, tllab::kCriteriaCount + 1);
    return failed == 0 ? 0 : 1;
}
