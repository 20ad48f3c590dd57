#pragma once

#include <map>
#include <memory>
#include <shared_mutex>

#include "tllab/qnumerics.hpp"
#include "tllab/tl_core.hpp"

namespace tllab {

inline constexpr int kMaxJW = 16;

// Append-only store of P_1..P_n for one value of q. Readers of entries that
// already exist take a shared lock only.
class JWCache {
public:
    explicit JWCache(ScalarContext ctx) : ctx_(ctx) {}

    const tl::Element& get(int n);
    const ScalarContext& context() const { return ctx_; }

private:
    ScalarContext ctx_;
    std::shared_mutex mu_;
    std::map<int, std::unique_ptr<const tl::Element>> computed_;
};

// P_n from the one-sided Wenzl recursion, cached per (n, q).
const tl::Element& jw(int n, const ScalarContext& ctx);

// P_n from the two-sided recursion around id (x) P_{n-2} (x) id.
tl::Element jw_bilateral(int n, const ScalarContext& ctx);

// Max coefficient of (id (x) Tr_b)(P_n) - (d_n/d_{n-b}) P_{n-b}.
double jw_partial_trace_check(int n, const ScalarContext& ctx, int b = 1);

// Largest coefficient left after capping or cupping any adjacent pair of P_n.
double jw_annihilation_check(int n, const ScalarContext& ctx);

} // namespace tllab
