#include "tllab/jones_wenzl.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>

namespace tllab {

using tl::Element;

namespace {

void check_n(int n, int lo) {
    if (n < lo || n > kMaxJW)
        throw std::out_of_range("Jones-Wenzl index " + std::to_string(n) + " outside [" + std::to_string(lo) + ", " +
                                std::to_string(kMaxJW) + "]");
}

Element tensor_all(std::initializer_list<Element> parts) {
    Element out = tl::id(0);
    for (const auto& p : parts) out = tl::tensor(out, p);
    return out;
}

double sign_pow(int e) { return (e % 2 == 0) ? 1.0 : -1.0; }

Element wenzl_step(const Element& prev, int n, const ScalarContext& ctx) {
    const Element base = tl::tensor(prev, tl::id(1));
    Element out = base;
    for (int l = 1; l <= n - 1; ++l) {
        const double c = sign_pow(n - l) * qdim(l - 1, ctx) / qdim(n - 1, ctx);
        const Element shape = tensor_all({tl::id(l - 1), tl::cup(), tl::id(n - l - 1), tl::cap()});
        out += c * tl::compose(shape, base, ctx);
    }
    return out;
}

} // namespace

const Element& JWCache::get(int n) {
    check_n(n, 0);
    {
        std::shared_lock lock(mu_);
        if (auto it = computed_.find(n); it != computed_.end()) return *it->second;
    }
    // Build missing levels bottom-up; each level is published once.
    const Element* prev = nullptr;
    for (int m = 0; m <= n; ++m) {
        {
            std::shared_lock lock(mu_);
            if (auto it = computed_.find(m); it != computed_.end()) {
                prev = it->second.get();
                continue;
            }
        }
        auto built = std::make_unique<const Element>(m <= 1 ? tl::id(m) : wenzl_step(*prev, m, ctx_));
        std::unique_lock lock(mu_);
        auto [it, inserted] = computed_.emplace(m, std::move(built));
        prev = it->second.get();
    }
    return *prev;
}

const Element& jw(int n, const ScalarContext& ctx) {
    check_n(n, 0);
    static std::mutex registry_mu;
    static std::map<std::pair<std::uint64_t, double>, std::unique_ptr<JWCache>> registry;
    JWCache* cache;
    {
        std::lock_guard lock(registry_mu);
        auto key = std::make_pair(std::bit_cast<std::uint64_t>(ctx.q()), ctx.delta());
        auto& slot = registry[key];
        if (!slot) slot = std::make_unique<JWCache>(ctx);
        cache = slot.get();
    }
    return cache->get(n);
}

Element jw_bilateral(int n, const ScalarContext& ctx) {
    check_n(n, 3);
    const Element M = tensor_all({tl::id(1), jw(n - 2, ctx), tl::id(1)});
    const Element e = tl::cupcap();
    auto sandwich = [&](const Element& D) { return tl::compose(M, tl::compose(D, M, ctx), ctx); };

    const double dn1 = qdim(n - 1, ctx), dn2 = qdim(n - 2, ctx), dn3 = qdim(n - 3, ctx), d1 = qdim(1, ctx);
    const double s = sign_pow(n - 1);

    Element out = M;
    out += (-dn2 / dn1) * sandwich(tensor_all({e, tl::id(n - 2)}));
    out += (-dn2 / dn1) * sandwich(tensor_all({tl::id(n - 2), e}));
    out += (s / dn1) * sandwich(tensor_all({tl::cup(), tl::id(n - 2), tl::cap()}));
    out += (s / dn1) * sandwich(tensor_all({tl::cap(), tl::id(n - 2), tl::cup()}));
    if (n >= 4)
        out += ((d1 + dn3 * dn2) / (dn1 * dn2)) * sandwich(tensor_all({e, tl::id(n - 4), e}));
    return out;
}

double jw_partial_trace_check(int n, const ScalarContext& ctx, int b) {
    check_n(n, 1);
    if (b < 1 || b > n) throw std::out_of_range("jw_partial_trace_check: b outside [1, n]");
    const Element lhs = tl::partial_trace_right(jw(n, ctx), b, ctx);
    const Element rhs = (qdim(n, ctx) / qdim(n - b, ctx)) * jw(n - b, ctx);
    return tl::max_coeff_distance(lhs, rhs);
}

double jw_annihilation_check(int n, const ScalarContext& ctx) {
    check_n(n, 2);
    const Element& P = jw(n, ctx);
    double worst = 0.0;
    for (int i = 0; i + 2 <= n; ++i) {
        const Element capped = tl::compose(tensor_all({tl::id(i), tl::cap(), tl::id(n - i - 2)}), P, ctx);
        const Element cupped = tl::compose(P, tensor_all({tl::id(i), tl::cup(), tl::id(n - i - 2)}), ctx);
        worst = std::max({worst, capped.max_abs_coeff(), cupped.max_abs_coeff()});
    }
    return worst;
}

} // namespace tllab
