#include "tllab/tl_core.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <stdexcept>

#include "absl/container/flat_hash_map.h"
#include "tllab/errors.hpp"

namespace tllab::tl {

namespace {

constexpr std::uint8_t kUnset = 0xFF;

void check_side(int top, int bot) {
    if (top < 0 || bot < 0) throw std::invalid_argument("diagram: negative arity");
    if (top > kMaxSide || bot > kMaxSide)
        throw std::invalid_argument("diagram: more than " + std::to_string(kMaxSide) + " points on a side");
}

inline int circ_pos(int p, int top, int bot) { return p < top ? p : top + (bot - 1 - (p - top)); }
inline int from_circ(int c, int top, int bot) { return c < top ? c : top + (bot - 1 - (c - top)); }

std::uint64_t encode(const std::uint8_t* partner, int top, int bot) {
    std::uint64_t key = 0;
    const int n = top + bot;
    for (int p = 0; p < n; ++p) {
        const int c = circ_pos(p, top, bot);
        if (circ_pos(partner[p], top, bot) > c) key |= std::uint64_t{1} << c;
    }
    return key;
}

void decode(std::uint64_t key, int top, int bot, std::uint8_t* partner) {
    std::array<int, 2 * kMaxSide> stack{};
    int sp = 0;
    const int n = top + bot;
    for (int c = 0; c < n; ++c) {
        const int p = from_circ(c, top, bot);
        if ((key >> c) & 1U) {
            stack[sp++] = p;
        } else {
            if (sp == 0) throw std::invalid_argument("diagram key is not a balanced word");
            const int o = stack[--sp];
            partner[p] = static_cast<std::uint8_t>(o);
            partner[o] = static_cast<std::uint8_t>(p);
        }
    }
    if (sp != 0) throw std::invalid_argument("diagram key is not a balanced word");
}

// Result of closing some boundary points of a diagram against each other.
struct Glued {
    std::array<std::uint8_t, 2 * kMaxSide> partner;
    int loops;
};

// `glue[p]` is the point that p is joined to by an external strand, or kUnset
// when p stays on the boundary. `outer[p]` maps surviving points to their new index.
Glued glue_closure(const std::uint8_t* partner, int n_points, const std::uint8_t* glue, const std::uint8_t* outer) {
    Glued g{};
    g.partner.fill(kUnset);
    std::array<bool, 4 * kMaxSide> seen{};
    for (int p = 0; p < n_points; ++p) {
        if (glue[p] != kUnset || seen[p]) continue;
        int x = partner[p];
        seen[p] = true;
        while (glue[x] != kUnset) {
            seen[x] = true;
            const int y = glue[x];
            seen[y] = true;
            x = partner[y];
        }
        seen[x] = true;
        g.partner[outer[p]] = outer[x];
        g.partner[outer[x]] = outer[p];
    }
    g.loops = 0;
    for (int p = 0; p < n_points; ++p) {
        if (seen[p]) continue;
        ++g.loops;
        int x = p;
        do {
            seen[x] = true;
            const int y = partner[x];
            seen[y] = true;
            x = glue[y];
        } while (!seen[x]);
    }
    return g;
}

Element partial_trace_impl(const Element& f, int r, const ScalarContext& ctx, bool right) {
    const int n = f.top();
    if (f.bot() != n) throw ArityMismatch("partial trace: element is not square");
    if (r < 0 || r > n) throw std::out_of_range("partial trace: r out of range");
    const int keep = n - r;
    std::array<std::uint8_t, 2 * kMaxSide> glue{}, outer{};
    glue.fill(kUnset);
    outer.fill(kUnset);
    for (int s = 0; s < n; ++s) {
        const bool closed = right ? (s >= keep) : (s < r);
        if (closed) {
            glue[s] = static_cast<std::uint8_t>(n + s);
            glue[n + s] = static_cast<std::uint8_t>(s);
        } else {
            const int t = right ? s : s - r;
            outer[s] = static_cast<std::uint8_t>(t);
            outer[n + s] = static_cast<std::uint8_t>(keep + t);
        }
    }
    std::array<double, 2 * kMaxSide + 1> dpow{};
    dpow[0] = 1.0;
    for (int i = 1; i <= 2 * kMaxSide; ++i) dpow[i] = dpow[i - 1] * ctx.delta();

    std::vector<Element::Term> out;
    out.reserve(f.size());
    std::array<std::uint8_t, 2 * kMaxSide> partner{};
    for (const auto& [key, c] : f.terms()) {
        decode(key, n, n, partner.data());
        const Glued g = glue_closure(partner.data(), 2 * n, glue.data(), outer.data());
        out.emplace_back(encode(g.partner.data(), keep, keep), c * dpow[g.loops]);
    }
    return Element::from_terms(keep, keep, std::move(out));
}

} // namespace

// ---------------------------------------------------------------------------
// Diagram

Diagram Diagram::from_pairs(int top, int bot, const std::vector<std::pair<int, int>>& pairs) {
    check_side(top, bot);
    const int n = top + bot;
    if (n % 2 != 0) throw std::invalid_argument("diagram: odd number of boundary points");
    if (static_cast<int>(pairs.size()) * 2 != n) throw std::invalid_argument("diagram: matching is not perfect");
    std::vector<std::uint8_t> partner(n, kUnset);
    for (auto [a, b] : pairs) {
        if (a < 0 || b < 0 || a >= n || b >= n || a == b) throw std::invalid_argument("diagram: bad pair");
        if (partner[a] != kUnset || partner[b] != kUnset) throw std::invalid_argument("diagram: point used twice");
        partner[a] = static_cast<std::uint8_t>(b);
        partner[b] = static_cast<std::uint8_t>(a);
    }
    Diagram d(top, bot, std::move(partner));
    // Crossing matchings do not survive the round trip through the Dyck word.
    std::vector<std::uint8_t> check(n);
    decode(d.key(), top, bot, check.data());
    if (check != d.partner_) throw std::invalid_argument("diagram: matching has crossings");
    return d;
}

Diagram Diagram::from_key(int top, int bot, std::uint64_t key) {
    check_side(top, bot);
    if ((top + bot) % 2 != 0) throw std::invalid_argument("diagram: odd number of boundary points");
    std::vector<std::uint8_t> partner(top + bot);
    decode(key, top, bot, partner.data());
    return Diagram(top, bot, std::move(partner));
}

Diagram Diagram::identity(int n) {
    check_side(n, n);
    std::vector<std::uint8_t> partner(2 * n);
    for (int i = 0; i < n; ++i) {
        partner[i] = static_cast<std::uint8_t>(n + i);
        partner[n + i] = static_cast<std::uint8_t>(i);
    }
    return Diagram(n, n, std::move(partner));
}

Diagram Diagram::cup() { return Diagram(0, 2, {1, 0}); }
Diagram Diagram::cap() { return Diagram(2, 0, {1, 0}); }

std::uint64_t Diagram::key() const { return encode(partner_.data(), top_, bot_); }

std::vector<std::pair<int, int>> Diagram::pairs() const {
    std::vector<std::pair<int, int>> out;
    for (int p = 0; p < points(); ++p)
        if (partner_[p] > p) out.emplace_back(p, partner_[p]);
    return out;
}

std::string Diagram::to_string() const {
    std::ostringstream os;
    os << '[';
    bool first = true;
    for (auto [a, b] : pairs()) {
        if (!first) os << ',';
        os << '(' << a << ',' << b << ')';
        first = false;
    }
    os << ']';
    return os.str();
}

Diagram Diagram::adjoint() const {
    std::vector<std::uint8_t> partner(points());
    // Old top i becomes new bottom i and vice versa.
    auto flip = [&](int p) { return p < top_ ? bot_ + p : p - top_; };
    for (int p = 0; p < points(); ++p) partner[flip(p)] = static_cast<std::uint8_t>(flip(partner_[p]));
    return Diagram(bot_, top_, std::move(partner));
}

// ---------------------------------------------------------------------------
// Element

Element::Element(int top, int bot) : top_(top), bot_(bot) { check_side(top, bot); }

Element::Element(const Diagram& d, cplx c) : top_(d.top()), bot_(d.bot()) {
    if (c != cplx{}) terms_.emplace_back(d.key(), c);
}

Element Element::from_terms(int top, int bot, std::vector<Term> terms) {
    Element e(top, bot);
    std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
    for (auto& t : terms) {
        if (!e.terms_.empty() && e.terms_.back().first == t.first)
            e.terms_.back().second += t.second;
        else
            e.terms_.push_back(t);
    }
    std::erase_if(e.terms_, [](const Term& t) { return t.second == cplx{}; });
    return e;
}

cplx Element::coeff(const Diagram& d) const {
    if (d.top() != top_ || d.bot() != bot_) return {};
    const auto key = d.key();
    auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                               [](const Term& t, std::uint64_t k) { return t.first < k; });
    return (it != terms_.end() && it->first == key) ? it->second : cplx{};
}

void Element::check_same_shape(const Element& o) const {
    if (o.top_ != top_ || o.bot_ != bot_) throw ArityMismatch("element arities differ");
}

Element& Element::operator+=(const Element& o) {
    check_same_shape(o);
    std::vector<Term> merged = terms_;
    merged.insert(merged.end(), o.terms_.begin(), o.terms_.end());
    *this = from_terms(top_, bot_, std::move(merged));
    return *this;
}

Element& Element::operator-=(const Element& o) {
    check_same_shape(o);
    std::vector<Term> merged = terms_;
    for (const auto& [k, c] : o.terms_) merged.emplace_back(k, -c);
    *this = from_terms(top_, bot_, std::move(merged));
    return *this;
}

Element& Element::operator*=(cplx s) {
    for (auto& t : terms_) t.second *= s;
    std::erase_if(terms_, [](const Term& t) { return t.second == cplx{}; });
    return *this;
}

Element Element::pruned(double threshold) const {
    Element e = *this;
    std::erase_if(e.terms_, [threshold](const Term& t) { return std::abs(t.second) <= threshold; });
    return e;
}

double Element::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, std::abs(t.second));
    return m;
}

// ---------------------------------------------------------------------------
// Operations

namespace {

// One row of a diagram read left to right: each point opens an arc to the
// right, closes an arc from the left, or is a through strand ("defect").
struct Half {
    std::uint32_t open = 0;
    std::uint32_t defect = 0;
    bool operator==(const Half&) const = default;
    std::uint64_t code() const { return open | (std::uint64_t{defect} << 32); }
};

Half top_half(const std::uint8_t* partner, int k) {
    Half h;
    for (int i = 0; i < k; ++i) {
        const int p = partner[i];
        if (p >= k) h.defect |= 1U << i;
        else if (p > i) h.open |= 1U << i;
    }
    return h;
}

Half bottom_half(const std::uint8_t* partner, int k, int l) {
    Half h;
    for (int j = 0; j < l; ++j) {
        const int p = partner[k + j];
        if (p < k) h.defect |= 1U << j;
        else if (p > k + j) h.open |= 1U << j;
    }
    return h;
}

// How the strands of g's bottom row and f's top row join in the middle.
// Defects are numbered left to right; partner -1 means the strand passes through.
struct Middle {
    int loops = 0;
    std::array<std::int8_t, kMaxSide> gpat{};
    std::array<std::int8_t, kMaxSide> fpat{};
    int gdefects = 0;
    int fdefects = 0;
};

Middle join_middle(Half gb, Half ft, int l) {
    // Per inner point: arc partner on each side, or -(defect index)-1.
    std::array<int, kMaxSide> gside{}, fside{};
    auto fill_side = [l](Half h, std::array<int, kMaxSide>& side) {
        std::array<int, kMaxSide> stack{};
        int sp = 0, nd = 0;
        for (int x = 0; x < l; ++x) {
            if ((h.defect >> x) & 1U) side[x] = -(nd++) - 1;
            else if ((h.open >> x) & 1U) stack[sp++] = x;
            else {
                const int o = stack[--sp];
                side[x] = o;
                side[o] = x;
            }
        }
        return nd;
    };
    Middle mid;
    mid.gdefects = fill_side(gb, gside);
    mid.fdefects = fill_side(ft, fside);
    std::array<int, kMaxSide> gpos{}, fpos{};
    for (int x = 0; x < l; ++x) {
        if (gside[x] < 0) gpos[-gside[x] - 1] = x;
        if (fside[x] < 0) fpos[-fside[x] - 1] = x;
    }
    std::array<bool, kMaxSide> vis{};
    // Walk from a defect; returns the defect at the far end as (is_g, index).
    auto walk = [&](int x, bool leave_by_f) -> std::pair<bool, int> {
        for (;;) {
            vis[x] = true;
            if (leave_by_f) {
                if (fside[x] < 0) return {false, -fside[x] - 1};
                x = fside[x];
            } else {
                if (gside[x] < 0) return {true, -gside[x] - 1};
                x = gside[x];
            }
            vis[x] = true;
            leave_by_f = !leave_by_f;
        }
    };
    mid.gpat.fill(-2);
    mid.fpat.fill(-2);
    for (int d = 0; d < mid.gdefects; ++d) {
        if (mid.gpat[d] != -2) continue;
        auto [is_g, e] = walk(gpos[d], true);
        if (is_g) {
            mid.gpat[d] = static_cast<std::int8_t>(e);
            mid.gpat[e] = static_cast<std::int8_t>(d);
        } else {
            mid.gpat[d] = -1;
            mid.fpat[e] = -1;
        }
    }
    for (int d = 0; d < mid.fdefects; ++d) {
        if (mid.fpat[d] != -2) continue;
        auto [is_g, e] = walk(fpos[d], false);
        mid.fpat[d] = static_cast<std::int8_t>(e);
        mid.fpat[e] = static_cast<std::int8_t>(d);
    }
    for (int x = 0; x < l; ++x) {
        if (vis[x]) continue;
        ++mid.loops;
        int y = x;
        do {
            vis[y] = true;
            y = fside[y];
            vis[y] = true;
            y = gside[y];
        } while (!vis[y]);
    }
    return mid;
}

// Closes the defects of `h` that the middle pattern pairs up.
Half close_defects(Half h, int r, const std::array<std::int8_t, kMaxSide>& pat) {
    Half out;
    int d = 0;
    for (int x = 0; x < r; ++x) {
        if ((h.defect >> x) & 1U) {
            const int p = pat[d];
            if (p < 0) out.defect |= 1U << x;
            else if (p > d) out.open |= 1U << x;
            ++d;
        } else if ((h.open >> x) & 1U) {
            out.open |= 1U << x;
        }
    }
    return out;
}

std::uint64_t key_from_halves(Half top, Half bot, int k, int m) {
    std::uint64_t key = top.open | top.defect;
    const std::uint32_t closes = ~(bot.open | bot.defect);
    for (int j = 0; j < m; ++j)
        if ((closes >> j) & 1U) key |= std::uint64_t{1} << (k + m - 1 - j);
    return key;
}

struct Interner {
    absl::flat_hash_map<std::uint64_t, int> index;
    std::vector<Half> items;
    int get(Half h) {
        auto [it, inserted] = index.try_emplace(h.code(), static_cast<int>(items.size()));
        if (inserted) items.push_back(h);
        return it->second;
    }
};

} // namespace

Element compose(const Element& f, const Element& g, double delta) {
    if (f.top() != g.bot()) throw ArityMismatch("compose: inner arities differ");
    const int k = g.top(), l = g.bot(), m = f.bot();

    // A diagram is its top row plus its bottom row; defects pair up in order.
    // Group g by its bottom row and f by its top row, join each pair of rows
    // once, then spread the weight over the outer rows.
    struct Side {
        int outer;
        cplx c;
    };
    Interner g_top, g_bot, f_top, f_bot;
    std::vector<std::vector<Side>> g_by_bot, f_by_top;
    std::array<std::uint8_t, 2 * kMaxSide> buf{};
    for (const auto& [key, c] : g.terms()) {
        decode(key, k, l, buf.data());
        const int t = g_top.get(top_half(buf.data(), k));
        const int b = g_bot.get(bottom_half(buf.data(), k, l));
        if (b >= static_cast<int>(g_by_bot.size())) g_by_bot.resize(b + 1);
        g_by_bot[b].push_back({t, c});
    }
    for (const auto& [key, c] : f.terms()) {
        decode(key, l, m, buf.data());
        const int t = f_top.get(top_half(buf.data(), l));
        const int b = f_bot.get(bottom_half(buf.data(), l, m));
        if (t >= static_cast<int>(f_by_top.size())) f_by_top.resize(t + 1);
        f_by_top[t].push_back({b, c});
    }

    std::array<double, kMaxSide + 1> dpow{};
    dpow[0] = 1.0;
    for (int i = 1; i <= kMaxSide; ++i) dpow[i] = dpow[i - 1] * delta;

    // First pass interns the result rows so the accumulator can be dense.
    Interner r_top, r_bot;
    auto for_each_join = [&](auto&& body) {
        for (std::size_t gb = 0; gb < g_by_bot.size(); ++gb)
            for (std::size_t ft = 0; ft < f_by_top.size(); ++ft) body(gb, ft, join_middle(g_bot.items[gb], f_top.items[ft], l));
    };
    for_each_join([&](std::size_t gb, std::size_t ft, const Middle& mid) {
        for (const auto& s : g_by_bot[gb]) r_top.get(close_defects(g_top.items[s.outer], k, mid.gpat));
        for (const auto& s : f_by_top[ft]) r_bot.get(close_defects(f_bot.items[s.outer], m, mid.fpat));
    });
    const std::size_t n_top = r_top.items.size(), n_bot = r_bot.items.size();
    constexpr std::size_t kDenseLimit = std::size_t{1} << 22;
    const bool dense = n_top * n_bot <= kDenseLimit;
    std::vector<cplx> grid(dense ? n_top * n_bot : 0);
    absl::flat_hash_map<std::uint64_t, cplx> sparse;

    std::vector<int> top_ids, bot_ids;
    for_each_join([&](std::size_t gb, std::size_t ft, const Middle& mid) {
        const double w = dpow[mid.loops];
        top_ids.clear();
        bot_ids.clear();
        for (const auto& s : g_by_bot[gb]) top_ids.push_back(r_top.get(close_defects(g_top.items[s.outer], k, mid.gpat)));
        for (const auto& s : f_by_top[ft]) bot_ids.push_back(r_bot.get(close_defects(f_bot.items[s.outer], m, mid.fpat)));
        const auto& fs = f_by_top[ft];
        for (std::size_t a = 0; a < top_ids.size(); ++a) {
            const cplx cg = w * g_by_bot[gb][a].c;
            if (dense) {
                cplx* row = grid.data() + static_cast<std::size_t>(top_ids[a]) * n_bot;
                for (std::size_t b = 0; b < bot_ids.size(); ++b) row[bot_ids[b]] += cg * fs[b].c;
            } else {
                const auto row = static_cast<std::uint64_t>(top_ids[a]) << 32;
                for (std::size_t b = 0; b < bot_ids.size(); ++b)
                    sparse[row | static_cast<std::uint32_t>(bot_ids[b])] += cg * fs[b].c;
            }
        }
    });

    std::vector<Element::Term> terms;
    if (dense) {
        for (std::size_t t = 0; t < n_top; ++t)
            for (std::size_t b = 0; b < n_bot; ++b)
                if (grid[t * n_bot + b] != cplx{})
                    terms.emplace_back(key_from_halves(r_top.items[t], r_bot.items[b], k, m), grid[t * n_bot + b]);
    } else {
        terms.reserve(sparse.size());
        for (const auto& [rb, c] : sparse)
            terms.emplace_back(key_from_halves(r_top.items[rb >> 32], r_bot.items[rb & 0xFFFFFFFFU], k, m), c);
    }
    return Element::from_terms(k, m, std::move(terms));
}

namespace detail {
Element compose_pairwise(const Element& f, const Element& g, double delta) {
    if (f.top() != g.bot()) throw ArityMismatch("compose: inner arities differ");
    // Glue every pair of diagrams by following strands through the inner row.
    const int k = g.top(), l = g.bot(), m = f.bot();
    const int gp_n = k + l, fp_n = l + m;

    std::vector<std::uint8_t> gdec(g.size() * gp_n), fdec(f.size() * fp_n);
    for (std::size_t i = 0; i < g.size(); ++i) decode(g.terms()[i].first, k, l, gdec.data() + i * gp_n);
    for (std::size_t i = 0; i < f.size(); ++i) decode(f.terms()[i].first, l, m, fdec.data() + i * fp_n);

    std::array<double, kMaxSide + 1> dpow{};
    dpow[0] = 1.0;
    for (int i = 1; i <= kMaxSide; ++i) dpow[i] = dpow[i - 1] * delta;

    absl::flat_hash_map<std::uint64_t, cplx> acc;
    acc.reserve(std::min<std::size_t>(f.size() * g.size(), std::size_t{1} << 16));

    std::array<std::uint8_t, 2 * kMaxSide> res{};
    std::array<bool, kMaxSide> vis{};
    for (std::size_t fi = 0; fi < f.size(); ++fi) {
        const std::uint8_t* fp = fdec.data() + fi * fp_n;
        const cplx fc = f.terms()[fi].second;
        for (std::size_t gi = 0; gi < g.size(); ++gi) {
            const std::uint8_t* gp = gdec.data() + gi * gp_n;
            std::fill_n(res.begin(), k + m, kUnset);
            std::fill_n(vis.begin(), l, false);
            // Follow the strand leaving each outer point until it exits again.
            for (int s = 0; s < k + m; ++s) {
                if (res[s] != kUnset) continue;
                int end;
                bool in_g = s < k;
                int x = in_g ? gp[s] : fp[l + (s - k)];
                for (;;) {
                    if (in_g) {
                        if (x < k) { end = x; break; }
                        const int j = x - k;
                        vis[j] = true;
                        x = fp[j];
                        in_g = false;
                    } else {
                        if (x >= l) { end = k + (x - l); break; }
                        vis[x] = true;
                        x = gp[k + x];
                        in_g = true;
                    }
                }
                res[s] = static_cast<std::uint8_t>(end);
                res[end] = static_cast<std::uint8_t>(s);
            }
            int loops = 0;
            for (int j = 0; j < l; ++j) {
                if (vis[j]) continue;
                ++loops;
                int cur = j;
                do {
                    vis[cur] = true;
                    const int y = fp[cur];
                    vis[y] = true;
                    cur = gp[k + y] - k;
                } while (!vis[cur]);
            }
            acc[encode(res.data(), k, m)] += fc * g.terms()[gi].second * dpow[loops];
        }
    }
    std::vector<Element::Term> terms(acc.begin(), acc.end());
    return Element::from_terms(k, m, std::move(terms));
}

} // namespace detail

Element compose(const Element& f, const Element& g, const ScalarContext& ctx) {
    return compose(f, g, ctx.delta());
}

Element tensor(const Element& f, const Element& g) {
    const int k1 = f.top(), l1 = f.bot(), k2 = g.top(), l2 = g.bot();
    const int top = k1 + k2, bot = l1 + l2;
    check_side(top, bot);
    std::array<std::uint8_t, 2 * kMaxSide> fp{}, gp{}, res{};
    auto fmap = [&](int p) { return p < k1 ? p : top + (p - k1); };
    auto gmap = [&](int p) { return p < k2 ? k1 + p : top + l1 + (p - k2); };
    std::vector<Element::Term> out;
    out.reserve(f.size() * g.size());
    for (const auto& [fk, fc] : f.terms()) {
        decode(fk, k1, l1, fp.data());
        for (int p = 0; p < k1 + l1; ++p) res[fmap(p)] = static_cast<std::uint8_t>(fmap(fp[p]));
        for (const auto& [gk, gc] : g.terms()) {
            decode(gk, k2, l2, gp.data());
            for (int p = 0; p < k2 + l2; ++p) res[gmap(p)] = static_cast<std::uint8_t>(gmap(gp[p]));
            out.emplace_back(encode(res.data(), top, bot), fc * gc);
        }
    }
    return Element::from_terms(top, bot, std::move(out));
}

Element adjoint(const Element& f) {
    std::vector<Element::Term> out;
    out.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        out.emplace_back(f.diagram(i).adjoint().key(), std::conj(f.terms()[i].second));
    return Element::from_terms(f.bot(), f.top(), std::move(out));
}

Element partial_trace_right(const Element& f, int r, const ScalarContext& ctx) {
    return partial_trace_impl(f, r, ctx, true);
}

Element partial_trace_left(const Element& f, int r, const ScalarContext& ctx) {
    return partial_trace_impl(f, r, ctx, false);
}

cplx markov_trace(const Element& f, const ScalarContext& ctx) {
    if (f.top() != f.bot()) throw ArityMismatch("markov_trace: element is not square");
    const Element closed = partial_trace_right(f, f.top(), ctx);
    return closed.empty() ? cplx{} : closed.terms().front().second;
}

std::vector<Diagram> enumerate_nc2(int k, int l) {
    check_side(k, l);
    std::vector<Diagram> out;
    const int n = k + l;
    if (n % 2 != 0) return out;
    std::vector<std::uint64_t> keys;
    // Balanced words of length n, bit c = opening at circular position c.
    auto rec = [&](auto&& self, int pos, int open, int used_opens, std::uint64_t key) -> void {
        if (pos == n) {
            keys.push_back(key);
            return;
        }
        if (used_opens < n / 2) self(self, pos + 1, open + 1, used_opens + 1, key | (std::uint64_t{1} << pos));
        if (open > 0) self(self, pos + 1, open - 1, used_opens, key);
    };
    rec(rec, 0, 0, 0, 0);
    std::sort(keys.begin(), keys.end());
    out.reserve(keys.size());
    for (auto key : keys) out.push_back(Diagram::from_key(k, l, key));
    return out;
}

double max_coeff_distance(const Element& a, const Element& b) { return (a - b).max_abs_coeff(); }

Element id(int n) { return Element(Diagram::identity(n)); }
Element cup() { return Element(Diagram::cup()); }
Element cap() { return Element(Diagram::cap()); }
Element cupcap() { return tensor(cup(), cap()); }

} // namespace tllab::tl
