#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tllab/qnumerics.hpp"

namespace tllab::tl {

using cplx = std::complex<double>;

// Largest number of boundary points allowed on either side of a diagram.
inline constexpr int kMaxSide = 16;

// A non-crossing pair partition from `top` input points to `bot` output points.
// Top points are indexed 0..top-1 left to right, bottom points top..top+bot-1
// left to right. Composition g then f glues g's bottom row to f's top row.
class Diagram {
public:
    Diagram() = default;

    static Diagram from_pairs(int top, int bot, const std::vector<std::pair<int, int>>& pairs);
    // Inverse of key(): the matching read as a Dyck word in circular order.
    static Diagram from_key(int top, int bot, std::uint64_t key);
    static Diagram identity(int n);
    static Diagram cup();  // t : 0 -> 2
    static Diagram cap();  // t* : 2 -> 0

    int top() const { return top_; }
    int bot() const { return bot_; }
    int points() const { return top_ + bot_; }
    int partner(int p) const { return partner_[p]; }
    const std::vector<std::uint8_t>& partners() const { return partner_; }

    // Bit c is set when the point at circular position c opens an arc. The
    // circular order runs along the top left to right, then the bottom right to left.
    std::uint64_t key() const;

    std::vector<std::pair<int, int>> pairs() const;
    std::string to_string() const;
    // Vertical flip.
    Diagram adjoint() const;

    bool operator==(const Diagram& o) const {
        return top_ == o.top_ && bot_ == o.bot_ && partner_ == o.partner_;
    }

private:
    Diagram(int top, int bot, std::vector<std::uint8_t> partner)
        : top_(top), bot_(bot), partner_(std::move(partner)) {}

    int top_ = 0;
    int bot_ = 0;
    std::vector<std::uint8_t> partner_;
};

// Formal linear combination of diagrams sharing (top, bot). Terms are kept
// sorted by diagram key with exact zeros removed.
class Element {
public:
    using Term = std::pair<std::uint64_t, cplx>;

    Element(int top, int bot);
    explicit Element(const Diagram& d, cplx c = 1.0);

    // Sums repeated keys and drops exact zeros.
    static Element from_terms(int top, int bot, std::vector<Term> terms);

    int top() const { return top_; }
    int bot() const { return bot_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    const std::vector<Term>& terms() const { return terms_; }
    Diagram diagram(std::size_t i) const { return Diagram::from_key(top_, bot_, terms_[i].first); }
    cplx coeff(const Diagram& d) const;

    Element& operator+=(const Element& o);
    Element& operator-=(const Element& o);
    Element& operator*=(cplx s);
    friend Element operator+(Element a, const Element& b) { return a += b; }
    friend Element operator-(Element a, const Element& b) { return a -= b; }
    friend Element operator*(cplx s, Element a) { return a *= s; }

    // Drops coefficients with modulus at most `threshold`.
    Element pruned(double threshold = 1e-14) const;
    double max_abs_coeff() const;

private:
    void check_same_shape(const Element& o) const;

    int top_;
    int bot_;
    std::vector<Term> terms_;
};

// f : l -> m after g : k -> l. Each closed loop contributes `delta`.
Element compose(const Element& f, const Element& g, double delta);
Element compose(const Element& f, const Element& g, const ScalarContext& ctx);

Element tensor(const Element& f, const Element& g);
Element adjoint(const Element& f);

// Closes the rightmost (leftmost) r strands of a square element.
Element partial_trace_right(const Element& f, int r, const ScalarContext& ctx);
Element partial_trace_left(const Element& f, int r, const ScalarContext& ctx);
cplx markov_trace(const Element& f, const ScalarContext& ctx);

std::vector<Diagram> enumerate_nc2(int k, int l);

// Largest coefficient modulus of a - b.
double max_coeff_distance(const Element& a, const Element& b);

// Convenience builders.
Element id(int n);
Element cup();
Element cap();
// e = t t* on two strands.
Element cupcap();

} // namespace tllab::tl

namespace tllab::tl::detail {
// Reference composition that glues every pair of diagrams separately.
// Quadratic in the number of terms with a large constant; used to cross-check compose().
Element compose_pairwise(const Element& f, const Element& g, double delta);
} // namespace tllab::tl::detail
