#pragma once

#include "qalg/algebra.hpp"
#include "qalg/factor.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace qalg {

// ---------------------------------------------------------------------------
// Specialization of algebras over F_{2^k}(t) (or its quadratic extension) at
// a point t = t0 in a large constant field F_{2^M}.  Ranks of matrices built
// from structure constants can only drop under specialization, so a full-rank
// specialized sandwich matrix certifies central simplicity exactly; this is
// how the 16-dimensional algebras are checked without 256x256 exact
// rational-function elimination.

/// Embedding F_{2^k} -> F_{2^M} (k | M), found by factoring the small
/// modulus over the big field; the table holds the powers of the image of
/// the small generator.
struct GFEmbedding {
    GFContext from, to;
    std::vector<uint64_t> pow; // pow[i] = image of u^i, i < k

    uint64_t map(uint64_t x) const {
        uint64_t r = 0;
        for (unsigned i = 0; i < from.k(); ++i)
            if ((x >> i) & 1) r ^= pow[i];
        return r;
    }
};

inline GFEmbedding make_gf_embedding(const GFContext& from, const GFContext& to) {
    if (to.k() % from.k() != 0)
        throw std::invalid_argument("make_gf_embedding: target degree must be a multiple");
    if (from.k() == 1) return {from, to, {1}};
    // the small modulus, coefficients in {0,1}, as a polynomial over the big field
    Poly m = Poly::zero(to);
    for (unsigned i = 0; i <= from.k(); ++i)
        if ((from.modulus() >> i) & 1) m.set_coeff(static_cast<int>(i), 1);
    auto fac = poly_factor(m);
    uint64_t theta = 0;
    bool found = false;
    for (const auto& pf : fac.factors)
        if (pf.p.degree() == 1) {
            theta = pf.p.coeff(0); // root of x + theta
            found = true;
            break;
        }
    if (!found) throw std::logic_error("make_gf_embedding: modulus has no root upstairs");
    GFEmbedding e{from, to, {}};
    uint64_t acc = 1;
    for (unsigned i = 0; i < from.k(); ++i) {
        e.pow.push_back(acc);
        acc = to.mul(acc, theta);
    }
    return e;
}

inline uint64_t eval_poly_at(const Poly& p, const GFEmbedding& e, uint64_t t0) {
    const GFContext& big = e.to;
    uint64_t r = 0;
    for (int i = p.degree(); i >= 0; --i) r = big.add(big.mul(r, t0), e.map(p.coeff(i)));
    return r;
}

/// Evaluation of a rational function at t0; absent if the denominator
/// vanishes there.
inline std::optional<uint64_t> eval_ratfun_at(const RatFun& f, const GFEmbedding& e, uint64_t t0) {
    uint64_t den = eval_poly_at(f.den(), e, t0);
    if (den == 0) return std::nullopt;
    return e.to.mul(eval_poly_at(f.num(), e, t0), e.to.inv(den));
}

/// Specialize an algebra over K = F_{2^k}(t) at t = t0 into F_{2^M}.
inline std::optional<AlgebraSC<GFField>> specialize_algebra(const AlgebraSC<RatField>& A,
                                                            const GFField& big,
                                                            const GFEmbedding& e, uint64_t t0) {
    size_t n = A.dim();
    std::vector<uint64_t> unit(n, 0);
    for (size_t i = 0; i < n; ++i) {
        auto v = eval_ratfun_at(A.unit()[i], e, t0);
        if (!v) return std::nullopt;
        unit[i] = *v;
    }
    AlgebraSC<GFField> R(big, n, unit);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (const auto& [k, g] : A.products(i, j)) {
                auto v = eval_ratfun_at(g, e, t0);
                if (!v) return std::nullopt;
                R.set_gamma(i, j, k, *v);
            }
    return R;
}

/// Specialize an algebra over L = K(s), s^2+s = c, at t = t0 with s |-> s0
/// where s0^2 + s0 = c(t0) in F_{2^M}; absent when c has a pole at t0 or the
/// Artin-Schreier equation has no root there (trace 1 - retry with new t0).
inline std::optional<AlgebraSC<GFField>> specialize_algebra(const AlgebraSC<QuadExtField>& A,
                                                            const GFField& big,
                                                            const GFEmbedding& e, uint64_t t0) {
    const QuadExtField& L = A.field();
    auto c0 = eval_ratfun_at(L.param(), e, t0);
    if (!c0) return std::nullopt;
    auto s0 = big.gf().solve_artin_schreier(*c0);
    if (!s0) return std::nullopt;
    auto evalL = [&](const LElem& x) -> std::optional<uint64_t> {
        auto vx = eval_ratfun_at(x.x, e, t0);
        auto vy = eval_ratfun_at(x.y, e, t0);
        if (!vx || !vy) return std::nullopt;
        return big.gf().add(*vx, big.gf().mul(*vy, *s0));
    };
    size_t n = A.dim();
    std::vector<uint64_t> unit(n, 0);
    for (size_t i = 0; i < n; ++i) {
        auto v = evalL(A.unit()[i]);
        if (!v) return std::nullopt;
        unit[i] = *v;
    }
    AlgebraSC<GFField> R(big, n, unit);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (const auto& [k, g] : A.products(i, j)) {
                auto v = evalL(g);
                if (!v) return std::nullopt;
                R.set_gamma(i, j, k, *v);
            }
    return R;
}

namespace detail {

template <class F>
bool is_central_simple_specialized(const AlgebraSC<F>& A) {
    const GFContext& base = A.field().gf();
    unsigned M = base.k();
    while (M < 18) M += base.k(); // big enough that random points rarely degenerate
    GFContext big(M);
    GFField bigF(big);
    GFEmbedding emb = make_gf_embedding(base, big);
    size_t n = A.dim();
    Rng rng(0x5eedc0de ^ (n * 0x9e3779b97f4a7c15ull));
    int deficits = 0;
    for (int trial = 0; trial < 64 && deficits < 3; ++trial) {
        uint64_t t0 = rng.next() & big.mask();
        auto S = specialize_algebra(A, bigF, emb, t0);
        if (!S) continue; // pole or inert point; new t0
        if (sandwich_matrix(*S).rank() == n * n) return true;
        ++deficits; // rank can only drop at special points; a few retries
    }
    return false;
}

} // namespace detail

/// Central simplicity over K or L. Exact sandwich rank for dim <= 4;
/// specialized (one-sided Monte Carlo: "true" is certain, "false" has small
/// error probability) for larger algebras, where exact elimination over
/// rational functions is far too slow.
inline bool is_central_simple(const AlgebraSC<RatField>& A) {
    if (A.dim() <= 4) return is_central_simple_exact(A);
    return detail::is_central_simple_specialized(A);
}
inline bool is_central_simple(const AlgebraSC<QuadExtField>& A) {
    if (A.dim() <= 4) return is_central_simple_exact(A);
    return detail::is_central_simple_specialized(A);
}
inline bool is_central_simple(const AlgebraSC<GFField>& A) {
    return is_central_simple_exact(A);
}

} // namespace qalg
