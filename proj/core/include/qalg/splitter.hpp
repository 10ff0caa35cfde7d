#pragma once

#include "qalg/algebra.hpp"
#include "qalg/fqalg.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qalg {

// Explicit splitting of central simple algebras over F_{2^k}(t):
// maximal orders at the finite places and at infinity, the finite-dimensional
// F_{2^k}-algebra of their intersection, and rank-one idempotents extracted
// from its primitive idempotents.  Degree-n split algebras then get an
// explicit isomorphism with M_n and maximal right ideals; pairs of algebras
// get an explicit isomorphism or a certificate that none exists.

using RatVec = std::vector<RatFun>;

/// The reduced-trace functional up to a scalar: the unique (for a CSA)
/// nonzero linear functional vanishing on commutators, as its values on the
/// basis.  Threading a precomputed functional through `hint` skips the
/// kernel computation (used for large tensor and corestriction algebras,
/// where the functional is a product of the factors' functionals).
RatVec trace_functional(const AlgebraSC<RatField>& A);

/// Field-generic variant of `trace_functional`: the functional vanishing on
/// all commutators, found by a deterministic sweep over basis pairs.  Only
/// intended for small algebras (quaternions and their tensor squares).
template <class F>
std::vector<typename F::Elem> trace_functional_generic(const AlgebraSC<F>& A) {
    const F& f = A.field();
    size_t n = A.dim();
    Matrix<F> M(f, n * n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            auto ab = A.mul(A.basis_elem(i), A.basis_elem(j));
            auto ba = A.mul(A.basis_elem(j), A.basis_elem(i));
            for (size_t c = 0; c < n; ++c) M.at(i * n + j, c) = f.add(ab[c], ba[c]);
        }
    auto ker = M.kernel();
    if (ker.size() != 1)
        throw std::invalid_argument(
            "trace_functional_generic: commutator space has codimension != 1");
    return ker[0];
}

/// The reduced trace of a degree-2 algebra as values on the basis: the
/// commutator functional rescaled so that x^2 + trd(x) x + nrd(x) = 0 holds
/// for every element.  The scale is read off the minimal polynomial of a
/// basis element with nonzero functional value.
template <class F>
std::vector<typename F::Elem> reduced_trace_deg2(const AlgebraSC<F>& A) {
    const F& f = A.field();
    size_t n = A.dim();
    auto eps = trace_functional_generic(A);
    for (size_t b = 0; b < n; ++b) {
        if (f.is_zero(eps[b])) continue;
        // solve e^2 = alpha e + beta 1 for the basis element e
        auto e = A.basis_elem(b);
        auto e2 = A.mul(e, e);
        Matrix<F> M(f, n, 2);
        for (size_t r = 0; r < n; ++r) {
            M.at(r, 0) = e[r];
            M.at(r, 1) = A.unit()[r];
        }
        auto sol = M.solve(e2);
        if (!sol) continue; // element generates a larger subfield; try another
        typename F::Elem lam = f.mul((*sol)[0], f.inv(eps[b]));
        std::vector<typename F::Elem> trd(n);
        for (size_t c = 0; c < n; ++c) trd[c] = f.mul(lam, eps[c]);
        return trd;
    }
    throw std::invalid_argument("reduced_trace_deg2: no quadratic basis element "
                                "with nonzero trace functional");
}

/// The canonical (quaternion) involution x -> trd(x) 1 + x of a
/// degree-2 algebra given by an arbitrary structure-constant table.
/// First kind; validated.
template <class F>
InvolutionMap<F> generic_canonical_involution(const AlgebraSC<F>& A) {
    const F& f = A.field();
    size_t n = A.dim();
    if (n != 4)
        throw std::invalid_argument("generic_canonical_involution: dimension != 4");
    auto trd = reduced_trace_deg2(A);
    Matrix<F> m = Matrix<F>::identity(f, n);
    for (size_t j = 0; j < n; ++j)
        for (size_t i = 0; i < n; ++i)
            m.at(i, j) = f.add(m.at(i, j), f.mul(trd[j], A.unit()[i]));
    InvolutionMap<F> tau{std::move(m), false};
    if (auto bad = validate_involution(A, tau))
        throw std::logic_error("generic_canonical_involution: " + *bad);
    return tau;
}

/// An order in A over F_{2^k}[t] (or, for the infinite side, interpreted
/// over the valuation ring at the degree place): columns of `B` are the
/// basis in algebra coordinates, `sc` is the multiplication table in the
/// order basis (entries are polynomials), `unit` is 1 in order coordinates.
struct Order {
    Matrix<RatField> B;
    AlgebraSC<RatField> sc;
    RatVec unit;
};

/// The order  F[t]<1, D e_1, ..., D e_{n-1}>  for D the denominator lcm of
/// the structure constants.  Requires A.unit() == e_0.
Order initial_order(const AlgebraSC<RatField>& A);

/// Monic irreducible candidates for the primes where `initial_order` can
/// fail to be maximal: divisors of the basis scaling D and of the
/// determinant of the trace form Gram matrix.
std::vector<Poly> disc_prime_candidates(const AlgebraSC<RatField>& A, const RatVec& eps,
                                        uint64_t seed = 0x0d15c0);

/// Enlarge `o` until it is maximal at the prime f (radical idealizer
/// process with maximal-ideal saturation).
void maximalize_at(Order& o, const Poly& f, uint64_t seed);

/// A maximal F_{2^k}[t]-order containing the initial order.
/// Requires A.unit() == e_0.
Order maximal_order_finite(const AlgebraSC<RatField>& A, const RatVec& eps,
                           uint64_t seed = 0x0d15c1);

/// An order maximal at the degree place (as a lattice over the valuation
/// ring there; the basis is returned in the t-coordinates of A).
/// Requires A.unit() == e_0.
Order maximal_order_infinite(const AlgebraSC<RatField>& A, uint64_t seed = 0x0d15c2);

/// The finite-dimensional F_{2^k}-algebra of elements integral at every
/// place: the intersection of a maximal finite order with an order maximal
/// at infinity.  `basis` holds the elements in A-coordinates.  `field` owns
/// the base-field context that `lam` points to.
struct SectionAlgebra {
    std::shared_ptr<GFField> field;
    AlgebraSC<GFField> lam;
    std::vector<RatVec> basis;
};
SectionAlgebra intersect_orders(const AlgebraSC<RatField>& A, const Order& fin,
                                const Order& inf);

/// An idempotent of reduced rank one (so eA has dimension deg A), or absent
/// when none exists, i.e. when A has a nontrivial division part.  Works for
/// any unit vector (normalizes internally).  A precomputed trace functional
/// may be supplied through `eps_hint` to skip the kernel computation (its
/// values are on the basis of A as given).
std::optional<RatVec> rank_one_idempotent(const AlgebraSC<RatField>& A,
                                          uint64_t seed = 0x0d15c3,
                                          const RatVec* eps_hint = nullptr);

/// The idempotent of minimal reduced rank among the primitive idempotents of
/// the intersection section algebra.  For a maximal order the minimal rank
/// equals the Schur index of A, so `rank == deg` certifies a division
/// algebra (with e the unit) and `rank == 1` splits A.
struct MinRankIdempotent {
    RatVec e;
    size_t rank;
};
MinRankIdempotent min_rank_idempotent(const AlgebraSC<RatField>& A,
                                      uint64_t seed = 0x0d15c6,
                                      const RatVec* eps_hint = nullptr);

/// Explicit isomorphism A -> M_n(K) from a rank-one idempotent: `fwd` maps
/// A-coordinates to row-major n x n matrices, `bwd` is its inverse.
struct ExplicitIso {
    Matrix<RatField> fwd, bwd;
};
ExplicitIso explicit_iso_matrix(const AlgebraSC<RatField>& A, const RatVec& e, size_t n);

/// A maximal right ideal of a split algebra of degree n: (1-e)A for a
/// rank-one idempotent e.  Throws if A has no rank-one idempotent.
RightIdeal<RatField> maximal_right_ideal(const AlgebraSC<RatField>& A,
                                         uint64_t seed = 0x0d15c4,
                                         const RatVec* eps_hint = nullptr);

/// Explicit isomorphism phi: A1 -> A2 from a rank-one idempotent e of
/// T = A1 (x) A2^op: the simple left T-module Te is an (A1, A2)-bimodule
/// isomorphic to A2, and transporting the left A1-action through a cyclic
/// vector yields phi.  Field-generic so the same construction serves over
/// quadratic extensions.
template <class F>
std::optional<Matrix<F>> iso_from_tensor_idempotent(const AlgebraSC<F>& A1,
                                                    const AlgebraSC<F>& A2,
                                                    const AlgebraSC<F>& T,
                                                    const typename AlgebraSC<F>::Vec& e,
                                                    Rng& rng);

/// Either an isomorphism A1 -> A2 (matrix on coordinates, multiplicative and
/// unital, validated) or a certificate string explaining why none exists.
struct IsoResult {
    std::optional<Matrix<RatField>> iso;
    std::string certificate;
};
IsoResult iso_between_csas(const AlgebraSC<RatField>& A1, const AlgebraSC<RatField>& A2,
                           uint64_t seed = 0x0d15c5);

// --- implementation of the field-generic template ---

template <class F>
std::optional<Matrix<F>> iso_from_tensor_idempotent(const AlgebraSC<F>& A1,
                                                    const AlgebraSC<F>& A2,
                                                    const AlgebraSC<F>& T,
                                                    const typename AlgebraSC<F>::Vec& e,
                                                    Rng& rng) {
    const F& f = A1.field();
    size_t m = A1.dim();
    if (A2.dim() != m || T.dim() != m * m) return std::nullopt;
    // V = Te, spanned inside T
    auto I = ideal_from_element(T, e, IdealSide::Left);
    if (I.basis.size() != m) return std::nullopt;
    Matrix<F> V(f, m * m, m);
    for (size_t c = 0; c < m; ++c)
        for (size_t r = 0; r < m * m; ++r) V.at(r, c) = I.basis[c][r];
    // right action of A2 basis elements on V (in V-coordinates):
    // right mult by b on T is left mult by (1 (x) b) in A1 (x) A2^op
    auto act = [&](size_t tensor_idx, const typename AlgebraSC<F>::Vec& vcoords) {
        typename AlgebraSC<F>::Vec x(m * m, f.zero());
        for (size_t c = 0; c < m; ++c)
            if (!f.is_zero(vcoords[c]))
                for (size_t r = 0; r < m * m; ++r)
                    x[r] = f.add(x[r], f.mul(vcoords[c], I.basis[c][r]));
        return T.mul(T.basis_elem(tensor_idx), x);
    };
    for (int attempt = 0; attempt < 16; ++attempt) {
        typename AlgebraSC<F>::Vec v0(m, f.zero());
        for (auto& c : v0) c = attempt == 0 ? f.one() : random_field_elem(f, rng);
        // columns: v0 * b for b over the A2 basis (tensor index 0*m? handled
        // via 1 (x) b = basis index ? ) -- in tensor(A1, opposite(A2)) the
        // element 1 (x) e_j has index j when A1.unit() == e_0; use the unit
        // expansion instead to stay general.
        Matrix<F> C(f, m * m, m);
        for (size_t j = 0; j < m; ++j) {
            // 1 (x) e_j = sum_i unit1_i (e_i (x) e_j), tensor index i*m+j
            typename AlgebraSC<F>::Vec oneb(m * m, f.zero());
            for (size_t i = 0; i < m; ++i) oneb[i * m + j] = A1.unit()[i];
            typename AlgebraSC<F>::Vec x(m * m, f.zero());
            for (size_t c = 0; c < m; ++c)
                if (!f.is_zero(v0[c]))
                    for (size_t r = 0; r < m * m; ++r)
                        x[r] = f.add(x[r], f.mul(v0[c], I.basis[c][r]));
            auto img = T.mul(oneb, x);
            for (size_t r = 0; r < m * m; ++r) C.at(r, j) = img[r];
        }
        if (C.rank() != m) continue; // v0 not cyclic, retry
        // phi(a) solves  (a (x) 1) . v0 = v0 . phi(a) = C . phi(a)
        Matrix<F> phi(f, m, m);
        bool ok = true;
        for (size_t a = 0; a < m && ok; ++a) {
            typename AlgebraSC<F>::Vec a1(m * m, f.zero());
            for (size_t j = 0; j < m; ++j) a1[a * m + j] = A2.unit()[j];
            typename AlgebraSC<F>::Vec x(m * m, f.zero());
            for (size_t c = 0; c < m; ++c)
                if (!f.is_zero(v0[c]))
                    for (size_t r = 0; r < m * m; ++r)
                        x[r] = f.add(x[r], f.mul(v0[c], I.basis[c][r]));
            auto img = C.solve(T.mul(a1, x));
            if (!img) { ok = false; break; }
            for (size_t r = 0; r < m; ++r) phi.at(r, a) = (*img)[r];
        }
        if (!ok) continue;
        // validate: unital, multiplicative, bijective
        auto apply = [&](const typename AlgebraSC<F>::Vec& x) {
            typename AlgebraSC<F>::Vec y(m, f.zero());
            for (size_t c = 0; c < m; ++c)
                if (!f.is_zero(x[c]))
                    for (size_t r = 0; r < m; ++r)
                        y[r] = f.add(y[r], f.mul(phi.at(r, c), x[c]));
            return y;
        };
        if (!A2.eq_elem(apply(A1.unit()), A2.unit())) continue;
        if (!phi.inverse()) continue;
        bool mult = true;
        for (size_t i = 0; i < m && mult; ++i)
            for (size_t j = 0; j < m && mult; ++j)
                mult = A2.eq_elem(apply(A1.mul(A1.basis_elem(i), A1.basis_elem(j))),
                                  A2.mul(apply(A1.basis_elem(i)), apply(A1.basis_elem(j))));
        if (mult) return phi;
    }
    return std::nullopt;
}

/// Uniform random field element (small support for RatField to keep degrees
/// low; full range for finite fields).
inline uint64_t random_field_elem(const GFField& f, Rng& rng) {
    return rng.next() & f.gf().mask();
}
inline RatFun random_field_elem(const RatField& f, Rng& rng) {
    return RatFun(random_poly(f.gf(), 1, rng));
}
inline LElem random_field_elem(const QuadExtField& f, Rng& rng) {
    return LElem{RatFun(random_poly(f.gf(), 1, rng)), RatFun(random_poly(f.gf(), 1, rng))};
}

} // namespace qalg
