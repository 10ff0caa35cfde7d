#pragma once

#include "qalg/algebra.hpp"
#include "qalg/quadform.hpp"
#include "qalg/splitter.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qalg {

// Galois descent from L = K(s), s^2 + s = c, to K = F_{2^k}(t): involutions
// of the second kind via the corestriction, quaternion descent to a K-form,
// zero divisors in split quaternions over L, quaternion algebras with
// prescribed ramification, and the isomorphism pipeline for quaternions
// over L.

using LVec = std::vector<LElem>;

/// The quadratic extension L/K as a pair of live field contexts.  Algebras
/// returned by the descent routines keep pointers into this object, so it
/// must outlive them.  Rejects c in the Artin-Schreier image of K (the
/// "extension" would be split).
struct QuadExtContext {
    RatField K;
    QuadExtField L;

    QuadExtContext(const GFContext& gf, RatFun c) : K(gf), L(std::move(c)) {
        if (L.param().is_zero() || as_image_solve(L.param()))
            throw std::invalid_argument(
                "QuadExtContext: c is an Artin-Schreier image, L is not a field");
    }
};

/// Outcome of Galois descent on a central simple L-algebra: a validated
/// involution of the second kind, or a validated zero divisor found on the
/// way (exactly one is set).
struct DescentResult {
    std::optional<InvolutionMap<QuadExtField>> involution;
    std::optional<LVec> zero_divisor;
};

/// An involution of the second kind on A, or a zero divisor of A.
/// Pipeline: corestriction of A down to K, a maximal right ideal I of the
/// corestriction via the splitter, then either I_L cap (A tensor 1) is a
/// nonzero ideal (zero divisor) or I determines the involution.
/// Throws with a stage label when the corestriction is not split (then A
/// admits no involution of the second kind).
DescentResult involution_or_zerodivisor(const AlgebraSC<QuadExtField>& A,
                                        const QuadExtContext& ctx, uint64_t seed);

/// A K-form of a quaternion algebra A over L: fixed points of
/// phi = tau o kappa for tau of the second kind and kappa the canonical
/// involution, or a zero divisor of A if one appears first.  The form is
/// validated: dim_K C = 4, C central simple over K, and the K-basis of C
/// spans A over L.
struct DescendedQuaternion {
    std::optional<LVec> zero_divisor;
    std::optional<FixedSubalgebra> form;
};
DescendedQuaternion descend_quaternion(const AlgebraSC<QuadExtField>& A,
                                       const QuadExtContext& ctx, uint64_t seed);

/// An element u of a quaternion division algebra B over K (standard basis
/// 1, i, j, ij) with u^2 + u = c, i.e. an embedded copy of L = K(s).
/// Requires L to split B; found through a nontrivial zero of the quadratic
/// form (1, a+c, b, a) and validated exactly.
RatVec embed_L_into_quaternion(const AlgebraSC<RatField>& B, const QuadExtContext& ctx,
                               uint64_t seed);

/// A validated zero divisor of a split quaternion algebra A over L:
/// descend to a K-form C, then split C directly or embed L into the
/// division form C and return u + s.
LVec zero_divisor_split_quat_L(const AlgebraSC<QuadExtField>& A, const QuadExtContext& ctx,
                               uint64_t seed);

/// The finite set of places where a quaternion algebra ramifies; always of
/// even cardinality and sorted by Place order.
struct RamificationSet {
    std::vector<Place> places;
};
bool operator==(const RamificationSet& a, const RamificationSet& b);

/// Ramified places of the quaternion [a, b) over K (i^2 + i = a, j^2 = b):
/// candidates from the supports and poles of the minimized a and of b plus
/// infinity, each decided by the local norm-representation test.
RamificationSet ramified_places_quat(const RatFun& a, const RatFun& b);

/// A quaternion algebra over K ramified exactly at the places of S (|S|
/// even).  Finite members multiply into the j^2 slot; the Artin-Schreier
/// slot is a monic irreducible with nonsplit residue class at each finite
/// member, found by Chinese remaindering; the place at infinity lands
/// correctly by reciprocity.  The result is validated by recomputing its
/// ramification, a hard error on mismatch.
AlgebraSC<RatField> construct_ramified_quaternion(const RamificationSet& S, const RatField& K,
                                                  uint64_t seed);

/// A validated zero divisor of a 16-dimensional algebra A = M_2(D) over K
/// (D a quaternion division algebra), from a minimal-rank idempotent of a
/// maximal order section; also accepts split A.
RatVec zero_divisor_M2D(const AlgebraSC<RatField>& A, uint64_t seed);

/// An explicit isomorphism A1 -> A2 of quaternion algebras over L (matrix
/// on coordinates, unital and multiplicative, validated), or a certificate
/// string carrying the failing stage when the inputs are not isomorphic.
struct LIsoResult {
    std::optional<Matrix<QuadExtField>> iso;
    std::string certificate;
};
LIsoResult iso_quaternions_over_L(const AlgebraSC<QuadExtField>& A1,
                                  const AlgebraSC<QuadExtField>& A2,
                                  const QuadExtContext& ctx, uint64_t seed);

// ---------------------------------------------------------------------------
// Quaternion recognition: standard generators from an arbitrary table.

/// A quaternion presentation A ~ [a, b): basis holds 1, i, j, ij in
/// A-coordinates with i^2 + i = a, j^2 = b, ji = (i+1)j.  When the
/// structure search runs into a nilpotent instead (b would be 0), the
/// nilpotent is returned as `zero_divisor` and a, b, basis are unset.
template <class F>
struct QuatPresentation {
    typename F::Elem a, b;
    std::vector<typename AlgebraSC<F>::Vec> basis;
    std::optional<typename AlgebraSC<F>::Vec> zero_divisor;
};

/// Deterministic recognition of a 4-dimensional central simple algebra as a
/// quaternion algebra in standard form; validated by rebuilding the table.
template <class F>
QuatPresentation<F> recognize_quaternion(const AlgebraSC<F>& A) {
    const F& f = A.field();
    size_t n = A.dim();
    if (n != 4) throw std::invalid_argument("recognize_quaternion: dimension != 4");
    auto trd = reduced_trace_deg2(A);
    // i with trd(i) = 1: a trace-one rescaling of any basis element of
    // nonzero trace; then i^2 + i = a 1.
    size_t bidx = n;
    for (size_t b = 0; b < n; ++b)
        if (!f.is_zero(trd[b])) { bidx = b; break; }
    if (bidx == n) throw std::invalid_argument("recognize_quaternion: trace vanishes on basis");
    auto i = A.scale(f.inv(trd[bidx]), A.basis_elem(bidx));
    auto i2pi = A.add(A.mul(i, i), i);
    Matrix<F> um(f, n, 1);
    for (size_t r = 0; r < n; ++r) um.at(r, 0) = A.unit()[r];
    auto asol = um.solve(i2pi);
    if (!asol) throw std::logic_error("recognize_quaternion: i^2 + i is not central");
    typename F::Elem a = (*asol)[0];
    // the anticommutant {y : iy + yi = y} = span{j, ij}; its nonzero
    // elements have trace zero, so y^2 is a scalar nrd(y)
    Matrix<F> M(f, n, n);
    {
        Matrix<F> lm = A.left_mul_matrix(i);
        Matrix<F> rm = A.right_mul_matrix(i);
        for (size_t r = 0; r < n; ++r)
            for (size_t c = 0; c < n; ++c) {
                typename F::Elem v = f.add(lm.at(r, c), rm.at(r, c));
                if (r == c) v = f.add(v, f.one());
                M.at(r, c) = v;
            }
    }
    auto ker = M.kernel();
    if (ker.size() != 2)
        throw std::logic_error("recognize_quaternion: anticommutant has dimension != 2");
    std::vector<typename AlgebraSC<F>::Vec> cands{ker[0], ker[1], A.add(ker[0], ker[1])};
    for (const auto& j : cands) {
        auto j2 = A.mul(j, j);
        auto bsol = um.solve(j2);
        if (!bsol) throw std::logic_error("recognize_quaternion: j^2 is not central");
        typename F::Elem b = (*bsol)[0];
        if (f.is_zero(b)) continue; // nilpotent candidate, keep looking
        QuatPresentation<F> P;
        P.a = a;
        P.b = b;
        P.basis = {A.unit(), i, j, A.mul(i, j)};
        // rebuild the table on the found basis and compare with the model
        Matrix<F> S(f, n, n);
        for (size_t c = 0; c < n; ++c)
            for (size_t r = 0; r < n; ++r) S.at(r, c) = P.basis[c][r];
        auto AS = change_basis(A, S);
        auto model = quaternion_char2(f, a, b);
        for (size_t p = 0; p < n; ++p)
            for (size_t q = 0; q < n; ++q)
                for (size_t k = 0; k < n; ++k)
                    if (!f.eq(AS.gamma(p, q, k), model.gamma(p, q, k)))
                        throw std::logic_error("recognize_quaternion: table mismatch");
        return P;
    }
    // the whole anticommutant squares to zero: hand back a nilpotent
    QuatPresentation<F> P;
    P.a = a;
    P.b = f.zero();
    P.zero_divisor = ker[0];
    return P;
}

} // namespace qalg
