#pragma once

#include "qalg/factor.hpp"
#include "qalg/ratfun.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace qalg {

/// x^2 + xy + a y^2, the norm form of the Artin-Schreier extension by a.
struct BinaryNormForm {
    RatFun a;
};

/// a1 x1^2 + a1 x1 x2 + a1 a2 x2^2 + a3 x3^2 + a3 x3 x4 + a3 a4 x4^2.
struct QuadForm4 {
    RatFun a1, a2, a3, a4;
    RatFun eval(const std::array<RatFun, 4>& x) const;
};

/// General 4-variable quadratic form sum q_{ij} x_i x_j, i <= j.
struct GeneralQuadForm4 {
    std::array<std::array<RatFun, 4>, 4> q; // upper triangular
    RatFun eval(const std::array<RatFun, 4>& x) const;
    static GeneralQuadForm4 zero(const GFContext& f);
};

/// Variable change x_old = M x_new together with a similarity scale:
/// Q_old(M x) = scale * Q_new(x).
struct Substitution {
    std::array<std::array<RatFun, 4>, 4> m;
    RatFun scale;
    std::array<RatFun, 4> apply(const std::array<RatFun, 4>& x) const;
    static Substitution identity(const GFContext& f);
};

/// Thrown when a form is degenerate; carries a radical vector as witness.
struct DegenerateFormError : std::runtime_error {
    explicit DegenerateFormError(std::array<RatFun, 4> v)
        : std::runtime_error("degenerate quadratic form"), radical(std::move(v)) {}
    std::array<RatFun, 4> radical;
};

/// Bring a regular general form to the canonical 4-variable shape.
std::pair<QuadForm4, Substitution> canonicalize4(const GeneralQuadForm4& Q);

/// Minimal form of x^2+xy+ay^2: a_min = a + theta^2 + theta with every pole
/// of a_min (including infinity) of odd multiplicity.
std::pair<RatFun, RatFun> minimize_binary(const RatFun& a);

/// Solve w^2 + w = u over F_{2^k}(t); absent when u is not in the image.
std::optional<RatFun> as_image_solve(const RatFun& u);

/// Substitute t -> 1/t; swaps the place at infinity with the place t.
RatFun invert_t(const RatFun& x);

/// Does x^2 + xy + a y^2 = c have a solution in the completion at p?
/// Requires a minimal at p (nonnegative valuation or odd pole); c != 0.
bool local_represents(const RatFun& a, const RatFun& c, const Place& p);

/// Local isotropy of the canonical form at p (hypotheses of the local
/// lemmas: a1, a3 squarefree coprime polynomials, a2, a4 minimal).
bool local_isotropic4(const QuadForm4& Q, const Place& p);

/// Places where a2 or a4 has a pole or v_p(a1 a3) is odd.
std::vector<Place> critical_places(const QuadForm4& Q);

/// A polynomial c represented by both binary subforms locally everywhere,
/// or absent when some local condition set is empty (form anisotropic).
std::optional<RatFun> choose_common_value(const QuadForm4& Q, uint64_t seed);

/// Solve x^2 + xy + a y^2 = c globally by a deterministic sweep over y.
/// Absence means the trial budget ran out, not a proof of unsolvability.
std::optional<std::pair<RatFun, RatFun>> solve_binary_global(const RatFun& a, const RatFun& c,
                                                             uint64_t seed);

struct IsotropyResult {
    enum class Status { Zero, Anisotropic, NotFound } status;
    std::array<RatFun, 4> zero;       // valid when status == Zero
    std::optional<Place> bad_place;   // valid when status == Anisotropic
    std::string detail;
};

IsotropyResult solve_quadform4(const QuadForm4& Q, uint64_t seed);
IsotropyResult solve_quadform4(const GeneralQuadForm4& Q, uint64_t seed);

} // namespace qalg
