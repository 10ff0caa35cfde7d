#pragma once

#include "qalg/poly.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace qalg {

/// Deterministic splitmix64 stream; every randomized routine takes an
/// explicit seed and derives its own stream from it.
class Rng {
public:
    explicit Rng(uint64_t seed) : s_(seed) {}
    uint64_t next() {
        uint64_t z = (s_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    uint64_t below(uint64_t n) { return n ? next() % n : 0; }
    /// Child stream with an independent-looking state.
    Rng fork(uint64_t label) { return Rng(next() ^ (label * 0x9e3779b97f4a7c15ull) ^ 0x517cc1b727220a95ull); }

private:
    uint64_t s_;
};

Poly random_poly(const GFContext& f, int max_deg, Rng& rng);
Poly random_monic(const GFContext& f, int deg, Rng& rng);

bool poly_is_irreducible(const Poly& p);

struct PolyFactor {
    Poly p;       // monic irreducible
    int mult = 0;
};

/// Monic-irreducible factorization; lead * prod p_i^{m_i} == input, factors
/// sorted by (degree, coefficients). Rejects the zero polynomial.
struct Factorization {
    uint64_t lead = 1;
    std::vector<PolyFactor> factors;
};
Factorization poly_factor(const Poly& p, uint64_t seed = 0x9c0ffee5);

Poly squarefree_part(const Poly& p, uint64_t seed = 0x9c0ffee5);

/// Constraints for the irreducible-in-residue-class sampler. Degree is
/// either pinned exactly or chosen minimal for the requested parity.
struct IrredConstraints {
    std::optional<int> exact_degree;
    std::optional<int> degree_parity;       // 0 = even, 1 = odd
    std::vector<uint64_t> top_coeffs;       // coefficients of t^{N-1}, t^{N-2}, ...
    std::optional<Poly> low_residue;        // value mod t^low_power
    int low_power = 0;
};

/// A monic irreducible h = a (mod m) meeting the constraints, deterministic
/// given the seed. Returns nullopt after the trial budget is exhausted
/// (bad luck or unsatisfiable constraints).
std::optional<Poly> random_irreducible_in_class(const Poly& a, const Poly& m,
                                                const IrredConstraints& cons, uint64_t seed);

} // namespace qalg
