#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace qalg {

// Arithmetic in F_2[u]: polynomials packed into uint64_t bit masks, bit i
// holding the coefficient of u^i.
namespace bitpoly {

int degree(uint64_t p);
uint64_t mul(uint64_t a, uint64_t b);
uint64_t mod(uint64_t a, uint64_t m);
uint64_t gcd(uint64_t a, uint64_t b);
bool is_irreducible(uint64_t p);

} // namespace bitpoly

/// The constant field F_{2^k} = F_2[u]/(modulus). Elements are uint64_t
/// coordinate masks relative to the power basis 1, u, ..., u^{k-1}.
class GFContext {
public:
    GFContext() : k_(1), mod_(0b10) {}
    /// If modulus == 0 a fixed deterministic irreducible of degree k is used.
    explicit GFContext(unsigned k, uint64_t modulus = 0);

    unsigned k() const { return k_; }
    uint64_t modulus() const { return mod_; }
    uint64_t mask() const { return (k_ == 64) ? ~0ull : ((1ull << k_) - 1); }
    uint64_t order() const { return 1ull << k_; }

    uint64_t zero() const { return 0; }
    uint64_t one() const { return 1; }

    uint64_t add(uint64_t a, uint64_t b) const { return a ^ b; }
    uint64_t mul(uint64_t a, uint64_t b) const;
    uint64_t inv(uint64_t a) const;
    uint64_t pow(uint64_t a, uint64_t e) const;
    uint64_t sq(uint64_t a) const { return mul(a, a); }

    /// Absolute trace Tr_{F_{2^k}/F_2}(x) = x + x^2 + ... + x^{2^{k-1}}.
    int trace(uint64_t x) const;
    /// The unique square root (Frobenius is bijective): x^{2^{k-1}}.
    uint64_t sqrt(uint64_t x) const;
    /// Solves x^2 + x = a. Succeeds iff trace(a) == 0; of the two roots x and
    /// x+1 the one with the lexicographically least bit pattern is returned.
    std::optional<uint64_t> solve_artin_schreier(uint64_t a) const;

    bool operator==(const GFContext& o) const { return k_ == o.k_ && mod_ == o.mod_; }
    bool operator!=(const GFContext& o) const { return !(*this == o); }

    std::string elem_to_string(uint64_t x) const;

private:
    unsigned k_;
    uint64_t mod_;
};

/// Deterministic lowest-bit-pattern irreducible of degree k over F_2.
uint64_t default_gf2_modulus(unsigned k);

} // namespace qalg
