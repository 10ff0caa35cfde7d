#pragma once

#include "qalg/gf.hpp"

#include <cassert>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qalg {

/// Univariate polynomial in t over F_{2^k}. Coefficients are stored low to
/// high with trailing zeros stripped; the zero polynomial has an empty
/// coefficient vector and degree -1.
class Poly {
public:
    Poly() = default;
    explicit Poly(GFContext f) : f_(f) {}
    Poly(GFContext f, std::vector<uint64_t> coeffs) : f_(f), c_(std::move(coeffs)) { normalize(); }

    static Poly zero(const GFContext& f) { return Poly(f); }
    static Poly one(const GFContext& f) { return Poly(f, {1}); }
    static Poly constant(const GFContext& f, uint64_t c) { return Poly(f, {c}); }
    static Poly t(const GFContext& f) { return Poly(f, {0, 1}); }
    /// c * t^e
    static Poly monomial(const GFContext& f, uint64_t c, unsigned e);

    const GFContext& field() const { return f_; }
    const std::vector<uint64_t>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
    bool is_constant() const { return c_.size() <= 1; }
    bool is_monic() const { return !c_.empty() && c_.back() == 1; }
    uint64_t lead() const { return c_.empty() ? 0 : c_.back(); }
    uint64_t coeff(int i) const {
        return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[static_cast<size_t>(i)] : 0;
    }
    void set_coeff(int i, uint64_t v);

    uint64_t eval(uint64_t x) const;

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const { return *this + o; } // char 2
    Poly operator*(const Poly& o) const;
    Poly operator*(uint64_t c) const;
    Poly& operator+=(const Poly& o) { return *this = *this + o; }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }
    bool operator==(const Poly& o) const { return c_ == o.c_; }
    bool operator!=(const Poly& o) const { return c_ != o.c_; }

    /// Lexicographic on (degree, coefficients high to low); total order used
    /// for canonical tie-breaks.
    bool less(const Poly& o) const;

    std::pair<Poly, Poly> divmod(const Poly& d) const;
    Poly operator/(const Poly& d) const { return divmod(d).first; }
    Poly operator%(const Poly& d) const { return divmod(d).second; }
    bool divides(const Poly& o) const { return (o % *this).is_zero(); }

    Poly monic() const;
    Poly derivative() const;
    Poly shift(unsigned e) const; // multiply by t^e
    /// Formal square root; requires the polynomial to be a square.
    Poly sqrt() const;
    bool is_square() const;

    std::string to_string() const;

private:
    void normalize() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    GFContext f_;
    std::vector<uint64_t> c_;
};

Poly gcd(const Poly& a, const Poly& b);
/// g = gcd(a,b) monic, with g = u*a + v*b.
struct XGcd {
    Poly g, u, v;
};
XGcd xgcd(const Poly& a, const Poly& b);

Poly powmod(const Poly& base, uint64_t e, const Poly& m);
/// base^(2^e) mod m by repeated squaring.
Poly pow2mod(const Poly& base, uint64_t e, const Poly& m);
Poly invmod(const Poly& a, const Poly& m);
/// Chinese remainder: x = r_i mod m_i for pairwise coprime moduli.
Poly crt(const std::vector<Poly>& residues, const std::vector<Poly>& moduli);

} // namespace qalg
