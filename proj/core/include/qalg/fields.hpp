#pragma once

#include "qalg/ratfun.hpp"

#include <stdexcept>
#include <string>

namespace qalg {

// Field contexts share a small duck-typed interface used by the templated
// linear algebra and algebra code: Elem, zero, one, add, mul, inv, is_zero,
// eq, to_string. Characteristic 2 throughout, so subtraction is addition.

/// The rational function field F_{2^k}(t).
class RatField {
public:
    using Elem = RatFun;
    explicit RatField(GFContext gf) : gf_(gf) {}
    const GFContext& gf() const { return gf_; }

    Elem zero() const { return RatFun::zero(gf_); }
    Elem one() const { return RatFun::one(gf_); }
    Elem add(const Elem& a, const Elem& b) const { return a + b; }
    Elem mul(const Elem& a, const Elem& b) const { return a * b; }
    Elem inv(const Elem& a) const { return a.inv(); }
    bool is_zero(const Elem& a) const { return a.is_zero(); }
    bool eq(const Elem& a, const Elem& b) const { return a == b; }
    std::string to_string(const Elem& a) const { return a.to_string(); }

private:
    GFContext gf_;
};

/// Element of the separable quadratic extension L = K(s), s^2 + s = c.
struct LElem {
    RatFun x, y; // x + y s
    bool operator==(const LElem& o) const { return x == o.x && y == o.y; }
    bool operator!=(const LElem& o) const { return !(*this == o); }
};

/// L = F_{2^k}(t)[s]/(s^2+s+c), an Artin-Schreier quadratic extension.
/// Requires c outside the image of x^2+x so the extension is a field;
/// sigma(s) = s + 1 generates Gal(L/K).
class QuadExtField {
public:
    using Elem = LElem;
    explicit QuadExtField(RatFun c) : c_(std::move(c)) {}
    const GFContext& gf() const { return c_.field(); }
    const RatFun& param() const { return c_; }

    Elem zero() const { return {RatFun::zero(gf()), RatFun::zero(gf())}; }
    Elem one() const { return {RatFun::one(gf()), RatFun::zero(gf())}; }
    Elem s() const { return {RatFun::zero(gf()), RatFun::one(gf())}; }
    Elem embed(const RatFun& a) const { return {a, RatFun::zero(gf())}; }

    Elem add(const Elem& a, const Elem& b) const { return {a.x + b.x, a.y + b.y}; }
    Elem mul(const Elem& a, const Elem& b) const {
        // (x1 + y1 s)(x2 + y2 s), with s^2 = s + c
        RatFun yy = a.y * b.y;
        return {a.x * b.x + yy * c_, a.x * b.y + a.y * b.x + yy};
    }
    Elem inv(const Elem& a) const {
        // norm = a * sigma(a) = x^2 + xy + c y^2 in K
        RatFun n = a.x.square() + a.x * a.y + c_ * a.y.square();
        if (n.is_zero()) throw std::domain_error("QuadExtField: inverse of zero (or c is a trace)");
        Elem conj = sigma(a);
        RatFun ni = n.inv();
        return {conj.x * ni, conj.y * ni};
    }
    /// The nontrivial K-automorphism: s -> s + 1.
    Elem sigma(const Elem& a) const { return {a.x + a.y, a.y}; }
    RatFun norm(const Elem& a) const { return a.x.square() + a.x * a.y + c_ * a.y.square(); }
    RatFun tr(const Elem& a) const { return a.y; }

    bool is_zero(const Elem& a) const { return a.x.is_zero() && a.y.is_zero(); }
    bool eq(const Elem& a, const Elem& b) const { return a == b; }
    std::string to_string(const Elem& a) const {
        if (a.y.is_zero()) return a.x.to_string();
        std::string r = "(" + a.y.to_string() + ")s";
        if (!a.x.is_zero()) r = a.x.to_string() + " + " + r;
        return r;
    }

private:
    RatFun c_;
};

/// The residue field F_{2^k}[t]/(pi) at a finite place, elements reduced mod pi.
class ResidueField {
public:
    using Elem = Poly;
    explicit ResidueField(Poly pi) : pi_(std::move(pi)) {
        if (!pi_.is_monic() || pi_.degree() < 1)
            throw std::invalid_argument("ResidueField: modulus must be monic nonconstant");
    }
    const GFContext& gf() const { return pi_.field(); }
    const Poly& modulus() const { return pi_; }
    /// Extension degree over F_2: k * deg(pi).
    uint64_t abs_degree() const { return gf().k() * static_cast<uint64_t>(pi_.degree()); }

    Elem zero() const { return Poly::zero(gf()); }
    Elem one() const { return Poly::one(gf()); }
    Elem reduce(const Poly& p) const { return p % pi_; }
    Elem add(const Elem& a, const Elem& b) const { return a + b; }
    Elem mul(const Elem& a, const Elem& b) const { return (a * b) % pi_; }
    Elem inv(const Elem& a) const { return invmod(a, pi_); }
    bool is_zero(const Elem& a) const { return a.is_zero(); }
    bool eq(const Elem& a, const Elem& b) const { return a == b; }
    std::string to_string(const Elem& a) const { return a.to_string(); }

private:
    Poly pi_;
};

/// The constant field F_{2^k} itself, wrapped in the field-context shape.
class GFField {
public:
    using Elem = uint64_t;
    explicit GFField(GFContext gf) : gf_(gf) {}
    const GFContext& gf() const { return gf_; }

    Elem zero() const { return 0; }
    Elem one() const { return 1; }
    Elem add(Elem a, Elem b) const { return a ^ b; }
    Elem mul(Elem a, Elem b) const { return gf_.mul(a, b); }
    Elem inv(Elem a) const { return gf_.inv(a); }
    bool is_zero(Elem a) const { return a == 0; }
    bool eq(Elem a, Elem b) const { return a == b; }
    std::string to_string(Elem a) const { return gf_.elem_to_string(a); }

private:
    GFContext gf_;
};

} // namespace qalg
