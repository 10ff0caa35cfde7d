#pragma once

#include "qalg/poly.hpp"

#include <limits>
#include <optional>

namespace qalg {

/// Element of F_{2^k}(t) in canonical form: monic denominator, gcd(num,den)=1.
class RatFun {
public:
    RatFun() = default;
    explicit RatFun(Poly num) : num_(std::move(num)), den_(Poly::one(num_.field())) {}
    RatFun(Poly num, Poly den);

    static RatFun zero(const GFContext& f) { return RatFun(Poly::zero(f)); }
    static RatFun one(const GFContext& f) { return RatFun(Poly::one(f)); }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    const GFContext& field() const { return num_.field(); }
    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }
    bool is_polynomial() const { return den_.is_one(); }
    bool is_constant() const { return num_.is_constant() && den_.is_one(); }

    RatFun operator+(const RatFun& o) const;
    RatFun operator-(const RatFun& o) const { return *this + o; }
    RatFun operator*(const RatFun& o) const;
    RatFun operator/(const RatFun& o) const;
    RatFun inv() const;
    RatFun square() const { return *this * *this; }
    RatFun& operator+=(const RatFun& o) { return *this = *this + o; }
    RatFun& operator*=(const RatFun& o) { return *this = *this * o; }
    bool operator==(const RatFun& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const RatFun& o) const { return !(*this == o); }

    std::string to_string() const;

private:
    Poly num_, den_;
};

/// A place of F_{2^k}(t): a monic irreducible polynomial or the degree place.
class Place {
public:
    static Place infinity(const GFContext& f) { return Place(Poly::t(f), true); }
    static Place finite(Poly p);

    bool is_infinity() const { return inf_; }
    const Poly& prime() const { return p_; }
    const GFContext& field() const { return p_.field(); }
    int degree() const { return inf_ ? 1 : p_.degree(); }

    bool operator==(const Place& o) const { return inf_ == o.inf_ && (inf_ || p_ == o.p_); }
    bool operator!=(const Place& o) const { return !(*this == o); }
    /// Total order for canonical place sets: finite places by carrier, then infinity.
    bool less(const Place& o) const {
        if (inf_ != o.inf_) return !inf_;
        if (inf_) return false;
        return p_.less(o.p_);
    }

    std::string to_string() const { return inf_ ? "inf" : p_.to_string(); }

private:
    Place(Poly p, bool inf) : p_(std::move(p)), inf_(inf) {}
    Poly p_;
    bool inf_ = false;
};

inline constexpr int VAL_INFINITY = std::numeric_limits<int>::max();

/// v_p(x); v_p(0) = VAL_INFINITY; v_inf(num/den) = deg den - deg num.
int valuation(const RatFun& x, const Place& p);
int valuation(const Poly& x, const Poly& prime);

/// Quadratic residue symbol [f, p) in {0,1}. Requires v_p(f) >= 0.
/// 0 iff x^2 + x = f is solvable in the completion at p.
int residue_symbol(const RatFun& f, const Place& p);

/// Exact square root in F_{2^k}(t), absent when the input is not a square.
std::optional<RatFun> ratfun_sqrt(const RatFun& c);

} // namespace qalg
