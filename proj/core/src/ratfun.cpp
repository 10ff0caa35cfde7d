#include "qalg/ratfun.hpp"

#include "qalg/factor.hpp"

#include <stdexcept>

namespace qalg {

RatFun::RatFun(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw std::invalid_argument("RatFun: zero denominator");
    if (num_.is_zero()) {
        den_ = Poly::one(num_.field());
        return;
    }
    Poly g = gcd(num_, den_);
    if (g.degree() > 0) {
        num_ = num_ / g;
        den_ = den_ / g;
    }
    uint64_t lc = den_.lead();
    if (lc != 1) {
        uint64_t il = num_.field().inv(lc);
        num_ = num_ * il;
        den_ = den_ * il;
    }
}

RatFun RatFun::operator+(const RatFun& o) const {
    return RatFun(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

RatFun RatFun::operator*(const RatFun& o) const {
    return RatFun(num_ * o.num_, den_ * o.den_);
}

RatFun RatFun::operator/(const RatFun& o) const {
    if (o.is_zero()) throw std::domain_error("RatFun: division by zero");
    return RatFun(num_ * o.den_, den_ * o.num_);
}

RatFun RatFun::inv() const {
    if (is_zero()) throw std::domain_error("RatFun: inverse of zero");
    return RatFun(den_, num_);
}

std::string RatFun::to_string() const {
    if (den_.is_one()) return num_.to_string();
    return num_.to_string() + " / " + den_.to_string();
}

Place Place::finite(Poly p) {
    if (!p.is_monic() || p.degree() < 1 || !poly_is_irreducible(p))
        throw std::invalid_argument("Place: carrier must be monic irreducible");
    return Place(std::move(p), false);
}

int valuation(const Poly& x, const Poly& prime) {
    if (x.is_zero()) return VAL_INFINITY;
    int v = 0;
    Poly r = x;
    for (;;) {
        auto [q, rem] = r.divmod(prime);
        if (!rem.is_zero()) return v;
        r = q;
        ++v;
    }
}

int valuation(const RatFun& x, const Place& p) {
    if (x.is_zero()) return VAL_INFINITY;
    if (p.is_infinity()) return x.den().degree() - x.num().degree();
    return valuation(x.num(), p.prime()) - valuation(x.den(), p.prime());
}

int residue_symbol(const RatFun& f, const Place& p) {
    const GFContext& F = f.field();
    if (valuation(f, p) < 0) throw std::domain_error("residue_symbol: pole at the place");
    if (p.is_infinity()) {
        // constant term of the expansion in 1/t
        uint64_t c0 = 0;
        if (!f.is_zero() && f.num().degree() == f.den().degree())
            c0 = F.mul(f.num().lead(), F.inv(f.den().lead()));
        return F.trace(c0);
    }
    const Poly& pi = p.prime();
    // residue of f in F_{q^deg pi}
    Poly r = (f.num() % pi) * invmod(f.den() % pi, pi) % pi;
    // absolute trace down to F_2: r + r^2 + ... + r^(2^(k deg pi - 1))
    uint64_t m = F.k() * static_cast<uint64_t>(pi.degree());
    Poly tr = r, pw = r;
    for (uint64_t i = 1; i < m; ++i) {
        pw = (pw * pw) % pi;
        tr = tr + pw;
    }
    if (tr.degree() > 0 || (tr.coeff(0) != 0 && tr.coeff(0) != 1))
        throw std::logic_error("residue_symbol: trace left the prime field");
    return static_cast<int>(tr.coeff(0));
}

std::optional<RatFun> ratfun_sqrt(const RatFun& c) {
    if (!c.num().is_square() || !c.den().is_square()) return std::nullopt;
    return RatFun(c.num().sqrt(), c.den().sqrt());
}

} // namespace qalg
