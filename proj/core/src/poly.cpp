#include "qalg/poly.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace qalg {

Poly Poly::monomial(const GFContext& f, uint64_t c, unsigned e) {
    std::vector<uint64_t> v(e + 1, 0);
    v[e] = c;
    return Poly(f, std::move(v));
}

void Poly::set_coeff(int i, uint64_t v) {
    assert(i >= 0);
    if (i >= static_cast<int>(c_.size())) c_.resize(static_cast<size_t>(i) + 1, 0);
    c_[static_cast<size_t>(i)] = v;
    normalize();
}

uint64_t Poly::eval(uint64_t x) const {
    uint64_t r = 0;
    for (size_t i = c_.size(); i-- > 0;) r = f_.add(f_.mul(r, x), c_[i]);
    return r;
}

Poly Poly::operator+(const Poly& o) const {
    std::vector<uint64_t> r(std::max(c_.size(), o.c_.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(static_cast<int>(i)) ^ o.coeff(static_cast<int>(i));
    return Poly(f_, std::move(r));
}

Poly Poly::operator*(const Poly& o) const {
    if (is_zero() || o.is_zero()) return Poly(f_);
    std::vector<uint64_t> r(c_.size() + o.c_.size() - 1, 0);
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        for (size_t j = 0; j < o.c_.size(); ++j) {
            if (o.c_[j] == 0) continue;
            r[i + j] ^= f_.mul(c_[i], o.c_[j]);
        }
    }
    return Poly(f_, std::move(r));
}

Poly Poly::operator*(uint64_t c) const {
    if (c == 0) return Poly(f_);
    std::vector<uint64_t> r = c_;
    for (auto& x : r) x = f_.mul(x, c);
    return Poly(f_, std::move(r));
}

bool Poly::less(const Poly& o) const {
    if (degree() != o.degree()) return degree() < o.degree();
    for (int i = degree(); i >= 0; --i)
        if (coeff(i) != o.coeff(i)) return coeff(i) < o.coeff(i);
    return false;
}

std::pair<Poly, Poly> Poly::divmod(const Poly& d) const {
    if (d.is_zero()) throw std::domain_error("Poly division by zero");
    Poly r = *this;
    if (r.degree() < d.degree()) return {Poly(f_), r};
    std::vector<uint64_t> q(static_cast<size_t>(r.degree() - d.degree()) + 1, 0);
    uint64_t dl = f_.inv(d.lead());
    while (r.degree() >= d.degree()) {
        int sh = r.degree() - d.degree();
        uint64_t c = f_.mul(r.lead(), dl);
        q[static_cast<size_t>(sh)] = c;
        r += d.shift(static_cast<unsigned>(sh)) * c;
    }
    return {Poly(f_, std::move(q)), r};
}

Poly Poly::monic() const {
    if (is_zero() || c_.back() == 1) return *this;
    return *this * f_.inv(c_.back());
}

Poly Poly::derivative() const {
    if (c_.size() <= 1) return Poly(f_);
    std::vector<uint64_t> r(c_.size() - 1, 0);
    for (size_t i = 1; i < c_.size(); ++i)
        if (i & 1) r[i - 1] = c_[i]; // i * c_i = c_i for odd i in char 2
    return Poly(f_, std::move(r));
}

Poly Poly::shift(unsigned e) const {
    if (is_zero()) return *this;
    std::vector<uint64_t> r(c_.size() + e, 0);
    std::copy(c_.begin(), c_.end(), r.begin() + e);
    return Poly(f_, std::move(r));
}

bool Poly::is_square() const {
    for (size_t i = 1; i < c_.size(); i += 2)
        if (c_[i] != 0) return false;
    return true;
}

Poly Poly::sqrt() const {
    if (!is_square()) throw std::domain_error("Poly::sqrt of a non-square");
    std::vector<uint64_t> r((c_.size() + 1) / 2, 0);
    for (size_t i = 0; i < r.size(); ++i) r[i] = f_.sqrt(coeff(static_cast<int>(2 * i)));
    return Poly(f_, std::move(r));
}

std::string Poly::to_string() const {
    if (is_zero()) return f_.k() == 1 ? "0" : "{0}";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
        uint64_t c = coeff(i);
        if (c == 0) continue;
        if (!first) os << "+";
        first = false;
        if (i == 0) {
            if (f_.k() == 1) os << "1";
            else os << f_.elem_to_string(c);
        } else {
            if (c != 1) os << f_.elem_to_string(c);
            os << "t";
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

Poly gcd(const Poly& a, const Poly& b) {
    Poly x = a, y = b;
    while (!y.is_zero()) {
        Poly r = x % y;
        x = y;
        y = r;
    }
    return x.monic();
}

XGcd xgcd(const Poly& a, const Poly& b) {
    const GFContext& f = a.field();
    Poly r0 = a, r1 = b;
    Poly s0 = Poly::one(f), s1 = Poly::zero(f);
    Poly t0 = Poly::zero(f), t1 = Poly::one(f);
    while (!r1.is_zero()) {
        auto [q, r] = r0.divmod(r1);
        r0 = r1; r1 = r;
        Poly s = s0 + q * s1; s0 = s1; s1 = s;
        Poly t = t0 + q * t1; t0 = t1; t1 = t;
    }
    if (r0.is_zero()) return {r0, s0, t0};
    uint64_t l = f.inv(r0.lead());
    return {r0 * l, s0 * l, t0 * l};
}

Poly powmod(const Poly& base, uint64_t e, const Poly& m) {
    Poly r = Poly::one(base.field());
    Poly b = base % m;
    while (e) {
        if (e & 1) r = (r * b) % m;
        b = (b * b) % m;
        e >>= 1;
    }
    return r;
}

Poly pow2mod(const Poly& base, uint64_t e, const Poly& m) {
    Poly b = base % m;
    for (uint64_t i = 0; i < e; ++i) b = (b * b) % m;
    return b;
}

Poly invmod(const Poly& a, const Poly& m) {
    auto e = xgcd(a % m, m);
    if (!e.g.is_one()) throw std::domain_error("invmod: not invertible");
    return e.u % m;
}

Poly crt(const std::vector<Poly>& residues, const std::vector<Poly>& moduli) {
    if (residues.size() != moduli.size() || residues.empty())
        throw std::invalid_argument("crt: size mismatch");
    Poly x = residues[0] % moduli[0];
    Poly m = moduli[0];
    for (size_t i = 1; i < residues.size(); ++i) {
        // x + m * u = residues[i] mod moduli[i]
        Poly u = (invmod(m, moduli[i]) * ((residues[i] + x) % moduli[i])) % moduli[i];
        x = x + m * u;
        m = m * moduli[i];
        x = x % m;
    }
    return x;
}

} // namespace qalg
