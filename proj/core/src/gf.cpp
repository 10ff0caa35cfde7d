#include "qalg/gf.hpp"

#include <vector>

namespace qalg {
namespace bitpoly {

int degree(uint64_t p) {
    if (p == 0) return -1;
    return 63 - __builtin_clzll(p);
}

uint64_t mul(uint64_t a, uint64_t b) {
    // Carryless product; caller keeps degrees below 32 so no overflow.
    uint64_t r = 0;
    while (b) {
        if (b & 1) r ^= a;
        a <<= 1;
        b >>= 1;
    }
    return r;
}

uint64_t mod(uint64_t a, uint64_t m) {
    int dm = degree(m);
    int da = degree(a);
    while (da >= dm) {
        a ^= m << (da - dm);
        da = degree(a);
    }
    return a;
}

uint64_t gcd(uint64_t a, uint64_t b) {
    while (b) {
        uint64_t r = mod(a, b);
        a = b;
        b = r;
    }
    return a;
}

static uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) { return mod(mul(a, b), m); }

bool is_irreducible(uint64_t p) {
    int n = degree(p);
    if (n <= 0) return false;
    if (n == 1) return true;
    // x^{2^n} == x mod p, and gcd(x^{2^{n/q}} - x, p) == 1 for prime q | n.
    uint64_t x = 0b10;
    uint64_t t = x;
    std::vector<uint64_t> powers(n + 1); // t after i squarings
    powers[0] = t;
    for (int i = 1; i <= n; ++i) {
        t = mulmod(t, t, p);
        powers[i] = t;
    }
    if (powers[n] != x) return false;
    for (int q = 2; q <= n; ++q) {
        if (n % q != 0) continue;
        bool prime = true;
        for (int d = 2; d * d <= q; ++d)
            if (q % d == 0) prime = false;
        if (!prime) continue;
        if (gcd(powers[n / q] ^ x, p) != 1) return false;
    }
    return true;
}

} // namespace bitpoly

uint64_t default_gf2_modulus(unsigned k) {
    if (k == 1) return 0b10; // u
    for (uint64_t low = 1; low < (1ull << k); low += 2) {
        uint64_t cand = (1ull << k) | low;
        if (bitpoly::is_irreducible(cand)) return cand;
    }
    throw std::logic_error("no irreducible of requested degree"); // unreachable
}

GFContext::GFContext(unsigned k, uint64_t modulus) : k_(k), mod_(modulus) {
    if (k == 0 || k > 32) throw std::invalid_argument("GFContext: k must be in [1,32]");
    if (mod_ == 0) {
        mod_ = default_gf2_modulus(k);
    } else {
        if (bitpoly::degree(mod_) != static_cast<int>(k))
            throw std::invalid_argument("GFContext: modulus degree != k");
        if (!bitpoly::is_irreducible(mod_))
            throw std::invalid_argument("GFContext: modulus reducible over F_2");
    }
}

uint64_t GFContext::mul(uint64_t a, uint64_t b) const {
    return bitpoly::mod(bitpoly::mul(a, b), mod_);
}

uint64_t GFContext::pow(uint64_t a, uint64_t e) const {
    uint64_t r = 1;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

uint64_t GFContext::inv(uint64_t a) const {
    if (a == 0) throw std::domain_error("GF inverse of zero");
    // Extended Euclid in F_2[u].
    uint64_t r0 = mod_, r1 = a, s0 = 0, s1 = 1;
    while (r1 != 0) {
        int shift;
        uint64_t q = 0, r = r0;
        int d1 = bitpoly::degree(r1);
        while ((shift = bitpoly::degree(r) - d1) >= 0) {
            q ^= 1ull << shift;
            r ^= r1 << shift;
        }
        r0 = r1;
        r1 = r;
        uint64_t s = s0 ^ bitpoly::mul(q, s1);
        s0 = s1;
        s1 = s;
    }
    return bitpoly::mod(s0, mod_);
}

int GFContext::trace(uint64_t x) const {
    uint64_t acc = 0, t = x;
    for (unsigned i = 0; i < k_; ++i) {
        acc ^= t;
        t = mul(t, t);
    }
    return static_cast<int>(acc & 1); // acc lies in F_2
}

uint64_t GFContext::sqrt(uint64_t x) const {
    uint64_t r = x;
    for (unsigned i = 0; i + 1 < k_; ++i) r = mul(r, r);
    return r;
}

std::optional<uint64_t> GFContext::solve_artin_schreier(uint64_t a) const {
    if (trace(a) != 0) return std::nullopt;
    // x -> x^2 + x is F_2-linear; solve the k x k system over F_2.
    // Row i of the matrix collects bit i of (e_j^2 + e_j) across basis j;
    // the rhs bit is appended at position k.
    std::vector<uint64_t> rows(k_, 0);
    for (unsigned j = 0; j < k_; ++j) {
        uint64_t e = 1ull << j;
        uint64_t img = mul(e, e) ^ e;
        for (unsigned i = 0; i < k_; ++i)
            if ((img >> i) & 1) rows[i] |= 1ull << j;
    }
    for (unsigned i = 0; i < k_; ++i) rows[i] |= ((a >> i) & 1ull) << k_;
    std::vector<int> where(k_, -1);
    unsigned row = 0;
    for (unsigned col = 0; col < k_ && row < k_; ++col) {
        unsigned sel = row;
        while (sel < k_ && !((rows[sel] >> col) & 1)) ++sel;
        if (sel == k_) continue;
        std::swap(rows[sel], rows[row]);
        for (unsigned i = 0; i < k_; ++i)
            if (i != row && ((rows[i] >> col) & 1)) rows[i] ^= rows[row];
        where[col] = static_cast<int>(row);
        ++row;
    }
    for (unsigned i = row; i < k_; ++i)
        if ((rows[i] >> k_) & 1) return std::nullopt; // cannot happen when trace is 0
    uint64_t sol = 0;
    for (unsigned col = 0; col < k_; ++col)
        if (where[col] >= 0 && ((rows[where[col]] >> k_) & 1)) sol |= 1ull << col;
    uint64_t other = sol ^ 1; // the second root
    return sol < other ? sol : other;
}

std::string GFContext::elem_to_string(uint64_t x) const {
    char buf[32];
    snprintf(buf, sizeof buf, "{%llx}", static_cast<unsigned long long>(x));
    return buf;
}

} // namespace qalg
