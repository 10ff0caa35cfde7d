#include "qalg/factor.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace qalg {

Poly random_poly(const GFContext& f, int max_deg, Rng& rng) {
    std::vector<uint64_t> c(static_cast<size_t>(max_deg) + 1);
    for (auto& x : c) x = rng.next() & f.mask();
    return Poly(f, std::move(c));
}

Poly random_monic(const GFContext& f, int deg, Rng& rng) {
    std::vector<uint64_t> c(static_cast<size_t>(deg) + 1);
    for (int i = 0; i < deg; ++i) c[static_cast<size_t>(i)] = rng.next() & f.mask();
    c[static_cast<size_t>(deg)] = 1;
    return Poly(f, std::move(c));
}

bool poly_is_irreducible(const Poly& p) {
    int n = p.degree();
    if (n < 1) throw std::domain_error("poly_is_irreducible: constant input");
    if (n == 1) return true;
    const GFContext& f = p.field();
    const uint64_t qbits = f.k();
    Poly t = Poly::t(f);
    // t^(q^n) == t mod p and gcd(t^(q^(n/l)) - t, p) == 1 for primes l | n.
    if (pow2mod(t, qbits * static_cast<uint64_t>(n), p) != t % p) return false;
    for (int l = 2; l <= n; ++l) {
        if (n % l != 0) continue;
        bool prime = true;
        for (int d = 2; d * d <= l; ++d)
            if (l % d == 0) prime = false;
        if (!prime) continue;
        Poly g = gcd(pow2mod(t, qbits * static_cast<uint64_t>(n / l), p) + t, p);
        if (!g.is_one()) return false;
    }
    return true;
}

namespace {

// Distinct-degree phase: splits a monic squarefree polynomial into products
// of irreducibles of equal degree.
std::vector<std::pair<Poly, int>> distinct_degree(const Poly& f) {
    const GFContext& F = f.field();
    std::vector<std::pair<Poly, int>> out;
    Poly rem = f;
    Poly h = Poly::t(F) % rem; // t^(q^d) mod rem as d grows
    int d = 0;
    while (rem.degree() > 0) {
        ++d;
        if (2 * d > rem.degree()) {
            out.emplace_back(rem, rem.degree());
            break;
        }
        h = pow2mod(h, F.k(), rem);
        Poly g = gcd(h + Poly::t(F), rem);
        if (!g.is_one()) {
            out.emplace_back(g, d);
            rem = rem / g;
            h = h % rem;
        }
    }
    return out;
}

// Equal-degree splitting in characteristic 2 via the half-trace map.
void equal_degree(const Poly& f, int d, Rng& rng, std::vector<Poly>& out) {
    if (f.degree() == d) {
        out.push_back(f.monic());
        return;
    }
    const GFContext& F = f.field();
    uint64_t m = F.k() * static_cast<uint64_t>(d);
    for (;;) {
        Poly r = random_poly(F, f.degree() - 1, rng);
        if (r.is_zero()) continue;
        // Tr(r) = r + r^2 + r^4 + ... + r^(2^(m-1)) mod f
        Poly tr = r % f;
        Poly pw = tr;
        for (uint64_t i = 1; i < m; ++i) {
            pw = (pw * pw) % f;
            tr = tr + pw;
        }
        Poly g = gcd(tr, f);
        if (g.degree() > 0 && g.degree() < f.degree()) {
            equal_degree(g, d, rng, out);
            equal_degree(f / g, d, rng, out);
            return;
        }
    }
}

// Squarefree decomposition, characteristic 2. Returns monic squarefree parts
// with multiplicities (not necessarily coprime across recursion levels, so
// the caller merges).
void squarefree_decomp(const Poly& f, int mult, std::map<int, Poly>& parts) {
    const GFContext& F = f.field();
    Poly fp = f.derivative();
    if (fp.is_zero()) {
        // f = g(t)^2
        squarefree_decomp(f.sqrt(), 2 * mult, parts);
        return;
    }
    Poly c = gcd(f, fp);
    Poly w = f / c; // product of factors with odd-ish multiplicity pattern
    int i = 1;
    while (!w.is_one()) {
        Poly y = gcd(w, c);
        Poly part = w / y;
        if (part.degree() > 0) {
            auto it = parts.find(i * mult);
            if (it == parts.end()) parts.emplace(i * mult, part.monic());
            else it->second = (it->second * part).monic();
        }
        w = y;
        c = c / y;
        ++i;
    }
    if (c.degree() > 0) squarefree_decomp(c, mult, parts);
    (void)F;
}

} // namespace

Factorization poly_factor(const Poly& p, uint64_t seed) {
    if (p.is_zero()) throw std::domain_error("poly_factor: zero input");
    Factorization out;
    out.lead = p.lead();
    if (p.degree() == 0) return out;
    std::map<int, Poly> parts;
    squarefree_decomp(p.monic(), 1, parts);
    Rng rng(seed);
    std::map<std::pair<int, std::vector<uint64_t>>, std::pair<Poly, int>> acc;
    for (auto& [mult, sf] : parts) {
        for (auto& [prod, d] : distinct_degree(sf)) {
            std::vector<Poly> irr;
            equal_degree(prod, d, rng, irr);
            for (auto& q : irr) {
                auto key = std::make_pair(q.degree(), q.coeffs());
                auto it = acc.find(key);
                if (it == acc.end()) acc.emplace(key, std::make_pair(q, mult));
                else it->second.second += mult;
            }
        }
    }
    for (auto& [key, pm] : acc) out.factors.push_back({pm.first, pm.second});
    std::sort(out.factors.begin(), out.factors.end(),
              [](const PolyFactor& a, const PolyFactor& b) { return a.p.less(b.p); });
    return out;
}

Poly squarefree_part(const Poly& p, uint64_t seed) {
    auto f = poly_factor(p, seed);
    Poly r = Poly::one(p.field());
    for (auto& [q, m] : f.factors)
        if (m & 1) r = r * q;
    return r;
}

std::optional<Poly> random_irreducible_in_class(const Poly& a, const Poly& m,
                                                const IrredConstraints& cons, uint64_t seed) {
    const GFContext& F = a.field();
    if (m.degree() < 1) throw std::invalid_argument("sampler: deg(m) must be >= 1");
    if (!gcd(a, m).is_one()) throw std::invalid_argument("sampler: gcd(a,m) != 1");

    // Combine the class mod m with the optional low-order class mod t^e.
    Poly modulus = m.monic();
    Poly residue = a % modulus;
    if (cons.low_power > 0) {
        Poly te = Poly::monomial(F, 1, static_cast<unsigned>(cons.low_power));
        Poly g = gcd(modulus, te);
        Poly low = *cons.low_residue % te;
        if (!g.is_one()) {
            if ((low + residue) % g != Poly::zero(F)) return std::nullopt; // inconsistent
            // Split modulus = t^v * m' and recombine over coprime parts.
            Poly mprime = modulus;
            int v = 0;
            Poly t = Poly::t(F);
            while ((mprime % t).is_zero()) { mprime = mprime / t; ++v; }
            if (v < cons.low_power) {
                residue = crt({residue % mprime, low}, {mprime, te});
                modulus = mprime * te;
            }
        } else {
            residue = crt({residue, low}, {modulus, te});
            modulus = modulus * te;
        }
    }

    int dM = modulus.degree();
    int j = static_cast<int>(cons.top_coeffs.size());
    // Degree selection.
    int N;
    if (cons.exact_degree) {
        N = *cons.exact_degree;
    } else {
        N = 2 * (m.degree() + 2);
        if (N <= dM + j) N = dM + j + 1;
        if (cons.degree_parity && (N & 1) != *cons.degree_parity) ++N;
    }
    if (N < 1) return std::nullopt;

    long long budget = 64LL * N * std::max(1, m.degree()) * static_cast<long long>(F.k());
    Rng rng(seed ^ 0xa5a5a5a5u);
    int step = (cons.degree_parity || cons.exact_degree) ? 2 : 1;
    for (int n = N; budget > 0; n += (cons.exact_degree ? 0 : step)) {
        if (cons.exact_degree && n != N) break;
        if (n <= dM + j && !cons.exact_degree) continue;
        for (int trial = 0; trial < 16 && budget > 0; ++trial, --budget) {
            // h = residue + modulus * g, monic of degree n with the top j
            // coefficients pinned.
            int dg = n - dM;
            if (dg < 0) { budget = 0; break; }
            Poly g = random_poly(F, std::max(dg - 1, 0), rng);
            if (dg == 0) g = Poly::zero(F);
            // Force the top coefficients of h: h_i for i in [n-j, n] are
            // determined by g's top coefficients via division by modulus's
            // leading part.
            std::vector<uint64_t> want(static_cast<size_t>(j) + 1);
            want[0] = 1;
            for (int i = 0; i < j; ++i) want[static_cast<size_t>(i + 1)] = cons.top_coeffs[static_cast<size_t>(i)];
            // Compute the needed g top coefficients by power-series division:
            // (h - residue)/modulus truncated at the top. Since deg(residue) < dM <= n-j
            // might fail when dM > n-j; guarded by n > dM + j above (unless exact N given).
            if (n - j <= residue.degree() || n - j < dM) {
                // Top coefficients overlap the fixed residue; just sample and filter.
            } else {
                for (int i = 0; i <= std::min(j, dg); ++i) {
                    // coefficient of t^{n-i} in modulus*g:
                    // sum_{l} modulus_{dM-l} * g_{dg-i+l}
                    uint64_t acc = 0;
                    for (int l = 1; l <= i && dg - i + l <= dg; ++l) {
                        if (dg - i + l < 0) continue;
                        acc = F.add(acc, F.mul(modulus.coeff(dM - l), g.coeff(dg - i + l)));
                    }
                    uint64_t need = F.add(want[static_cast<size_t>(i)], acc);
                    g.set_coeff(dg - i, F.mul(need, F.inv(modulus.lead())));
                }
            }
            Poly h = residue + modulus * g;
            if (h.degree() != n || !h.is_monic()) continue;
            bool ok = true;
            for (int i = 0; i < j; ++i)
                if (h.coeff(n - 1 - i) != cons.top_coeffs[static_cast<size_t>(i)]) { ok = false; break; }
            if (!ok) continue;
            if (cons.degree_parity && (n & 1) != *cons.degree_parity) continue;
            if (poly_is_irreducible(h)) return h;
        }
        if (cons.exact_degree) {
            // Exhaust the budget on the pinned degree.
            continue;
        }
    }
    return std::nullopt;
}

} // namespace qalg
