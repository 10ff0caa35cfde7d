#include "qalg/quadform.hpp"

#include "qalg/splitter.hpp"

#include <algorithm>
#include <stdexcept>

namespace qalg {

namespace {

RatFun rf(const Poly& p) { return RatFun(p); }

} // namespace

RatFun QuadForm4::eval(const std::array<RatFun, 4>& x) const {
    RatFun b1 = x[0].square() + x[0] * x[1] + a2 * x[1].square();
    RatFun b2 = x[2].square() + x[2] * x[3] + a4 * x[3].square();
    return a1 * b1 + a3 * b2;
}

RatFun GeneralQuadForm4::eval(const std::array<RatFun, 4>& x) const {
    RatFun acc = RatFun::zero(x[0].field());
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) acc += q[i][j] * x[i] * x[j];
    return acc;
}

GeneralQuadForm4 GeneralQuadForm4::zero(const GFContext& f) {
    GeneralQuadForm4 g;
    for (auto& row : g.q)
        for (auto& e : row) e = RatFun::zero(f);
    return g;
}

std::array<RatFun, 4> Substitution::apply(const std::array<RatFun, 4>& x) const {
    std::array<RatFun, 4> r{RatFun::zero(x[0].field()), RatFun::zero(x[0].field()),
                            RatFun::zero(x[0].field()), RatFun::zero(x[0].field())};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[i] += m[i][j] * x[j];
    return r;
}

Substitution Substitution::identity(const GFContext& f) {
    Substitution s;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s.m[i][j] = (i == j) ? RatFun::one(f) : RatFun::zero(f);
    s.scale = RatFun::one(f);
    return s;
}

// ---------------------------------------------------------------------------
// canonicalize4

namespace {

using Vec4 = std::array<RatFun, 4>;

RatFun polar(const GeneralQuadForm4& Q, const Vec4& u, const Vec4& v) {
    // b(u,v) = Q(u+v) + Q(u) + Q(v)
    Vec4 s{u[0] + v[0], u[1] + v[1], u[2] + v[2], u[3] + v[3]};
    return Q.eval(s) + Q.eval(u) + Q.eval(v);
}

Vec4 axpy(const RatFun& c, const Vec4& x, Vec4 y) {
    for (int i = 0; i < 4; ++i) y[i] += c * x[i];
    return y;
}

bool vec_zero(const Vec4& v) {
    return v[0].is_zero() && v[1].is_zero() && v[2].is_zero() && v[3].is_zero();
}

} // namespace

std::pair<QuadForm4, Substitution> canonicalize4(const GeneralQuadForm4& Q) {
    const GFContext& F = Q.q[0][0].field();
    std::vector<Vec4> basis;
    for (int i = 0; i < 4; ++i) {
        Vec4 e{RatFun::zero(F), RatFun::zero(F), RatFun::zero(F), RatFun::zero(F)};
        e[i] = RatFun::one(F);
        basis.push_back(e);
    }
    // Symplectic pairing pass for the polar form.
    std::vector<Vec4> pairs;
    std::vector<Vec4> pool = basis;
    for (int block = 0; block < 2; ++block) {
        size_t i1 = pool.size(), i2 = pool.size();
        for (size_t i = 0; i < pool.size() && i1 == pool.size(); ++i)
            for (size_t j = i + 1; j < pool.size(); ++j)
                if (!polar(Q, pool[i], pool[j]).is_zero()) {
                    i1 = i;
                    i2 = j;
                    break;
                }
        if (i1 == pool.size()) {
            // Every remaining vector pairs to zero with everything: degenerate.
            for (auto& v : pool)
                if (!vec_zero(v)) throw DegenerateFormError(v);
            throw DegenerateFormError(pool.front());
        }
        Vec4 e1 = pool[i1];
        RatFun p = polar(Q, pool[i1], pool[i2]);
        Vec4 e2 = pool[i2];
        for (auto& c : e2) c = c * p.inv();
        // project the rest onto the orthogonal complement
        std::vector<Vec4> rest;
        for (size_t i = 0; i < pool.size(); ++i) {
            if (i == i1 || i == i2) continue;
            Vec4 v = pool[i];
            v = axpy(polar(Q, v, e2), e1, v);
            v = axpy(polar(Q, v, e1), e2, v);
            rest.push_back(v);
        }
        // make Q(e1) nonzero: the canonical shape needs a1 != 0
        if (Q.eval(e1).is_zero()) {
            if (!Q.eval(e2).is_zero()) std::swap(e1, e2);
            else {
                Vec4 s{e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]};
                e1 = s; // Q(e1+e2) = b(e1,e2) = 1 after normalization below
            }
            // re-normalize pairing to 1
            RatFun pp = polar(Q, e1, e2);
            for (auto& c : e2) c = c * pp.inv();
        }
        pairs.push_back(e1);
        pairs.push_back(e2);
        pool = rest;
    }
    // diagalak data
    RatFun a1 = Q.eval(pairs[0]), b1 = Q.eval(pairs[1]);
    RatFun a3 = Q.eval(pairs[2]), b2 = Q.eval(pairs[3]);
    // x2 <- a1 x2, x4 <- a3 x4
    for (auto& c : pairs[1]) c = c * a1;
    for (auto& c : pairs[3]) c = c * a3;
    QuadForm4 out{a1, a1 * b1, a3, a3 * b2};
    Substitution sub = Substitution::identity(F);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) sub.m[i][j] = pairs[static_cast<size_t>(j)][i];
    return {out, sub};
}

// ---------------------------------------------------------------------------
// minimization

std::pair<RatFun, RatFun> minimize_binary(const RatFun& a) {
    const GFContext& F = a.field();
    RatFun cur = a;
    RatFun theta = RatFun::zero(F);
    if (cur.is_zero()) return {cur, theta};
    // finite poles of even order; one factorization up front, then track the
    // pole order at each prime directly (other primes are unaffected)
    auto primes = poly_factor(cur.den()).factors;
    for (auto& [f, mult0] : primes) {
        int mult = mult0;
        while (mult > 0 && mult % 2 == 0) {
            int r = mult / 2;
            // a = g1 / (f^{2r} h1); find g with g^2 h1 = g1 mod f
            Poly fr = Poly::one(F);
            for (int i = 0; i < 2 * r; ++i) fr = fr * f;
            Poly h1 = cur.den() / fr;
            Poly s = (cur.num() % f) * invmod(h1 % f, f) % f;
            uint64_t n = F.k() * static_cast<uint64_t>(f.degree());
            Poly g = pow2mod(s, n - 1, f); // square root in the residue field
            Poly frh = Poly::one(F);
            for (int i = 0; i < r; ++i) frh = frh * f;
            RatFun th(g, frh);
            theta += th;
            cur = cur + th.square() + th;
            int v = valuation(cur, Place::finite(f));
            mult = v < 0 ? -v : 0;
        }
    }
    // pole at infinity of even order
    while (cur.num().degree() - cur.den().degree() > 0 &&
           (cur.num().degree() - cur.den().degree()) % 2 == 0) {
        int r = (cur.num().degree() - cur.den().degree()) / 2;
        uint64_t lead = F.mul(cur.num().lead(), F.inv(cur.den().lead()));
        uint64_t c = F.sqrt(lead);
        RatFun th(Poly::monomial(F, c, static_cast<unsigned>(r)));
        theta += th;
        cur = cur + th.square() + th;
    }
    return {cur, theta};
}

std::optional<RatFun> as_image_solve(const RatFun& u) {
    const GFContext& F = u.field();
    auto [amin, theta] = minimize_binary(u);
    if (!amin.is_constant()) return std::nullopt;
    uint64_t c = amin.num().coeff(0);
    auto w0 = F.solve_artin_schreier(c);
    if (!w0) return std::nullopt;
    return theta + RatFun(Poly::constant(F, *w0));
}

RatFun invert_t(const RatFun& x) {
    const GFContext& F = x.field();
    if (x.is_zero()) return x;
    auto rev = [&](const Poly& p) {
        std::vector<uint64_t> c(p.coeffs().rbegin(), p.coeffs().rend());
        return Poly(F, std::move(c));
    };
    int dn = x.num().degree(), dd = x.den().degree();
    Poly n = rev(x.num()), d = rev(x.den());
    if (dd >= dn) n = n.shift(static_cast<unsigned>(dd - dn));
    else d = d.shift(static_cast<unsigned>(dn - dd));
    return RatFun(n, d);
}

// ---------------------------------------------------------------------------
// local representability

namespace {

// All roots of alpha xi^2 + beta xi + gamma = 0 in F_{2^k}[t]/(f).
std::vector<Poly> residue_quadratic_roots(const Poly& alpha, const Poly& beta, const Poly& gamma,
                                          const Poly& f) {
    const GFContext& F = f.field();
    uint64_t n = F.k() * static_cast<uint64_t>(f.degree());
    auto sqrt_res = [&](const Poly& s) { return n > 1 ? pow2mod(s, n - 1, f) : s % f; };
    std::vector<Poly> out;
    Poly ainv = invmod(alpha, f);
    if (beta.is_zero()) {
        out.push_back(sqrt_res((gamma * ainv) % f));
        return out;
    }
    // xi = (beta/alpha) eta, eta^2 + eta = gamma alpha / beta^2
    Poly b2inv = invmod((beta * beta) % f, f);
    Poly d = (((gamma * alpha) % f) * b2inv) % f;
    // solve eta^2 + eta = d by F_2-linear algebra on the bit basis
    size_t dim = static_cast<size_t>(n);
    std::vector<std::vector<uint8_t>> mat(dim, std::vector<uint8_t>(dim + 1, 0));
    auto bits_of = [&](const Poly& p, size_t col) {
        for (size_t m = 0; m < dim; ++m) {
            size_t j = m / F.k(), i = m % F.k();
            if ((p.coeff(static_cast<int>(j)) >> i) & 1) mat[m][col] = 1;
        }
    };
    for (size_t m = 0; m < dim; ++m) {
        size_t j = m / F.k(), i = m % F.k();
        Poly e = Poly::monomial(F, 1ull << i, static_cast<unsigned>(j));
        Poly img = ((e * e) % f) + e;
        bits_of(img % f, m);
    }
    bits_of(d, dim);
    // gaussian elimination
    std::vector<size_t> pivcol(dim, dim + 1);
    size_t row = 0;
    for (size_t c = 0; c < dim && row < dim; ++c) {
        size_t p = row;
        while (p < dim && !mat[p][c]) ++p;
        if (p == dim) continue;
        std::swap(mat[p], mat[row]);
        for (size_t r2 = 0; r2 < dim; ++r2)
            if (r2 != row && mat[r2][c])
                for (size_t cc = c; cc <= dim; ++cc) mat[r2][cc] ^= mat[row][cc];
        pivcol[row] = c;
        ++row;
    }
    for (size_t r2 = row; r2 < dim; ++r2)
        if (mat[r2][dim]) return out; // inconsistent: no roots
    Poly eta = Poly::zero(F);
    for (size_t r2 = 0; r2 < row; ++r2) {
        if (!mat[r2][dim]) continue;
        size_t c = pivcol[r2];
        size_t j = c / F.k(), i = c % F.k();
        eta = eta + Poly::monomial(F, 1ull << i, static_cast<unsigned>(j));
    }
    Poly scale = (beta * ainv) % f;
    Poly x1 = (scale * eta) % f;
    Poly x2 = (scale * (eta + Poly::one(F))) % f;
    if (x2.less(x1)) std::swap(x1, x2);
    out.push_back(x1);
    out.push_back(x2);
    return out;
}

// residue of a rational function with f-coprime denominator, modulo f^N
Poly residue_mod(const RatFun& x, const Poly& fN, const Poly& f) {
    if ((x.den() % f).is_zero()) throw std::domain_error("residue_mod: denominator at place");
    return ((x.num() % fN) * invmod(x.den() % fN, fN)) % fN;
}

struct RamifiedDFS {
    const GFContext& F;
    Poly f, fN;
    int N, r;
    Poly bN;   // unit b mod f^N
    Poly bbar; // b mod f
    std::vector<Poly> fpow;

    Poly digit(const Poly& P, int m) const {
        Poly lo = P % fpow[static_cast<size_t>(m)];
        Poly q = (P + lo) / fpow[static_cast<size_t>(m)];
        return q % f;
    }

    Poly G(const Poly& X, const Poly& Y, const Poly& cl) const {
        Poly g = (f * ((X * X) % fN)) % fN;
        g = g + (fpow[static_cast<size_t>(r + 1)] * ((X * Y) % fN)) % fN;
        g = g + (bN * ((Y * Y) % fN)) % fN;
        g = g + cl;
        return g % fN;
    }

    bool dfs(int level, const Poly& X, const Poly& Y, const Poly& cl) const {
        if (level > N) return true;
        bool odd = (level % 2) == 1;
        int j = odd ? (level - 1) / 2 : (level - 2) / 2;
        // At the top digit 2r+2 the cross term f^{r+1} x Y also brings in the
        // digit x_{r+1}, linearly with coefficient Y mod f; if that is nonzero
        // the digit equation is solvable for any choice of Y_{r+1}.
        if (level == N && !(Y % f).is_zero()) return true;
        const Poly& fj = fpow[static_cast<size_t>(j)];
        Poly alpha = odd ? bbar : Poly::one(F);
        Poly gamma = digit(G(X, Y, cl), level - 1);
        Poly Xd = odd ? X : (X + fj) % fN;
        Poly Yd = odd ? (Y + fj) % fN : Y;
        Poly delta = digit(G(Xd, Yd, cl), level - 1);
        Poly beta = delta + gamma + alpha;
        for (const Poly& xi : residue_quadratic_roots(alpha, beta, gamma, f)) {
            Poly X2 = X, Y2 = Y;
            Poly add = (xi * fj) % fN;
            if (odd) Y2 = (Y2 + add) % fN;
            else X2 = (X2 + add) % fN;
            if (dfs(level + 1, X2, Y2, cl)) return true;
        }
        return false;
    }
};

bool local_represents_finite(const RatFun& a, const RatFun& c, const Poly& f) {
    const GFContext& F = a.field();
    int va = valuation(a, Place::finite(f));
    int vc = valuation(c, Place::finite(f));
    if (va >= 0 || a.is_zero()) {
        if (vc % 2 == 0) return true;
        return residue_symbol(a, Place::finite(f)) == 0;
    }
    if ((-va) % 2 == 0) throw std::domain_error("local_represents: a not minimal at place");
    int r = (-va - 1) / 2;
    int N = 2 * r + 3;
    RamifiedDFS d{F, f, Poly::one(F), N, r, Poly::zero(F), Poly::zero(F), {}};
    d.fpow.push_back(Poly::one(F));
    for (int i = 1; i <= N; ++i) d.fpow.push_back(d.fpow.back() * f);
    d.fN = d.fpow[static_cast<size_t>(N)];
    // b = a f^{2r+1} is a unit
    RatFun b = a * rf(d.fpow[static_cast<size_t>(2 * r + 1)]);
    d.bN = residue_mod(b, d.fN, f);
    d.bbar = d.bN % f;
    // rescale c by squares of f so that v(c') in {0,1}; lemma RHS is
    // c_lemma = f * c' (v=0 case) or c'/f (v=1 case), with v(c_lemma) in {0,1}
    int vmod = ((vc % 2) + 2) % 2;
    RatFun unit = c;
    {
        Poly fv = Poly::one(F);
        for (int i = 0; i < std::abs(vc); ++i) fv = fv * f;
        if (vc >= 0) unit = c / rf(fv);
        else unit = c * rf(fv);
    }
    // c_lemma = unit * f^{1 - vmod} (v=0 -> f*unit; v=1 -> unit)
    Poly cl = residue_mod(unit, d.fN, f);
    if (vmod == 0) cl = (cl * f) % d.fN;
    return d.dfs(1, Poly::zero(F), Poly::zero(F), cl);
}

} // namespace

bool local_represents(const RatFun& a, const RatFun& c, const Place& p) {
    if (c.is_zero()) throw std::invalid_argument("local_represents: c must be nonzero");
    if (p.is_infinity())
        return local_represents_finite(invert_t(a), invert_t(c), Poly::t(p.field()));
    return local_represents_finite(a, c, p.prime());
}

// ---------------------------------------------------------------------------
// 4-variable local isotropy and critical places

namespace {

// Is X^2 + X = a solvable in the completion at p?
bool locally_split(const RatFun& a, const Place& p) {
    auto [amin, theta] = minimize_binary(a);
    (void)theta;
    if (valuation(amin, p) < 0) return false; // ramified
    return residue_symbol(amin, p) == 0;
}

} // namespace

bool local_isotropic4(const QuadForm4& Q, const Place& p) {
    if (Q.a1.is_zero() || Q.a3.is_zero())
        throw std::invalid_argument("local_isotropic4: form not regular");
    if (locally_split(Q.a2, p) || locally_split(Q.a4, p)) return true;
    if (!locally_split(Q.a2 + Q.a4, p)) return true; // different quadratic extensions
    RatFun a2m = minimize_binary(Q.a2).first;
    bool r1 = local_represents(a2m, Q.a1, p);
    bool r3 = local_represents(a2m, Q.a3, p);
    return r1 == r3;
}

std::vector<Place> critical_places(const QuadForm4& Q) {
    const GFContext& F = Q.a1.field();
    std::vector<Place> out;
    auto add = [&](const Place& p) {
        for (auto& q : out)
            if (q == p) return;
        out.push_back(p);
    };
    for (const RatFun* a : {&Q.a2, &Q.a4}) {
        if (a->is_zero()) continue;
        for (auto& [f, m] : poly_factor(a->den()).factors) add(Place::finite(f));
        if (a->num().degree() > a->den().degree()) add(Place::infinity(F));
    }
    if (!Q.a1.is_polynomial() || !Q.a3.is_polynomial())
        throw std::invalid_argument("critical_places: a1, a3 must be polynomials");
    Poly prod = Q.a1.num() * Q.a3.num();
    for (auto& [f, m] : poly_factor(prod).factors)
        if (m % 2 == 1) add(Place::finite(f));
    if (prod.degree() % 2 == 1) add(Place::infinity(F));
    std::sort(out.begin(), out.end(), [](const Place& a, const Place& b) { return a.less(b); });
    return out;
}

// ---------------------------------------------------------------------------
// common value search

namespace {

struct FinitePlan {
    Poly f;
    int v = 0;       // required v_f(c)
    int M = 1;       // class of c fixed modulo f^M
    Poly unit_class; // c / f^v mod f^{M-v}
};

int pole_order(const RatFun& a, const Place& p) {
    if (a.is_zero()) return 0;
    int v = valuation(a, p);
    return v < 0 ? -v : 0;
}

} // namespace

std::optional<RatFun> choose_common_value(const QuadForm4& Q, uint64_t seed) {
    const GFContext& F = Q.a1.field();
    // Both binaries universal: 1 is a common value.
    if (as_image_solve(Q.a2) && as_image_solve(Q.a4)) return RatFun::one(F);

    std::vector<Place> S = critical_places(Q);
    Place inf = Place::infinity(F);
    for (auto& p : S)
        if (!local_isotropic4(Q, p)) return std::nullopt;

    Rng rng(seed ^ 0xc0c0c0c0ull);
    auto test_c = [&](const RatFun& c, const Place& p) {
        return local_represents(Q.a2, c / Q.a1, p) && local_represents(Q.a4, c / Q.a3, p);
    };

    // Per finite critical place: pick a valuation in {0,1}; at unramified
    // places only the parity matters (no residue-class constraint), at poles
    // of a2 or a4 search for an admissible unit class as well.
    std::vector<FinitePlan> plans;
    for (auto& p : S) {
        if (p.is_infinity()) continue;
        const Poly& f = p.prime();
        int pole = std::max(pole_order(Q.a2, p), pole_order(Q.a4, p));
        bool found = false;
        FinitePlan plan;
        plan.f = f;
        if (pole == 0) {
            for (int v : {0, 1}) {
                RatFun c_rep = v == 0 ? RatFun::one(F) : rf(f);
                if (!test_c(c_rep, p)) continue;
                plan.v = v;
                plan.M = 0; // parity only
                found = true;
                break;
            }
        } else {
            int r = (pole - 1) / 2;
            int M = 4 * r + 3;
            Poly fM = Poly::one(F);
            for (int i = 0; i < M + 1; ++i) fM = fM * f;
            long long budget = 64LL * (M + 1) * f.degree() * static_cast<long long>(F.k());
            for (long long trial = 0; trial < budget && !found; ++trial) {
                int v = static_cast<int>(trial % 2);
                Poly w = trial == 0 ? Poly::one(F)
                                    : random_poly(F, f.degree() * (M + 1) - 1, rng);
                if ((w % f).is_zero()) continue;
                Poly cand = w % fM;
                RatFun c_rep = rf(cand);
                if (v == 1) c_rep = c_rep * rf(f);
                if (!test_c(c_rep, p)) continue;
                plan.v = v;
                plan.M = M + v;
                plan.unit_class = cand;
                found = true;
            }
        }
        if (!found) return std::nullopt;
        plans.push_back(plan);
    }

    // Product of the forced prime factors.
    Poly P = Poly::one(F);
    for (auto& pl : plans)
        if (pl.v == 1) P = P * pl.f;

    // Conditions at infinity: degree parity, and top coefficients if ramified.
    int rinf = std::max(pole_order(Q.a2, inf), pole_order(Q.a4, inf));
    rinf = rinf > 0 ? (rinf - 1) / 2 : 0;
    bool inf_ramified = pole_order(Q.a2, inf) > 0 || pole_order(Q.a4, inf) > 0;
    int Minf = inf_ramified ? 4 * rinf + 3 : 1;
    std::optional<int> parity; // allowed parity of deg(c); nullopt = both
    std::vector<uint64_t> c_top;
    {
        bool ok[2] = {false, false};
        std::vector<uint64_t> tops[2];
        long long budget = 64LL * Minf * static_cast<long long>(F.k()) + 2;
        for (long long trial = 0; trial < budget && !(ok[0] && ok[1]); ++trial) {
            int eps = static_cast<int>(trial % 2);
            if (ok[eps]) continue;
            int D = Minf + 1;
            if (D % 2 != eps) ++D;
            Poly cand = Poly::monomial(F, 1, static_cast<unsigned>(D));
            std::vector<uint64_t> ts;
            for (int i = 1; i < Minf; ++i) {
                uint64_t w = (trial < 2) ? 0 : (rng.next() & F.mask());
                ts.push_back(w);
                cand.set_coeff(D - i, w);
            }
            if (test_c(rf(cand), inf)) {
                ok[eps] = true;
                tops[eps] = ts;
            }
        }
        if (!ok[0] && !ok[1]) return std::nullopt;
        if (ok[0] && ok[1] && !inf_ramified) {
            parity = std::nullopt; // no constraint
        } else {
            int eps = ok[0] ? 0 : 1;
            parity = eps;
            c_top = tops[eps];
        }
    }

    // Assemble the congruence on h: c = P h.
    Poly m = Poly::one(F);
    Poly resid = Poly::one(F);
    std::vector<Poly> residues, moduli;
    for (auto& pl : plans) {
        int e = pl.M - pl.v;
        if (e <= 0) continue;
        Poly fe = Poly::one(F);
        for (int i = 0; i < e; ++i) fe = fe * pl.f;
        Poly Pf = P;
        if (pl.v == 1) Pf = P / pl.f;
        Poly rh = (pl.unit_class % fe) * invmod(Pf % fe, fe) % fe;
        residues.push_back(rh);
        moduli.push_back(fe);
        m = m * fe;
    }
    if (residues.empty()) {
        residues.push_back(Poly::one(F));
        moduli.push_back(Poly::t(F));
        m = Poly::t(F);
    }
    resid = crt(residues, moduli);

    IrredConstraints cons;
    if (parity) cons.degree_parity = (*parity + P.degree()) % 2;
    if (!c_top.empty()) {
        // top coefficients of h from the unit class of c at infinity:
        // u_h = u_c * rev(P)^{-1} mod z^{Minf}
        Poly zM = Poly::monomial(F, 1, static_cast<unsigned>(Minf));
        Poly uc = Poly::one(F);
        for (int i = 1; i < Minf; ++i) uc.set_coeff(i, c_top[static_cast<size_t>(i - 1)]);
        Poly revP = Poly::zero(F);
        for (int i = 0; i <= P.degree() && i < Minf; ++i)
            revP.set_coeff(i, P.coeff(P.degree() - i));
        Poly uh = (uc * invmod(revP, zM)) % zM;
        for (int i = 1; i < Minf; ++i) cons.top_coeffs.push_back(uh.coeff(i));
    }

    // try small degrees for h first, then the density-safe default degree
    std::vector<std::optional<int>> degree_plan;
    {
        int nmin = std::max({m.degree(), static_cast<int>(cons.top_coeffs.size()) + 1, 1});
        if (parity && nmin % 2 != *parity) ++nmin;
        int step = parity ? 2 : 1;
        for (int n = nmin; n <= nmin + 4 * step; n += step) degree_plan.emplace_back(n);
        degree_plan.emplace_back(std::nullopt);
    }
    for (auto& deg : degree_plan) {
        IrredConstraints cd = cons;
        cd.exact_degree = deg;
        auto h = random_irreducible_in_class(resid, m, cd, rng.next());
        if (!h) continue;
        RatFun c = rf(P * *h);
        bool ok = true;
        for (auto& p : S) ok = ok && test_c(c, p);
        ok = ok && test_c(c, inf);
        if (ok) return c;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// global binary solve

std::optional<std::pair<RatFun, RatFun>> solve_binary_global(const RatFun& a, const RatFun& c,
                                                             uint64_t seed) {
    (void)seed; // sweep is deterministic; the signature keeps callers uniform
    if (c.is_zero()) throw std::invalid_argument("solve_binary_global: c must be nonzero");
    const GFContext& F = a.field();
    if (auto r = ratfun_sqrt(c)) return std::make_pair(*r, RatFun::zero(F));
    long long size = a.num().degree() + a.den().degree() + c.num().degree() + c.den().degree() + 4;
    long long budget = 256 * size;
    uint64_t q = F.order();
    for (int d = 0; budget > 0; ++d) {
        // monic y of degree d, coefficients enumerated lexicographically
        uint64_t count = 1;
        bool capped = false;
        for (int i = 0; i < d; ++i) {
            if (count > (1ull << 40) / q) { capped = true; break; }
            count *= q;
        }
        if (capped) count = 1ull << 40;
        for (uint64_t idx = 0; idx < count && budget > 0; ++idx) {
            std::vector<uint64_t> coeffs(static_cast<size_t>(d) + 1, 0);
            uint64_t tmp = idx;
            for (int i = d - 1; i >= 0; --i) {
                uint64_t p = 1;
                for (int l = 0; l < i; ++l) p *= q;
                coeffs[static_cast<size_t>(i)] = tmp / p;
                tmp %= p;
            }
            coeffs[static_cast<size_t>(d)] = 1;
            Poly y0(F, coeffs);
            for (uint64_t lam = 1; lam < q && budget > 0; ++lam, --budget) {
                RatFun y = rf(y0 * lam);
                RatFun u = a + c / y.square();
                auto w = as_image_solve(u);
                if (!w) continue;
                RatFun x = *w * y;
                RatFun alt = x + y;
                auto less = [](const RatFun& l, const RatFun& r) {
                    if (l.den() != r.den()) return l.den().less(r.den());
                    return l.num().less(r.num());
                };
                if (less(alt, x)) x = alt;
                return std::make_pair(x, y);
            }
        }
    }
    // hyperbolic case: a = w^2 + w makes the norm form universal
    if (auto w = as_image_solve(a)) {
        RatFun y = c + RatFun::one(F);
        RatFun x = *w * y + RatFun::one(F);
        return std::make_pair(x, y);
    }
    // general case: a zero of the norm form is a splitting of the quaternion
    // [a, c).  A rank-one idempotent alpha + beta j (alpha, beta in K(theta),
    // theta^2 + theta = a) has reduced norm N(alpha) + c N(beta) = 0, so
    // c = N(alpha / beta).
    {
        RatField K(F);
        auto A = quaternion_char2(K, a, c);
        auto e = rank_one_idempotent(A, seed);
        if (!e) return std::nullopt;
        RatFun a0 = (*e)[0], a1 = (*e)[1], b0 = (*e)[2], b1 = (*e)[3];
        if (b0.is_zero() && b1.is_zero()) {
            // multiply by j on the right: (alpha + beta j) j = beta c + alpha j
            RatFun na0 = b0 * c, na1 = b1 * c;
            b0 = a0;
            b1 = a1;
            a0 = na0;
            a1 = na1;
        }
        RatFun nb = b0.square() + b0 * b1 + a * b1.square();
        if (nb.is_zero()) return std::nullopt;
        // alpha * sigma(beta) with theta^2 = theta + a
        RatFun x = (a0 * b0 + a0 * b1 + a * a1 * b1) / nb;
        RatFun y = (a0 * b1 + a1 * b0) / nb;
        if (x.square() + x * y + a * y.square() != c) return std::nullopt;
        RatFun altx = x + y;
        if (altx.den() != x.den() ? altx.den().less(x.den()) : altx.num().less(x.num())) x = altx;
        return std::make_pair(x, y);
    }
}

// ---------------------------------------------------------------------------
// full pipeline

namespace {

struct TwoByTwo {
    // acts on one variable pair: old = m * new
    RatFun m00, m01, m10, m11;
};

} // namespace

IsotropyResult solve_quadform4(const QuadForm4& Qin, uint64_t seed) {
    const GFContext& F = Qin.a1.field();
    IsotropyResult res{IsotropyResult::Status::NotFound,
                       {RatFun::zero(F), RatFun::zero(F), RatFun::zero(F), RatFun::zero(F)},
                       std::nullopt,
                       ""};
    if (Qin.a1.is_zero() || Qin.a3.is_zero())
        throw std::invalid_argument("solve_quadform4: a1 and a3 must be nonzero");

    QuadForm4 Q = Qin;
    Substitution sub = Substitution::identity(F);
    auto scale_pair = [&](int base, const RatFun& w) {
        // new pair variables are w * old pair; compose old = sub * diag(1/w)
        RatFun iw = w.inv();
        for (int i = 0; i < 4; ++i) {
            sub.m[i][base] = sub.m[i][base] * iw;
            sub.m[i][base + 1] = sub.m[i][base + 1] * iw;
        }
    };
    // a1 = w^2 * m with m squarefree polynomial
    auto squarefree_scale = [&](RatFun& a, int base) {
        Poly nd = a.num() * a.den();
        Poly sf = squarefree_part(nd);
        // nd = s^2 sf
        Poly s2 = nd / sf;
        Poly s = s2.sqrt();
        // a = (s/den)^2 sf
        RatFun w = RatFun(s, a.den());
        a = rf(sf);
        scale_pair(base, w);
    };
    squarefree_scale(Q.a1, 0);
    squarefree_scale(Q.a3, 2);
    Poly g = gcd(Q.a1.num(), Q.a3.num());
    if (g.degree() > 0) {
        Q.a1 = rf(Q.a1.num() / g);
        Q.a3 = rf(Q.a3.num() / g);
        sub.scale = sub.scale * rf(g);
    }
    // minimize a2, a4; the shear x1 <- x1 + theta x2 composes as a column op
    {
        auto [a2m, th2] = minimize_binary(Q.a2);
        Q.a2 = a2m;
        for (int i = 0; i < 4; ++i) sub.m[i][1] = sub.m[i][1] + sub.m[i][0] * th2;
        auto [a4m, th4] = minimize_binary(Q.a4);
        Q.a4 = a4m;
        for (int i = 0; i < 4; ++i) sub.m[i][3] = sub.m[i][3] + sub.m[i][2] * th4;
    }

    auto finish = [&](std::array<RatFun, 4> v) {
        res.status = IsotropyResult::Status::Zero;
        res.zero = sub.apply(v);
        return res;
    };

    // shortcuts: a2 or a4 in the Artin-Schreier image
    if (auto w = as_image_solve(Q.a2))
        return finish({*w, RatFun::one(F), RatFun::zero(F), RatFun::zero(F)});
    if (auto w = as_image_solve(Q.a4))
        return finish({RatFun::zero(F), RatFun::zero(F), *w, RatFun::one(F)});

    for (auto& p : critical_places(Q)) {
        if (!local_isotropic4(Q, p)) {
            res.status = IsotropyResult::Status::Anisotropic;
            res.bad_place = p;
            res.detail = "no common local value at " + p.to_string();
            return res;
        }
    }
    auto c = choose_common_value(Q, seed);
    if (!c) {
        res.status = IsotropyResult::Status::NotFound;
        res.detail = "common value search failed";
        return res;
    }
    auto s1 = solve_binary_global(Q.a2, *c / Q.a1, seed);
    auto s2 = solve_binary_global(Q.a4, *c / Q.a3, seed + 1);
    if (!s1 || !s2) {
        res.detail = "binary solver budget exhausted";
        return res;
    }
    return finish({s1->first, s1->second, s2->first, s2->second});
}

IsotropyResult solve_quadform4(const GeneralQuadForm4& Q, uint64_t seed) {
    auto [canon, sub] = canonicalize4(Q);
    IsotropyResult r = solve_quadform4(canon, seed);
    if (r.status == IsotropyResult::Status::Zero) r.zero = sub.apply(r.zero);
    return r;
}

} // namespace qalg
