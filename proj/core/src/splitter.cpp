#include "qalg/splitter.hpp"

#include "qalg/quadform.hpp" // invert_t
#include "qalg/specialize.hpp"

#include <algorithm>
#include <climits>
#include <stdexcept>
#include <utility>

namespace qalg {

namespace {

Poly poly_lcm(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly::zero(a.field());
    return ((a / gcd(a, b)) * b).monic();
}

/// deg num - deg den; INT_MIN for zero.
int inf_degree(const RatFun& x) {
    if (x.is_zero()) return INT_MIN;
    return x.num().degree() - x.den().degree();
}

uint64_t inf_lead(const RatFun& x) {
    const GFContext& gf = x.field();
    return gf.mul(x.num().coeff(x.num().degree()), gf.inv(x.den().coeff(x.den().degree())));
}

RatFun tpow(const GFContext& gf, int e) {
    if (e >= 0) return RatFun(Poly::monomial(gf, 1, static_cast<unsigned>(e)));
    return RatFun(Poly::one(gf), Poly::monomial(gf, 1, static_cast<unsigned>(-e)));
}

// ---------------------------------------------------------------------------
// residue field R = F_{2^k}[t]/(f), elements held as polynomials of degree
// < deg f; the residue algebra O/fO is handled by restriction of scalars as
// an F_{2^k}-algebra of dimension n * deg f, so deg f is unbounded

struct ResidueCtx {
    Poly f;
    size_t d;
    GFContext base;
    GFField R; // the base field F_{2^k}; fqalg machinery runs over it

    explicit ResidueCtx(const Poly& prime)
        : f(prime), d(static_cast<size_t>(prime.degree())), base(prime.field()), R(base) {}

    Poly reduce(const Poly& p) const { return p % f; }

    Poly reduce(const RatFun& x) const {
        Poly den = x.den() % f;
        if (den.is_zero()) throw std::invalid_argument("ResidueCtx: denominator vanishes at f");
        return (x.num() * invmod(den, f)) % f;
    }

    Poly rmul(const Poly& a, const Poly& b) const { return (a * b) % f; }

    /// Restriction-of-scalars coordinates: slot (i, l) is e_i t^l.
    FqVec pack(const std::vector<Poly>& v) const {
        FqVec out(v.size() * d, 0);
        for (size_t i = 0; i < v.size(); ++i)
            for (size_t l = 0; l < d; ++l) out[i * d + l] = v[i].coeff(static_cast<int>(l));
        return out;
    }

    std::vector<Poly> unpack(const FqVec& w, size_t n) const {
        std::vector<Poly> v(n, Poly::zero(base));
        for (size_t i = 0; i < n; ++i)
            for (size_t l = 0; l < d; ++l) v[i].set_coeff(static_cast<int>(l), w[i * d + l]);
        return v;
    }
};

/// In-place RREF of vectors over the residue field, entries as polynomials
/// mod f.  Returns pivot positions; rows end up with monic-1 pivots.
std::vector<size_t> residue_rref(const ResidueCtx& rc, std::vector<std::vector<Poly>>& rows) {
    size_t n = rows.empty() ? 0 : rows[0].size();
    std::vector<size_t> piv;
    size_t r = 0;
    for (size_t c = 0; c < n && r < rows.size(); ++c) {
        size_t sel = rows.size();
        for (size_t i = r; i < rows.size(); ++i)
            if (!rows[i][c].is_zero()) { sel = i; break; }
        if (sel == rows.size()) continue;
        std::swap(rows[r], rows[sel]);
        Poly inv = invmod(rows[r][c], rc.f);
        for (size_t j = 0; j < n; ++j) rows[r][j] = rc.rmul(rows[r][j], inv);
        for (size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c].is_zero()) continue;
            Poly m = rows[i][c];
            for (size_t j = 0; j < n; ++j) rows[i][j] = rows[i][j] + rc.rmul(m, rows[r][j]);
        }
        piv.push_back(c);
        ++r;
    }
    rows.resize(r);
    return piv;
}

// ---------------------------------------------------------------------------
// small dense helpers over GFField

uint64_t gf_det(Matrix<GFField> m) {
    const GFField& F = m.field();
    size_t n = m.rows();
    uint64_t det = 1;
    for (size_t c = 0; c < n; ++c) {
        size_t p = n;
        for (size_t r = c; r < n; ++r)
            if (m.at(r, c) != 0) { p = r; break; }
        if (p == n) return 0;
        if (p != c) {
            auto rp = m.row(p), rc = m.row(c);
            m.set_row(p, rc);
            m.set_row(c, rp);
        }
        det = F.mul(det, m.at(c, c));
        uint64_t iv = F.inv(m.at(c, c));
        for (size_t r = c + 1; r < n; ++r) {
            uint64_t fac = F.mul(m.at(r, c), iv);
            if (fac == 0) continue;
            for (size_t j = c; j < n; ++j)
                m.at(r, j) = F.add(m.at(r, j), F.mul(fac, m.at(c, j)));
        }
    }
    return det;
}

/// Lagrange interpolation through (x_i, y_i) over F_{2^M}.
std::vector<uint64_t> gf_interpolate(const GFContext& gf, const std::vector<uint64_t>& xs,
                                     const std::vector<uint64_t>& ys) {
    size_t n = xs.size();
    // full product prod (t - x_i), low-to-high coefficients
    std::vector<uint64_t> full(n + 1, 0);
    full[0] = 1;
    for (size_t i = 0; i < n; ++i) {
        // multiply by (t + x_i)
        for (size_t j = i + 1; j > 0; --j) full[j] = gf.add(full[j - 1], gf.mul(full[j], xs[i]));
        full[0] = gf.mul(full[0], xs[i]);
    }
    std::vector<uint64_t> out(n, 0);
    for (size_t i = 0; i < n; ++i) {
        // q = full / (t + x_i) by synthetic division
        std::vector<uint64_t> q(n, 0);
        uint64_t carry = full[n];
        for (size_t j = n; j > 0; --j) {
            q[j - 1] = carry;
            carry = gf.add(full[j - 1], gf.mul(carry, xs[i]));
        }
        // scale by y_i / q(x_i)
        uint64_t qx = 0;
        for (size_t j = n; j > 0; --j) qx = gf.add(gf.mul(qx, xs[i]), q[j - 1]);
        uint64_t s = gf.mul(ys[i], gf.inv(qx));
        for (size_t j = 0; j < n; ++j) out[j] = gf.add(out[j], gf.mul(s, q[j]));
    }
    return out;
}

/// Solve beta = emb(x) for x, failing when beta is outside the image.
std::optional<uint64_t> emb_invert(const GFEmbedding& emb, const Matrix<GFField>& pinv,
                                   size_t k, size_t M, uint64_t beta) {
    std::vector<uint64_t> bits(M);
    for (size_t r = 0; r < M; ++r) bits[r] = (beta >> r) & 1;
    uint64_t x = 0;
    for (size_t j = 0; j < k; ++j) {
        uint64_t b = 0;
        for (size_t r = 0; r < M; ++r) b ^= pinv.at(j, r) & bits[r];
        x |= (b & 1) << j;
    }
    return emb.map(x) == beta ? std::optional<uint64_t>(x) : std::nullopt;
}

/// Left pseudo-inverse of the bit matrix of an embedding (k columns of M
/// bits); built from an invertible extension.
Matrix<GFField> emb_pseudo_inverse(const GFEmbedding& emb, size_t k, size_t M) {
    GFField f2{GFContext(1)};
    // full-rank completion: columns emb(2^j), then standard bits to fill
    Matrix<GFField> B(f2, M, M);
    std::vector<uint64_t> cols;
    for (size_t j = 0; j < k; ++j) cols.push_back(emb.map(1ull << j));
    // greedy completion by standard basis bits keeping independence
    Matrix<GFField> probe(f2, M, 0);
    for (size_t b = 0; b < M && cols.size() < M; ++b) {
        std::vector<uint64_t> trial = cols;
        trial.push_back(1ull << b);
        Matrix<GFField> T(f2, M, trial.size());
        for (size_t c = 0; c < trial.size(); ++c)
            for (size_t r = 0; r < M; ++r) T.at(r, c) = (trial[c] >> r) & 1;
        if (T.rank() == trial.size()) cols = std::move(trial);
    }
    if (cols.size() != M) throw std::logic_error("emb_pseudo_inverse: completion failed");
    for (size_t c = 0; c < M; ++c)
        for (size_t r = 0; r < M; ++r) B.at(r, c) = (cols[c] >> r) & 1;
    auto inv = B.inverse();
    if (!inv) throw std::logic_error("emb_pseudo_inverse: not invertible");
    return *inv;
}

// ---------------------------------------------------------------------------
// order transitions

struct Transition {
    Poly f;
    std::vector<size_t> piv;             // pivot positions (increasing)
    std::vector<std::vector<Poly>> rows; // lifted RREF rows, width n
};

/// Convert old-order coordinates to new-order coordinates after enlarging
/// by (1/f) along the transition subspace; exact, division-free.
RatVec convert_enlarge(const Transition& tr, const RatVec& v, const RatField& K) {
    size_t n = v.size();
    std::vector<bool> is_piv(n, false);
    for (size_t p : tr.piv) is_piv[p] = true;
    RatVec out(n, K.zero());
    RatFun ff = RatFun(tr.f);
    for (size_t r = 0; r < tr.piv.size(); ++r) out[tr.piv[r]] = ff * v[tr.piv[r]];
    for (size_t j = 0; j < n; ++j) {
        if (is_piv[j]) continue;
        RatFun a = v[j];
        for (size_t r = 0; r < tr.piv.size(); ++r)
            a += v[tr.piv[r]] * RatFun(tr.rows[r][j]);
        out[j] = a;
    }
    return out;
}

/// New basis columns in old-order coordinates.
std::vector<RatVec> enlarge_basis_cols(const Transition& tr, const RatField& K) {
    size_t n = tr.rows.empty() ? tr.piv.size() : tr.rows[0].size();
    if (!tr.rows.empty()) n = tr.rows[0].size();
    std::vector<bool> is_piv(n, false);
    for (size_t p : tr.piv) is_piv[p] = true;
    RatFun finv = RatFun(Poly::one(tr.f.field()), tr.f);
    std::vector<RatVec> cols(n, RatVec(n, K.zero()));
    size_t r = 0;
    for (size_t j = 0; j < n; ++j) {
        if (is_piv[j]) {
            for (size_t c = 0; c < n; ++c) cols[j][c] = finv * RatFun(tr.rows[r][c]);
            ++r;
        } else {
            cols[j][j] = K.one();
        }
    }
    return cols;
}

void apply_transition(Order& o, const Transition& tr) {
    const RatField& K = o.sc.field();
    size_t n = o.sc.dim();
    auto cols = enlarge_basis_cols(tr, K);
    // new algebra-coordinate basis
    Matrix<RatField> Bnew(K, n, n);
    for (size_t j = 0; j < n; ++j)
        for (size_t r = 0; r < n; ++r) {
            RatFun a = K.zero();
            for (size_t c = 0; c < n; ++c)
                if (!cols[j][c].is_zero()) a += o.B.at(r, c) * cols[j][c];
            Bnew.at(r, j) = a;
        }
    // new structure constants
    AlgebraSC<RatField> sc_new(K, n, convert_enlarge(tr, o.unit, K));
    for (size_t a = 0; a < n; ++a)
        for (size_t b = 0; b < n; ++b) {
            auto prod = convert_enlarge(tr, o.sc.mul(cols[a], cols[b]), K);
            for (size_t k = 0; k < n; ++k) {
                if (prod[k].is_zero()) continue;
                if (!prod[k].is_polynomial())
                    throw std::logic_error("apply_transition: non-integral structure constant");
                sc_new.set_gamma(a, b, k, prod[k]);
            }
        }
    o.B = std::move(Bnew);
    o.sc = std::move(sc_new);
    o.unit = convert_enlarge(tr, o.unit, K);
    for (const auto& u : o.unit)
        if (!u.is_polynomial()) throw std::logic_error("apply_transition: non-integral unit");
}

// ---------------------------------------------------------------------------
// the left order of the preimage lattice of a two-sided subspace of O/fO

/// The subspace of O/fO is given by spanning vectors in restriction-of-
/// scalars coordinates (length n * deg f); it must be a module over the
/// residue field.  Returns the enlargement transition, or absent when the
/// left order of the preimage equals O.
std::optional<Transition> idealizer_step(const Order& o, const ResidueCtx& rc,
                                         const std::vector<FqVec>& sub) {
    const RatField& K = o.sc.field();
    size_t n = o.sc.dim();
    // residue-field RREF of the subspace
    std::vector<std::vector<Poly>> rows;
    rows.reserve(sub.size());
    for (const auto& v : sub) rows.push_back(rc.unpack(v, n));
    auto sub_piv = residue_rref(rc, rows);
    size_t rdim = rows.size();
    std::vector<bool> is_piv(n, false);
    for (size_t p : sub_piv) is_piv[p] = true;
    // ideal lattice basis in order coordinates
    std::vector<RatVec> ibasis;
    {
        size_t r = 0;
        for (size_t j = 0; j < n; ++j) {
            RatVec v(n, K.zero());
            if (is_piv[j]) {
                for (size_t c = 0; c < n; ++c) v[c] = RatFun(rows[r][c]);
                ++r;
            } else {
                v[j] = RatFun(rc.f);
            }
            ibasis.push_back(std::move(v));
        }
    }
    // coordinates of a lattice vector with respect to the ideal basis
    RatFun ffrac = RatFun(Poly::one(rc.base), rc.f);
    auto coords_I = [&](const RatVec& v) {
        RatVec out(n, K.zero());
        size_t r = 0;
        std::vector<RatFun> pivc(rdim, K.zero());
        for (size_t j = 0; j < n; ++j)
            if (is_piv[j]) { pivc[r] = v[j]; out[j] = v[j]; ++r; }
        for (size_t j = 0; j < n; ++j) {
            if (is_piv[j]) continue;
            RatFun a = v[j];
            for (size_t t = 0; t < rdim; ++t) a += pivc[t] * RatFun(rows[t][j]);
            out[j] = a * ffrac;
            if (!out[j].is_polynomial())
                throw std::logic_error("idealizer_step: vector outside ideal lattice");
        }
        return out;
    };
    // conditions on u mod f: coords_I(u * i_b) = 0 mod f, with u running
    // over the restriction-of-scalars slots t^l e_c; coords_I is linear, so
    // the slot columns are t^l times the e_c column
    size_t d = rc.d;
    Matrix<GFField> sys(rc.R, n * n * d, n * d);
    Poly tp = Poly::t(rc.base);
    for (size_t c = 0; c < n; ++c) {
        RatVec ec(n, K.zero());
        ec[c] = K.one();
        for (size_t b = 0; b < n; ++b) {
            auto co = coords_I(o.sc.mul(ec, ibasis[b]));
            for (size_t j = 0; j < n; ++j) {
                Poly g = rc.reduce(co[j].num());
                for (size_t l = 0; l < d; ++l) {
                    for (size_t q = 0; q < d; ++q)
                        sys.at((b * n + j) * d + q, c * d + l) = g.coeff(static_cast<int>(q));
                    if (l + 1 < d) g = rc.rmul(g, tp);
                }
            }
        }
    }
    auto ker = sys.kernel();
    if (ker.empty()) return std::nullopt;
    std::vector<std::vector<Poly>> krows;
    krows.reserve(ker.size());
    for (const auto& kv : ker) krows.push_back(rc.unpack(kv, n));
    auto piv = residue_rref(rc, krows);
    Transition tr;
    tr.f = rc.f;
    tr.piv = piv;
    tr.rows = std::move(krows);
    return tr;
}

/// Residue algebra V = O/fO as an F_{2^k}-algebra by restriction of
/// scalars: slot (i, l) of the n * deg f coordinates is e_i t^l.
AlgebraSC<GFField> residue_algebra(const Order& o, const ResidueCtx& rc) {
    size_t n = o.sc.dim(), d = rc.d;
    std::vector<Poly> ucoords(n, Poly::zero(rc.base));
    for (size_t i = 0; i < n; ++i) ucoords[i] = rc.reduce(o.unit[i].num());
    AlgebraSC<GFField> V(rc.R, n * d, rc.pack(ucoords));
    Poly tp = Poly::t(rc.base);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (const auto& [k, g] : o.sc.products(i, j)) {
                Poly g0 = rc.reduce(g.num());
                if (g0.is_zero()) continue;
                // (e_i t^l)(e_j t^m) picks up g0 t^{l+m} on e_k
                Poly gl = g0;
                for (size_t l = 0; l < d; ++l) {
                    Poly gm = gl;
                    for (size_t m = 0; m < d; ++m) {
                        for (size_t q = 0; q < d; ++q) {
                            uint64_t v = gm.coeff(static_cast<int>(q));
                            if (v) V.set_gamma(i * d + l, j * d + m, k * d + q, v);
                        }
                        if (m + 1 < d) gm = rc.rmul(gm, tp);
                    }
                    if (l + 1 < d) gl = rc.rmul(gl, tp);
                }
            }
    return V;
}

/// Rank of a list of F_q-vectors (used for the properness check below).
size_t fq_span_rank(const GFField& R, const std::vector<FqVec>& vecs, size_t n) {
    Matrix<GFField> m(R, vecs.size(), n);
    for (size_t r = 0; r < vecs.size(); ++r)
        for (size_t c = 0; c < n; ++c) m.at(r, c) = vecs[r][c];
    return m.rank();
}

} // namespace

// ---------------------------------------------------------------------------

RatVec trace_functional(const AlgebraSC<RatField>& A) {
    const RatField& K = A.field();
    size_t n = A.dim();
    // span of commutators, grown until it stabilizes at dimension n-1
    Matrix<RatField> sp(K, n - 1, n);
    size_t have = 0;
    auto insert = [&](const RatVec& v) {
        // reduce against current rows (kept in echelon, not normalized)
        RatVec w = v;
        for (size_t r = 0; r < have; ++r) {
            size_t p = 0;
            while (p < n && sp.at(r, p).is_zero()) ++p;
            if (p == n || w[p].is_zero()) continue;
            RatFun c = w[p] / sp.at(r, p);
            for (size_t j = 0; j < n; ++j) w[j] += c * sp.at(r, j);
        }
        size_t p = 0;
        while (p < n && w[p].is_zero()) ++p;
        if (p == n) return false;
        if (have >= n - 1)
            throw std::invalid_argument("trace_functional: commutators span too much "
                                        "(algebra is not central simple)");
        for (size_t j = 0; j < n; ++j) sp.at(have, j) = w[j];
        ++have;
        return true;
    };
    Rng rng(0x7ace5);
    size_t stale = 0;
    while (have < n - 1 && stale < 4 * n + 16) {
        size_t i = rng.below(n), j = rng.below(n);
        auto comm = A.add(A.mul(A.basis_elem(i), A.basis_elem(j)),
                          A.mul(A.basis_elem(j), A.basis_elem(i)));
        if (insert(comm)) stale = 0; else ++stale;
    }
    if (have != n - 1)
        throw std::invalid_argument("trace_functional: commutator space has wrong dimension");
    auto ker = sp.kernel();
    if (ker.size() != 1)
        throw std::logic_error("trace_functional: kernel dimension unexpected");
    RatVec eps = ker[0];
    // exact final verification over all basis pairs (cheap: sparse products)
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            RatFun acc = K.zero();
            for (const auto& [k, g] : A.products(i, j)) acc += eps[k] * g;
            for (const auto& [k, g] : A.products(j, i)) acc += eps[k] * g;
            if (!acc.is_zero())
                throw std::logic_error("trace_functional: functional fails on a commutator");
        }
    return eps;
}

Order initial_order(const AlgebraSC<RatField>& A) {
    const RatField& K = A.field();
    const GFContext& gf = K.gf();
    size_t n = A.dim();
    for (size_t i = 0; i < n; ++i) {
        bool want = (i == 0);
        if (A.unit()[i].is_zero() == want)
            throw std::invalid_argument("initial_order: unit must be e_0");
    }
    if (!A.unit()[0].is_one()) throw std::invalid_argument("initial_order: unit must be e_0");
    Poly D = Poly::one(gf);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (const auto& [k, g] : A.products(i, j)) D = poly_lcm(D, g.den());
    RatFun Df = RatFun(D);
    Order o{Matrix<RatField>(K, n, n), AlgebraSC<RatField>(K, n, RatVec(n, K.zero())), {}};
    o.B.at(0, 0) = K.one();
    for (size_t i = 1; i < n; ++i) o.B.at(i, i) = Df;
    RatVec unit(n, K.zero());
    unit[0] = K.one();
    o.unit = unit;
    AlgebraSC<RatField> sc(K, n, unit);
    for (size_t j = 0; j < n; ++j) {
        sc.set_gamma(0, j, j, K.one());
        if (j) sc.set_gamma(j, 0, j, K.one());
    }
    for (size_t i = 1; i < n; ++i)
        for (size_t j = 1; j < n; ++j)
            for (const auto& [k, g] : A.products(i, j)) {
                RatFun v = (k == 0) ? Df * Df * g : Df * g;
                if (v.is_zero()) continue;
                if (!v.is_polynomial())
                    throw std::logic_error("initial_order: non-integral structure constant");
                sc.set_gamma(i, j, k, v);
            }
    o.sc = std::move(sc);
    return o;
}

std::vector<Poly> disc_prime_candidates(const AlgebraSC<RatField>& A, const RatVec& eps,
                                        uint64_t seed) {
    const RatField& K = A.field();
    const GFContext& gf = K.gf();
    size_t n = A.dim();
    // Gram of the trace form on the algebra basis
    Matrix<RatField> G(K, n, n);
    Poly D = Poly::one(gf);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            RatFun acc = K.zero();
            for (const auto& [k, g] : A.products(i, j)) acc += eps[k] * g;
            G.at(i, j) = acc;
            D = poly_lcm(D, acc.den());
        }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (const auto& [k, g] : A.products(i, j)) D = poly_lcm(D, g.den());
    // clear denominators row by row
    std::vector<Poly> row_lcm(n, Poly::one(gf));
    int deg_bound = 0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) row_lcm[i] = poly_lcm(row_lcm[i], G.at(i, j).den());
        int dmax = 0;
        for (size_t j = 0; j < n; ++j)
            if (!G.at(i, j).is_zero())
                dmax = std::max(dmax, G.at(i, j).num().degree() + row_lcm[i].degree() -
                                          G.at(i, j).den().degree());
        deg_bound += dmax;
    }
    size_t points = static_cast<size_t>(deg_bound) + 1;
    // evaluation field: multiple of k with enough elements
    size_t k = gf.k();
    size_t M = k;
    while ((1ull << M) < points + 4) M += k;
    GFContext big(static_cast<int>(M));
    GFEmbedding emb = make_gf_embedding(gf, big);
    auto pinv = emb_pseudo_inverse(emb, k, M);
    GFField bigf{big};
    std::vector<uint64_t> xs, ys;
    uint64_t x = 0;
    while (xs.size() < points) {
        // evaluate the cleared matrix at x
        Matrix<GFField> Gx(bigf, n, n);
        bool ok = true;
        for (size_t i = 0; i < n && ok; ++i) {
            uint64_t li = eval_poly_at(row_lcm[i], emb, x);
            for (size_t j = 0; j < n; ++j) {
                auto v = eval_ratfun_at(G.at(i, j), emb, x);
                if (!v) { ok = false; break; }
                Gx.at(i, j) = big.mul(li, *v);
            }
        }
        if (ok) {
            xs.push_back(x);
            ys.push_back(gf_det(Gx));
        }
        ++x;
        if (x > (1ull << M)) throw std::logic_error("disc_prime_candidates: out of points");
    }
    auto coeffs = gf_interpolate(big, xs, ys);
    Poly det = Poly::zero(gf);
    for (size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i] == 0) continue;
        auto c = emb_invert(emb, pinv, k, M, coeffs[i]);
        if (!c) throw std::logic_error("disc_prime_candidates: determinant not rational");
        det.set_coeff(static_cast<int>(i), *c);
    }
    if (det.is_zero())
        throw std::invalid_argument("disc_prime_candidates: degenerate trace form");
    // candidates: factors of det, of the row multipliers, and of the basis
    // scaling of the initial order
    Poly Dfull = D;
    for (const auto& l : row_lcm) Dfull = poly_lcm(Dfull, l);
    Poly all = (det * Dfull).monic();
    std::vector<Poly> out;
    auto fac = poly_factor(all, seed);
    for (const auto& pf : fac.factors)
        if (pf.p.degree() > 0) out.push_back(pf.p);
    return out;
}

void maximalize_at(Order& o, const Poly& f, uint64_t seed) {
    ResidueCtx rc(f);
    Rng rng(seed);
    for (int iter = 0; iter < 512; ++iter) {
        auto V = residue_algebra(o, rc);
        size_t n = V.dim(); // restriction-of-scalars dimension
        auto J = fq_radical(V, rng.next());
        if (auto tr = idealizer_step(o, rc, J)) {
            apply_transition(o, *tr);
            continue;
        }
        // hereditary at f; saturate over the maximal two-sided ideals
        // F_q-echelon basis of J, then a coset complement
        std::vector<FqVec> jr;
        {
            Matrix<GFField> m(rc.R, J.size(), n);
            for (size_t r = 0; r < J.size(); ++r)
                for (size_t c = 0; c < n; ++c) m.at(r, c) = J[r][c];
            auto piv = m.rref();
            for (size_t r = 0; r < piv.size(); ++r) {
                FqVec row(n);
                for (size_t c = 0; c < n; ++c) row[c] = m.at(r, c);
                jr.push_back(std::move(row));
            }
        }
        // quotient Q = V / J
        std::vector<FqVec> coset;
        {
            Matrix<GFField> sp(rc.R, n, n);
            size_t have = jr.size();
            for (size_t r = 0; r < have; ++r)
                for (size_t c = 0; c < n; ++c) sp.at(r, c) = jr[r][c];
            for (size_t i = 0; i < n && have < n; ++i) {
                // try to insert e_i
                Matrix<GFField> test(rc.R, have + 1, n);
                for (size_t r = 0; r < have; ++r)
                    for (size_t c = 0; c < n; ++c) test.at(r, c) = sp.at(r, c);
                test.at(have, i) = 1;
                if (test.rank() == have + 1) {
                    for (size_t c = 0; c < n; ++c) sp.at(have, c) = (c == i) ? 1 : 0;
                    FqVec v(n, 0);
                    v[i] = 1;
                    coset.push_back(std::move(v));
                    ++have;
                }
            }
        }
        size_t m = coset.size();
        Matrix<GFField> co(rc.R, n, n);
        for (size_t c = 0; c < m; ++c)
            for (size_t r = 0; r < n; ++r) co.at(r, c) = coset[c][r];
        for (size_t c = 0; c < jr.size(); ++c)
            for (size_t r = 0; r < n; ++r) co.at(r, m + c) = jr[c][r];
        auto q_coords = [&](const FqVec& v) {
            auto sol = co.solve(v);
            if (!sol) throw std::logic_error("maximalize_at: quotient projection failed");
            sol->resize(m);
            return *sol;
        };
        AlgebraSC<GFField> Q(rc.R, m, q_coords(V.unit()));
        for (size_t i = 0; i < m; ++i)
            for (size_t j = 0; j < m; ++j) {
                auto p = q_coords(V.mul(coset[i], coset[j]));
                for (size_t l = 0; l < m; ++l)
                    if (p[l]) Q.set_gamma(i, j, l, p[l]);
            }
        // central primitive idempotents of Q: primitive idempotents of Z(Q)
        auto Zb = center(Q);
        size_t zd = Zb.size();
        std::vector<FqVec> blocks; // block idempotents in Q coordinates
        if (zd == 1) {
            blocks.push_back(Q.unit());
        } else {
            Matrix<GFField> zm(rc.R, m, zd);
            for (size_t c = 0; c < zd; ++c)
                for (size_t r = 0; r < m; ++r) zm.at(r, c) = Zb[c][r];
            auto z_coords = [&](const FqVec& v) {
                auto sol = zm.solve(v);
                if (!sol) throw std::logic_error("maximalize_at: center projection failed");
                return *sol;
            };
            AlgebraSC<GFField> Z(rc.R, zd, z_coords(Q.unit()));
            for (size_t i = 0; i < zd; ++i)
                for (size_t j = 0; j < zd; ++j) {
                    auto p = z_coords(Q.mul(Zb[i], Zb[j]));
                    for (size_t l = 0; l < zd; ++l)
                        if (p[l]) Z.set_gamma(i, j, l, p[l]);
                }
            for (const auto& ez : fq_primitive_idempotents(Z, rng.next())) {
                FqVec e(m, 0);
                for (size_t c = 0; c < zd; ++c)
                    if (ez[c])
                        for (size_t r = 0; r < m; ++r)
                            e[r] = rc.R.add(e[r], rc.R.mul(ez[c], Zb[c][r]));
                blocks.push_back(std::move(e));
            }
        }
        bool enlarged = false;
        for (const auto& c : blocks) {
            // maximal ideal P = J + (1 - c) V, with c lifted through the cosets
            FqVec chat(n, 0);
            for (size_t l = 0; l < m; ++l)
                if (c[l])
                    for (size_t r = 0; r < n; ++r)
                        chat[r] = rc.R.add(chat[r], rc.R.mul(c[l], coset[l][r]));
            std::vector<FqVec> gen = J;
            for (size_t b = 0; b < n; ++b) {
                auto vb = V.basis_elem(b);
                gen.push_back(V.add(vb, V.mul(chat, vb)));
            }
            if (fq_span_rank(rc.R, gen, n) == n) continue; // not proper (single block)
            if (auto tr = idealizer_step(o, rc, gen)) {
                apply_transition(o, *tr);
                enlarged = true;
                break;
            }
        }
        if (!enlarged) return; // f-maximal
    }
    throw std::logic_error("maximalize_at: enlargement did not terminate");
}

Order maximal_order_finite(const AlgebraSC<RatField>& A, const RatVec& eps, uint64_t seed) {
    Order o = initial_order(A);
    Rng rng(seed);
    for (const auto& f : disc_prime_candidates(A, eps, rng.next()))
        maximalize_at(o, f, rng.next());
    return o;
}

Order maximal_order_infinite(const AlgebraSC<RatField>& A, uint64_t seed) {
    const RatField& K = A.field();
    size_t n = A.dim();
    // substitute t -> 1/z in the structure constants
    RatVec unit_z(n, K.zero());
    for (size_t i = 0; i < n; ++i) unit_z[i] = invert_t(A.unit()[i]);
    AlgebraSC<RatField> Az(K, n, unit_z);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (const auto& [k, g] : A.products(i, j)) Az.set_gamma(i, j, k, invert_t(g));
    Order o = initial_order(Az);
    maximalize_at(o, Poly::t(K.gf()), seed);
    // map the basis back to t-coordinates
    Order out{Matrix<RatField>(K, n, n), AlgebraSC<RatField>(K, n, RatVec(n, K.zero())), {}};
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) out.B.at(i, j) = invert_t(o.B.at(i, j));
    RatVec u(n, K.zero());
    for (size_t i = 0; i < n; ++i) u[i] = invert_t(o.unit[i]);
    out.unit = u;
    AlgebraSC<RatField> sc(K, n, u);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (const auto& [k, g] : o.sc.products(i, j)) sc.set_gamma(i, j, k, invert_t(g));
    out.sc = std::move(sc);
    return out;
}

SectionAlgebra intersect_orders(const AlgebraSC<RatField>& A, const Order& fin,
                                const Order& inf) {
    const RatField& K = A.field();
    const GFContext& gf = K.gf();
    size_t n = A.dim();
    auto inf_inv = inf.B.inverse();
    if (!inf_inv) throw std::invalid_argument("intersect_orders: singular basis");
    Matrix<RatField> M = *inf_inv * fin.B;
    Matrix<RatField> C = fin.B; // running basis B1 * U
    // column reduction at infinity
    auto base_ptr = std::make_shared<GFField>(gf);
    const GFField& base = *base_ptr;
    for (int guard = 0;; ++guard) {
        if (guard > 100000) throw std::logic_error("intersect_orders: reduction stalled");
        std::vector<int> cdeg(n, INT_MIN);
        for (size_t j = 0; j < n; ++j)
            for (size_t i = 0; i < n; ++i) cdeg[j] = std::max(cdeg[j], inf_degree(M.at(i, j)));
        Matrix<GFField> L(base, n, n);
        for (size_t j = 0; j < n; ++j)
            for (size_t i = 0; i < n; ++i)
                L.at(i, j) = (!M.at(i, j).is_zero() && inf_degree(M.at(i, j)) == cdeg[j])
                                 ? inf_lead(M.at(i, j))
                                 : 0;
        auto ker = L.kernel();
        if (ker.empty()) {
            // reduced: read off the intersection
            SectionAlgebra out{base_ptr, AlgebraSC<GFField>(base, 0, {}), {}};
            std::vector<std::pair<size_t, int>> slots; // (column, power)
            for (size_t j = 0; j < n; ++j)
                for (int e = 0; e + cdeg[j] <= 0; ++e) slots.emplace_back(j, e);
            size_t m = slots.size();
            std::vector<RatVec> basis;
            for (auto [j, e] : slots) {
                RatVec v(n, K.zero());
                RatFun te = tpow(gf, e);
                for (size_t r = 0; r < n; ++r) v[r] = C.at(r, j) * te;
                basis.push_back(std::move(v));
            }
            auto Cinv = C.inverse();
            if (!Cinv) throw std::logic_error("intersect_orders: basis singular");
            auto coords = [&](const RatVec& x) {
                // coordinates with respect to the reduced order basis
                RatVec out_c(n, K.zero());
                for (size_t r = 0; r < n; ++r) {
                    RatFun a = K.zero();
                    for (size_t c = 0; c < n; ++c)
                        if (!x[c].is_zero()) a += Cinv->at(r, c) * x[c];
                    out_c[r] = a;
                }
                return out_c;
            };
            auto lam_coords = [&](const RatVec& x) {
                auto mu = coords(x);
                FqVec lc(m, 0);
                for (size_t s = 0; s < m; ++s) {
                    auto [j, e] = slots[s];
                    if (!mu[j].is_polynomial())
                        throw std::logic_error("intersect_orders: non-integral coordinates");
                    if (mu[j].num().degree() >= e) lc[s] = mu[j].num().coeff(e);
                }
                // consistency: the polynomial coordinates must be fully
                // captured by the slots
                return lc;
            };
            // verify representability: every coordinate degree fits its slots
            auto check_elem = [&](const RatVec& x) {
                auto mu = coords(x);
                for (size_t j = 0; j < n; ++j) {
                    if (mu[j].is_zero()) continue;
                    if (!mu[j].is_polynomial() || mu[j].num().degree() > -cdeg[j])
                        throw std::logic_error("intersect_orders: element escapes lattice");
                }
            };
            AlgebraSC<GFField> lam(base, m, lam_coords(A.unit()));
            check_elem(A.unit());
            for (size_t a = 0; a < m; ++a)
                for (size_t b = 0; b < m; ++b) {
                    auto prod = A.mul(basis[a], basis[b]);
                    check_elem(prod);
                    auto lc = lam_coords(prod);
                    for (size_t s = 0; s < m; ++s)
                        if (lc[s]) lam.set_gamma(a, b, s, lc[s]);
                }
            out.lam = std::move(lam);
            out.basis = std::move(basis);
            return out;
        }
        // cancel the top coefficients of the deepest column in the relation
        const auto& v = ker[0];
        size_t jstar = n;
        for (size_t j = 0; j < n; ++j)
            if (v[j] != 0 && (jstar == n || cdeg[j] > cdeg[jstar] ||
                              (cdeg[j] == cdeg[jstar] && j > jstar)))
                jstar = j;
        int dstar = cdeg[jstar];
        uint64_t vinv = gf.inv(v[jstar]);
        for (size_t i = 0; i < n; ++i) {
            RatFun acc = M.at(i, jstar);
            RatFun accC = C.at(i, jstar);
            for (size_t j = 0; j < n; ++j) {
                if (j == jstar || v[j] == 0) continue;
                RatFun c = RatFun(Poly::constant(gf, gf.mul(v[j], vinv))) *
                           tpow(gf, dstar - cdeg[j]);
                acc += c * M.at(i, j);
                accC += c * C.at(i, j);
            }
            M.at(i, jstar) = acc;
            C.at(i, jstar) = accC;
        }
    }
}

namespace {

/// Unit-normalizing basis change: S with S e_0 = unit.
Matrix<RatField> unit_normalizer(const AlgebraSC<RatField>& A) {
    const RatField& K = A.field();
    size_t n = A.dim();
    size_t p = n;
    for (size_t i = 0; i < n; ++i)
        if (!A.unit()[i].is_zero()) { p = i; break; }
    if (p == n) throw std::invalid_argument("unit_normalizer: zero unit");
    Matrix<RatField> S(K, n, n);
    for (size_t i = 0; i < n; ++i) S.at(i, 0) = A.unit()[i];
    size_t c = 1;
    for (size_t j = 0; j < n; ++j) {
        if (j == p) continue;
        S.at(j, c) = K.one();
        ++c;
    }
    return S;
}

/// Unit normalization shared by the idempotent searches: returns the
/// normalized algebra (unit = e_0), the basis change (if any), and maps an
/// element back to the original coordinates.
struct Normalized {
    AlgebraSC<RatField> AN;
    Matrix<RatField> S;
    bool norm;

    explicit Normalized(const AlgebraSC<RatField>& A)
        : AN(A), S(A.field(), A.dim(), A.dim()), norm(false) {
        const RatField& K = A.field();
        RatVec e0(A.dim(), K.zero());
        e0[0] = K.one();
        if (!A.eq_elem(A.unit(), e0)) {
            S = unit_normalizer(A);
            AN = change_basis(A, S);
            norm = true;
        }
    }

    RatVec back(const RatVec& x) const {
        if (!norm) return x;
        const RatField& K = AN.field();
        size_t n = AN.dim();
        RatVec y(n, K.zero());
        for (size_t r = 0; r < n; ++r)
            for (size_t c = 0; c < n; ++c)
                if (!x[c].is_zero()) y[r] += S.at(r, c) * x[c];
        return y;
    }

    /// A trace functional on A becomes one on AN via eps_N = eps o S.
    RatVec pull_eps(const RatVec& eps) const {
        if (!norm) return eps;
        const RatField& K = AN.field();
        size_t n = AN.dim();
        RatVec e(n, K.zero());
        for (size_t c = 0; c < n; ++c)
            for (size_t r = 0; r < n; ++r)
                if (!eps[r].is_zero()) e[c] += eps[r] * S.at(r, c);
        return e;
    }
};

/// The minimal-rank idempotent among the primitive idempotents of the
/// section algebra of a maximal order of AN (unit must be e_0).  rank == deg
/// means the only idempotent found is the unit (division algebra).
std::pair<RatVec, size_t> prim_min_rank(const AlgebraSC<RatField>& AN, size_t deg,
                                        const RatVec* eps_hint, Rng& rng) {
    const RatField& K = AN.field();
    size_t n = AN.dim();
    RatVec eps = eps_hint ? *eps_hint : trace_functional(AN);
    auto fin = maximal_order_finite(AN, eps, rng.next());
    auto inf = maximal_order_infinite(AN, rng.next());
    auto sect = intersect_orders(AN, fin, inf);
    auto prims = fq_primitive_idempotents(sect.lam, rng.next());
    const GFContext& gf = K.gf();
    RatVec best;
    size_t best_rank = deg + 1;
    for (const auto& p : prims) {
        RatVec x(n, K.zero());
        for (size_t s = 0; s < p.size(); ++s) {
            if (p[s] == 0) continue;
            RatFun c = RatFun(Poly::constant(gf, p[s]));
            for (size_t r = 0; r < n; ++r) x[r] += c * sect.basis[s][r];
        }
        size_t r = elem_rank(AN, x, deg);
        if (r > 0 && r < best_rank) { best = x; best_rank = r; }
        if (best_rank == 1) break;
    }
    if (best_rank > deg)
        throw std::logic_error("prim_min_rank: no idempotent of positive rank found");
    return {std::move(best), best_rank};
}

std::optional<RatVec> rank_one_impl(const AlgebraSC<RatField>& A, size_t deg, uint64_t seed,
                                    const RatVec* eps_hint) {
    const RatField& K = A.field();
    size_t n = A.dim();
    if (deg * deg != n) throw std::invalid_argument("rank_one_idempotent: dimension not square");
    if (deg == 1) return A.unit();
    Normalized N(A);
    Rng rng(seed);
    std::optional<RatVec> epsN;
    if (eps_hint) epsN = N.pull_eps(*eps_hint);
    auto [best, best_rank] = prim_min_rank(N.AN, deg, epsN ? &*epsN : nullptr, rng);
    if (best_rank == 1) return N.back(best);
    if (best_rank >= deg) return std::nullopt; // no proper idempotent: division part
    // recurse into the smallest corner
    auto cor = corner_algebra(N.AN, best);
    auto sub = rank_one_impl(cor.C, best_rank, rng.next(), nullptr);
    if (!sub) return std::nullopt;
    RatVec x(n, K.zero());
    for (size_t c = 0; c < cor.C.dim(); ++c)
        if (!(*sub)[c].is_zero())
            for (size_t r = 0; r < n; ++r) x[r] += (*sub)[c] * cor.to_parent[c][r];
    if (elem_rank(N.AN, x, deg) != 1)
        throw std::logic_error("rank_one_idempotent: corner recursion lost rank");
    return N.back(x);
}

} // namespace

std::optional<RatVec> rank_one_idempotent(const AlgebraSC<RatField>& A, uint64_t seed,
                                          const RatVec* eps_hint) {
    size_t deg = 1;
    while (deg * deg < A.dim()) ++deg;
    return rank_one_impl(A, deg, seed, eps_hint);
}

MinRankIdempotent min_rank_idempotent(const AlgebraSC<RatField>& A, uint64_t seed,
                                      const RatVec* eps_hint) {
    size_t deg = 1;
    while (deg * deg < A.dim()) ++deg;
    if (deg * deg != A.dim())
        throw std::invalid_argument("min_rank_idempotent: dimension not square");
    if (deg == 1) return {A.unit(), 1};
    Normalized N(A);
    Rng rng(seed);
    std::optional<RatVec> epsN;
    if (eps_hint) epsN = N.pull_eps(*eps_hint);
    auto [best, rank] = prim_min_rank(N.AN, deg, epsN ? &*epsN : nullptr, rng);
    return {N.back(best), rank};
}

ExplicitIso explicit_iso_matrix(const AlgebraSC<RatField>& A, const RatVec& e, size_t n) {
    const RatField& K = A.field();
    size_t n2 = A.dim();
    if (n * n != n2) throw std::invalid_argument("explicit_iso_matrix: dimension mismatch");
    auto I = ideal_from_element(A, e, IdealSide::Left);
    if (I.basis.size() != n)
        throw std::invalid_argument("explicit_iso_matrix: idempotent does not have rank one");
    // select n independent coordinate rows of the module basis
    Matrix<RatField> V(K, n2, n);
    for (size_t c = 0; c < n; ++c)
        for (size_t r = 0; r < n2; ++r) V.at(r, c) = I.basis[c][r];
    Matrix<RatField> Vt = V.transpose();
    auto piv = Vt.rref(); // pivots = independent rows of V
    if (piv.size() != n) throw std::logic_error("explicit_iso_matrix: module rank defect");
    Matrix<RatField> W(K, n, n);
    for (size_t r = 0; r < n; ++r)
        for (size_t c = 0; c < n; ++c) W.at(r, c) = V.at(piv[r], c);
    auto Winv = W.inverse();
    if (!Winv) throw std::logic_error("explicit_iso_matrix: submatrix singular");
    Matrix<RatField> fwd(K, n2, n2);
    for (size_t b = 0; b < n2; ++b) {
        // action of e_b on the module, in module coordinates
        for (size_t c = 0; c < n; ++c) {
            auto img = A.mul(A.basis_elem(b), I.basis[c]);
            // coords = Winv * (img at pivot rows)
            for (size_t r = 0; r < n; ++r) {
                RatFun a = K.zero();
                for (size_t q = 0; q < n; ++q)
                    if (!img[piv[q]].is_zero()) a += Winv->at(r, q) * img[piv[q]];
                fwd.at(r * n + c, b) = a;
            }
        }
    }
    auto bwd = fwd.inverse();
    if (!bwd) throw std::logic_error("explicit_iso_matrix: map not invertible");
    // spot check multiplicativity
    Rng rng(0x15011501);
    size_t checks = n2 <= 16 ? n2 * n2 : 64;
    for (size_t t = 0; t < checks; ++t) {
        size_t i = n2 <= 16 ? t / n2 : rng.below(n2);
        size_t j = n2 <= 16 ? t % n2 : rng.below(n2);
        // fwd(e_i e_j) == fwd(e_i) fwd(e_j) as n x n matrices
        auto prod = A.mul(A.basis_elem(i), A.basis_elem(j));
        for (size_t r = 0; r < n; ++r)
            for (size_t c = 0; c < n; ++c) {
                RatFun lhs = K.zero();
                for (size_t b = 0; b < n2; ++b)
                    if (!prod[b].is_zero()) lhs += fwd.at(r * n + c, b) * prod[b];
                RatFun rhs = K.zero();
                for (size_t q = 0; q < n; ++q)
                    rhs += fwd.at(r * n + q, i) * fwd.at(q * n + c, j);
                if (!(lhs == rhs))
                    throw std::logic_error("explicit_iso_matrix: map not multiplicative");
            }
    }
    return {std::move(fwd), std::move(*bwd)};
}

RightIdeal<RatField> maximal_right_ideal(const AlgebraSC<RatField>& A, uint64_t seed,
                                         const RatVec* eps_hint) {
    auto e = rank_one_idempotent(A, seed, eps_hint);
    if (!e) throw std::invalid_argument("maximal_right_ideal: no rank-one idempotent "
                                        "(algebra has a nontrivial division part)");
    auto comp = A.add(A.unit(), *e); // 1 - e in characteristic 2
    auto I = ideal_from_element(A, comp, IdealSide::Right);
    size_t n = 1;
    while (n * n < A.dim()) ++n;
    if (I.basis.size() != A.dim() - n)
        throw std::logic_error("maximal_right_ideal: unexpected ideal dimension");
    return I;
}

IsoResult iso_between_csas(const AlgebraSC<RatField>& A1, const AlgebraSC<RatField>& A2,
                           uint64_t seed) {
    if (A1.dim() != A2.dim())
        return {std::nullopt, "not isomorphic: dimensions differ"};
    auto T = tensor(A1, opposite(A2));
    Rng rng(seed);
    auto e = rank_one_idempotent(T, rng.next());
    if (!e)
        return {std::nullopt,
                "not isomorphic: A1 (x) A2^op is a nontrivial division algebra class"};
    auto phi = iso_from_tensor_idempotent(A1, A2, T, *e, rng);
    if (!phi) return {std::nullopt, "internal: cyclic vector search failed"};
    return {std::move(phi), ""};
}

} // namespace qalg
