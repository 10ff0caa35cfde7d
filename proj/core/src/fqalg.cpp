#include "qalg/fqalg.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace qalg {

namespace {

// ---------------------------------------------------------------------------
// F_{2^m} vector helpers: echelonized row bases with pivot bookkeeping.

struct Echelon {
    const GFField* F;
    size_t width;
    std::vector<FqVec> rows;      // RREF rows
    std::vector<size_t> pivots;   // pivot column of each row

    explicit Echelon(const GFField& f, size_t w) : F(&f), width(w) {}

    const GFField& field_ref() const { return *F; }
    size_t dim() const { return rows.size(); }

    /// Reduce v against the rows; returns the residue.
    FqVec reduce(FqVec v) const {
        for (size_t r = 0; r < rows.size(); ++r) {
            uint64_t c = v[pivots[r]];
            if (c == 0) continue;
            for (size_t j = 0; j < width; ++j) v[j] ^= F->mul(c, rows[r][j]);
        }
        return v;
    }

    /// Reduce and record the coefficients used (coordinates w.r.t. rows).
    FqVec reduce_with_coords(FqVec v, FqVec& coords) const {
        coords.assign(rows.size(), 0);
        for (size_t r = 0; r < rows.size(); ++r) {
            uint64_t c = v[pivots[r]];
            if (c == 0) continue;
            coords[r] = c;
            for (size_t j = 0; j < width; ++j) v[j] ^= F->mul(c, rows[r][j]);
        }
        return v;
    }

    /// Insert v if independent; keeps RREF. Returns true if dim grew.
    bool insert(FqVec v) {
        v = reduce(std::move(v));
        size_t p = width;
        for (size_t j = 0; j < width; ++j)
            if (v[j] != 0) { p = j; break; }
        if (p == width) return false;
        uint64_t iv = F->inv(v[p]);
        for (size_t j = 0; j < width; ++j) v[j] = F->mul(v[j], iv);
        // clear column p in existing rows
        for (size_t r = 0; r < rows.size(); ++r) {
            uint64_t c = rows[r][p];
            if (c == 0) continue;
            for (size_t j = 0; j < width; ++j) rows[r][j] ^= F->mul(c, v[j]);
        }
        // insert keeping pivots ascending
        size_t pos = 0;
        while (pos < pivots.size() && pivots[pos] < p) ++pos;
        rows.insert(rows.begin() + static_cast<long>(pos), std::move(v));
        pivots.insert(pivots.begin() + static_cast<long>(pos), p);
        return true;
    }

    bool contains(const FqVec& v) const {
        FqVec r = reduce(v);
        for (uint64_t x : r)
            if (x) return false;
        return true;
    }
};

FqVec random_vec(const GFField& F, size_t n, Rng& rng) {
    FqVec v(n);
    for (auto& x : v) x = rng.next() & F.gf().mask();
    return v;
}

bool is_zero_vec(const FqVec& v) {
    for (uint64_t x : v)
        if (x) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Subquotients U/Z of the regular module, vectors in ambient coordinates.

struct Subquot {
    const AlgebraSC<GFField>* A;
    Echelon U, Z;      // Z subspace of U, both over the ambient space
    Echelon ZU;        // Z in U-coordinates (RREF over F^{dim U})
    std::vector<size_t> free_pos; // non-pivot positions of ZU: quotient coords

    Subquot(const AlgebraSC<GFField>& a, Echelon u, Echelon z)
        : A(&a), U(std::move(u)), Z(std::move(z)), ZU(U.field_ref(), U.dim()) {
        rebuild();
    }

    void rebuild() {
        ZU = Echelon(U.field_ref(), U.dim());
        for (const auto& zr : Z.rows) {
            FqVec coords;
            FqVec rem = U.reduce_with_coords(zr, coords);
            if (!is_zero_vec(rem)) throw std::logic_error("Subquot: Z not inside U");
            ZU.insert(std::move(coords));
        }
        free_pos.clear();
        std::vector<bool> is_piv(U.dim(), false);
        for (size_t p : ZU.pivots) is_piv[p] = true;
        for (size_t j = 0; j < U.dim(); ++j)
            if (!is_piv[j]) free_pos.push_back(j);
    }

    size_t dim() const { return free_pos.size(); }

    /// Module coordinates of an ambient vector (must lie in U).
    FqVec project(const FqVec& v) const {
        FqVec coords;
        FqVec rem = U.reduce_with_coords(v, coords);
        if (!is_zero_vec(rem)) throw std::logic_error("Subquot: vector outside U");
        coords = ZU.reduce(std::move(coords));
        FqVec out(free_pos.size());
        for (size_t i = 0; i < free_pos.size(); ++i) out[i] = coords[free_pos[i]];
        return out;
    }

    /// A coset representative in ambient coordinates.
    FqVec lift(const FqVec& m) const {
        const GFField& F = U.field_ref();
        FqVec v(U.width, 0);
        for (size_t i = 0; i < free_pos.size(); ++i) {
            if (m[i] == 0) continue;
            const FqVec& row = U.rows[free_pos[i]];
            for (size_t j = 0; j < U.width; ++j) v[j] ^= F.mul(m[i], row[j]);
        }
        return v;
    }

    /// Matrix of the action of algebra element x on the subquotient.
    Matrix<GFField> action(const FqVec& x) const {
        const GFField& F = U.field_ref();
        size_t m = dim();
        Matrix<GFField> M(F, m, m);
        for (size_t c = 0; c < m; ++c) {
            FqVec e(m, 0);
            e[c] = 1;
            FqVec img = project(A->mul(x, lift(e)));
            for (size_t r = 0; r < m; ++r) M.at(r, c) = img[r];
        }
        return M;
    }
};

} // namespace

// ---------------------------------------------------------------------------
// min poly machinery

Poly matrix_min_poly(const Matrix<GFField>& M, Rng& rng) {
    const GFField& F = M.field();
    const GFContext& gf = F.gf();
    size_t n = M.rows();
    Poly mu = Poly::one(gf);
    for (int tries = 0; tries < 32; ++tries) {
        // local min poly from a random vector's Krylov chain
        FqVec v = random_vec(F, n, rng);
        if (is_zero_vec(v)) continue;
        Echelon ech(F, n);
        std::vector<FqVec> chain;
        FqVec cur = v;
        while (true) {
            if (!ech.insert(cur)) break;
            chain.push_back(cur);
            FqVec nxt(n, 0);
            for (size_t i = 0; i < n; ++i) {
                if (cur[i] == 0) continue;
                for (size_t r = 0; r < n; ++r) nxt[r] ^= F.mul(M.at(r, i), cur[i]);
            }
            cur = std::move(nxt);
        }
        // cur = M^d v depends on chain: solve for coefficients
        size_t d = chain.size();
        Matrix<GFField> S(F, n, d);
        for (size_t c = 0; c < d; ++c)
            for (size_t r = 0; r < n; ++r) S.at(r, c) = chain[c][r];
        auto sol = S.solve(cur);
        if (!sol) throw std::logic_error("matrix_min_poly: inconsistent Krylov chain");
        Poly p = Poly::monomial(gf, 1, static_cast<unsigned>(d));
        for (size_t c = 0; c < d; ++c) p.set_coeff(static_cast<int>(c), (*sol)[c]);
        Poly g = gcd(mu, p);
        mu = (mu / g) * p; // lcm
        // verified when mu annihilates M
        Matrix<GFField> E = poly_at_matrix(mu, M);
        bool zero = true;
        for (size_t i = 0; i < n && zero; ++i)
            for (size_t j = 0; j < n && zero; ++j) zero = (E.at(i, j) == 0);
        if (zero) return mu;
    }
    throw std::logic_error("matrix_min_poly: did not stabilize");
}

Matrix<GFField> poly_at_matrix(const Poly& p, const Matrix<GFField>& M) {
    const GFField& F = M.field();
    size_t n = M.rows();
    Matrix<GFField> R(F, n, n);
    if (p.is_zero()) return R;
    for (size_t i = 0; i < n; ++i) R.at(i, i) = p.coeff(p.degree());
    for (int d = p.degree() - 1; d >= 0; --d) {
        R = R * M;
        uint64_t c = p.coeff(d);
        if (c) for (size_t i = 0; i < n; ++i) R.at(i, i) = F.add(R.at(i, i), c);
    }
    return R;
}

FqVec poly_at_element(const AlgebraSC<GFField>& A, const Poly& p, const FqVec& x) {
    const GFField& F = A.field();
    FqVec r = A.zero_elem();
    if (p.is_zero()) return r;
    r = A.scale(p.coeff(p.degree()), A.unit());
    for (int d = p.degree() - 1; d >= 0; --d) {
        r = A.mul(r, x);
        uint64_t c = p.coeff(d);
        if (c) r = A.add(r, A.scale(c, A.unit()));
    }
    return r;
}

Poly element_min_poly(const AlgebraSC<GFField>& A, const FqVec& x, Rng& rng) {
    return matrix_min_poly(A.left_mul_matrix(x), rng);
}

// ---------------------------------------------------------------------------
// chopping the regular module into composition factors

namespace {

/// A short list of algebra elements generating A as an algebra with 1.
std::vector<FqVec> algebra_generators(const AlgebraSC<GFField>& A, Rng& rng) {
    const GFField& F = A.field();
    size_t n = A.dim();
    std::vector<FqVec> gens;
    for (int round = 0; round < 16; ++round) {
        gens.push_back(random_vec(F, n, rng));
        // span closure of the unital subalgebra generated by gens
        Echelon span(F, n);
        span.insert(A.unit());
        std::vector<FqVec> frontier{A.unit()};
        while (!frontier.empty() && span.dim() < n) {
            std::vector<FqVec> next;
            for (const auto& v : frontier)
                for (const auto& g : gens) {
                    FqVec w = A.mul(v, g);
                    if (span.insert(w)) next.push_back(std::move(w));
                }
            frontier = std::move(next);
        }
        if (span.dim() == n) return gens;
    }
    // fall back to the full basis (always generates)
    gens.clear();
    for (size_t i = 0; i < n; ++i) gens.push_back(A.basis_elem(i));
    return gens;
}

/// Spin a module vector under generator action; returns the generated
/// submodule (in module coordinates, RREF).
Echelon spin(const Subquot& W, const std::vector<Matrix<GFField>>& gens, const FqVec& w) {
    const GFField& F = *W.U.F;
    size_t m = W.dim();
    Echelon span(F, m);
    std::vector<FqVec> frontier;
    if (span.insert(w)) frontier.push_back(w);
    while (!frontier.empty() && span.dim() < m) {
        std::vector<FqVec> next;
        for (const auto& v : frontier)
            for (const auto& G : gens) {
                FqVec img(m, 0);
                for (size_t c = 0; c < m; ++c) {
                    if (v[c] == 0) continue;
                    for (size_t r = 0; r < m; ++r) img[r] ^= F.mul(G.at(r, c), v[c]);
                }
                if (span.insert(img)) next.push_back(std::move(img));
            }
        frontier = std::move(next);
    }
    return span;
}

/// Recursively chop W into simple subquotients, appended to out.
void chop(const AlgebraSC<GFField>& A, Subquot W, std::vector<Subquot>& out,
          const std::vector<FqVec>& agens, Rng& rng) {
    const GFField& F = A.field();
    size_t m = W.dim();
    if (m == 0) return;
    if (m == 1) {
        out.push_back(std::move(W));
        return;
    }
    std::vector<Matrix<GFField>> gens;
    for (const auto& g : agens) gens.push_back(W.action(g));

    auto split_at = [&](const Echelon& sub) {
        // sub: proper nonzero submodule in module coordinates
        Echelon U2 = W.Z;
        for (const auto& r : sub.rows) U2.insert(W.lift(r));
        Subquot lower(A, U2, W.Z);       // the submodule
        Subquot upper(A, W.U, U2);       // the quotient
        chop(A, std::move(lower), out, agens, rng);
        chop(A, std::move(upper), out, agens, rng);
    };

    for (int attempt = 0; attempt < 40; ++attempt) {
        FqVec z = random_vec(F, A.dim(), rng);
        Matrix<GFField> Zm = W.action(z);
        Poly mu = matrix_min_poly(Zm, rng);
        auto fac = poly_factor(mu, rng.next());
        // prefer factors of small nullity for the Norton test
        std::sort(fac.factors.begin(), fac.factors.end(),
                  [](const PolyFactor& a, const PolyFactor& b) {
                      return a.p.degree() < b.p.degree();
                  });
        for (const auto& pf : fac.factors) {
            Matrix<GFField> P = poly_at_matrix(pf.p, Zm);
            auto ker = P.kernel();
            if (ker.empty()) continue;
            for (const auto& w : ker) {
                Echelon s = spin(W, gens, w);
                if (s.dim() < m) { split_at(s); return; }
            }
            // all kernel vectors spin to everything; dual (Norton) test when
            // the kernel is as small as possible for this factor
            if (static_cast<int>(ker.size()) == pf.p.degree()) {
                std::vector<Matrix<GFField>> gensT;
                for (const auto& G : gens) gensT.push_back(G.transpose());
                auto kerT = P.transpose().kernel();
                if (!kerT.empty()) {
                    Echelon st(F, m);
                    {
                        // spin under transposed action directly
                        Echelon span(F, m);
                        std::vector<FqVec> frontier;
                        if (span.insert(kerT.front())) frontier.push_back(kerT.front());
                        while (!frontier.empty() && span.dim() < m) {
                            std::vector<FqVec> next;
                            for (const auto& v : frontier)
                                for (const auto& G : gensT) {
                                    FqVec img(m, 0);
                                    for (size_t c = 0; c < m; ++c) {
                                        if (v[c] == 0) continue;
                                        for (size_t r = 0; r < m; ++r)
                                            img[r] ^= F.mul(G.at(r, c), v[c]);
                                    }
                                    if (span.insert(img)) next.push_back(std::move(img));
                                }
                            frontier = std::move(next);
                        }
                        st = std::move(span);
                    }
                    if (st.dim() < m) {
                        // the perp of st is a proper nonzero submodule
                        Matrix<GFField> Mt(F, st.dim(), m);
                        for (size_t r = 0; r < st.dim(); ++r)
                            for (size_t c = 0; c < m; ++c) Mt.at(r, c) = st.rows[r][c];
                        auto perp = Mt.kernel();
                        Echelon sp(F, m);
                        for (const auto& v : perp) sp.insert(v);
                        if (sp.dim() > 0 && sp.dim() < m) { split_at(sp); return; }
                    } else {
                        out.push_back(std::move(W)); // irreducible (Norton)
                        return;
                    }
                }
            }
        }
    }
    // no split found in the attempt budget: treat as irreducible; the caller
    // validates the radical and retries with a new seed on failure
    out.push_back(std::move(W));
}

} // namespace

std::vector<FqVec> fq_radical(const AlgebraSC<GFField>& A, uint64_t seed) {
    const GFField& F = A.field();
    size_t n = A.dim();
    Rng master(seed);
    for (int retry = 0; retry < 8; ++retry) {
        Rng rng = master.fork(static_cast<uint64_t>(retry));
        auto agens = algebra_generators(A, rng);
        Echelon full(F, n), none(F, n);
        for (size_t i = 0; i < n; ++i) full.insert(A.basis_elem(i));
        std::vector<Subquot> simples;
        chop(A, Subquot(A, full, none), simples, agens, rng);
        // radical = intersection of annihilators of the simple factors
        std::vector<FqVec> C;
        for (size_t i = 0; i < n; ++i) C.push_back(A.basis_elem(i));
        for (const auto& S : simples) {
            if (C.empty()) break;
            size_t m = S.dim();
            Matrix<GFField> sys(F, m * m, C.size());
            for (size_t c = 0; c < C.size(); ++c) {
                Matrix<GFField> act = S.action(C[c]);
                for (size_t r = 0; r < m; ++r)
                    for (size_t s = 0; s < m; ++s) sys.at(r * m + s, c) = act.at(r, s);
            }
            auto ker = sys.kernel();
            std::vector<FqVec> next;
            for (const auto& kv : ker) {
                FqVec v = A.zero_elem();
                for (size_t c = 0; c < C.size(); ++c)
                    if (kv[c]) v = A.add(v, A.scale(kv[c], C[c]));
                next.push_back(std::move(v));
            }
            C = std::move(next);
        }
        // validate: two-sided nilpotent ideal
        bool ok = true;
        Echelon rad(F, n);
        for (const auto& v : C) rad.insert(v);
        for (const auto& v : C) {
            for (size_t j = 0; j < n && ok; ++j) {
                ok = ok && rad.contains(A.mul(v, A.basis_elem(j)));
                ok = ok && rad.contains(A.mul(A.basis_elem(j), v));
            }
            if (!ok) break;
        }
        if (ok) {
            // nilpotency: powers of the ideal shrink to zero
            std::vector<FqVec> layer = C;
            for (size_t step = 0; step < n + 1 && !layer.empty(); ++step) {
                Echelon nx(F, n);
                for (const auto& a : layer)
                    for (const auto& b : C) nx.insert(A.mul(a, b));
                layer.assign(nx.rows.begin(), nx.rows.end());
                if (layer.empty()) break;
                if (step == n) ok = false;
            }
        }
        if (ok) return C;
    }
    throw std::logic_error("fq_radical: validation kept failing");
}

// ---------------------------------------------------------------------------
// primitive idempotents

namespace {

/// Idempotent q(x) from a nontrivial coprime factor split of the minimal
/// polynomial of x; absent if mu is a prime power.
std::optional<FqVec> idempotent_from_element(const AlgebraSC<GFField>& A, const FqVec& x,
                                             Rng& rng) {
    const GFContext& gf = A.field().gf();
    Poly mu = element_min_poly(A, x, rng);
    auto fac = poly_factor(mu, rng.next());
    if (fac.factors.size() < 2) return std::nullopt;
    Poly g = Poly::one(gf);
    for (int i = 0; i < fac.factors[0].mult; ++i) g = g * fac.factors[0].p;
    Poly h = mu / g;
    auto xg = xgcd(g, h);
    if (xg.g.degree() != 0) return std::nullopt;
    // xg.g is monic of degree 0, hence 1: e = (v*h)(x) is the idempotent
    // cutting out the g-primary component's complement.
    FqVec e = poly_at_element(A, (xg.v * h) % mu, x);
    if (A.is_zero_elem(e) || A.eq_elem(e, A.unit())) return std::nullopt;
    if (!A.eq_elem(A.mul(e, e), e)) return std::nullopt;
    return e;
}

/// Primitive idempotents of a SEMISIMPLE algebra, by recursive corner
/// splitting. Returns pairwise orthogonal idempotents summing to unit.
void primitive_idempotents_ss(const AlgebraSC<GFField>& A, const FqVec& e,
                              std::vector<FqVec>& out, Rng& rng, int depth) {
    if (depth > 64) throw std::logic_error("primitive idempotents: runaway recursion");
    auto cor = corner_algebra(A, e);
    const AlgebraSC<GFField>& C = cor.C;
    const GFField& F = A.field();
    size_t m = C.dim();
    if (m == 1) {
        out.push_back(e);
        return;
    }
    auto lift_to_A = [&](const FqVec& x) {
        FqVec v = A.zero_elem();
        for (size_t b = 0; b < m; ++b)
            if (x[b]) v = A.add(v, A.scale(x[b], cor.to_parent[b]));
        return v;
    };
    for (int attempt = 0; attempt < 96; ++attempt) {
        FqVec x = random_vec(F, m, rng);
        auto g = idempotent_from_element(C, x, rng);
        if (!g) {
            // zero-divisor fallback: a nilpotent part yields an ideal unit
            Poly mu = element_min_poly(C, x, rng);
            auto fac = poly_factor(mu, rng.next());
            if (fac.factors.size() == 1 && fac.factors[0].mult > 1) {
                FqVec y = poly_at_element(C, fac.factors[0].p, x);
                if (!C.is_zero_elem(y)) {
                    auto I = ideal_from_element(C, y, IdealSide::Right);
                    auto lu = left_unit_of_right_ideal(C, I);
                    if (lu && !C.is_zero_elem(*lu) && !C.eq_elem(*lu, C.unit())) g = *lu;
                }
            }
            if (!g) continue;
        }
        FqVec g1 = lift_to_A(*g);
        FqVec g2 = A.add(e, g1);
        primitive_idempotents_ss(A, g1, out, rng, depth + 1);
        primitive_idempotents_ss(A, g2, out, rng, depth + 1);
        return;
    }
    // no split found: primitive (fields resist all split attempts)
    out.push_back(e);
}

} // namespace

std::vector<FqVec> fq_primitive_idempotents(const AlgebraSC<GFField>& A, uint64_t seed) {
    const GFField& F = A.field();
    size_t n = A.dim();
    Rng master(seed);
    auto rad = fq_radical(A, master.next());
    for (int retry = 0; retry < 8; ++retry) {
        Rng rng = master.fork(static_cast<uint64_t>(retry) + 1);
        // quotient algebra Q = A / rad on a coset basis
        Echelon radE(F, n);
        for (const auto& v : rad) radE.insert(v);
        std::vector<FqVec> coset;           // representatives, ambient coords
        Echelon span = radE;
        for (size_t i = 0; i < n && span.dim() < n; ++i) {
            FqVec v = A.basis_elem(i);
            if (span.insert(v)) coset.push_back(std::move(v));
        }
        size_t m = coset.size();
        // coordinates in Q: express x in the basis (coset reps, radical basis)
        // and keep the coset part
        Matrix<GFField> co(F, n, n);
        for (size_t c = 0; c < m; ++c)
            for (size_t r = 0; r < n; ++r) co.at(r, c) = coset[c][r];
        for (size_t c = 0; c < radE.dim(); ++c)
            for (size_t r = 0; r < n; ++r) co.at(r, m + c) = radE.rows[c][r];
        auto q_coords = [&](const FqVec& x) {
            auto sol = co.solve(x);
            if (!sol) throw std::logic_error("fq_primitive_idempotents: projection failed");
            sol->resize(m);
            return *sol;
        };
        AlgebraSC<GFField> Q(F, m, q_coords(A.unit()));
        for (size_t i = 0; i < m; ++i)
            for (size_t j = 0; j < m; ++j) {
                auto p = q_coords(A.mul(coset[i], coset[j]));
                for (size_t k = 0; k < m; ++k) Q.set_gamma(i, j, k, p[k]);
            }
        std::vector<FqVec> prims;
        primitive_idempotents_ss(Q, Q.unit(), prims, rng, 0);
        // lift through the radical: preimage, squared until idempotent,
        // orthogonalized by working in the complementary corner
        std::vector<FqVec> lifted;
        FqVec Fsum = A.zero_elem();
        bool ok = true;
        for (const auto& ebar : prims) {
            FqVec u = A.zero_elem();
            for (size_t c = 0; c < m; ++c)
                if (ebar[c]) u = A.add(u, A.scale(ebar[c], coset[c]));
            // force orthogonality to the already-lifted part
            FqVec comp = A.add(A.unit(), Fsum); // 1 - sum, char 2
            u = A.mul(comp, A.mul(u, comp));
            size_t iter = 0;
            while (!A.eq_elem(A.mul(u, u), u)) {
                u = A.mul(u, u);
                if (++iter > 64) { ok = false; break; }
            }
            if (!ok) break;
            if (A.is_zero_elem(u)) { ok = false; break; }
            lifted.push_back(u);
            Fsum = A.add(Fsum, u);
        }
        ok = ok && A.eq_elem(Fsum, A.unit());
        for (size_t i = 0; i < lifted.size() && ok; ++i)
            for (size_t j = 0; j < lifted.size() && ok; ++j) {
                if (i == j) continue;
                ok = A.is_zero_elem(A.mul(lifted[i], lifted[j]));
            }
        if (ok) return lifted;
    }
    throw std::logic_error("fq_primitive_idempotents: validation kept failing");
}

} // namespace qalg
