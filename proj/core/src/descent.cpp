#include "qalg/descent.hpp"

#include "qalg/factor.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace qalg {

namespace {

template <class F>
void check_zero_divisor(const AlgebraSC<F>& A, const typename AlgebraSC<F>::Vec& x,
                        const char* stage) {
    if (A.is_zero_elem(x))
        throw std::logic_error(std::string(stage) + ": zero divisor candidate is zero");
    auto w = zero_divisor_witness(A, x);
    if (!w) throw std::logic_error(std::string(stage) + ": candidate has no annihilator");
}

Matrix<QuadExtField> sigma_matrix(const QuadExtField& L, const Matrix<QuadExtField>& M) {
    Matrix<QuadExtField> R(L, M.rows(), M.cols());
    for (size_t i = 0; i < M.rows(); ++i)
        for (size_t j = 0; j < M.cols(); ++j) R.at(i, j) = L.sigma(M.at(i, j));
    return R;
}

/// Trace-functional hint for cor(A): the product functional
/// eps_A tensor sigma(eps_A) of T = A tensor A^sigma restricted to the
/// switch-invariant basis; its values land in K.
RatVec cor_eps_hint(const AlgebraSC<QuadExtField>& A, const CorestrictionResult& cor) {
    const QuadExtField& L = A.field();
    auto epsA = trace_functional_generic(A);
    size_t n = A.dim();
    RatVec h;
    h.reserve(cor.to_tensor.size());
    bool nz = false;
    for (const auto& bv : cor.to_tensor) {
        LElem acc = L.zero();
        for (size_t i = 0; i < n; ++i) {
            if (L.is_zero(epsA[i])) continue;
            for (size_t j = 0; j < n; ++j) {
                if (L.is_zero(epsA[j])) continue;
                LElem w = L.mul(epsA[i], L.sigma(epsA[j]));
                acc = L.add(acc, L.mul(w, bv[i * n + j]));
            }
        }
        if (!acc.y.is_zero())
            throw std::logic_error("cor_eps_hint: functional is not K-valued on invariants");
        nz = nz || !acc.x.is_zero();
        h.push_back(acc.x);
    }
    if (!nz) throw std::logic_error("cor_eps_hint: functional vanishes on the corestriction");
    return h;
}

} // namespace

DescentResult involution_or_zerodivisor(const AlgebraSC<QuadExtField>& A,
                                        const QuadExtContext& ctx, uint64_t seed) {
    size_t n = A.dim();
    if (n != 4 && n != 16)
        throw std::invalid_argument("involution_or_zerodivisor: dimension must be 4 or 16");
    auto cor = corestriction(A, ctx.K);
    RatVec eps = cor_eps_hint(A, cor);
    RightIdeal<RatField> I = [&] {
        try {
            return maximal_right_ideal(cor.B, seed, &eps);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(
                std::string("involution_or_zerodivisor[corestriction-split]: ") + e.what() +
                " (the corestriction is not split, so A admits no involution of the second kind)");
        }
    }();
    auto res = involution_from_ideal(A, cor, I);
    if (res.zero_divisor) {
        check_zero_divisor(A, *res.zero_divisor, "involution_or_zerodivisor[intersection]");
        return {std::nullopt, std::move(res.zero_divisor)};
    }
    return {std::move(res.involution), std::nullopt};
}

DescendedQuaternion descend_quaternion(const AlgebraSC<QuadExtField>& A,
                                       const QuadExtContext& ctx, uint64_t seed) {
    if (A.dim() != 4)
        throw std::invalid_argument("descend_quaternion: expected a quaternion algebra");
    const QuadExtField& L = A.field();
    auto dr = involution_or_zerodivisor(A, ctx, seed);
    if (dr.zero_divisor) return {std::move(dr.zero_divisor), std::nullopt};
    auto kappa = generic_canonical_involution(A);
    // phi(x) = tau(kappa(x)) acts on coordinates as M_tau sigma(M_kappa)
    // after conjugating them, and squares to the identity because the
    // canonical involution commutes with every involution of the second
    // kind on a quaternion algebra (both fix the reduced trace).
    Matrix<QuadExtField> phi = dr.involution->m * sigma_matrix(L, kappa.m);
    if (!(phi * sigma_matrix(L, phi) == Matrix<QuadExtField>::identity(L, 4)))
        throw std::logic_error("descend_quaternion: phi is not an order-2 semilinear map");
    auto C = fixed_subalgebra(A, phi, ctx.K);
    if (C.C.dim() != 4)
        throw std::logic_error("descend_quaternion: fixed algebra has dimension " +
                               std::to_string(C.C.dim()));
    if (auto bad = C.C.validate())
        throw std::logic_error("descend_quaternion: fixed algebra invalid: " + *bad);
    if (!is_central_simple_exact(C.C))
        throw std::logic_error("descend_quaternion: fixed algebra is not central simple over K");
    Matrix<QuadExtField> span(L, 4, 4);
    for (size_t c = 0; c < 4; ++c)
        for (size_t r = 0; r < 4; ++r) span.at(r, c) = C.to_parent[c][r];
    if (span.rank() != 4)
        throw std::logic_error("descend_quaternion: K-form does not span A over L");
    return {std::nullopt, std::move(C)};
}

RatVec embed_L_into_quaternion(const AlgebraSC<RatField>& B, const QuadExtContext& ctx,
                               uint64_t seed) {
    auto pr = quaternion_params(B);
    if (!pr)
        throw std::invalid_argument("embed_L_into_quaternion: expected a standard "
                                    "quaternion table");
    const auto& [a, b] = *pr;
    const RatField& K = B.field();
    const RatFun& c = ctx.L.param();
    // nrd(lam1 + i + lam3 j + lam4 ij) = c homogenizes to the form
    // mu1^2 + mu1 mu2 + (a+c) mu2^2 + b (mu3^2 + mu3 mu4 + a mu4^2) = 0.
    QuadForm4 Q{RatFun::one(K.gf()), a + c, b, a};
    Rng rng(seed);
    for (int attempt = 0; attempt < 16; ++attempt) {
        auto res = solve_quadform4(Q, rng.next());
        if (res.status == IsotropyResult::Status::Anisotropic)
            throw std::invalid_argument(
                "embed_L_into_quaternion: embedding form is anisotropic at " +
                res.bad_place->to_string() + "; L does not split B");
        if (res.status != IsotropyResult::Status::Zero) continue;
        const auto& mu = res.zero;
        if (mu[1].is_zero()) continue; // would force a zero divisor; resample
        RatFun inv = mu[1].inv();
        RatVec u{mu[0] * inv, RatFun::one(K.gf()), mu[2] * inv, mu[3] * inv};
        auto u2u = B.add(B.mul(u, u), u);
        auto target = B.scale(c, B.unit());
        if (!B.eq_elem(u2u, target))
            throw std::logic_error("embed_L_into_quaternion: u^2 + u != c");
        return u;
    }
    throw std::runtime_error("embed_L_into_quaternion: no zero with mu2 != 0 found "
                             "within the attempt budget");
}

LVec zero_divisor_split_quat_L(const AlgebraSC<QuadExtField>& A, const QuadExtContext& ctx,
                               uint64_t seed) {
    const QuadExtField& L = A.field();
    Rng rng(seed);
    auto d = descend_quaternion(A, ctx, rng.next());
    if (d.zero_divisor) return *d.zero_divisor;
    const auto& C = *d.form;
    auto lift = [&](const RatVec& x) {
        LVec v(4, L.zero());
        for (size_t c = 0; c < 4; ++c) {
            if (x[c].is_zero()) continue;
            for (size_t r = 0; r < 4; ++r)
                v[r] = L.add(v[r], L.mul(L.embed(x[c]), C.to_parent[c][r]));
        }
        return v;
    };
    if (auto e = rank_one_idempotent(C.C, rng.next())) {
        // a proper idempotent of the K-form annihilates its complement in A
        auto z = lift(*e);
        check_zero_divisor(A, z, "zero_divisor_split_quat_L[split-form]");
        return z;
    }
    // C is a division form split by L: embed L as K(u) and shift by s
    auto pres = recognize_quaternion(C.C);
    if (pres.zero_divisor) {
        auto z = lift(*pres.zero_divisor);
        check_zero_divisor(A, z, "zero_divisor_split_quat_L[nilpotent]");
        return z;
    }
    const RatField& K = C.C.field();
    auto model = quaternion_char2(K, pres.a, pres.b);
    auto u_std = embed_L_into_quaternion(model, ctx, rng.next());
    RatVec uC(4, K.zero());
    for (size_t k = 0; k < 4; ++k) {
        if (u_std[k].is_zero()) continue;
        for (size_t r = 0; r < 4; ++r) uC[r] += u_std[k] * pres.basis[k][r];
    }
    // (u + s)(u + s + 1) = u^2 + u + s^2 + s = c + c = 0
    LVec z = A.add(lift(uC), A.scale(L.s(), A.unit()));
    check_zero_divisor(A, z, "zero_divisor_split_quat_L[embedding]");
    return z;
}

bool operator==(const RamificationSet& a, const RamificationSet& b) {
    if (a.places.size() != b.places.size()) return false;
    for (size_t i = 0; i < a.places.size(); ++i) {
        const Place &p = a.places[i], &q = b.places[i];
        if (p.is_infinity() != q.is_infinity()) return false;
        if (!p.is_infinity() && !(p.prime() == q.prime())) return false;
    }
    return true;
}

RamificationSet ramified_places_quat(const RatFun& a, const RatFun& b) {
    if (b.is_zero()) throw std::invalid_argument("ramified_places_quat: b must be nonzero");
    const GFContext& F = b.field();
    auto amin = minimize_binary(a).first;
    if (amin.is_zero() || as_image_solve(amin)) return {}; // K(theta) = K: split everywhere
    std::vector<Place> cand;
    auto add_factors = [&](const Poly& p) {
        if (p.degree() < 1) return;
        for (const auto& [f, mult] : poly_factor(p, 0x9a71f1ed).factors) {
            (void)mult;
            Place pl = Place::finite(f);
            bool dup = false;
            for (const auto& q : cand)
                if (!q.is_infinity() && q.prime() == f) dup = true;
            if (!dup) cand.push_back(pl);
        }
    };
    add_factors(amin.den());
    add_factors(b.num());
    add_factors(b.den());
    cand.push_back(Place::infinity(F));
    RamificationSet S;
    for (const auto& p : cand)
        if (!local_represents(amin, b, p)) S.places.push_back(p);
    std::sort(S.places.begin(), S.places.end(),
              [](const Place& x, const Place& y) { return x.less(y); });
    if (S.places.size() % 2 != 0)
        throw std::logic_error("ramified_places_quat: odd ramification set (reciprocity "
                               "violation)");
    return S;
}

AlgebraSC<RatField> construct_ramified_quaternion(const RamificationSet& S, const RatField& K,
                                                  uint64_t seed) {
    if (S.places.size() % 2 != 0)
        throw std::invalid_argument("construct_ramified_quaternion: |S| must be even");
    const GFContext& F = K.gf();
    if (S.places.empty()) return quaternion_char2(K, K.zero(), K.one());
    std::vector<Poly> fin;
    for (const auto& p : S.places)
        if (!p.is_infinity()) fin.push_back(p.prime());
    if (fin.empty())
        throw std::invalid_argument("construct_ramified_quaternion: no finite place in S");
    Poly bprod = Poly::one(F);
    for (const auto& f : fin) bprod = bprod * f;
    RatFun b(bprod);
    Rng rng(seed);
    // residues with nonsplit Artin-Schreier class at each finite member
    std::vector<Poly> residues;
    for (const auto& f : fin) {
        Place pl = Place::finite(f);
        Poly r = Poly::one(F);
        for (int tries = 0; residue_symbol(RatFun(r), pl) != 1; ++tries) {
            if (tries > 256)
                throw std::runtime_error("construct_ramified_quaternion: no nonsplit "
                                         "residue found");
            r = random_poly(F, f.degree() == 1 ? 0 : f.degree() - 1, rng);
            if (r.is_zero()) r = Poly::one(F);
        }
        residues.push_back(r);
    }
    Poly rc = crt(residues, fin);
    for (int attempt = 0; attempt < 64; ++attempt) {
        IrredConstraints cons;
        auto apoly = random_irreducible_in_class(rc, bprod, cons, rng.next());
        if (!apoly) continue;
        RatFun a(*apoly);
        if (ramified_places_quat(a, b) == S) return quaternion_char2(K, a, b);
    }
    throw std::runtime_error("construct_ramified_quaternion: validation failed for all "
                             "sampled Artin-Schreier classes");
}

RatVec zero_divisor_M2D(const AlgebraSC<RatField>& A, uint64_t seed) {
    if (A.dim() != 16) throw std::invalid_argument("zero_divisor_M2D: expected dimension 16");
    auto mr = min_rank_idempotent(A, seed);
    if (mr.rank >= 4)
        throw std::invalid_argument("zero_divisor_M2D: algebra is a division algebra, "
                                    "not M_2(D)");
    // an idempotent of rank < deg is exactly the preimage of a corner
    // projection (E11 for rank 2) under some isomorphism with M_2(D)
    check_zero_divisor(A, mr.e, "zero_divisor_M2D");
    return mr.e;
}

namespace {

/// Lift a K-coordinate vector through an inclusion basis into an L-algebra.
LVec lift_through(const QuadExtField& L, const std::vector<LVec>& basis, const RatVec& x) {
    size_t n = basis.empty() ? 0 : basis[0].size();
    LVec v(n, L.zero());
    for (size_t c = 0; c < basis.size(); ++c) {
        if (x[c].is_zero()) continue;
        for (size_t r = 0; r < n; ++r)
            v[r] = L.add(v[r], L.mul(L.embed(x[c]), basis[c][r]));
    }
    return v;
}

/// Rank-one idempotent of a degree-4 algebra T over L from any zero divisor:
/// left unit of the right ideal, complemented at rank 3, and reduced through
/// a rank-2 corner (isomorphic to M_2(L)) via the split-quaternion routine.
LVec rank_one_from_zero_divisor(const AlgebraSC<QuadExtField>& T, const LVec& z,
                                const QuadExtContext& ctx, Rng& rng) {
    auto unit_of = [&](const LVec& x) {
        auto I = ideal_from_element(T, x, IdealSide::Right);
        auto e = left_unit_of_right_ideal(T, I);
        if (!e) throw std::logic_error("iso[rank]: right ideal has no left unit");
        return *e;
    };
    auto e = unit_of(z);
    size_t r = elem_rank(T, e, 4);
    if (r == 3) {
        e = T.add(T.unit(), e); // 1 - e has rank 1
        r = elem_rank(T, e, 4);
    }
    if (r == 1) return e;
    if (r != 2) throw std::logic_error("iso[rank]: unexpected zero divisor rank");
    auto cor = corner_algebra(T, e);
    auto z2 = zero_divisor_split_quat_L(cor.C, ctx, rng.next());
    LVec zT(T.dim(), T.field().zero());
    for (size_t c = 0; c < cor.C.dim(); ++c) {
        if (T.field().is_zero(z2[c])) continue;
        for (size_t i = 0; i < T.dim(); ++i)
            zT[i] = T.field().add(zT[i], T.field().mul(z2[c], cor.to_parent[c][i]));
    }
    auto e1 = unit_of(zT);
    if (elem_rank(T, e1, 4) != 1)
        throw std::logic_error("iso[rank]: corner reduction did not reach rank 1");
    return e1;
}

/// Rank-one idempotent of T from a K-form CK with inclusion basis to_parent.
LVec rank_one_via_form(const AlgebraSC<QuadExtField>& T, const AlgebraSC<RatField>& CK,
                       const std::vector<LVec>& to_parent, const QuadExtContext& ctx,
                       Rng& rng) {
    if (auto e = rank_one_idempotent(CK, rng.next())) {
        auto eT = lift_through(T.field(), to_parent, *e);
        if (elem_rank(T, eT, 4) != 1)
            throw std::logic_error("iso[form]: lifted idempotent has wrong rank");
        return eT;
    }
    // the form is M_2(D); its rank-2 idempotent is a zero divisor of T
    auto z = zero_divisor_M2D(CK, rng.next());
    return rank_one_from_zero_divisor(T, lift_through(T.field(), to_parent, z), ctx, rng);
}

} // namespace

LIsoResult iso_quaternions_over_L(const AlgebraSC<QuadExtField>& A1,
                                  const AlgebraSC<QuadExtField>& A2,
                                  const QuadExtContext& ctx, uint64_t seed) {
    if (A1.dim() != 4 || A2.dim() != 4)
        return {std::nullopt, "not quaternion algebras: dimension != 4"};
    if (&A1.field() != &A2.field())
        throw std::invalid_argument("iso_quaternions_over_L: inputs must share one L "
                                    "context object");
    const QuadExtField& L = A1.field();
    Rng rng(seed);
    auto A2op = opposite(A2);
    auto T = tensor(A1, A2op);
    try {
        std::optional<LVec> e;
        // Fast path: descend the factors separately; the tensor of the two
        // K-forms is a K-form of T, so the splitter works in 16 dimensions
        // over K instead of descending the 256-dimensional corestriction.
        try {
            auto d1 = descend_quaternion(A1, ctx, rng.next());
            auto d2 = descend_quaternion(A2, ctx, rng.next());
            if (d1.zero_divisor || d2.zero_divisor) {
                // one factor is split, hence (A1 iso A2) both are
                auto rank_one_quat = [&](const AlgebraSC<QuadExtField>& Aq,
                                         const std::optional<LVec>& z0) {
                    LVec z = z0 ? *z0 : zero_divisor_split_quat_L(Aq, ctx, rng.next());
                    auto I = ideal_from_element(Aq, z, IdealSide::Right);
                    auto eu = left_unit_of_right_ideal(Aq, I);
                    if (!eu || elem_rank(Aq, *eu, 2) != 1)
                        throw std::logic_error("iso[split-factor]: no rank-one unit");
                    return *eu;
                };
                auto e1 = rank_one_quat(A1, d1.zero_divisor);
                auto e2 = rank_one_quat(A2, d2.zero_divisor);
                LVec ecand(16, L.zero());
                for (size_t i = 0; i < 4; ++i)
                    for (size_t j = 0; j < 4; ++j) ecand[i * 4 + j] = L.mul(e1[i], e2[j]);
                if (elem_rank(T, ecand, 4) != 1)
                    throw std::logic_error("iso[split-factor]: tensor idempotent rank");
                e = std::move(ecand);
            } else {
                auto CK = tensor(d1.form->C, opposite(d2.form->C));
                std::vector<LVec> to_parent;
                to_parent.reserve(16);
                for (size_t p = 0; p < 4; ++p)
                    for (size_t q = 0; q < 4; ++q) {
                        LVec v(16, L.zero());
                        for (size_t i = 0; i < 4; ++i)
                            for (size_t j = 0; j < 4; ++j)
                                v[i * 4 + j] = L.mul(d1.form->to_parent[p][i],
                                                     d2.form->to_parent[q][j]);
                        to_parent.push_back(std::move(v));
                    }
                e = rank_one_via_form(T, CK, to_parent, ctx, rng);
            }
        } catch (const std::exception&) {
            e.reset(); // factors do not descend; use the corestriction of T
        }
        if (!e) {
            auto dr = involution_or_zerodivisor(T, ctx, rng.next());
            if (dr.zero_divisor) {
                e = rank_one_from_zero_divisor(T, *dr.zero_divisor, ctx, rng);
            } else {
                auto k1 = generic_canonical_involution(A1);
                auto k2 = generic_canonical_involution(A2op);
                auto kT = tensor_involution(A1, k1, A2op, k2);
                Matrix<QuadExtField> phi = dr.involution->m * sigma_matrix(L, kT.m);
                if (!(phi * sigma_matrix(L, phi) ==
                      Matrix<QuadExtField>::identity(L, 16)))
                    throw std::logic_error("iso[descent]: phi is not an order-2 "
                                           "semilinear map");
                auto C = fixed_subalgebra(T, phi, ctx.K);
                if (C.C.dim() != 16)
                    throw std::logic_error("iso[descent]: K-form has wrong dimension");
                e = rank_one_via_form(T, C.C, C.to_parent, ctx, rng);
            }
        }
        auto iso = iso_from_tensor_idempotent(A1, A2, T, *e, rng);
        if (!iso) return {std::nullopt, "not isomorphic: simple module dimension mismatch"};
        // witness validation: unital, multiplicative on all pairs, bijective
        auto apply = [&](const LVec& x) {
            LVec y(4, L.zero());
            for (size_t r = 0; r < 4; ++r)
                for (size_t c = 0; c < 4; ++c)
                    if (!L.is_zero(x[c])) y[r] = L.add(y[r], L.mul(iso->at(r, c), x[c]));
            return y;
        };
        if (!iso->inverse()) return {std::nullopt, "witness check failed: not bijective"};
        if (!A2.eq_elem(apply(A1.unit()), A2.unit()))
            return {std::nullopt, "witness check failed: unit not preserved"};
        for (size_t i = 0; i < 4; ++i)
            for (size_t j = 0; j < 4; ++j) {
                auto lhs = apply(A1.mul(A1.basis_elem(i), A1.basis_elem(j)));
                auto rhs = A2.mul(apply(A1.basis_elem(i)), apply(A1.basis_elem(j)));
                if (!A2.eq_elem(lhs, rhs))
                    return {std::nullopt, "witness check failed: not multiplicative"};
            }
        return {std::move(iso), ""};
    } catch (const std::exception& ex) {
        return {std::nullopt, std::string("no isomorphism produced: ") + ex.what()};
    }
}

} // namespace qalg
