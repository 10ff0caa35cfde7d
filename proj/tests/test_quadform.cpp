#include "doctest.h"

#include "oracle_local.hpp"
#include "qalg/quadform.hpp"

using namespace qalg;
using qalg::testing::oracle_local_represents;

namespace {

Poly P(const GFContext& F, std::initializer_list<uint64_t> coeffs) {
    return Poly(F, std::vector<uint64_t>(coeffs));
}

bool poles_all_odd(const RatFun& a) {
    if (a.is_zero()) return true;
    for (auto& [f, m] : poly_factor(a.den()).factors)
        if (m % 2 == 0) return false;
    int d = a.num().degree() - a.den().degree();
    return d <= 0 || d % 2 == 1;
}

RatFun random_ratfun(const GFContext& F, int dmax, Rng& rng) {
    Poly num = random_poly(F, dmax, rng);
    Poly den = random_monic(F, static_cast<int>(rng.below(static_cast<uint64_t>(dmax) + 1)), rng);
    return RatFun(num, den);
}

} // namespace

TEST_CASE("minimize_binary examples") {
    GFContext F(1);
    RatFun t(Poly::t(F));
    SUBCASE("1/t^2 -> (1/t, 1/t)") {
        auto [amin, theta] = minimize_binary(t.square().inv());
        CHECK(amin == t.inv());
        CHECK(theta == t.inv());
    }
    SUBCASE("already minimal") {
        auto [amin, theta] = minimize_binary(t.inv());
        CHECK(amin == t.inv());
        CHECK(theta.is_zero());
    }
    SUBCASE("t^2+t -> (0, t)") {
        auto [amin, theta] = minimize_binary(t.square() + t);
        CHECK(amin.is_zero());
        CHECK(theta == t);
    }
}

TEST_CASE("minimize_binary properties") {
    for (unsigned k : {1u, 2u}) {
        GFContext F(k);
        Rng rng(0x3133u * k + 7);
        for (int iter = 0; iter < 40; ++iter) {
            RatFun a = random_ratfun(F, 6, rng);
            auto [amin, theta] = minimize_binary(a);
            CHECK(amin == a + theta.square() + theta); // exact identity
            CHECK(poles_all_odd(amin));
            auto [again, theta2] = minimize_binary(amin);
            CHECK(again == amin);
            CHECK(theta2.is_zero()); // idempotent
        }
    }
}

TEST_CASE("as_image_solve") {
    GFContext F(1);
    RatFun t(Poly::t(F));
    SUBCASE("examples") {
        auto w = as_image_solve(t.square().inv() + t.inv());
        REQUIRE(w);
        CHECK(*w == t.inv());
        CHECK(!as_image_solve(RatFun::one(F)));
        RatFun u(P(F, {0, 1, 1, 1, 0, 0, 1})); // t^6+t^3+t^2+t
        auto w2 = as_image_solve(u);
        REQUIRE(w2);
        CHECK(*w2 == RatFun(P(F, {0, 1, 0, 1}))); // t^3+t
        CHECK(w2->square() + *w2 == u);
    }
    SUBCASE("planted instances") {
        for (unsigned k : {1u, 2u}) {
            GFContext Fk(k);
            Rng rng(0xab1e + k);
            for (int iter = 0; iter < 30; ++iter) {
                RatFun w = random_ratfun(Fk, 5, rng);
                RatFun u = w.square() + w;
                auto got = as_image_solve(u);
                REQUIRE(got);
                CHECK(got->square() + *got == u);
            }
        }
    }
}

TEST_CASE("invert_t") {
    GFContext F(1);
    RatFun t(Poly::t(F));
    CHECK(invert_t(t) == t.inv());
    CHECK(invert_t(RatFun::one(F)) == RatFun::one(F));
    Rng rng(0x77);
    for (int iter = 0; iter < 20; ++iter) {
        RatFun x = random_ratfun(F, 5, rng);
        CHECK(invert_t(invert_t(x)) == x); // involution
    }
    // v_inf(x) = v_t(invert_t(x))
    RatFun x(P(F, {1, 1, 1}), P(F, {0, 1}));
    CHECK(valuation(x, Place::infinity(F)) ==
          valuation(invert_t(x), Place::finite(Poly::t(F))));
}

TEST_CASE("local_represents spec examples") {
    GFContext F(1);
    RatFun t(Poly::t(F));
    Place pt = Place::finite(Poly::t(F));
    // even valuation of c, regular a: always true
    CHECK(local_represents(RatFun::one(F), t.square(), pt));
    // a=1, c=t at t: [1,t)=1 and odd valuation
    CHECK(!local_represents(RatFun::one(F), t, pt));
    // ramified: a=1/t, c=1 agrees with the brute-force congruence
    CHECK(local_represents(t.inv(), RatFun::one(F), pt) ==
          oracle_local_represents(t.inv(), RatFun::one(F), Poly::t(F)));
    // non-minimal a rejected
    CHECK_THROWS(local_represents(t.square().inv(), RatFun::one(F), pt));
}

TEST_CASE("local_represents brute-force agreement") {
    Rng rng(0x10ca1);
    int checked = 0;
    for (unsigned k : {1u, 2u}) {
        GFContext F(k);
        for (int iter = 0; iter < 40; ++iter) {
            int dmax = k == 1 ? 2 : 1;
            int d = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(dmax)));
            Poly f = random_monic(F, d, rng);
            while (!poly_is_irreducible(f)) f = random_monic(F, d, rng);
            // a regular or with odd pole of order <= 3 (r <= 1) at f
            int shape = static_cast<int>(rng.below(3));
            Poly fp = Poly::one(F);
            int pole = shape == 0 ? 0 : (shape == 1 ? 1 : 3);
            for (int i = 0; i < pole; ++i) fp = fp * f;
            Poly num = random_poly(F, 3, rng);
            while ((num % f).is_zero() || num.is_zero()) num = random_poly(F, 3, rng);
            RatFun a = RatFun(num, fp);
            if (pole == 0) a = RatFun(random_poly(F, 3, rng));
            RatFun c = RatFun(random_poly(F, 4, rng));
            if (c.is_zero()) c = RatFun::one(F);
            if (static_cast<int>(rng.below(2)) == 1) c = c / RatFun(f);
            CHECK(local_represents(a, c, Place::finite(f)) ==
                  oracle_local_represents(a, c, f));
            ++checked;
        }
    }
    CHECK(checked == 80);
}

TEST_CASE("local_represents at infinity matches the t <-> 1/t transport") {
    GFContext F(1);
    Rng rng(0x1f1f);
    for (int iter = 0; iter < 25; ++iter) {
        RatFun a = random_ratfun(F, 3, rng);
        a = minimize_binary(a).first;
        RatFun c = random_ratfun(F, 3, rng);
        if (c.is_zero()) c = RatFun::one(F);
        CHECK(local_represents(a, c, Place::infinity(F)) ==
              oracle_local_represents(invert_t(a), invert_t(c), Poly::t(F)));
    }
}

TEST_CASE("local_isotropic4") {
    GFContext F(1);
    RatFun one = RatFun::one(F), t(Poly::t(F));
    RatFun f(P(F, {1, 1, 1}));
    Place pf = Place::finite(f.num());
    SUBCASE("paper form is locally isotropic at t^2+t+1") {
        QuadForm4 Q{f, t, one, one};
        CHECK(local_isotropic4(Q, pf));
    }
    SUBCASE("anisotropic family member fails at t^2+t+1") {
        QuadForm4 Q{one, t, f, t};
        CHECK(!local_isotropic4(Q, pf));
    }
    SUBCASE("place outside the critical set") {
        QuadForm4 Q{f, t, one, one};
        CHECK(local_isotropic4(Q, Place::finite(P(F, {1, 1}))));
        QuadForm4 Q2{one, t, f, t};
        CHECK(local_isotropic4(Q2, Place::finite(Poly::t(F))));
    }
}

TEST_CASE("critical_places") {
    GFContext F(1);
    RatFun one = RatFun::one(F), t(Poly::t(F)), zero = RatFun::zero(F);
    RatFun f(P(F, {1, 1, 1}));
    SUBCASE("paper example: {t^2+t+1, inf}") {
        auto S = critical_places(QuadForm4{f, t, one, one});
        REQUIRE(S.size() == 2);
        CHECK(S[0] == Place::finite(f.num()));
        CHECK(S[1] == Place::infinity(F));
    }
    SUBCASE("empty") {
        CHECK(critical_places(QuadForm4{one, zero, one, zero}).empty());
    }
    SUBCASE("(t,1,1,1): {t, inf}") {
        auto S = critical_places(QuadForm4{t, one, one, one});
        REQUIRE(S.size() == 2);
        CHECK(S[0] == Place::finite(Poly::t(F)));
        CHECK(S[1] == Place::infinity(F));
    }
}

TEST_CASE("choose_common_value") {
    GFContext F(1);
    RatFun one = RatFun::one(F), t(Poly::t(F)), zero = RatFun::zero(F);
    RatFun f(P(F, {1, 1, 1}));
    SUBCASE("paper form: admissible c found and verified") {
        QuadForm4 Q{f, t, one, one};
        auto c = choose_common_value(Q, 42);
        REQUIRE(c);
        CHECK(c->is_polynomial());
        for (auto& p : critical_places(Q)) {
            CHECK(local_represents(Q.a2, *c / Q.a1, p));
            CHECK(local_represents(Q.a4, *c / Q.a3, p));
        }
        CHECK(local_represents(Q.a2, *c / Q.a1, Place::infinity(F)));
        CHECK(local_represents(Q.a4, *c / Q.a3, Place::infinity(F)));
        // the paper's hand-picked value is admissible too
        RatFun paper_c = f * RatFun(P(F, {1, 1, 0, 0, 0, 0, 1}));
        for (auto& p : critical_places(Q)) {
            CHECK(local_represents(Q.a2, paper_c / Q.a1, p));
            CHECK(local_represents(Q.a4, paper_c / Q.a3, p));
        }
    }
    SUBCASE("anisotropic form: absent") {
        CHECK(!choose_common_value(QuadForm4{one, t, f, t}, 42));
    }
    SUBCASE("hyperbolic-like form: c=1") {
        auto c = choose_common_value(QuadForm4{one, zero, one, zero}, 42);
        REQUIRE(c);
        CHECK(*c == one);
    }
}

TEST_CASE("solve_binary_global paper values") {
    GFContext F(1);
    RatFun t(Poly::t(F));
    RatFun c1(P(F, {1, 1, 0, 0, 0, 0, 1})); // t^6+t+1
    RatFun c2 = RatFun(P(F, {1, 1, 1})) * c1;
    SUBCASE("a=t, c=t^6+t+1 -> (t^3+t^2+1, t)") {
        auto s = solve_binary_global(t, c1, 0);
        REQUIRE(s);
        CHECK(s->first == RatFun(P(F, {1, 0, 1, 1})));
        CHECK(s->second == t);
        CHECK(s->first.square() + s->first * s->second + t * s->second.square() == c1);
    }
    SUBCASE("a=1, c=(t^2+t+1)(t^6+t+1) -> (t^4+1, t^3)") {
        auto s = solve_binary_global(RatFun::one(F), c2, 0);
        REQUIRE(s);
        CHECK(s->first == RatFun(P(F, {1, 0, 0, 0, 1})));
        CHECK(s->second == RatFun(P(F, {0, 0, 0, 1})));
    }
    SUBCASE("perfect square: (r, 0)") {
        auto s = solve_binary_global(t, RatFun(P(F, {0, 0, 1})), 0);
        REQUIRE(s);
        CHECK(s->first == t);
        CHECK(s->second.is_zero());
    }
    SUBCASE("c=0 rejected") {
        CHECK_THROWS(solve_binary_global(t, RatFun::zero(F), 0));
    }
}

TEST_CASE("canonicalize4") {
    GFContext F(1);
    RatFun one = RatFun::one(F), zero = RatFun::zero(F), t(Poly::t(F));
    auto mk = [&](std::initializer_list<std::pair<std::pair<int, int>, RatFun>> entries) {
        GeneralQuadForm4 Q = GeneralQuadForm4::zero(F);
        for (auto& [ij, v] : entries) Q.q[ij.first][ij.second] = v;
        return Q;
    };
    auto check_isometry = [&](const GeneralQuadForm4& Q) {
        auto [canon, sub] = canonicalize4(Q);
        CHECK(!canon.a1.is_zero());
        CHECK(!canon.a3.is_zero());
        Rng rng(0xcafe);
        for (int iter = 0; iter < 5; ++iter) {
            std::array<RatFun, 4> x{RatFun(random_poly(F, 2, rng)), RatFun(random_poly(F, 2, rng)),
                                    RatFun(random_poly(F, 2, rng)), RatFun(random_poly(F, 2, rng))};
            CHECK(Q.eval(sub.apply(x)) == sub.scale * canon.eval(x));
        }
    };
    SUBCASE("already canonical: (1,1,1,1)") {
        GeneralQuadForm4 Q = mk({{{0, 0}, one}, {{0, 1}, one}, {{1, 1}, one},
                                 {{2, 2}, one}, {{2, 3}, one}, {{3, 3}, one}});
        auto [canon, sub] = canonicalize4(Q);
        CHECK(canon.a1 == one);
        CHECK(canon.a2 == one);
        CHECK(canon.a3 == one);
        CHECK(canon.a4 == one);
        check_isometry(Q);
    }
    SUBCASE("x1x2 + x3x4") {
        GeneralQuadForm4 Q = mk({{{0, 1}, one}, {{2, 3}, one}});
        check_isometry(Q);
    }
    SUBCASE("random regular forms") {
        Rng rng(0x909);
        int done = 0;
        while (done < 10) {
            GeneralQuadForm4 Q = GeneralQuadForm4::zero(F);
            for (int i = 0; i < 4; ++i)
                for (int j = i; j < 4; ++j) Q.q[i][j] = RatFun(random_poly(F, 2, rng));
            try {
                check_isometry(Q);
                ++done;
            } catch (const DegenerateFormError&) {
            }
        }
    }
    SUBCASE("degenerate form rejected with radical witness") {
        // x1^2 + x2^2 + x3 x4: polar form kills e1, e2
        GeneralQuadForm4 Q = mk({{{0, 0}, one}, {{1, 1}, one}, {{2, 3}, t}});
        try {
            canonicalize4(Q);
            FAIL("expected DegenerateFormError");
        } catch (const DegenerateFormError& e) {
            bool nonzero = false;
            for (auto& c : e.radical) nonzero = nonzero || !c.is_zero();
            CHECK(nonzero);
            // the witness pairs to zero with the whole space
            for (int i = 0; i < 4; ++i) {
                std::array<RatFun, 4> ei{zero, zero, zero, zero};
                ei[static_cast<size_t>(i)] = one;
                std::array<RatFun, 4> sv = e.radical;
                for (int j = 0; j < 4; ++j) sv[static_cast<size_t>(j)] += ei[static_cast<size_t>(j)];
                CHECK(Q.eval(sv) + Q.eval(e.radical) + Q.eval(ei) == zero);
            }
        }
    }
}

TEST_CASE("solve_quadform4 golden") {
    GFContext F(1);
    RatFun one = RatFun::one(F), t(Poly::t(F));
    RatFun f(P(F, {1, 1, 1}));
    QuadForm4 Q{f, t, one, one};
    auto res = solve_quadform4(Q, 7);
    REQUIRE(res.status == IsotropyResult::Status::Zero);
    bool nonzero = false;
    for (auto& c : res.zero) nonzero = nonzero || !c.is_zero();
    CHECK(nonzero);
    CHECK(Q.eval(res.zero).is_zero());
}

TEST_CASE("solve_quadform4 anisotropic certificate") {
    GFContext F(1);
    RatFun one = RatFun::one(F), t(Poly::t(F));
    RatFun f(P(F, {1, 1, 1}));
    QuadForm4 Q{one, t, f, t};
    auto res = solve_quadform4(Q, 7);
    REQUIRE(res.status == IsotropyResult::Status::Anisotropic);
    REQUIRE(res.bad_place);
    CHECK(*res.bad_place == Place::finite(f.num()));
    CHECK(!local_isotropic4(Q, *res.bad_place)); // certificate re-verifies
}

TEST_CASE("solve_quadform4 shortcut when a2 is an AS image") {
    GFContext F(1);
    RatFun one = RatFun::one(F), t(Poly::t(F));
    QuadForm4 Q{t, t.square() + t, one + t, one};
    auto res = solve_quadform4(Q, 7);
    REQUIRE(res.status == IsotropyResult::Status::Zero);
    CHECK(Q.eval(res.zero).is_zero());
}

TEST_CASE("solve_quadform4 planted zeros") {
    for (unsigned k : {1u, 2u}) {
        GFContext F(k);
        Rng rng(0x9a11 + k);
        int done = 0;
        while (done < 8) {
            // plant a zero, then adjust one coefficient to vanish on it
            std::array<RatFun, 4> v{RatFun(random_poly(F, 2, rng)), RatFun(random_poly(F, 2, rng)),
                                    RatFun(random_poly(F, 2, rng)), RatFun(random_poly(F, 2, rng))};
            if (v[0].is_zero() && v[1].is_zero() && v[2].is_zero() && v[3].is_zero()) continue;
            GeneralQuadForm4 Q = GeneralQuadForm4::zero(F);
            for (int i = 0; i < 4; ++i)
                for (int j = i; j < 4; ++j) Q.q[i][j] = RatFun(random_poly(F, 1, rng));
            int ai = -1, aj = -1;
            for (int i = 0; i < 4 && ai < 0; ++i)
                for (int j = i; j < 4; ++j)
                    if (!(v[i] * v[j]).is_zero()) { ai = i; aj = j; break; }
            if (ai < 0) continue;
            RatFun val = Q.eval(v);
            Q.q[ai][aj] += val / (v[static_cast<size_t>(ai)] * v[static_cast<size_t>(aj)]);
            REQUIRE(Q.eval(v).is_zero());
            try {
                auto res = solve_quadform4(Q, 5 + static_cast<uint64_t>(done));
                REQUIRE(res.status == IsotropyResult::Status::Zero);
                CHECK(Q.eval(res.zero).is_zero());
                bool nz = false;
                for (auto& c : res.zero) nz = nz || !c.is_zero();
                CHECK(nz);
                ++done;
            } catch (const DegenerateFormError&) {
            }
        }
    }
}
