#include "doctest.h"

#include "qalg/factor.hpp"
#include "qalg/ratfun.hpp"

using namespace qalg;

namespace {

Poly P(const GFContext& F, std::initializer_list<uint64_t> coeffs) {
    return Poly(F, std::vector<uint64_t>(coeffs));
}

} // namespace

TEST_CASE("ratfun canonical form") {
    GFContext F(1);
    // (t^2+t)/t^2 reduces to (t+1)/t
    RatFun x(P(F, {0, 1, 1}), P(F, {0, 0, 1}));
    CHECK(x.num() == P(F, {1, 1}));
    CHECK(x.den() == P(F, {0, 1}));
    CHECK_THROWS(RatFun(Poly::one(F), Poly::zero(F)));
    // monic denominator over F_4
    GFContext F4(2);
    RatFun y(Poly::one(F4), Poly::constant(F4, 2));
    CHECK(y.den().is_one());
    CHECK(y.num() == Poly::constant(F4, F4.inv(2)));
    // arithmetic round trip
    RatFun a(P(F, {1, 1}), P(F, {0, 1}));
    RatFun b(P(F, {1}), P(F, {0, 0, 1}));
    CHECK((a + b) * (a + b).inv() == RatFun::one(F));
    CHECK(a / a == RatFun::one(F));
    CHECK(a - a == RatFun::zero(F));
}

TEST_CASE("valuation") {
    GFContext F(1);
    Place pt = Place::finite(Poly::t(F));
    Place inf = Place::infinity(F);
    CHECK(valuation(RatFun(Poly::one(F), P(F, {0, 0, 1})), pt) == -2);
    CHECK(valuation(RatFun(P(F, {0, 0, 0, 1})), inf) == -3);
    Poly f = P(F, {1, 1, 1});
    Poly g = P(F, {1, 1, 0, 0, 0, 0, 1});
    CHECK(valuation(RatFun(f * g), Place::finite(f)) == 1);
    CHECK(valuation(RatFun::zero(F), pt) == VAL_INFINITY);
    CHECK(valuation(RatFun::one(F), inf) == 0);
    CHECK(valuation(RatFun(Poly::one(F), P(F, {0, 1})), inf) == 1);
}

TEST_CASE("residue symbol paper values") {
    GFContext F(1);
    Poly pi = P(F, {1, 1, 1});
    Place p = Place::finite(pi);
    CHECK(residue_symbol(RatFun(Poly::t(F)), p) == 1);
    CHECK(residue_symbol(RatFun::one(F), p) == 0);
    // pole rejected
    CHECK_THROWS(residue_symbol(RatFun(Poly::one(F), pi), p));
    CHECK_THROWS(residue_symbol(RatFun(Poly::t(F)), Place::infinity(F)));
    // at infinity: constant term of the 1/t expansion
    CHECK(residue_symbol(RatFun::one(F), Place::infinity(F)) == 1);
    CHECK(residue_symbol(RatFun(Poly::one(F), Poly::t(F)), Place::infinity(F)) == 0);
    CHECK(residue_symbol(RatFun(P(F, {1, 1}), P(F, {0, 1})), Place::infinity(F)) == 1);
}

TEST_CASE("residue symbol properties") {
    for (unsigned k : {1u, 2u}) {
        GFContext F(k);
        Rng rng(0x5eedu + k);
        for (int iter = 0; iter < 60; ++iter) {
            int d = 1 + static_cast<int>(rng.below(3));
            Poly pi = random_monic(F, d, rng);
            while (!poly_is_irreducible(pi)) pi = random_monic(F, d, rng);
            Place p = Place::finite(pi);
            auto rand_reg = [&]() {
                Poly num = random_poly(F, 4, rng);
                Poly den = random_monic(F, 2, rng);
                while ((den % pi).is_zero()) den = random_monic(F, 2, rng);
                return RatFun(num, den);
            };
            RatFun f1 = rand_reg(), f2 = rand_reg();
            // additivity
            CHECK(residue_symbol(f1 + f2, p) ==
                  (residue_symbol(f1, p) ^ residue_symbol(f2, p)));
            // AS image vanishes
            CHECK(residue_symbol(f1.square() + f1, p) == 0);
            // depends only on the residue class
            RatFun f3 = f1 + RatFun(pi * random_poly(F, 3, rng));
            CHECK(residue_symbol(f1, p) == residue_symbol(f3, p));
        }
    }
}

TEST_CASE("residue symbol brute force") {
    // [f,pi) == 0 iff x^2+x = f solvable in the residue field, deg(pi)*k <= 8
    for (unsigned k : {1u, 2u}) {
        GFContext F(k);
        Rng rng(0xb1u + k);
        for (int iter = 0; iter < 40; ++iter) {
            int dmax = static_cast<int>(8 / k) < 4 ? static_cast<int>(8 / k) : 4;
            int d = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(dmax)));
            Poly pi = random_monic(F, d, rng);
            while (!poly_is_irreducible(pi)) pi = random_monic(F, d, rng);
            RatFun f(random_poly(F, 2 * d, rng));
            Poly fr = f.num() % pi;
            bool solvable = false;
            uint64_t bits = k * static_cast<uint64_t>(d);
            for (uint64_t v = 0; v < (1ull << bits) && !solvable; ++v) {
                Poly x = Poly::zero(F);
                for (uint64_t b = 0; b < bits; ++b)
                    if ((v >> b) & 1)
                        x = x + Poly::monomial(F, 1ull << (b % k),
                                               static_cast<unsigned>(b / k));
                if (((x * x + x) % pi) == fr) solvable = true;
            }
            CHECK(residue_symbol(f, Place::finite(pi)) == (solvable ? 0 : 1));
        }
    }
}

TEST_CASE("ratfun_sqrt") {
    GFContext F(1);
    CHECK(*ratfun_sqrt(RatFun(P(F, {0, 0, 1}))) == RatFun(Poly::t(F)));
    CHECK(!ratfun_sqrt(RatFun(Poly::t(F))));
    GFContext F4(2);
    // c = w t^2 -> w^2 t  (w generates F_4, w = u = bits 0b10)
    RatFun c(Poly::monomial(F4, 2, 2));
    auto r = ratfun_sqrt(c);
    REQUIRE(r);
    CHECK(*r == RatFun(Poly::monomial(F4, F4.mul(2, 2), 1)));
    CHECK(r->square() == c);
    // rational square
    RatFun q(P(F, {1, 0, 1}), P(F, {0, 0, 1}));
    auto rq = ratfun_sqrt(q);
    REQUIRE(rq);
    CHECK(rq->square() == q);
    CHECK(!ratfun_sqrt(RatFun(P(F, {1, 1}))));
}

TEST_CASE("place ordering") {
    GFContext F(1);
    Place a = Place::finite(Poly::t(F));
    Place b = Place::finite(P(F, {1, 1}));
    Place inf = Place::infinity(F);
    CHECK(a.less(b));
    CHECK(b.less(inf));
    CHECK(!inf.less(a));
    CHECK(a == a);
    CHECK(a != inf);
    CHECK_THROWS(Place::finite(P(F, {1, 0, 1}))); // reducible carrier
}
