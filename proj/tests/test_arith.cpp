#include "doctest.h"

#include "qalg/factor.hpp"
#include "qalg/poly.hpp"

using namespace qalg;

namespace {

Poly P(const GFContext& f, std::initializer_list<uint64_t> lo_to_hi) {
    return Poly(f, std::vector<uint64_t>(lo_to_hi));
}

} // namespace

TEST_CASE("gf_make validates the modulus") {
    GFContext f2(1);
    CHECK(f2.order() == 2);
    GFContext f4(2, 0b111); // u^2+u+1
    CHECK(f4.order() == 4);
    CHECK_THROWS_AS(GFContext(2, 0b101), std::invalid_argument); // u^2+1 = (u+1)^2
    CHECK_THROWS_AS(GFContext(3, 0b111), std::invalid_argument); // wrong degree
    GFContext f16(4, 0b10011); // u^4+u+1, irreducible
    CHECK(f16.order() == 16);
}

TEST_CASE("gf trace") {
    GFContext f2(1);
    CHECK(f2.trace(1) == 1);
    GFContext f4(2, 0b111);
    uint64_t w = 0b10; // u
    CHECK(f4.trace(w) == 1);
    CHECK(f4.trace(1) == 0);
}

TEST_CASE("gf artin-schreier solve") {
    GFContext f2(1);
    CHECK(f2.solve_artin_schreier(0) == 0);
    CHECK(!f2.solve_artin_schreier(1).has_value());
    GFContext f4(2, 0b111);
    CHECK(!f4.solve_artin_schreier(0b10).has_value());
    CHECK(f4.solve_artin_schreier(0) == 0);
    // property: succeeds iff trace 0, and the root checks out
    GFContext f16(4, 0b10011);
    for (uint64_t a = 0; a < 16; ++a) {
        auto x = f16.solve_artin_schreier(a);
        CHECK(x.has_value() == (f16.trace(a) == 0));
        if (x) {
            CHECK(f16.add(f16.sq(*x), *x) == a);
            CHECK(*x < (*x ^ 1)); // canonical root is the lesser bit pattern
        }
    }
}

TEST_CASE("gf sqrt") {
    GFContext f2(1);
    CHECK(f2.sqrt(1) == 1);
    GFContext f4(2, 0b111);
    uint64_t w = 0b10, w2 = f4.sq(w);
    CHECK(f4.sqrt(w) == w2);
    CHECK(f4.sqrt(0) == 0);
    GFContext f16(4, 0b10011);
    for (uint64_t x = 0; x < 16; ++x) CHECK(f16.sq(f16.sqrt(x)) == x);
}

TEST_CASE("poly basics and division") {
    GFContext f2(1);
    Poly a = P(f2, {1, 1, 0, 1});   // t^3+t+1
    Poly b = P(f2, {1, 1});         // t+1
    auto [q, r] = a.divmod(b);
    CHECK(q * b + r == a);
    CHECK(r.degree() < b.degree());
    CHECK(P(f2, {0, 0, 1}).sqrt() == P(f2, {0, 1}));
    CHECK(P(f2, {0, 1}).is_square() == false);
}

TEST_CASE("poly_factor") {
    GFContext f2(1);
    SUBCASE("t^2+t splits") {
        auto f = poly_factor(P(f2, {0, 1, 1}));
        REQUIRE(f.factors.size() == 2);
        CHECK(f.factors[0].p == P(f2, {0, 1}));
        CHECK(f.factors[0].mult == 1);
        CHECK(f.factors[1].p == P(f2, {1, 1}));
        CHECK(f.factors[1].mult == 1);
    }
    SUBCASE("t^2+t+1 is prime") {
        auto f = poly_factor(P(f2, {1, 1, 1}));
        REQUIRE(f.factors.size() == 1);
        CHECK(f.factors[0].mult == 1);
    }
    SUBCASE("t^4+t^2 = t^2 (t+1)^2") {
        auto f = poly_factor(P(f2, {0, 0, 1, 0, 1}));
        REQUIRE(f.factors.size() == 2);
        CHECK(f.factors[0].p == P(f2, {0, 1}));
        CHECK(f.factors[0].mult == 2);
        CHECK(f.factors[1].p == P(f2, {1, 1}));
        CHECK(f.factors[1].mult == 2);
    }
    SUBCASE("zero rejected") {
        CHECK_THROWS(poly_factor(Poly::zero(f2)));
    }
    SUBCASE("random products re-multiply exactly") {
        GFContext f4(2, 0b111);
        Rng rng(42);
        for (int it = 0; it < 25; ++it) {
            Poly p = random_poly(f4, 1 + static_cast<int>(rng.below(9)), rng);
            if (p.is_constant()) continue;
            auto f = poly_factor(p, rng.next());
            Poly back = Poly::constant(f4, f.lead);
            for (auto& [q, m] : f.factors) {
                CHECK(q.is_monic());
                CHECK(poly_is_irreducible(q));
                for (int i = 0; i < m; ++i) back = back * q;
            }
            CHECK(back == p);
        }
    }
}

TEST_CASE("poly_is_irreducible") {
    GFContext f2(1);
    CHECK(poly_is_irreducible(P(f2, {1, 1, 0, 0, 0, 0, 1}))); // t^6+t+1
    CHECK(!poly_is_irreducible(P(f2, {1, 0, 1})));            // (t+1)^2
    CHECK(poly_is_irreducible(P(f2, {0, 1})));                // t
    CHECK_THROWS(poly_is_irreducible(Poly::one(f2)));
    GFContext f4(2, 0b111);
    // t^2 + t + w is irreducible over F_4 iff Tr(w) = 1
    CHECK(poly_is_irreducible(Poly(f4, {0b10, 1, 1})));
    CHECK(!poly_is_irreducible(Poly(f4, {1, 1, 1}))); // splits over F_4
}

TEST_CASE("random_irreducible_in_class") {
    GFContext f2(1);
    SUBCASE("a=1 mod t, degree 2 forced") {
        IrredConstraints cons;
        cons.exact_degree = 2;
        auto h = random_irreducible_in_class(Poly::one(f2), Poly::t(f2), cons, 7);
        REQUIRE(h.has_value());
        CHECK(*h == P(f2, {1, 1, 1})); // the only monic irreducible of degree 2
    }
    SUBCASE("a=1 mod t+1, degree 1") {
        IrredConstraints cons;
        cons.exact_degree = 1;
        auto h = random_irreducible_in_class(Poly::one(f2), P(f2, {1, 1}), cons, 7);
        REQUIRE(h.has_value());
        CHECK(*h == Poly::t(f2));
    }
    SUBCASE("a=t mod t^2+t+1, even degree, second coefficient zero") {
        IrredConstraints cons;
        cons.degree_parity = 0;
        cons.top_coeffs = {0};
        Poly m = P(f2, {1, 1, 1});
        for (uint64_t seed : {1u, 2u, 3u}) {
            auto h = random_irreducible_in_class(Poly::t(f2), m, cons, seed);
            REQUIRE(h.has_value());
            CHECK(poly_is_irreducible(*h));
            CHECK(*h % m == Poly::t(f2));
            CHECK(h->degree() % 2 == 0);
            CHECK(h->coeff(h->degree() - 1) == 0);
            CHECK(h->is_monic());
        }
    }
    SUBCASE("low-order residue constraint") {
        IrredConstraints cons;
        cons.low_residue = Poly::one(f2);
        cons.low_power = 3;
        Poly m = P(f2, {1, 1, 1});
        auto h = random_irreducible_in_class(Poly::one(f2), m, cons, 5);
        REQUIRE(h.has_value());
        CHECK(poly_is_irreducible(*h));
        CHECK(*h % m == Poly::one(f2));
        CHECK(*h % P(f2, {0, 0, 0, 1}) == Poly::one(f2));
    }
    SUBCASE("gcd violation rejected") {
        IrredConstraints cons;
        CHECK_THROWS(random_irreducible_in_class(Poly::t(f2), Poly::t(f2), cons, 1));
    }
    SUBCASE("determinism") {
        IrredConstraints cons;
        cons.degree_parity = 1;
        Poly m = P(f2, {1, 1, 0, 1});
        auto h1 = random_irreducible_in_class(Poly::one(f2), m, cons, 99);
        auto h2 = random_irreducible_in_class(Poly::one(f2), m, cons, 99);
        REQUIRE(h1.has_value());
        CHECK(*h1 == *h2);
    }
}

TEST_CASE("crt") {
    GFContext f2(1);
    Poly m1 = P(f2, {0, 1});      // t
    Poly m2 = P(f2, {1, 1, 1});   // t^2+t+1
    Poly x = crt({Poly::one(f2), Poly::t(f2)}, {m1, m2});
    CHECK((x % m1) == Poly::one(f2));
    CHECK((x % m2) == Poly::t(f2));
}
