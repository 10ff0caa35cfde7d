#include "doctest.h"

#include "qalg/fqalg.hpp"

#include <algorithm>
#include <vector>

using namespace qalg;

namespace {

/// Span membership over F_{2^m} by Gaussian elimination on copies.
bool in_span(const GFField& F, std::vector<FqVec> basis, FqVec v) {
    size_t w = v.size();
    for (auto& b : basis) {
        size_t p = w;
        for (size_t j = 0; j < w; ++j)
            if (b[j]) { p = j; break; }
        if (p == w) continue;
        uint64_t c = F.mul(v[p], F.inv(b[p]));
        if (c == 0) continue;
        for (size_t j = 0; j < w; ++j) v[j] ^= F.mul(c, b[j]);
    }
    return std::all_of(v.begin(), v.end(), [](uint64_t x) { return x == 0; });
}

size_t span_dim(const GFField& F, const std::vector<FqVec>& vs, size_t w) {
    std::vector<FqVec> basis;
    for (FqVec v : vs) {
        for (const auto& b : basis) {
            size_t p = w;
            for (size_t j = 0; j < w; ++j)
                if (b[j]) { p = j; break; }
            if (p == w || v[p] == 0) continue;
            uint64_t c = F.mul(v[p], F.inv(b[p]));
            for (size_t j = 0; j < w; ++j) v[j] ^= F.mul(c, b[j]);
        }
        if (!std::all_of(v.begin(), v.end(), [](uint64_t x) { return x == 0; }))
            basis.push_back(std::move(v));
    }
    return basis.size();
}

/// Upper triangular 2x2 matrices: basis {E00, E01, E11}.
AlgebraSC<GFField> upper_triangular2(const GFField& F) {
    AlgebraSC<GFField> A(F, 3, FqVec{1, 0, 1});
    A.set_gamma(0, 0, 0, 1); // E00 E00 = E00
    A.set_gamma(0, 1, 1, 1); // E00 E01 = E01
    A.set_gamma(1, 2, 1, 1); // E01 E11 = E01
    A.set_gamma(2, 2, 2, 1); // E11 E11 = E11
    if (auto err = A.validate()) FAIL(*err);
    return A;
}

/// F_2[x]/(x^r): basis {1, x, ..., x^(r-1)}.
AlgebraSC<GFField> truncated_poly(const GFField& F, size_t r) {
    FqVec unit(r, 0);
    unit[0] = 1;
    AlgebraSC<GFField> A(F, r, unit);
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j)
            if (i + j < r) A.set_gamma(i, j, i + j, 1);
    if (auto err = A.validate()) FAIL(*err);
    return A;
}

/// Direct sum of copies of the field: componentwise product.
AlgebraSC<GFField> split_etale(const GFField& F, size_t r) {
    AlgebraSC<GFField> A(F, r, FqVec(r, 1));
    for (size_t i = 0; i < r; ++i) A.set_gamma(i, i, i, 1);
    if (auto err = A.validate()) FAIL(*err);
    return A;
}

AlgebraSC<GFField> scramble(const AlgebraSC<GFField>& A, Rng& rng) {
    const GFField& F = A.field();
    size_t n = A.dim();
    for (;;) {
        Matrix<GFField> S(F, n, n);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) S.at(i, j) = rng.next() & F.gf().mask();
        if (S.inverse()) return change_basis(A, S);
    }
}

void check_idempotent_system(const AlgebraSC<GFField>& A, const std::vector<FqVec>& es) {
    FqVec sum = A.zero_elem();
    for (const auto& e : es) {
        CHECK(A.eq_elem(A.mul(e, e), e));
        CHECK(!A.is_zero_elem(e));
        sum = A.add(sum, e);
    }
    CHECK(A.eq_elem(sum, A.unit()));
    for (size_t i = 0; i < es.size(); ++i)
        for (size_t j = 0; j < es.size(); ++j) {
            if (i == j) continue;
            CHECK(A.is_zero_elem(A.mul(es[i], es[j])));
        }
}

} // namespace

TEST_CASE("min poly of matrices and elements") {
    GFField F{GFContext(2)};
    Rng rng(7);

    SUBCASE("zero and identity") {
        Matrix<GFField> Z(F, 3, 3);
        CHECK(matrix_min_poly(Z, rng) == Poly::t(F.gf()));
        CHECK(matrix_min_poly(Matrix<GFField>::identity(F, 3), rng).degree() == 1);
    }

    SUBCASE("nilpotent Jordan block") {
        Matrix<GFField> N(F, 3, 3);
        N.at(0, 1) = 1;
        N.at(1, 2) = 1;
        Poly mu = matrix_min_poly(N, rng);
        CHECK(mu.degree() == 3);
        CHECK(mu.coeff(0) == 0);
        CHECK(mu.coeff(1) == 0);
        CHECK(mu.coeff(2) == 0);
    }

    SUBCASE("element min poly in M_2 matches matrix min poly") {
        auto A = matrix_algebra(F, 2);
        // x = E01 + E10: x^2 = 1, so mu = t^2 + 1
        FqVec x = A.add(A.basis_elem(1), A.basis_elem(2));
        Poly mu = element_min_poly(A, x, rng);
        CHECK(mu.degree() == 2);
        CHECK(mu.coeff(0) == 1);
        CHECK(mu.coeff(1) == 0);
        // evaluating mu at x annihilates
        CHECK(A.is_zero_elem(poly_at_element(A, mu, x)));
    }
}

TEST_CASE("fq_radical on reference algebras") {
    GFField F{GFContext(1)};

    SUBCASE("truncated polynomials: radical is (x)") {
        auto A = truncated_poly(F, 2);
        auto rad = fq_radical(A);
        REQUIRE(rad.size() == 1);
        CHECK(in_span(F, rad, A.basis_elem(1)));
    }

    SUBCASE("matrix algebra is semisimple") {
        auto A = matrix_algebra(F, 2);
        CHECK(fq_radical(A).empty());
        GFField F8{GFContext(3)};
        CHECK(fq_radical(matrix_algebra(F8, 3)).empty());
    }

    SUBCASE("upper triangular: radical is the strict part") {
        auto A = upper_triangular2(F);
        auto rad = fq_radical(A);
        REQUIRE(rad.size() == 1);
        CHECK(in_span(F, rad, A.basis_elem(1))); // E01
    }

    SUBCASE("scrambled deeper truncation") {
        GFField F4{GFContext(2)};
        auto A0 = truncated_poly(F4, 5);
        Rng rng(99);
        auto A = scramble(A0, rng);
        auto rad = fq_radical(A);
        CHECK(rad.size() == 4);
        // radical is nilpotent: every basis product chain of length 5 dies
        for (const auto& a : rad)
            for (const auto& b : rad) {
                FqVec p = A.mul(a, A.mul(b, A.mul(a, A.mul(b, a))));
                CHECK(A.is_zero_elem(p));
            }
    }

    SUBCASE("tensor of matrix algebras stays semisimple") {
        GFField F4{GFContext(2)};
        auto A = tensor(matrix_algebra(F4, 2), matrix_algebra(F4, 2));
        CHECK(fq_radical(A).empty());
    }
}

TEST_CASE("fq_primitive_idempotents on reference algebras") {
    GFField F{GFContext(1)};

    SUBCASE("split etale algebra: the coordinate idempotents") {
        auto A = split_etale(F, 2);
        auto es = fq_primitive_idempotents(A);
        REQUIRE(es.size() == 2);
        check_idempotent_system(A, es);
        // up to order these are exactly (1,0) and (0,1)
        CHECK(((es[0] == FqVec{1, 0} && es[1] == FqVec{0, 1}) ||
               (es[0] == FqVec{0, 1} && es[1] == FqVec{1, 0})));
    }

    SUBCASE("matrix algebra: n rank-one idempotents") {
        auto A = matrix_algebra(F, 2);
        auto es = fq_primitive_idempotents(A);
        REQUIRE(es.size() == 2);
        check_idempotent_system(A, es);
        for (const auto& e : es) CHECK(elem_rank(A, e, 2) == 1);
    }

    SUBCASE("local algebra: only the unit") {
        auto A = truncated_poly(F, 3);
        auto es = fq_primitive_idempotents(A);
        REQUIRE(es.size() == 1);
        CHECK(A.eq_elem(es[0], A.unit()));
    }

    SUBCASE("field extension as algebra: primitive despite dim > 1") {
        // F_4 over F_2: basis {1, w} with w^2 = w + 1
        AlgebraSC<GFField> A(F, 2, FqVec{1, 0});
        A.set_gamma(0, 0, 0, 1);
        A.set_gamma(0, 1, 1, 1);
        A.set_gamma(1, 0, 1, 1);
        A.set_gamma(1, 1, 0, 1);
        A.set_gamma(1, 1, 1, 1);
        REQUIRE(!A.validate());
        auto es = fq_primitive_idempotents(A);
        REQUIRE(es.size() == 1);
        CHECK(A.eq_elem(es[0], A.unit()));
    }

    SUBCASE("scrambled M_3 over F_8") {
        GFField F8{GFContext(3)};
        Rng rng(5);
        auto A = scramble(matrix_algebra(F8, 3), rng);
        auto es = fq_primitive_idempotents(A);
        REQUIRE(es.size() == 3);
        check_idempotent_system(A, es);
        for (const auto& e : es) CHECK(elem_rank(A, e, 3) == 1);
    }

    SUBCASE("non-semisimple mix: upper triangular") {
        auto A = upper_triangular2(F);
        auto es = fq_primitive_idempotents(A);
        REQUIRE(es.size() == 2);
        check_idempotent_system(A, es);
    }

    SUBCASE("scrambled sum of two matrix blocks") {
        GFField F4{GFContext(2)};
        // M_2 + M_2 as a block direct sum, then scrambled
        auto M = matrix_algebra(F4, 2);
        AlgebraSC<GFField> A0(F4, 8, [&] {
            FqVec u(8, 0);
            u[0] = u[3] = u[4] = u[7] = 1;
            return u;
        }());
        for (size_t blk = 0; blk < 2; ++blk)
            for (size_t i = 0; i < 4; ++i)
                for (size_t j = 0; j < 4; ++j)
                    for (const auto& [k, g] : M.products(i, j))
                        A0.set_gamma(blk * 4 + i, blk * 4 + j, blk * 4 + k, g);
        REQUIRE(!A0.validate());
        Rng rng(11);
        auto A = scramble(A0, rng);
        CHECK(fq_radical(A).empty());
        auto es = fq_primitive_idempotents(A);
        REQUIRE(es.size() == 4);
        check_idempotent_system(A, es);
    }
}

TEST_CASE("radical and idempotents are consistent") {
    // rad(A/rad lifted back) behaves: idempotents of A reduce to a complete
    // system, and the span of radical plus corners covers A
    GFField F4{GFContext(2)};
    Rng rng(21);
    // glue a nilpotent part onto an etale part: F_4[x]/(x^2) + F_4
    AlgebraSC<GFField> A0(F4, 3, FqVec{1, 0, 1});
    A0.set_gamma(0, 0, 0, 1);
    A0.set_gamma(0, 1, 1, 1);
    A0.set_gamma(1, 0, 1, 1);
    A0.set_gamma(2, 2, 2, 1);
    REQUIRE(!A0.validate());
    auto A = scramble(A0, rng);

    auto rad = fq_radical(A);
    REQUIRE(rad.size() == 1);
    auto es = fq_primitive_idempotents(A);
    REQUIRE(es.size() == 2);
    check_idempotent_system(A, es);

    // the radical together with the corner units spans a 3-dim space with
    // the corner parts acting as units on their corners
    std::vector<FqVec> all = rad;
    for (const auto& e : es) all.push_back(e);
    CHECK(span_dim(F4, all, 3) == 3);
}
