#pragma once

// Brute-force local solvability oracle, independent of the library's
// digit-lifting implementation: enumerate the small variable over residues
// and decide the other by F_2-linear algebra (x -> x^2 is additive).

#include "qalg/quadform.hpp"
#include "qalg/ratfun.hpp"

#include <functional>
#include <vector>

namespace qalg::testing {

inline Poly oracle_residue(const RatFun& x, const Poly& fN) {
    return ((x.num() % fN) * invmod(x.den() % fN, fN)) % fN;
}

// Does L(x) = rhs have a solution x in F_q[t]/f^N, L an F_2-linear map?
inline bool f2_linear_solvable(const std::function<Poly(const Poly&)>& L, const Poly& rhs,
                               const Poly& f, int N) {
    const GFContext& F = f.field();
    Poly fN = Poly::one(F);
    for (int i = 0; i < N; ++i) fN = fN * f;
    size_t dim = F.k() * static_cast<size_t>(f.degree()) * static_cast<size_t>(N);
    std::vector<std::vector<uint8_t>> mat(dim, std::vector<uint8_t>(dim + 1, 0));
    auto put = [&](const Poly& p, size_t col) {
        for (size_t m = 0; m < dim; ++m) {
            size_t j = m / F.k(), i = m % F.k();
            if ((p.coeff(static_cast<int>(j)) >> i) & 1) mat[m][col] = 1;
        }
    };
    for (size_t m = 0; m < dim; ++m) {
        size_t j = m / F.k(), i = m % F.k();
        put(L(Poly::monomial(F, 1ull << i, static_cast<unsigned>(j))) % fN, m);
    }
    put(rhs % fN, dim);
    size_t row = 0;
    for (size_t c = 0; c < dim && row < dim; ++c) {
        size_t p = row;
        while (p < dim && !mat[p][c]) ++p;
        if (p == dim) continue;
        std::swap(mat[p], mat[row]);
        for (size_t r = 0; r < dim; ++r)
            if (r != row && mat[r][c])
                for (size_t cc = c; cc <= dim; ++cc) mat[r][cc] ^= mat[row][cc];
        ++row;
    }
    for (size_t r = row; r < dim; ++r)
        if (mat[r][dim]) return false;
    return true;
}

// Enumerate all residues modulo f^M.
inline void all_residues(const Poly& f, int M, const std::function<void(const Poly&)>& fn) {
    const GFContext& F = f.field();
    int bits = static_cast<int>(F.k()) * f.degree() * M;
    for (uint64_t v = 0; v < (1ull << bits); ++v) {
        Poly p = Poly::zero(F);
        for (int b = 0; b < bits; ++b)
            if ((v >> b) & 1) {
                int j = b / static_cast<int>(F.k()), i = b % static_cast<int>(F.k());
                p = p + Poly::monomial(F, 1ull << i, static_cast<unsigned>(j));
            }
        fn(p);
    }
}

// x^2 + x y + a y^2 = c solvable in the completion at the finite place f?
// Unramified: solvable mod f^{2+v} after square normalization of c.
// Ramified (odd pole 2r+1): the divided congruence of the local lemma,
// f x^2 + f^{r+1} x Y + b Y^2 = c_L modulo f^{2r+3}.
inline bool oracle_local_represents(const RatFun& a, const RatFun& c, const Poly& f) {
    const GFContext& F = f.field();
    Place p = Place::finite(f);
    int va = a.is_zero() ? 0 : valuation(a, p);
    int vc = valuation(c, p);
    RatFun unit = c;
    {
        Poly fv = Poly::one(F);
        for (int i = 0; i < (vc < 0 ? -vc : vc); ++i) fv = fv * f;
        unit = vc >= 0 ? c / RatFun(fv) : c * RatFun(fv);
    }
    int v = ((vc % 2) + 2) % 2;
    if (va >= 0) {
        int M = 2 + v;
        Poly fM = Poly::one(F);
        for (int i = 0; i < M; ++i) fM = fM * f;
        Poly ar = oracle_residue(a, fM);
        Poly cr = oracle_residue(unit, fM);
        if (v == 1) cr = (cr * f) % fM;
        bool found = false;
        all_residues(f, M, [&](const Poly& y) {
            if (found) return;
            // x^2 + y x = cr + a y^2
            auto L = [&](const Poly& x) { return ((x * x) % fM + (y * x) % fM) % fM; };
            Poly rhs = (cr + (((ar * y) % fM) * y) % fM) % fM;
            if (f2_linear_solvable(L, rhs, f, M)) found = true;
        });
        return found;
    }
    int r = (-va - 1) / 2;
    int N = 2 * r + 3;
    Poly fN = Poly::one(F);
    for (int i = 0; i < N; ++i) fN = fN * f;
    Poly fr1 = Poly::one(F);
    for (int i = 0; i < r + 1; ++i) fr1 = fr1 * f;
    Poly f2r1 = (fr1 * fr1) / f; // f^{2r+1}
    Poly b = oracle_residue(a * RatFun(f2r1), fN);
    Poly cl = oracle_residue(unit, fN);
    if (v == 0) cl = (cl * f) % fN;
    bool found = false;
    all_residues(f, r + 2, [&](const Poly& Y) {
        if (found) return;
        auto L = [&](const Poly& x) {
            return ((f * ((x * x) % fN)) % fN + (fr1 * ((x * Y) % fN)) % fN) % fN;
        };
        Poly rhs = (cl + (b * ((Y * Y) % fN)) % fN) % fN;
        if (f2_linear_solvable(L, rhs, f, N)) found = true;
    });
    return found;
}

} // namespace qalg::testing
