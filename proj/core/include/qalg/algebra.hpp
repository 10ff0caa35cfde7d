#pragma once

#include "qalg/fields.hpp"
#include "qalg/linalg.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qalg {

// ---------------------------------------------------------------------------
// Structure-constant algebras over a pluggable field context.
//
// The multiplication table is stored sparsely: for each basis pair (i, j) we
// keep the list of (k, gamma_{ijk}) with gamma nonzero, sorted by k.  The
// 256-dimensional algebras showing up in corestrictions of tensor algebras
// have very sparse tables, and a dense n^3 table of rational functions would
// be prohibitive there.

/// The coefficient conjugation used by sigma-semilinear maps: identity on
/// plain fields, the nontrivial automorphism on the quadratic extension.
template <class F>
inline typename F::Elem conj_elem(const F&, const typename F::Elem& x) {
    return x;
}
inline LElem conj_elem(const QuadExtField& f, const LElem& x) { return f.sigma(x); }

template <class F>
class AlgebraSC {
public:
    using Elem = typename F::Elem;
    using Vec = std::vector<Elem>;
    using Row = std::vector<std::pair<uint32_t, Elem>>; // products of one basis pair

    AlgebraSC(const F& f, size_t n, Vec unit)
        : f_(&f), n_(n), sc_(n * n), unit_(std::move(unit)) {
        if (unit_.size() != n_) throw std::invalid_argument("AlgebraSC: unit size mismatch");
    }

    const F& field() const { return *f_; }
    size_t dim() const { return n_; }
    const Vec& unit() const { return unit_; }

    /// The nonzero products e_i e_j = sum_k gamma e_k, sorted by k.
    const Row& products(size_t i, size_t j) const { return sc_[i * n_ + j]; }

    void set_gamma(size_t i, size_t j, size_t k, const Elem& v) {
        Row& r = sc_[i * n_ + j];
        auto it = std::lower_bound(r.begin(), r.end(), k,
                                   [](const auto& p, size_t kk) { return p.first < kk; });
        if (it != r.end() && it->first == k) {
            if (f_->is_zero(v)) r.erase(it);
            else it->second = v;
        } else if (!f_->is_zero(v)) {
            r.insert(it, {static_cast<uint32_t>(k), v});
        }
    }

    Elem gamma(size_t i, size_t j, size_t k) const {
        const Row& r = sc_[i * n_ + j];
        auto it = std::lower_bound(r.begin(), r.end(), k,
                                   [](const auto& p, size_t kk) { return p.first < kk; });
        return (it != r.end() && it->first == k) ? it->second : f_->zero();
    }

    // ---- element helpers (coordinates are dense length-n vectors) ----
    Vec zero_elem() const { return Vec(n_, f_->zero()); }
    Vec basis_elem(size_t i) const {
        Vec v = zero_elem();
        v[i] = f_->one();
        return v;
    }
    Vec add(const Vec& a, const Vec& b) const {
        Vec r(n_);
        for (size_t i = 0; i < n_; ++i) r[i] = f_->add(a[i], b[i]);
        return r;
    }
    Vec scale(const Elem& c, const Vec& a) const {
        Vec r(n_);
        for (size_t i = 0; i < n_; ++i) r[i] = f_->mul(c, a[i]);
        return r;
    }
    Vec mul(const Vec& a, const Vec& b) const {
        Vec r = zero_elem();
        for (size_t i = 0; i < n_; ++i) {
            if (f_->is_zero(a[i])) continue;
            for (size_t j = 0; j < n_; ++j) {
                if (f_->is_zero(b[j])) continue;
                Elem c = f_->mul(a[i], b[j]);
                for (const auto& [k, g] : products(i, j))
                    r[k] = f_->add(r[k], f_->mul(c, g));
            }
        }
        return r;
    }
    bool is_zero_elem(const Vec& a) const {
        for (const auto& x : a)
            if (!f_->is_zero(x)) return false;
        return true;
    }
    bool eq_elem(const Vec& a, const Vec& b) const {
        for (size_t i = 0; i < n_; ++i)
            if (!f_->eq(a[i], b[i])) return false;
        return true;
    }

    /// Matrix of left multiplication by x: column j holds coords of x * e_j.
    Matrix<F> left_mul_matrix(const Vec& x) const {
        Matrix<F> m(*f_, n_, n_);
        for (size_t i = 0; i < n_; ++i) {
            if (f_->is_zero(x[i])) continue;
            for (size_t j = 0; j < n_; ++j)
                for (const auto& [k, g] : products(i, j))
                    m.at(k, j) = f_->add(m.at(k, j), f_->mul(x[i], g));
        }
        return m;
    }
    /// Matrix of right multiplication by x: column j holds coords of e_j * x.
    Matrix<F> right_mul_matrix(const Vec& x) const {
        Matrix<F> m(*f_, n_, n_);
        for (size_t j = 0; j < n_; ++j) {
            if (f_->is_zero(x[j])) continue;
            for (size_t i = 0; i < n_; ++i)
                for (const auto& [k, g] : products(i, j))
                    m.at(k, i) = f_->add(m.at(k, i), f_->mul(x[j], g));
        }
        return m;
    }

    /// Associativity and unit check over all basis triples/elements.
    /// Returns a description of the first offending triple, or nullopt.
    std::optional<std::string> validate() const {
        for (size_t i = 0; i < n_; ++i) {
            if (!eq_elem(mul(unit_, basis_elem(i)), basis_elem(i)))
                return "unit fails on the left at basis " + std::to_string(i);
            if (!eq_elem(mul(basis_elem(i), unit_), basis_elem(i)))
                return "unit fails on the right at basis " + std::to_string(i);
        }
        for (size_t i = 0; i < n_; ++i)
            for (size_t j = 0; j < n_; ++j) {
                Vec ij = mul(basis_elem(i), basis_elem(j));
                for (size_t l = 0; l < n_; ++l) {
                    Vec lhs = mul(ij, basis_elem(l));
                    Vec rhs = mul(basis_elem(i), mul(basis_elem(j), basis_elem(l)));
                    if (!eq_elem(lhs, rhs))
                        return "associativity fails at triple (" + std::to_string(i) + ", " +
                               std::to_string(j) + ", " + std::to_string(l) + ")";
                }
            }
        return std::nullopt;
    }

private:
    const F* f_;
    size_t n_;
    std::vector<Row> sc_;
    Vec unit_;
};

/// Validated constructor from a dense n*n*n table, gamma[(i*n+j)*n+k].
template <class F>
AlgebraSC<F> algebra_make(const F& f, size_t n, const std::vector<typename F::Elem>& sc,
                          const std::vector<typename F::Elem>& unit) {
    if (sc.size() != n * n * n) throw std::invalid_argument("algebra_make: table size mismatch");
    AlgebraSC<F> a(f, n, unit);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t k = 0; k < n; ++k) a.set_gamma(i, j, k, sc[(i * n + j) * n + k]);
    if (auto bad = a.validate()) throw std::invalid_argument("algebra_make: " + *bad);
    return a;
}

/// The quaternion algebra [a, b) in characteristic 2: basis (1, i, j, ij)
/// with i^2 = i + a, j^2 = b, ji = ij + j. Requires b != 0.
template <class F>
AlgebraSC<F> quaternion_char2(const F& f, const typename F::Elem& a, const typename F::Elem& b) {
    if (f.is_zero(b)) throw std::invalid_argument("quaternion_char2: b must be nonzero");
    using Vec = typename AlgebraSC<F>::Vec;
    Vec unit(4, f.zero());
    unit[0] = f.one();
    AlgebraSC<F> q(f, 4, unit);
    const auto one = f.one();
    auto ab = f.mul(a, b);
    for (size_t i = 0; i < 4; ++i) { // unit rows/columns
        q.set_gamma(0, i, i, one);
        q.set_gamma(i, 0, i, one);
    }
    q.set_gamma(1, 1, 0, a);   // i^2 = a + i
    q.set_gamma(1, 1, 1, one);
    q.set_gamma(1, 2, 3, one); // ij
    q.set_gamma(2, 1, 2, one); // ji = j + ij
    q.set_gamma(2, 1, 3, one);
    q.set_gamma(2, 2, 0, b);   // j^2 = b
    q.set_gamma(1, 3, 2, a);   // i(ij) = a j + ij
    q.set_gamma(1, 3, 3, one);
    q.set_gamma(3, 1, 2, a);   // (ij)i = a j
    q.set_gamma(2, 3, 0, b);   // j(ij) = b + b i
    q.set_gamma(2, 3, 1, b);
    q.set_gamma(3, 2, 1, b);   // (ij)j = b i
    q.set_gamma(3, 3, 0, ab);  // (ij)^2 = ab
    return q;
}

/// Reads back (a, b) from a table in quaternion_char2 shape, if it is one.
template <class F>
std::optional<std::pair<typename F::Elem, typename F::Elem>>
quaternion_params(const AlgebraSC<F>& A) {
    if (A.dim() != 4) return std::nullopt;
    const F& f = A.field();
    auto a = A.gamma(1, 1, 0);
    auto b = A.gamma(2, 2, 0);
    if (f.is_zero(b)) return std::nullopt;
    AlgebraSC<F> q = quaternion_char2(f, a, b);
    for (size_t i = 0; i < 4; ++i) {
        if (!f.eq(A.unit()[i], q.unit()[i])) return std::nullopt;
        for (size_t j = 0; j < 4; ++j)
            for (size_t k = 0; k < 4; ++k)
                if (!f.eq(A.gamma(i, j, k), q.gamma(i, j, k))) return std::nullopt;
    }
    return std::make_pair(a, b);
}

/// Tensor product over the common field context; basis e_i tensor f_j at
/// index i*dim(B)+j. Inputs are trusted (the tensor of associative tables
/// is associative), so no re-validation.
template <class F>
AlgebraSC<F> tensor(const AlgebraSC<F>& A, const AlgebraSC<F>& B) {
    const F& f = A.field();
    if (&f != &B.field())
        throw std::invalid_argument("tensor: factors must share one field context object");
    size_t n = A.dim(), m = B.dim(), nm = n * m;
    using Vec = typename AlgebraSC<F>::Vec;
    Vec unit(nm, f.zero());
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j) unit[i * m + j] = f.mul(A.unit()[i], B.unit()[j]);
    AlgebraSC<F> T(f, nm, unit);
    for (size_t i1 = 0; i1 < n; ++i1)
        for (size_t i2 = 0; i2 < n; ++i2)
            for (const auto& [i3, ga] : A.products(i1, i2))
                for (size_t j1 = 0; j1 < m; ++j1)
                    for (size_t j2 = 0; j2 < m; ++j2)
                        for (const auto& [j3, gb] : B.products(j1, j2))
                            T.set_gamma(i1 * m + j1, i2 * m + j2,
                                        static_cast<size_t>(i3) * m + j3, f.mul(ga, gb));
    return T;
}

/// Opposite algebra: multiplication reversed.
template <class F>
AlgebraSC<F> opposite(const AlgebraSC<F>& A) {
    const F& f = A.field();
    size_t n = A.dim();
    AlgebraSC<F> R(f, n, A.unit());
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (const auto& [k, g] : A.products(j, i)) R.set_gamma(i, j, k, g);
    return R;
}

/// A^sigma: every structure constant (and unit coordinate) conjugated.
inline AlgebraSC<QuadExtField> conjugate_algebra(const AlgebraSC<QuadExtField>& A) {
    const QuadExtField& f = A.field();
    size_t n = A.dim();
    typename AlgebraSC<QuadExtField>::Vec unit(n);
    for (size_t i = 0; i < n; ++i) unit[i] = f.sigma(A.unit()[i]);
    AlgebraSC<QuadExtField> R(f, n, std::move(unit));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (const auto& [k, g] : A.products(i, j)) R.set_gamma(i, j, k, f.sigma(g));
    return R;
}

/// Change of basis: column j of S holds the new basis vector f_j in old
/// coordinates. Returns the table of the same algebra on the new basis.
template <class F>
AlgebraSC<F> change_basis(const AlgebraSC<F>& A, const Matrix<F>& S) {
    const F& f = A.field();
    size_t n = A.dim();
    auto Sinv = S.inverse();
    if (!Sinv) throw std::invalid_argument("change_basis: singular matrix");
    auto col = [&](size_t j) {
        typename AlgebraSC<F>::Vec v(n);
        for (size_t i = 0; i < n; ++i) v[i] = S.at(i, j);
        return v;
    };
    auto to_new = [&](const typename AlgebraSC<F>::Vec& x) {
        typename AlgebraSC<F>::Vec v(n, f.zero());
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) v[i] = f.add(v[i], f.mul(Sinv->at(i, j), x[j]));
        return v;
    };
    AlgebraSC<F> R(f, n, to_new(A.unit()));
    for (size_t i = 0; i < n; ++i) {
        auto fi = col(i);
        for (size_t j = 0; j < n; ++j) {
            auto p = to_new(A.mul(fi, col(j)));
            for (size_t k = 0; k < n; ++k) R.set_gamma(i, j, k, p[k]);
        }
    }
    return R;
}

/// The full matrix algebra M_n on matrix units E_{pq} at index p*n+q.
template <class F>
AlgebraSC<F> matrix_algebra(const F& f, size_t n) {
    typename AlgebraSC<F>::Vec unit(n * n, f.zero());
    for (size_t p = 0; p < n; ++p) unit[p * n + p] = f.one();
    AlgebraSC<F> A(f, n * n, unit);
    for (size_t p = 0; p < n; ++p)
        for (size_t q = 0; q < n; ++q)
            for (size_t s = 0; s < n; ++s)
                A.set_gamma(p * n + q, q * n + s, p * n + s, f.one());
    return A;
}

// ---------------------------------------------------------------------------
// Involutions, stored as the matrix of their action on the distinguished
// basis plus a semilinearity flag (second kind acts as sigma on coordinates).

template <class F>
struct InvolutionMap {
    Matrix<F> m;      // tau(e_j) = sum_i m(i, j) e_i
    bool second_kind; // coordinates conjugated before applying the matrix
};

template <class F>
typename AlgebraSC<F>::Vec apply_involution(const AlgebraSC<F>& A, const InvolutionMap<F>& t,
                                            const typename AlgebraSC<F>::Vec& x) {
    const F& f = A.field();
    size_t n = A.dim();
    typename AlgebraSC<F>::Vec r = A.zero_elem();
    for (size_t j = 0; j < n; ++j) {
        auto c = t.second_kind ? conj_elem(f, x[j]) : x[j];
        if (f.is_zero(c)) continue;
        for (size_t i = 0; i < n; ++i) r[i] = f.add(r[i], f.mul(c, t.m.at(i, j)));
    }
    return r;
}

/// Full involution axioms on the basis: tau^2 = id, tau(xy) = tau(y)tau(x),
/// tau(1) = 1. Returns a failure description or nullopt.
template <class F>
std::optional<std::string> validate_involution(const AlgebraSC<F>& A, const InvolutionMap<F>& t) {
    size_t n = A.dim();
    for (size_t i = 0; i < n; ++i) {
        auto e = A.basis_elem(i);
        if (!A.eq_elem(apply_involution(A, t, apply_involution(A, t, e)), e))
            return "tau^2 != id at basis " + std::to_string(i);
    }
    if (!A.eq_elem(apply_involution(A, t, A.unit()), A.unit())) return "tau(1) != 1";
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            auto lhs = apply_involution(A, t, A.mul(A.basis_elem(i), A.basis_elem(j)));
            auto rhs = A.mul(apply_involution(A, t, A.basis_elem(j)),
                             apply_involution(A, t, A.basis_elem(i)));
            if (!A.eq_elem(lhs, rhs))
                return "anti-multiplicativity fails at pair (" + std::to_string(i) + ", " +
                       std::to_string(j) + ")";
        }
    return std::nullopt;
}

/// Canonical involution of a quaternion table: x -> trd(x) - x, i.e.
/// 1 -> 1, i -> i+1, j -> j, ij -> ij. First kind.
template <class F>
InvolutionMap<F> canonical_involution(const AlgebraSC<F>& A) {
    if (!quaternion_params(A))
        throw std::invalid_argument("canonical_involution: not a quaternion table");
    const F& f = A.field();
    Matrix<F> m = Matrix<F>::identity(f, 4);
    m.at(0, 1) = f.one(); // tau(i) = 1 + i
    return {std::move(m), false};
}

/// Factorwise involution on a tensor product (basis index i*dim(B)+j).
/// The semilinearity kinds must match; the result has the common kind.
template <class F>
InvolutionMap<F> tensor_involution(const AlgebraSC<F>& A, const InvolutionMap<F>& tA,
                                   const AlgebraSC<F>& B, const InvolutionMap<F>& tB) {
    if (tA.second_kind != tB.second_kind)
        throw std::invalid_argument("tensor_involution: mismatched semilinearity kinds");
    const F& f = A.field();
    size_t n = A.dim(), m = B.dim();
    Matrix<F> t(f, n * m, n * m);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            if (f.is_zero(tA.m.at(i, j))) continue;
            for (size_t p = 0; p < m; ++p)
                for (size_t q = 0; q < m; ++q)
                    t.at(i * m + p, j * m + q) = f.mul(tA.m.at(i, j), tB.m.at(p, q));
        }
    return {std::move(t), tA.second_kind};
}

// ---------------------------------------------------------------------------
// Rank, ideals, idempotents.

/// Rank of x viewed as a matrix under A = M_n(center): rank of the left
/// multiplication map divided by n (exact division asserted).
template <class F>
size_t elem_rank(const AlgebraSC<F>& A, const typename AlgebraSC<F>::Vec& x, size_t n) {
    size_t r = A.left_mul_matrix(x).rank();
    if (r % n != 0)
        throw std::logic_error("elem_rank: left multiplication rank not divisible by n");
    return r / n;
}

template <class F>
struct RightIdeal {
    std::vector<typename AlgebraSC<F>::Vec> basis;
};

enum class IdealSide { Left, Right };

/// Spanning basis of xA (right) or Ax (left), as the row space of the
/// products with the basis; deterministic (RREF rows).
template <class F>
RightIdeal<F> ideal_from_element(const AlgebraSC<F>& A, const typename AlgebraSC<F>::Vec& x,
                                 IdealSide side) {
    if (A.is_zero_elem(x)) throw std::invalid_argument("ideal_from_element: zero element");
    size_t n = A.dim();
    Matrix<F> m(A.field(), n, n);
    for (size_t j = 0; j < n; ++j) {
        auto p = side == IdealSide::Right ? A.mul(x, A.basis_elem(j)) : A.mul(A.basis_elem(j), x);
        for (size_t i = 0; i < n; ++i) m.at(j, i) = p[i];
    }
    auto piv = m.rref();
    RightIdeal<F> I;
    for (size_t r = 0; r < piv.size(); ++r) I.basis.push_back(m.row(r));
    return I;
}

/// The left unit e of a right ideal I: e in I with e v = v for all v in I
/// (hence e^2 = e). Absent for pathological non-semisimple inputs.
template <class F>
std::optional<typename AlgebraSC<F>::Vec> left_unit_of_right_ideal(const AlgebraSC<F>& A,
                                                                   const RightIdeal<F>& I) {
    const F& f = A.field();
    size_t n = A.dim(), m = I.basis.size();
    if (m == 0) return std::nullopt;
    // e = sum_l alpha_l v_l; constraints sum_l alpha_l (v_l v_i) = v_i.
    Matrix<F> sys(f, n * m, m);
    std::vector<typename F::Elem> rhs(n * m, f.zero());
    for (size_t i = 0; i < m; ++i) {
        for (size_t l = 0; l < m; ++l) {
            auto p = A.mul(I.basis[l], I.basis[i]);
            for (size_t r = 0; r < n; ++r) sys.at(i * n + r, l) = p[r];
        }
        for (size_t r = 0; r < n; ++r) rhs[i * n + r] = I.basis[i][r];
    }
    auto sol = sys.solve(rhs);
    if (!sol) return std::nullopt;
    auto e = A.zero_elem();
    for (size_t l = 0; l < m; ++l) e = A.add(e, A.scale((*sol)[l], I.basis[l]));
    if (!A.eq_elem(A.mul(e, e), e)) return std::nullopt;
    return e;
}

/// Nonzero annihilator of x on the right (x y = 0, y != 0), if x is a left
/// zero divisor. The canonical kernel vector of the left multiplication map.
template <class F>
std::optional<typename AlgebraSC<F>::Vec> zero_divisor_witness(const AlgebraSC<F>& A,
                                                               const typename AlgebraSC<F>::Vec& x) {
    if (A.is_zero_elem(x)) return std::nullopt;
    auto ker = A.left_mul_matrix(x).kernel();
    if (ker.empty()) return std::nullopt;
    return ker.front();
}

// ---------------------------------------------------------------------------
// Center and corners.

/// Basis of the center, computed by restricting the commutation conditions
/// one generator at a time (kernel chains stay small).
template <class F>
std::vector<typename AlgebraSC<F>::Vec> center(const AlgebraSC<F>& A) {
    const F& f = A.field();
    size_t n = A.dim();
    // current candidate basis, initially everything
    std::vector<typename AlgebraSC<F>::Vec> C;
    for (size_t i = 0; i < n; ++i) C.push_back(A.basis_elem(i));
    for (size_t j = 0; j < n && !C.empty(); ++j) {
        auto ej = A.basis_elem(j);
        Matrix<F> m(f, n, C.size());
        for (size_t c = 0; c < C.size(); ++c) {
            auto w = A.add(A.mul(C[c], ej), A.mul(ej, C[c]));
            for (size_t r = 0; r < n; ++r) m.at(r, c) = w[r];
        }
        auto ker = m.kernel();
        std::vector<typename AlgebraSC<F>::Vec> next;
        for (const auto& kv : ker) {
            auto v = A.zero_elem();
            for (size_t c = 0; c < C.size(); ++c) v = A.add(v, A.scale(kv[c], C[c]));
            next.push_back(std::move(v));
        }
        C = std::move(next);
    }
    return C;
}

/// The sandwich map A tensor A^op -> End(A), a tensor b -> (x -> a x b), as a
/// dim^2 x dim^2 matrix; full rank iff A is central simple over its base field.
template <class F>
Matrix<F> sandwich_matrix(const AlgebraSC<F>& A) {
    const F& f = A.field();
    size_t n = A.dim();
    Matrix<F> S(f, n * n, n * n);
    for (size_t a = 0; a < n; ++a)
        for (size_t b = 0; b < n; ++b) {
            // column a*n+b: the map x -> e_a x e_b, flattened (input e_x, output e_y)
            for (size_t x = 0; x < n; ++x) {
                auto w = A.mul(A.basis_elem(a), A.mul(A.basis_elem(x), A.basis_elem(b)));
                for (size_t y = 0; y < n; ++y) S.at(y * n + x, a * n + b) = w[y];
            }
        }
    return S;
}

/// Central simplicity by the sandwich criterion, exact over the base field.
/// For large algebras over rational function fields use the specialized
/// check in specialize.hpp instead; this one is exact but O(dim^6).
template <class F>
bool is_central_simple_exact(const AlgebraSC<F>& A) {
    size_t n = A.dim();
    return sandwich_matrix(A).rank() == n * n;
}

template <class F>
struct CornerAlgebra {
    AlgebraSC<F> C;                                  // e A e with unit e
    std::vector<typename AlgebraSC<F>::Vec> to_parent; // C basis in A coordinates
    /// Coordinates in C of an element of A known to lie in e A e.
    std::vector<typename F::Elem> from_parent(const AlgebraSC<F>& A,
                                              const typename AlgebraSC<F>::Vec& x) const {
        const F& f = A.field();
        size_t n = A.dim(), m = C.dim();
        Matrix<F> M(f, n, m);
        for (size_t c = 0; c < m; ++c)
            for (size_t r = 0; r < n; ++r) M.at(r, c) = to_parent[c][r];
        auto sol = M.solve(x);
        if (!sol) throw std::invalid_argument("corner: element not in e A e");
        return *sol;
    }
};

/// The corner algebra e A e for an idempotent e, with the inclusion basis.
template <class F>
CornerAlgebra<F> corner_algebra(const AlgebraSC<F>& A, const typename AlgebraSC<F>::Vec& e) {
    const F& f = A.field();
    size_t n = A.dim();
    if (A.is_zero_elem(e) || !A.eq_elem(A.mul(e, e), e))
        throw std::invalid_argument("corner_algebra: e is not a nonzero idempotent");
    Matrix<F> span(f, n, n);
    for (size_t j = 0; j < n; ++j) {
        auto p = A.mul(e, A.mul(A.basis_elem(j), e));
        for (size_t i = 0; i < n; ++i) span.at(j, i) = p[i];
    }
    auto piv = span.rref();
    size_t m = piv.size();
    std::vector<typename AlgebraSC<F>::Vec> basis;
    for (size_t r = 0; r < m; ++r) basis.push_back(span.row(r));
    // coordinates in the corner basis read off at the pivot columns (rows are
    // in RREF, so the pivot columns of an element give its expansion)
    auto coords = [&](const typename AlgebraSC<F>::Vec& x) {
        std::vector<typename F::Elem> c(m, f.zero());
        auto rem = x;
        for (size_t r = 0; r < m; ++r) {
            c[r] = rem[piv[r]];
            if (!f.is_zero(c[r])) rem = A.add(rem, A.scale(c[r], basis[r]));
        }
        if (!A.is_zero_elem(rem)) throw std::logic_error("corner_algebra: closure violated");
        return c;
    };
    auto eC = coords(e);
    AlgebraSC<F> C(f, m, eC);
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < m; ++j) {
            auto c = coords(A.mul(basis[i], basis[j]));
            for (size_t k = 0; k < m; ++k) C.set_gamma(i, j, k, c[k]);
        }
    return {std::move(C), std::move(basis)};
}

// ---------------------------------------------------------------------------
// Corestriction (descent from L = K(s) to K) and second-kind involutions.

/// cor(A) = switch-invariants of T = A tensor_L A^sigma, as a K-algebra.
/// The switch map s(a tensor b^sigma) = b tensor a^sigma is sigma-semilinear;
/// the kernel basis of (s - id) over K is deterministic: for i <= j in the
/// tensor basis order, the fixed vectors are read off the canonical RREF
/// kernel of the K-linear matrix of (s + id).
struct CorestrictionResult {
    AlgebraSC<RatField> B;                    // over K, dim = dim_L(A)^2
    AlgebraSC<QuadExtField> T;                // A tensor_L A^sigma
    std::vector<std::vector<LElem>> to_tensor; // B basis -> T coordinates
    std::vector<size_t> free_cols;            // expansion positions (internal)

    /// Coordinates in B of a switch-invariant element of T.
    std::vector<RatFun> from_tensor(const std::vector<LElem>& x) const {
        std::vector<RatFun> c;
        c.reserve(free_cols.size());
        size_t n2 = x.size();
        for (size_t fc : free_cols) {
            size_t idx = fc / 2;
            c.push_back(fc % 2 == 0 ? x[idx].x : x[idx].y);
            (void)n2;
        }
        return c;
    }
};

inline CorestrictionResult corestriction(const AlgebraSC<QuadExtField>& A, const RatField& K) {
    const QuadExtField& L = A.field();
    size_t n = A.dim(), n2 = n * n;
    AlgebraSC<QuadExtField> T = tensor(A, conjugate_algebra(A));
    // K-coordinates of T: index 2*(i*n+j) for the 1-part, +1 for the s-part.
    // switch: (x + y s)(e_i tensor e_j) -> (x + y + y s)(e_j tensor e_i).
    Matrix<RatField> M(K, 2 * n2, 2 * n2);
    auto one = K.one();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            size_t src = i * n + j, dst = j * n + i;
            // s + id applied to the unit K-coordinates
            M.at(2 * dst, 2 * src) = K.add(M.at(2 * dst, 2 * src), one);
            M.at(2 * src, 2 * src) = K.add(M.at(2 * src, 2 * src), one);
            M.at(2 * dst, 2 * src + 1) = K.add(M.at(2 * dst, 2 * src + 1), one);
            M.at(2 * dst + 1, 2 * src + 1) = K.add(M.at(2 * dst + 1, 2 * src + 1), one);
            M.at(2 * src + 1, 2 * src + 1) = K.add(M.at(2 * src + 1, 2 * src + 1), one);
        }
    auto ker = M.kernel();
    if (ker.size() != n2) throw std::logic_error("corestriction: unexpected invariant dimension");
    std::vector<size_t> free_cols;
    {
        // reconstruct the free columns: canonical kernel vectors carry a one
        // at their own free column and zeros at the others'
        Matrix<RatField> Mc = M;
        auto piv = Mc.rref();
        std::vector<bool> is_piv(2 * n2, false);
        for (size_t c : piv) is_piv[c] = true;
        for (size_t c = 0; c < 2 * n2; ++c)
            if (!is_piv[c]) free_cols.push_back(c);
    }
    std::vector<std::vector<LElem>> basis;
    for (const auto& kv : ker) {
        std::vector<LElem> v(n2, L.zero());
        for (size_t idx = 0; idx < n2; ++idx) v[idx] = {kv[2 * idx], kv[2 * idx + 1]};
        basis.push_back(std::move(v));
    }
    auto expand = [&](const std::vector<LElem>& x) {
        std::vector<RatFun> c;
        c.reserve(n2);
        for (size_t fc : free_cols) {
            size_t idx = fc / 2;
            c.push_back(fc % 2 == 0 ? x[idx].x : x[idx].y);
        }
        return c;
    };
    std::vector<RatFun> unitB = expand([&] {
        std::vector<LElem> u(n2, L.zero());
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) u[i * n + j] = L.mul(A.unit()[i], L.sigma(A.unit()[j]));
        return u;
    }());
    AlgebraSC<RatField> B(K, n2, unitB);
    for (size_t p = 0; p < n2; ++p)
        for (size_t q = 0; q < n2; ++q) {
            auto prod = T.mul(basis[p], basis[q]);
            auto c = expand(prod);
            for (size_t k = 0; k < n2; ++k) B.set_gamma(p, q, k, c[k]);
        }
    return {std::move(B), std::move(T), std::move(basis), std::move(free_cols)};
}

/// Either a zero divisor of A found inside (A tensor 1) cap I_L, or the
/// second-kind involution tau_I determined by the right ideal I of cor(A):
/// 1 tensor a^sigma + tau_I(a) tensor 1 lies in I_L for every a.
struct IdealInvolutionResult {
    std::optional<InvolutionMap<QuadExtField>> involution;
    std::optional<std::vector<LElem>> zero_divisor; // element of A
};

inline IdealInvolutionResult involution_from_ideal(const AlgebraSC<QuadExtField>& A,
                                                   const CorestrictionResult& cor,
                                                   const RightIdeal<RatField>& I) {
    const QuadExtField& L = A.field();
    size_t n = A.dim(), n2 = n * n;
    // L-span of I inside T: columns = images of the ideal basis under the
    // corestriction inclusion, then the A tensor 1 columns; solve for the
    // tensor basis elements 1 tensor e_j.
    size_t m = I.basis.size();
    Matrix<QuadExtField> M(L, n2, m + n);
    for (size_t c = 0; c < m; ++c) {
        std::vector<LElem> img(n2, L.zero());
        for (size_t b = 0; b < n2; ++b) {
            const RatFun& coef = I.basis[c][b];
            if (coef.is_zero()) continue;
            for (size_t idx = 0; idx < n2; ++idx)
                img[idx] = L.add(img[idx], L.mul(L.embed(coef), cor.to_tensor[b][idx]));
        }
        for (size_t r = 0; r < n2; ++r) M.at(r, c) = img[r];
    }
    // A tensor 1 columns: e_i tensor unit
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) M.at(i * n + j, m + i) = L.sigma(A.unit()[j]);
    // intersection I_L cap (A tensor 1): kernel vectors with nonzero tail
    auto ker = M.kernel();
    for (const auto& kv : ker) {
        std::vector<LElem> x(n, L.zero());
        bool nz = false;
        for (size_t i = 0; i < n; ++i) {
            x[i] = kv[m + i];
            nz = nz || !L.is_zero(x[i]);
        }
        if (nz) return {std::nullopt, x};
    }
    // trivial intersection: solve 1 tensor e_j = (ideal part) + tau_j tensor 1
    Matrix<QuadExtField> tau(L, n, n);
    for (size_t j = 0; j < n; ++j) {
        std::vector<LElem> rhs(n2, L.zero());
        for (size_t i = 0; i < n; ++i) rhs[i * n + j] = A.unit()[i];
        auto sol = M.solve(rhs);
        if (!sol) throw std::logic_error("involution_from_ideal: decomposition failed");
        for (size_t i = 0; i < n; ++i) tau.at(i, j) = (*sol)[m + i];
    }
    InvolutionMap<QuadExtField> t{std::move(tau), true};
    if (auto bad = validate_involution(A, t))
        throw std::logic_error("involution_from_ideal: " + *bad);
    return {std::move(t), std::nullopt};
}

/// Fixed points of a sigma-semilinear algebra automorphism phi (phi^2 = id)
/// of A over L, as a K-algebra with its inclusion basis. For a quaternion A
/// this is the Galois descent: dim_K = 4 and the basis L-spans A.
struct FixedSubalgebra {
    AlgebraSC<RatField> C;
    std::vector<std::vector<LElem>> to_parent; // C basis in A coordinates
};

inline FixedSubalgebra fixed_subalgebra(const AlgebraSC<QuadExtField>& A,
                                        const Matrix<QuadExtField>& phi, const RatField& K) {
    const QuadExtField& L = A.field();
    const RatFun& c = L.param();
    size_t n = A.dim();
    // K-linear system for phi(v) = v on coordinates v_i = x_i + y_i s:
    // phi acts as sigma on coordinates then the matrix.
    Matrix<RatField> M(K, 2 * n, 2 * n);
    for (size_t j = 0; j < n; ++j) {
        // image of e_j (coordinate 1) and of s e_j (coordinate sigma(s) = s+1)
        for (size_t i = 0; i < n; ++i) {
            const LElem& a = phi.at(i, j); // a = ax + ay s
            // column 2j (x_j = 1): contributes a at row i
            M.at(2 * i, 2 * j) = M.at(2 * i, 2 * j) + a.x;
            M.at(2 * i + 1, 2 * j) = M.at(2 * i + 1, 2 * j) + a.y;
            // column 2j+1 (y_j = 1): contributes (s+1) a = (ax + c ay) + (ax + ay + ay) s
            //   since s(ax+ay s) = ax s + ay(s + c) -> plus a
            LElem sa = L.add(L.mul(L.s(), a), a); // (s+1) a
            M.at(2 * i, 2 * j + 1) = M.at(2 * i, 2 * j + 1) + sa.x;
            M.at(2 * i + 1, 2 * j + 1) = M.at(2 * i + 1, 2 * j + 1) + sa.y;
        }
        // subtract the identity
        M.at(2 * j, 2 * j) = M.at(2 * j, 2 * j) + K.one();
        M.at(2 * j + 1, 2 * j + 1) = M.at(2 * j + 1, 2 * j + 1) + K.one();
    }
    (void)c;
    auto ker = M.kernel();
    size_t m = ker.size();
    std::vector<std::vector<LElem>> basis;
    for (const auto& kv : ker) {
        std::vector<LElem> v(n, L.zero());
        for (size_t i = 0; i < n; ++i) v[i] = {kv[2 * i], kv[2 * i + 1]};
        basis.push_back(std::move(v));
    }
    // express products in the fixed basis by solving over K
    Matrix<RatField> coordM(K, 2 * n, m);
    for (size_t cidx = 0; cidx < m; ++cidx)
        for (size_t i = 0; i < n; ++i) {
            coordM.at(2 * i, cidx) = basis[cidx][i].x;
            coordM.at(2 * i + 1, cidx) = basis[cidx][i].y;
        }
    auto coords = [&](const std::vector<LElem>& x) {
        std::vector<RatFun> rhs(2 * n, K.zero());
        for (size_t i = 0; i < n; ++i) {
            rhs[2 * i] = x[i].x;
            rhs[2 * i + 1] = x[i].y;
        }
        auto sol = coordM.solve(rhs);
        if (!sol) throw std::logic_error("fixed_subalgebra: product left the fixed space");
        return *sol;
    };
    // unit of A must be fixed (phi is an algebra automorphism)
    AlgebraSC<RatField> C(K, m, coords(A.unit()));
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < m; ++j) {
            auto p = coords(A.mul(basis[i], basis[j]));
            for (size_t k = 0; k < m; ++k) C.set_gamma(i, j, k, p[k]);
        }
    return {std::move(C), std::move(basis)};
}

} // namespace qalg
