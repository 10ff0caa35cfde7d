#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qalg {

/// Dense matrix over a field context F (see fields.hpp for the interface).
/// Row-major; deterministic elimination (first nonzero pivot) so reduced
/// forms and kernel bases are reproducible.
template <class F>
class Matrix {
public:
    using Elem = typename F::Elem;

    Matrix(const F& f, size_t rows, size_t cols)
        : f_(&f), rows_(rows), cols_(cols), a_(rows * cols, f.zero()) {}

    static Matrix identity(const F& f, size_t n) {
        Matrix m(f, n, n);
        for (size_t i = 0; i < n; ++i) m.at(i, i) = f.one();
        return m;
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    const F& field() const { return *f_; }
    Elem& at(size_t i, size_t j) { return a_[i * cols_ + j]; }
    const Elem& at(size_t i, size_t j) const { return a_[i * cols_ + j]; }

    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("Matrix: shape mismatch");
        Matrix r(*f_, rows_, o.cols_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t l = 0; l < cols_; ++l) {
                const Elem& x = at(i, l);
                if (f_->is_zero(x)) continue;
                for (size_t j = 0; j < o.cols_; ++j) {
                    if (f_->is_zero(o.at(l, j))) continue;
                    r.at(i, j) = f_->add(r.at(i, j), f_->mul(x, o.at(l, j)));
                }
            }
        return r;
    }

    Matrix operator+(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Matrix: shape mismatch");
        Matrix r(*f_, rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = f_->add(a_[i], o.a_[i]);
        return r;
    }

    bool operator==(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) return false;
        for (size_t i = 0; i < a_.size(); ++i)
            if (!f_->eq(a_[i], o.a_[i])) return false;
        return true;
    }

    Matrix transpose() const {
        Matrix r(*f_, cols_, rows_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
        return r;
    }

    std::vector<Elem> row(size_t i) const {
        return std::vector<Elem>(a_.begin() + static_cast<long>(i * cols_),
                                 a_.begin() + static_cast<long>((i + 1) * cols_));
    }
    void set_row(size_t i, const std::vector<Elem>& r) {
        for (size_t j = 0; j < cols_; ++j) at(i, j) = r[j];
    }

    /// In-place row-reduce to RREF. Returns the pivot column of each pivot row.
    std::vector<size_t> rref() {
        std::vector<size_t> pivots;
        size_t r = 0;
        for (size_t c = 0; c < cols_ && r < rows_; ++c) {
            size_t p = r;
            while (p < rows_ && f_->is_zero(at(p, c))) ++p;
            if (p == rows_) continue;
            if (p != r)
                for (size_t j = 0; j < cols_; ++j) std::swap(at(p, j), at(r, j));
            Elem iv = f_->inv(at(r, c));
            for (size_t j = c; j < cols_; ++j) at(r, j) = f_->mul(at(r, j), iv);
            for (size_t i = 0; i < rows_; ++i) {
                if (i == r || f_->is_zero(at(i, c))) continue;
                Elem factor = at(i, c);
                for (size_t j = c; j < cols_; ++j)
                    at(i, j) = f_->add(at(i, j), f_->mul(factor, at(r, j)));
            }
            pivots.push_back(c);
            ++r;
        }
        return pivots;
    }

    size_t rank() const {
        Matrix c = *this;
        return c.rref().size();
    }

    /// Basis of the right kernel {v : Av = 0}, canonical (free variable = one,
    /// in increasing column order).
    std::vector<std::vector<Elem>> kernel() const {
        Matrix m = *this;
        std::vector<size_t> piv = m.rref();
        std::vector<bool> is_piv(cols_, false);
        for (size_t c : piv) is_piv[c] = true;
        std::vector<std::vector<Elem>> basis;
        for (size_t c = 0; c < cols_; ++c) {
            if (is_piv[c]) continue;
            std::vector<Elem> v(cols_, f_->zero());
            v[c] = f_->one();
            for (size_t r = 0; r < piv.size(); ++r)
                v[piv[r]] = m.at(r, c); // char 2: -x = x
            basis.push_back(std::move(v));
        }
        return basis;
    }

    /// Solve Ax = b; absent when inconsistent. Free variables set to zero.
    std::optional<std::vector<Elem>> solve(const std::vector<Elem>& b) const {
        if (b.size() != rows_) throw std::invalid_argument("Matrix: rhs size mismatch");
        Matrix aug(*f_, rows_, cols_ + 1);
        for (size_t i = 0; i < rows_; ++i) {
            for (size_t j = 0; j < cols_; ++j) aug.at(i, j) = at(i, j);
            aug.at(i, cols_) = b[i];
        }
        std::vector<size_t> piv = aug.rref();
        if (!piv.empty() && piv.back() == cols_) return std::nullopt;
        std::vector<Elem> x(cols_, f_->zero());
        for (size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug.at(r, cols_);
        return x;
    }

    std::optional<Matrix> inverse() const {
        if (rows_ != cols_) throw std::invalid_argument("Matrix: inverse of nonsquare");
        Matrix aug(*f_, rows_, 2 * cols_);
        for (size_t i = 0; i < rows_; ++i) {
            for (size_t j = 0; j < cols_; ++j) aug.at(i, j) = at(i, j);
            aug.at(i, cols_ + i) = f_->one();
        }
        std::vector<size_t> piv = aug.rref();
        if (piv.size() != rows_ || piv.back() != rows_ - 1) {
            // pivots must be exactly the first n columns
            for (size_t r = 0; r < piv.size(); ++r)
                if (piv[r] != r) return std::nullopt;
            if (piv.size() != rows_) return std::nullopt;
        }
        Matrix inv(*f_, rows_, cols_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) inv.at(i, j) = aug.at(i, cols_ + j);
        return inv;
    }

private:
    const F* f_;
    size_t rows_, cols_;
    std::vector<Elem> a_;
};

/// Row space membership: is v in the span of the rows of m (given in RREF)?
template <class F>
bool in_row_space(const Matrix<F>& rref_m, const std::vector<size_t>& pivots,
                  std::vector<typename F::Elem> v) {
    const F& f = rref_m.field();
    for (size_t r = 0; r < pivots.size(); ++r) {
        const auto& x = v[pivots[r]];
        if (f.is_zero(x)) continue;
        for (size_t j = 0; j < rref_m.cols(); ++j)
            v[j] = f.add(v[j], f.mul(x, rref_m.at(r, j)));
    }
    for (const auto& x : v)
        if (!f.is_zero(x)) return false;
    return true;
}

} // namespace qalg
