#pragma once

#include "qalg/algebra.hpp"
#include "qalg/factor.hpp"

#include <cstdint>
#include <vector>

namespace qalg {

// Structure theory of finite-dimensional algebras over finite fields
// F_{2^m}, used on the residue algebras O/fO of orders and on the
// finite intersection algebra of the splitting pipeline.
//
// The radical is computed from a composition series of the regular module
// (MeatAxe-style chopping): Rad(A) is the intersection of the annihilators
// of the simple composition factors.  All randomized routines are Las Vegas:
// every output is validated exactly and bad random choices are retried.

using FqVec = std::vector<uint64_t>;

/// Minimal polynomial of a square matrix (Krylov subspaces from random
/// vectors, verified by evaluation).
Poly matrix_min_poly(const Matrix<GFField>& M, Rng& rng);

/// Evaluate a polynomial at a matrix (Horner).
Matrix<GFField> poly_at_matrix(const Poly& p, const Matrix<GFField>& M);

/// Evaluate a polynomial at an algebra element (Horner; constant term times
/// the unit).
FqVec poly_at_element(const AlgebraSC<GFField>& A, const Poly& p, const FqVec& x);

/// Minimal polynomial of an algebra element (of its left multiplication).
Poly element_min_poly(const AlgebraSC<GFField>& A, const FqVec& x, Rng& rng);

/// Basis of the Jacobson radical. Deterministic in the seed; the returned
/// basis is validated as a nilpotent two-sided ideal whose quotient is
/// semisimple (annihilator construction), with internal retries.
std::vector<FqVec> fq_radical(const AlgebraSC<GFField>& A, uint64_t seed = 0xfadedbee);

/// A complete orthogonal system of primitive idempotents: pairwise
/// orthogonal, summing to 1, each with a local corner. Validated exactly.
std::vector<FqVec> fq_primitive_idempotents(const AlgebraSC<GFField>& A,
                                            uint64_t seed = 0xfadedbee);

} // namespace qalg
