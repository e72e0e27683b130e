#pragma once

#include <cstdint>
#include <vector>

#include "ffrank/ensemble.hpp"

namespace ffrank {

/// Basis of ker(A) from reduced row echelon back-substitution: one vector per
/// free column, deterministic for a given matrix.
struct KernelBasis {
    Field field;
    std::size_t cols = 0;
    std::vector<std::vector<FieldElement>> vectors;
    std::vector<std::uint32_t> free_columns;

    std::size_t nullity() const noexcept { return vectors.size(); }
};

/// Columns whose coordinate is zero in every kernel vector. The coordinate
/// image of the kernel is a subspace of F_q, so each column is either frozen
/// or its Boltzmann marginal is uniform.
struct FrozenSet {
    std::vector<std::uint32_t> indices; // sorted
};

/// Exact rank over GF(q) by sparse Gaussian elimination. Pivots are chosen by
/// minimum column degree with a row-degree tie-break (fill-in control; there
/// are no numerical concerns over a finite field). q = 2 uses bit-packed rows
/// with word-parallel additions. The input matrix is not modified.
std::size_t rank(const SparseMatrix& m);

std::size_t nullity(const SparseMatrix& m);

KernelBasis kernel_basis(const SparseMatrix& m);

FrozenSet frozen_variables(const SparseMatrix& m);
FrozenSet frozen_variables(const KernelBasis& basis);

/// Uniform draw from ker(A): uniform field coefficients on the kernel basis.
std::vector<FieldElement> boltzmann_sample(const KernelBasis& basis, Rng& rng);
std::vector<FieldElement> boltzmann_sample(const SparseMatrix& m, Rng& rng);

/// Textbook dense elimination, no sparsity tricks; the cross-check oracle for
/// rank(). Throws SizeLimit when rows*cols > 1e6.
std::size_t rank_dense_oracle(const SparseMatrix& m);

/// A * v over the matrix field.
std::vector<FieldElement> matvec(const SparseMatrix& m, const std::vector<FieldElement>& v);

bool in_kernel(const SparseMatrix& m, const std::vector<FieldElement>& v);

} // namespace ffrank
