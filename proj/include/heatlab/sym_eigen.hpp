#pragma once
#include <vector>
#include "heatlab/matrix.hpp"

namespace heatlab {

// Eigenvalues of a real symmetric matrix, ascending. Only the lower triangle
// is referenced; the matrix is consumed as workspace. Householder reduction to
// tridiagonal form followed by implicit-shift QL, no eigenvector accumulation.
//
// `sym_eigenvalues` runs the OpenMP reduction kernel; `sym_eigenvalues_serial`
// is the plain reference implementation kept for testing and benchmarking.
std::vector<double> sym_eigenvalues(DenseR a);
std::vector<double> sym_eigenvalues_serial(DenseR a);

// Eigenvalues of a complex Hermitian matrix through the real symmetric
// embedding [[X, -Y], [Y, X]] of H = X + iY, where every eigenvalue of H
// appears with doubled multiplicity.
std::vector<double> herm_eigenvalues(const DenseC& h);

// Eigenvalues of the tridiagonal matrix with diagonal d and subdiagonal e
// (e[0] unused). Exposed for tests.
std::vector<double> tridiag_eigenvalues(std::vector<double> d, std::vector<double> e);

} // namespace heatlab
