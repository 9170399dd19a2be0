#pragma once

#include <vector>

#include "dspec/types.hpp"

namespace dspec::linalg {

cplx det(const CMatrix& m);

// Product of Euclidean column norms; Hadamard bound for |det m|.
double column_norm_product(const CMatrix& m);
double row_norm_product(const CMatrix& m);

CMatrix adjugate(const CMatrix& m);

double spectral_norm(const CMatrix& m);
double smallest_singular_value(const CMatrix& m);
double condition_number(const CMatrix& m);

// Orthonormal basis (as columns) of the null space of m, threshold relative to the largest singular value.
CMatrix null_space(const CMatrix& m, double rel_tol = 1e-10);
int numerical_rank(const CMatrix& m, double rel_tol = 1e-10);

CMatrix expm(const CMatrix& a);

// Eigenvalues of the Hermitian part of m.
RVector hermitian_eigenvalues(const CMatrix& m);

// Composite trapezoid / Simpson on a uniform grid over [0,1].
cplx trapezoid(const std::vector<cplx>& samples);
cplx simpson(const std::vector<cplx>& samples);

}  // namespace dspec::linalg
