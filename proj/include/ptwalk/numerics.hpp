#pragma once

#include <vector>

#include "ptwalk/cmat.hpp"

namespace ptwalk::numerics {

/// Result of a dense eigendecomposition. Eigenvalues are sorted by descending
/// modulus, ties broken by descending real part then descending imaginary
/// part (moduli within 1e-12 relative are treated as tied). Eigenvectors are
/// the columns of `vectors`, unit Euclidean norm, phase fixed so the largest
/// component is real positive. `condition` estimates cond_2 of the
/// eigenvector matrix.
struct EigenDecomp {
    std::vector<cdouble> values;
    CMat vectors;
    double condition = 0.0;
};

/// Singular value decomposition A = U diag(sigma) V†, sigma descending.
struct Svd {
    CMat u;
    std::vector<double> sigma;
    CMat v;
};

/// Dense eigendecomposition. Dim 2 uses the closed-form characteristic
/// polynomial; dim 4 uses Faddeev-LeVerrier coefficients with Durand-Kerner
/// root finding and SVD null spaces for the vectors.
/// Throws NonDiagonalizableError when the eigenvector condition exceeds 1e12.
EigenDecomp eig(const CMat& a);

/// Matrix inverse by Gauss-Jordan elimination with partial pivoting.
/// Throws SingularError when sigma_min < 1e-12 * sigma_max.
CMat inv(const CMat& a);

/// Moore-Penrose pseudo-inverse; singular values below rtol * sigma_max are
/// zeroed. Total function.
CMat pinv(const CMat& a, double rtol);

/// Hermitian PSD square root via eigendecomposition, negative eigenvalues
/// clamped to zero. Throws NotPsdError when an eigenvalue is below
/// -1e-8 * ||A||.
CMat sqrtm_psd(const CMat& a);

/// Sum of singular values.
double trace_norm(const CMat& a);

/// One-sided Jacobi SVD. Robust for the tiny dimensions used here.
Svd svd(const CMat& a);

/// Hermitian eigendecomposition (two-sided complex Jacobi).
/// Input is hermitized first; eigenvalues descending, vectors orthonormal.
struct HermEigen {
    std::vector<double> values;
    CMat vectors;
};
HermEigen eig_hermitian(const CMat& a);

/// sigma_max / sigma_min (infinity when sigma_min underflows).
double cond(const CMat& a);

} // namespace ptwalk::numerics
