#pragma once

#include <Eigen/Core>

namespace trda {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Eigenvalues sorted descending. For the standard problem the vectors are
// column-orthonormal; for the generalized problem they are M-orthonormal with
// M the matrix the decomposition was normalized against. Sign convention:
// the entry of largest magnitude in each vector is positive (first such entry
// on ties), which makes every decomposition in the library reproducible.
struct EigenDecomposition {
  Vector values;
  Matrix vectors;
};

struct RangeBasis {
  Matrix gamma;         // p x m, column-orthonormal
  Vector kept_values;   // the m retained eigenvalues, descending
};

bool is_symmetric(const Matrix& a, double tol = 1e-12);

// Standard symmetric eigendecomposition. Throws std::invalid_argument on
// non-symmetric input.
EigenDecomposition sym_eig(const Matrix& a);

// Generalized symmetric-definite problem B v = lambda W v, solved by Cholesky
// reduction. Vectors are normalized v' M v = 1 against `scale_matrix` when
// given (it must be a positive multiple of w, e.g. the pooled covariance),
// otherwise against w. Throws std::runtime_error with a hint to apply
// range_projection when w is numerically singular or indefinite.
EigenDecomposition gen_eig_spd(const Matrix& b, const Matrix& w,
                               const Matrix* scale_matrix = nullptr);

// Orthonormalize columns (thin QR), preserving the span.
Matrix orthonormalized(const Matrix& v);

// Largest principal angle between equal-dimension subspaces spanned by the
// column-orthonormal inputs: arcsin of the spectral norm of the projector
// difference. Symmetric, in [0, pi/2].
double subspace_angle(const Matrix& v1, const Matrix& v2);

// Basis of the numerical range of a PSD matrix: eigenvectors whose
// eigenvalues exceed 1e-10 times the largest. Throws on an all-zero matrix.
RangeBasis range_projection(const Matrix& w);

// lambda_1 / lambda_p of an SPD matrix; +infinity when numerically singular.
double condition_number(const Matrix& w);

// Spectral norm of a symmetric matrix.
double spectral_norm(const Matrix& a);

}  // namespace trda
