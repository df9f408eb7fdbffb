#pragma once

// Dense kernels on Galerkin truncations: each n x n matrix stands in for an
// element of L(H) or J1(H) on an orthonormal basis of dimension n.

#include <string_view>

#include <Eigen/Dense>

namespace rplace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// The four trace-type quantities reported for an operator.
///
/// `trace_norm_paper` is |tr T|. It coincides with the Schatten-1 norm on
/// positive semi-definite operators and underestimates it otherwise, so bound
/// checks on indefinite intermediates look at both.
struct NormReport {
  double op_norm = 0.0;              ///< largest singular value
  double trace = 0.0;                ///< sum of diagonal entries
  double trace_norm_schatten = 0.0;  ///< sum of singular values
  double trace_norm_paper = 0.0;     ///< |trace|
};

bool all_finite(const Matrix& T);
/// Throws InvalidArgument naming `what` if any entry is NaN or infinite.
void require_finite(const Matrix& T, std::string_view what);
void require_square(const Matrix& T, std::string_view what);

/// max|T_ij - T_ji| <= 1e-12 (1 + ||T||_op).
bool is_symmetric(const Matrix& T);
/// Symmetric and lambda_min >= -1e-10 (1 + ||T||_op).
bool is_psd(const Matrix& T);

Matrix symmetrize(const Matrix& T);

double op_norm(const Matrix& T);
double schatten1_norm(const Matrix& T);
NormReport norms(const Matrix& T);

Eigen::VectorXcd eigenvalues(const Matrix& T);
/// max Re(lambda) over the spectrum.
double spectral_abscissa(const Matrix& T);

/// exp(A t) by Pade scaling and squaring. Rejects non-finite input.
Matrix matrix_exponential(const Matrix& A, double t);

/// Solves A1 T + T A2^T = P by real Schur reduction of both generators and
/// block back-substitution (1x1 and 2x2 diagonal blocks).
///
/// Throws UnstableGenerator if either spectral abscissa is >= 0 and
/// SingularSystem if |lambda_i(A1) + lambda_j(A2)| < 1e-12 (||A1|| + ||A2||).
Matrix solve_sylvester(const Matrix& A1, const Matrix& A2, const Matrix& P);

/// A T + T A^T = P, sharing one Schur factorization.
Matrix solve_lyapunov(const Matrix& A, const Matrix& P);

/// Relative residual bound the Sylvester solver guarantees:
/// ||A1 T + T A2^T - P||_op <= 1e-10 (1 + ||P||_op).
double sylvester_residual(const Matrix& A1, const Matrix& A2, const Matrix& P,
                          const Matrix& T);

}  // namespace rplace
