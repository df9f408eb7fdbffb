#include "rplace/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "rplace/errors.hpp"

namespace rplace {

bool all_finite(const Matrix& T) { return T.allFinite(); }

void require_finite(const Matrix& T, std::string_view what) {
  if (!T.allFinite()) {
    throw InvalidArgument(std::string(what) + " has non-finite entries");
  }
}

void require_square(const Matrix& T, std::string_view what) {
  if (T.rows() != T.cols() || T.rows() == 0) {
    throw DimensionMismatch(std::string(what) + " must be a non-empty square matrix, got " +
                            std::to_string(T.rows()) + "x" + std::to_string(T.cols()));
  }
}

Matrix symmetrize(const Matrix& T) { return 0.5 * (T + T.transpose()); }

double op_norm(const Matrix& T) {
  if (T.size() == 0) return 0.0;
  if (T.rows() == 1 || T.cols() == 1) return T.norm();
  // sqrt(lambda_max(T^T T)); cheaper than an SVD and accurate to a few ulps
  // relative to ||T||.
  const Matrix gram = T.transpose() * T;
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double schatten1_norm(const Matrix& T) {
  if (T.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(T);
  return svd.singularValues().sum();
}

bool is_symmetric(const Matrix& T) {
  if (T.rows() != T.cols()) return false;
  const double asym = (T - T.transpose()).cwiseAbs().maxCoeff();
  return asym <= 1e-12 * (1.0 + op_norm(T));
}

bool is_psd(const Matrix& T) {
  if (!is_symmetric(T)) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(T), Eigen::EigenvaluesOnly);
  const double scale = 1.0 + es.eigenvalues().cwiseAbs().maxCoeff();
  return es.eigenvalues().minCoeff() >= -1e-10 * scale;
}

NormReport norms(const Matrix& T) {
  NormReport r;
  if (T.size() == 0) return r;
  Eigen::BDCSVD<Matrix> svd(T);
  const Vector& s = svd.singularValues();
  r.op_norm = s.size() ? s(0) : 0.0;
  r.trace = T.trace();
  r.trace_norm_schatten = s.sum();
  r.trace_norm_paper = std::abs(r.trace);
  return r;
}

Eigen::VectorXcd eigenvalues(const Matrix& T) {
  require_square(T, "eigenvalue input");
  if (T.rows() == 1) {
    Eigen::VectorXcd ev(1);
    ev(0) = T(0, 0);
    return ev;
  }
  Eigen::EigenSolver<Matrix> es(T, false);
  return es.eigenvalues();
}

double spectral_abscissa(const Matrix& T) {
  if (is_symmetric(T)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(T), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
  }
  return eigenvalues(T).real().maxCoeff();
}

Matrix matrix_exponential(const Matrix& A, double t) {
  require_square(A, "generator");
  if (!std::isfinite(t)) throw InvalidArgument("matrix_exponential: time is not finite");
  require_finite(A, "generator");
  if (t == 0.0) return Matrix::Identity(A.rows(), A.cols());
  const Matrix At = A * t;
  return At.exp();
}

double sylvester_residual(const Matrix& A1, const Matrix& A2, const Matrix& P,
                          const Matrix& T) {
  return op_norm(A1 * T + T * A2.transpose() - P);
}

}  // namespace rplace
