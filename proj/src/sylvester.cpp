// Bartels-Stewart solver for A1 T + T A2^T = P.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "rplace/errors.hpp"
#include "rplace/linalg.hpp"

namespace rplace {
namespace {


struct Block {
  Index start;
  Index size;
};

struct SchurFactor {
  Matrix U;  // A = U S U^T
  Matrix S;  // upper quasi-triangular
  std::vector<Block> blocks;
  std::vector<std::complex<double>> spectrum;
  double norm = 0.0;
};

SchurFactor factor(const Matrix& A, const char* name) {
  require_square(A, name);
  require_finite(A, name);
  SchurFactor f;
  const Index n = A.rows();
  f.norm = op_norm(A);
  if (n == 1) {
    f.U = Matrix::Identity(1, 1);
    f.S = A;
  } else {
    Eigen::RealSchur<Matrix> rs(A);
    if (rs.info() != Eigen::Success) {
      throw Error(std::string("real Schur factorization failed for ") + name);
    }
    f.U = rs.matrixU();
    f.S = rs.matrixT();
  }
  for (Index i = 0; i < n;) {
    if (i + 1 < n && f.S(i + 1, i) != 0.0) {
      const double a = f.S(i, i), b = f.S(i, i + 1), c = f.S(i + 1, i), d = f.S(i + 1, i + 1);
      const std::complex<double> mid = 0.5 * (a + d);
      const std::complex<double> disc = std::sqrt(std::complex<double>(0.25 * (a - d) * (a - d) + b * c));
      f.spectrum.push_back(mid + disc);
      f.spectrum.push_back(mid - disc);
      f.blocks.push_back({i, 2});
      i += 2;
    } else {
      f.spectrum.emplace_back(f.S(i, i), 0.0);
      f.blocks.push_back({i, 1});
      i += 1;
    }
  }
  double abscissa = -std::numeric_limits<double>::infinity();
  for (const auto& z : f.spectrum) abscissa = std::max(abscissa, z.real());
  if (!(abscissa < 0.0)) {
    throw UnstableGenerator(std::string(name) + " has spectral abscissa " + std::to_string(abscissa) +
                                " >= 0",
                            abscissa);
  }
  return f;
}

void check_separation(const SchurFactor& f1, const SchurFactor& f2) {
  const double threshold = 1e-12 * (f1.norm + f2.norm);
  for (const auto& a : f1.spectrum) {
    for (const auto& b : f2.spectrum) {
      if (std::abs(a + b) < threshold) {
        throw SingularSystem("Sylvester operator is numerically singular: lambda_i(A1) + lambda_j(A2) ~ 0");
      }
    }
  }
}

// S_II Y + Y B^T = rhs for blocks of size at most 2.
Matrix solve_small(const Matrix& Sii, const Matrix& B, const Matrix& rhs) {
  const Index a = Sii.rows(), b = B.rows();
  if (a == 1 && b == 1) {
    Matrix y(1, 1);
    y(0, 0) = rhs(0, 0) / (Sii(0, 0) + B(0, 0));
    return y;
  }
  const Index m = a * b;
  Matrix K = Matrix::Zero(m, m);
  // vec(S Y) = (I_b (x) S) vec(Y); vec(Y B^T) = (B (x) I_a) vec(Y), column-major vec.
  for (Index j = 0; j < b; ++j) K.block(j * a, j * a, a, a) += Sii;
  for (Index j = 0; j < b; ++j) {
    for (Index k = 0; k < b; ++k) {
      K.block(j * a, k * a, a, a) += B(j, k) * Matrix::Identity(a, a);
    }
  }
  Vector r(m);
  for (Index j = 0; j < b; ++j) r.segment(j * a, a) = rhs.col(j);
  const Vector y = K.fullPivLu().solve(r);
  Matrix Y(a, b);
  for (Index j = 0; j < b; ++j) Y.col(j) = y.segment(j * a, a);
  return Y;
}

Matrix solve_factored(const SchurFactor& f1, const SchurFactor& f2, const Matrix& P) {
  const Index n1 = f1.S.rows(), n2 = f2.S.rows();
  const Matrix F = f1.U.transpose() * P * f2.U;
  Matrix Y = Matrix::Zero(n1, n2);
  const Matrix& S = f1.S;
  const Matrix& R = f2.S;

  for (auto jb = f2.blocks.rbegin(); jb != f2.blocks.rend(); ++jb) {
    const Index j0 = jb->start, bj = jb->size;
    const Index tail = n2 - j0 - bj;
    Matrix C = F.middleCols(j0, bj);
    if (tail > 0) {
      C.noalias() -= Y.rightCols(tail) * R.block(j0, j0 + bj, bj, tail).transpose();
    }
    const Matrix B = R.block(j0, j0, bj, bj);
    for (auto ib = f1.blocks.rbegin(); ib != f1.blocks.rend(); ++ib) {
      const Index i0 = ib->start, ai = ib->size;
      const Index below = n1 - i0 - ai;
      Matrix rhs = C.middleRows(i0, ai);
      if (below > 0) {
        rhs.noalias() -= S.block(i0, i0 + ai, ai, below) * Y.block(i0 + ai, j0, below, bj);
      }
      Y.block(i0, j0, ai, bj) = solve_small(S.block(i0, i0, ai, ai), B, rhs);
    }
  }
  return f1.U * Y * f2.U.transpose();
}

}  // namespace

Matrix solve_sylvester(const Matrix& A1, const Matrix& A2, const Matrix& P) {
  require_finite(P, "Sylvester data");
  const SchurFactor f1 = factor(A1, "A1");
  const SchurFactor f2 = factor(A2, "A2");
  if (P.rows() != A1.rows() || P.cols() != A2.rows()) {
    throw DimensionMismatch("Sylvester data must be dim(A1) x dim(A2)");
  }
  check_separation(f1, f2);
  return solve_factored(f1, f2, P);
}

Matrix solve_lyapunov(const Matrix& A, const Matrix& P) {
  require_finite(P, "Lyapunov data");
  const SchurFactor f = factor(A, "generator");
  if (P.rows() != A.rows() || P.cols() != A.rows()) {
    throw DimensionMismatch("Lyapunov data must match the generator dimension");
  }
  check_separation(f, f);
  return solve_factored(f, f, P);
}

}  // namespace rplace
