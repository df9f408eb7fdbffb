#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rplace/errors.hpp"
#include "rplace/linalg.hpp"
#include "rplace/quadrature.hpp"

using rplace::Matrix;

namespace {

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }

TEST(MatrixExponential, ZeroGeneratorGivesIdentity) {
  const Matrix E = rplace::matrix_exponential(Matrix::Zero(2, 2), 5.0);
  EXPECT_TRUE(E.isApprox(Matrix::Identity(2, 2)));
}

TEST(MatrixExponential, ScalarAndDiagonal) {
  EXPECT_NEAR(rplace::matrix_exponential(m1(std::log(2.0)), 1.0)(0, 0), 2.0, 1e-14);
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = -1;
  D(1, 1) = -2;
  const Matrix E = rplace::matrix_exponential(D, 1.0);
  EXPECT_NEAR(E(0, 0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(E(1, 1), std::exp(-2.0), 1e-15);
  EXPECT_EQ(E(0, 1), 0.0);
}

TEST(MatrixExponential, RejectsNonFinite) {
  EXPECT_THROW(rplace::matrix_exponential(m1(1.0), NAN), rplace::InvalidArgument);
  EXPECT_THROW(rplace::matrix_exponential(m1(INFINITY), 1.0), rplace::InvalidArgument);
}

TEST(MatrixExponential, SemigroupProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ud(0.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix A = oracle::stable_general(rng, 1 + trial % 6);
    const double t = ud(rng), s = ud(rng);
    const Matrix lhs = rplace::matrix_exponential(A, t + s);
    const Matrix rhs = rplace::matrix_exponential(A, t) * rplace::matrix_exponential(A, s);
    EXPECT_LE(oracle::op_norm(lhs - rhs), 1e-10 * (1e-300 + oracle::op_norm(lhs)) + 1e-14);
  }
}

TEST(Norms, DiagonalCases) {
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1;
  D(1, 1) = 2;
  auto r = rplace::norms(D);
  EXPECT_DOUBLE_EQ(r.trace, 3);
  EXPECT_DOUBLE_EQ(r.op_norm, 2);
  EXPECT_NEAR(r.trace_norm_schatten, 3, 1e-15);
  EXPECT_DOUBLE_EQ(r.trace_norm_paper, 3);

  D(1, 1) = -2;
  r = rplace::norms(D);
  EXPECT_DOUBLE_EQ(r.trace, -1);
  EXPECT_DOUBLE_EQ(r.trace_norm_paper, 1);
  EXPECT_NEAR(r.trace_norm_schatten, 3, 1e-15);
  EXPECT_NEAR(r.op_norm, 2, 1e-15);

  r = rplace::norms(Matrix::Zero(3, 3));
  EXPECT_EQ(r.trace, 0);
  EXPECT_EQ(r.op_norm, 0);
  EXPECT_EQ(r.trace_norm_schatten, 0);
  EXPECT_EQ(r.trace_norm_paper, 0);
}

TEST(Norms, PsdTraceMatchesSchattenAndPaperBelowSchatten) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 9;
    const Matrix P = oracle::psd(rng, n, 1 + trial % n);
    const auto r = rplace::norms(P);
    EXPECT_NEAR(r.trace, r.trace_norm_schatten, 1e-10 * r.trace_norm_schatten);
    EXPECT_NEAR(r.trace, r.trace_norm_paper, 1e-10 * r.trace_norm_schatten);
    const Matrix S = oracle::gaussian(rng, n, n);
    const auto s = rplace::norms(S);
    EXPECT_LE(s.trace_norm_paper, s.trace_norm_schatten * (1 + 1e-14));
    EXPECT_NEAR(rplace::op_norm(S), oracle::op_norm(S), 1e-12 * (1 + oracle::op_norm(S)));
  }
}

TEST(Tags, SymmetricAndPsd) {
  Matrix S(2, 2);
  S << 2, 1, 1, 2;
  EXPECT_TRUE(rplace::is_symmetric(S));
  EXPECT_TRUE(rplace::is_psd(S));
  S(0, 1) = 1 + 1e-6;
  EXPECT_FALSE(rplace::is_symmetric(S));
  Matrix I(2, 2);
  I << 1, 0, 0, -1;
  EXPECT_FALSE(rplace::is_psd(I));
}

TEST(Sylvester, ScalarExamples) {
  EXPECT_NEAR(rplace::solve_sylvester(m1(-1), m1(-2), m1(6))(0, 0), -2.0, 1e-15);
  EXPECT_NEAR(rplace::solve_sylvester(m1(-1), m1(-1), m1(-4))(0, 0), 2.0, 1e-15);
  const Matrix I = -Matrix::Identity(2, 2);
  EXPECT_EQ(oracle::op_norm(rplace::solve_sylvester(I, I, Matrix::Zero(2, 2))), 0.0);
}

TEST(Sylvester, ErrorConditions) {
  EXPECT_THROW(rplace::solve_sylvester(m1(0.1), m1(-1), m1(1)), rplace::UnstableGenerator);
  EXPECT_THROW(rplace::solve_sylvester(m1(-1), m1(0.0), m1(1)), rplace::UnstableGenerator);
  EXPECT_THROW(rplace::solve_sylvester(m1(-1), m1(-1), Matrix::Ones(2, 2)),
               rplace::DimensionMismatch);
  // Stable but with an eigenvalue of -1e-13 against a norm of about 1e3.
  Matrix N(2, 2);
  N << -1e-13, 1e3, 0, -1;
  EXPECT_THROW(rplace::solve_sylvester(N, N, Matrix::Ones(2, 2)), rplace::SingularSystem);
  EXPECT_THROW(rplace::solve_sylvester(m1(NAN), m1(-1), m1(1)), rplace::InvalidArgument);
}

TEST(Sylvester, MatchesKroneckerOracleOnGeneralStablePairs) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 60; ++trial) {
    const int n1 = 1 + trial % 10, n2 = 1 + (trial * 7) % 10;
    const Matrix A1 = oracle::stable_general(rng, n1);
    const Matrix A2 = oracle::stable_general(rng, n2);
    const Matrix P = oracle::gaussian(rng, n1, n2);
    const Matrix T = rplace::solve_sylvester(A1, A2, P);
    const Matrix Tk = oracle::sylvester_kron(A1, A2, P);
    EXPECT_LE(oracle::op_norm(T - Tk), 1e-9 * (1 + oracle::op_norm(Tk))) << "trial " << trial;
    EXPECT_LE(rplace::sylvester_residual(A1, A2, P, T), 1e-10 * (1 + oracle::op_norm(P)));
  }
}

TEST(Lyapunov, SymmetricSolutionForSymmetricData) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 12;
    const Matrix A = oracle::stable_general(rng, n);
    const Matrix P = oracle::psd(rng, n, 2);
    const Matrix T = rplace::solve_lyapunov(A, -P);
    EXPECT_LE(rplace::sylvester_residual(A, A, -P, T), 1e-10 * (1 + oracle::op_norm(P)));
    EXPECT_TRUE(rplace::is_psd(T));
  }
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const auto rule = rplace::gauss_legendre(16);
  double wsum = 0.0;
  for (double w : rule.weights) wsum += w;
  EXPECT_NEAR(wsum, 2.0, 1e-14);
  for (int deg = 0; deg <= 31; ++deg) {
    double s = 0.0;
    for (int i = 0; i < 16; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], deg);
    const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
    EXPECT_NEAR(s, exact, 1e-14) << deg;
  }
}

TEST(Quadrature, PanelsCoverHorizon) {
  const auto e = rplace::quadrature_panels(40.0, 200, 100.0);
  ASSERT_EQ(e.size(), 14u);
  EXPECT_EQ(e.front(), 0.0);
  EXPECT_EQ(e.back(), 40.0);
  EXPECT_NEAR(e[1], 0.01, 1e-15);
  for (size_t i = 1; i < e.size(); ++i) EXPECT_GT(e[i], e[i - 1]);
  const auto u = rplace::quadrature_panels(1.0, 32, 0.1);
  EXPECT_NEAR(u[1], 0.5, 1e-15);
}

TEST(Quadrature, ScalarExamples) {
  EXPECT_NEAR(rplace::bochner_quadrature(m1(-1), m1(-2), m1(6), 20, 200)(0, 0), -2.0, 1e-8);
  EXPECT_NEAR(rplace::bochner_quadrature(m1(-1), m1(-1), m1(-4), 20, 200)(0, 0), 2.0, 1e-8);
  EXPECT_EQ(rplace::bochner_quadrature(m1(-1), m1(-3), m1(0), 20, 200)(0, 0), 0.0);
}

TEST(Quadrature, HorizonTooShort) {
  EXPECT_THROW(rplace::bochner_quadrature(m1(-1), m1(-1), m1(1), 1.0, 64), rplace::HorizonTooShort);
}

TEST(Quadrature, AgreesWithSchurSolveOnRandomTriples) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + trial % 10;
    const Matrix A1 = oracle::stable_general(rng, n);
    const Matrix A2 = oracle::stable_general(rng, n);
    const Matrix P = oracle::gaussian(rng, n, n);
    const auto c1 = rplace::certify_stability(A1);
    const auto c2 = rplace::certify_stability(A2);
    const double H = 20.0 / std::min(c1.alpha, c2.alpha);
    const Matrix Tq = rplace::bochner_quadrature(A1, c1, A2, c2, P, H, 200);
    const Matrix Ts = rplace::solve_sylvester(A1, A2, P);
    EXPECT_LE(oracle::op_norm(Tq - Ts), 1e-6 * (1 + oracle::op_norm(P))) << trial;
  }
}

TEST(Quadrature, SimpsonCrossCheckOnScalar) {
  const double ref = -oracle::simpson([](double t) { return std::exp(-3 * t) * 2.0; }, 0, 20, 20000);
  EXPECT_NEAR(rplace::bochner_quadrature(m1(-1), m1(-2), m1(2), 20, 200)(0, 0), ref, 1e-9);
}

}  // namespace
