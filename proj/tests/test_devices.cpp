#include <cmath>
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "families.hpp"
#include "oracles.hpp"
#include "rplace/devices.hpp"
#include "rplace/errors.hpp"
#include "rplace/model.hpp"

using rplace::Box;
using rplace::GaussianActuators;
using rplace::Matrix;
using rplace::Vector;

namespace {

Vector v1(double x) { return Vector::Constant(1, x); }

Vector linspace(int n, double a, double b) { return Vector::LinSpaced(n, a, b); }

// Direct sum of Gaussian outer products, written independently of the class.
Matrix reference_G(const Vector& grid, double sigma, double r, const Vector& p) {
  const int n = grid.size();
  Matrix G = Matrix::Zero(n, n);
  for (int j = 0; j < p.size(); ++j) {
    Vector b(n);
    for (int i = 0; i < n; ++i) b(i) = std::exp(-std::pow(grid(i) - p(j), 2) / (2 * sigma * sigma));
    G += b * b.transpose();
  }
  return G / r;
}

TEST(Devices, TwoNodeProfile) {
  Vector grid(2);
  grid << 0.0, 1.0;
  GaussianActuators fam(grid, 1.0, 1.0);
  const Matrix G = rplace::eval_G(fam, v1(0.0));
  const double e = std::exp(-0.5);
  EXPECT_NEAR(G(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(G(0, 1), e, 1e-15);
  EXPECT_NEAR(G(1, 0), e, 1e-15);
  EXPECT_NEAR(G(1, 1), std::exp(-1.0), 1e-15);
}

TEST(Devices, ScalingAndTails) {
  const Vector grid = linspace(8, -1, 1);
  GaussianActuators heavy(grid, 0.2, 1e12);
  EXPECT_LE(rplace::op_norm(rplace::eval_G(heavy, v1(0.1))), 8.0 / 1e12);
  GaussianActuators fam(grid, 0.2, 1.0);
  EXPECT_LE(rplace::op_norm(rplace::eval_G(fam, v1(1.0 + 20 * 0.2))), 8.0 * std::exp(-400.0) + 1e-300);
}

TEST(Devices, PeakHasZeroDerivative) {
  GaussianActuators fam(Vector::Zero(1), 1.0, 1.0);
  EXPECT_EQ(rplace::eval_dG(fam, v1(0.0), v1(1.0))(0, 0), 0.0);
  EXPECT_EQ(rplace::adjoint_dG(fam, v1(0.0), Matrix::Constant(1, 1, 3.7))(0), 0.0);
}

TEST(Devices, ZeroDirections) {
  GaussianActuators fam(linspace(6, -1, 1), 0.3, 2.0, 2);
  const Vector p = (Vector(2) << -0.2, 0.4).finished();
  EXPECT_EQ(rplace::eval_dG(fam, p, Vector::Zero(2)).norm(), 0.0);
  EXPECT_EQ(rplace::eval_d2G(fam, p, Vector::Zero(2), Vector::Ones(2)).norm(), 0.0);
  EXPECT_EQ(rplace::eval_d2G(fam, p, Vector::Ones(2), Vector::Zero(2)).norm(), 0.0);
  EXPECT_EQ(rplace::adjoint_dG(fam, p, Matrix::Zero(6, 6)).norm(), 0.0);
}

TEST(Devices, DimensionErrors) {
  GaussianActuators fam(linspace(4, 0, 1), 0.3, 1.0, 2);
  EXPECT_THROW(rplace::eval_G(fam, v1(0.0)), rplace::DimensionMismatch);
  EXPECT_THROW(rplace::eval_dG(fam, Vector::Zero(2), v1(1.0)), rplace::DimensionMismatch);
  EXPECT_THROW(rplace::adjoint_dG(fam, Vector::Zero(2), Matrix::Zero(3, 3)), rplace::DimensionMismatch);
  EXPECT_THROW(GaussianActuators(linspace(4, 0, 1), 0.0, 1.0), rplace::InvalidArgument);
  EXPECT_THROW(GaussianActuators(linspace(4, 0, 1), 0.3, -1.0), rplace::InvalidArgument);
}

class DeviceProperties : public ::testing::TestWithParam<int> {};

TEST_P(DeviceProperties, AgreeWithReferenceAndDifferences) {
  const int actuators = GetParam();
  std::mt19937_64 rng(100 + actuators);
  std::uniform_real_distribution<double> ud(-0.5, 0.5);
  std::normal_distribution<double> nd;
  const Vector grid = linspace(12, -0.5, 0.5);
  const double sigma = 0.12, r = 0.7;
  GaussianActuators fam(grid, sigma, r, actuators);
  for (int trial = 0; trial < 25; ++trial) {
    Vector p(actuators), q(actuators), s(actuators);
    for (int j = 0; j < actuators; ++j) {
      p(j) = ud(rng);
      q(j) = nd(rng);
      s(j) = nd(rng);
    }
    const Matrix G = fam.G(p);
    EXPECT_LE((G - reference_G(grid, sigma, r, p)).norm(), 1e-14);
    EXPECT_TRUE(rplace::is_psd(G));
    Eigen::JacobiSVD<Matrix> svd(G);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i) rank += svd.singularValues()(i) > 1e-10;
    EXPECT_LE(rank, actuators);
    EXPECT_NEAR(G.trace(), fam.trace_closed_form(p), 1e-12 * G.trace());

    const double h = 1e-5;
    const Matrix fd1 = (fam.G(p + h * q) - fam.G(p - h * q)) / (2 * h);
    EXPECT_LE(oracle::op_norm(fd1 - fam.dG(p, q)), 1e-6 * (1 + q.norm()));
    const double h2 = 1e-6;
    const Matrix fd2 = (fam.dG(p + h2 * s, q) - fam.dG(p - h2 * s, q)) / (2 * h2);
    EXPECT_LE(oracle::op_norm(fd2 - fam.d2G(p, q, s)), 1e-5 * (1 + q.norm() * s.norm()));
    EXPECT_EQ((fam.d2G(p, q, s) - fam.d2G(p, s, q)).norm(), 0.0);

    const Matrix D = fam.dG(p, q);
    EXPECT_LE((D - D.transpose()).norm(), 1e-14 * (1 + D.norm()));

    // Adjoint identity against the pairing tr(T dG(q)).
    const Matrix Tm = oracle::gaussian(rng, 12, 12);
    const Matrix T = Tm + Tm.transpose();
    const Vector v = rplace::adjoint_dG(fam, p, T);
    EXPECT_LE(std::abs(v.dot(q) - (T * D).trace()), 1e-12 * (1 + T.norm()) * (1 + q.norm()));

    const Matrix gram = rplace::dG_gram(fam, p);
    const auto B = fam.dG_basis(p);
    for (int i = 0; i < actuators; ++i)
      for (int j = 0; j < actuators; ++j) EXPECT_NEAR(gram(i, j), (B[i] * B[j]).trace(), 1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(Actuators, DeviceProperties, ::testing::Values(1, 2, 3));

TEST(Devices, SigmaDoublingFollowsClosedForm) {
  const Vector grid = linspace(10, -1, 1);
  GaussianActuators a(grid, 0.1, 1.0), b(grid, 0.2, 1.0);
  for (double x : {-0.7, 0.0, 0.33}) {
    double ref = 0.0;
    for (int i = 0; i < 10; ++i) // tr(b b^T) = sum b_i^2 = sum exp(-(x_i - x)^2 / sigma^2)
      ref += std::exp(-std::pow(grid(i) - x, 2) / 0.04);
    EXPECT_NEAR(b.G(v1(x)).trace(), ref, 1e-10);
    EXPECT_NEAR(a.G(v1(x)).trace(), a.trace_closed_form(v1(x)), 1e-12);
  }
}

TEST(SeedSplit, DeterministicAndDistinct) {
  EXPECT_EQ(rplace::split_seed(5, 3), rplace::split_seed(5, 3));
  EXPECT_NE(rplace::split_seed(5, 3), rplace::split_seed(5, 4));
  EXPECT_NE(rplace::split_seed(5, 3), rplace::split_seed(6, 3));
  Box box{Vector::Constant(2, -1.0), Vector::Constant(2, 2.0)};
  for (int i = 0; i < 200; ++i) {
    const Vector p = rplace::sample_box(box, 9, i);
    EXPECT_TRUE(box.contains(p));
    EXPECT_EQ(p, rplace::sample_box(box, 9, i));
  }
}

class LedgerTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const auto m = rplace::heat1d(16, 0.05, 1.0);
    fam_ = std::make_unique<GaussianActuators>(m.grid, 0.1, 1.0);
    in_.A = m.A;
    in_.Q = Matrix::Identity(16, 16);
    in_.W = rplace::weight_preset("rank1:4", 16, "W");
    in_.beta = 10.0;
    in_.gamma = 2.2;
    box_ = Box{v1(m.grid(0)), v1(m.grid(15))};
    serial_ = rplace::estimate_constants(*fam_, box_, 100, 42, in_, rplace::Execution::serial);
  }
  static std::unique_ptr<GaussianActuators> fam_;
  static rplace::LedgerInputs in_;
  static Box box_;
  static rplace::ConstantLedger serial_;
};

std::unique_ptr<GaussianActuators> LedgerTest::fam_;
rplace::LedgerInputs LedgerTest::in_;
Box LedgerTest::box_;
rplace::ConstantLedger LedgerTest::serial_;

TEST_F(LedgerTest, FieldsPositiveAndFinite) {
  const auto& L = serial_;
  for (double v : {L.g, L.g_op, L.L_G, L.L_dG, L.C_dG, L.K, L.mu, L.xlx_sup, L.M, L.alpha, L.trQ,
                   L.normW, L.g_trace, L.L_G_trace, L.L_dG_trace, L.C_dG_trace}) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, 0.0);
  }
  EXPECT_GE(L.M, 1.0);
  EXPECT_LE(L.mu, L.xlx_sup);
  EXPECT_EQ(L.samples, 100);
  EXPECT_GT(L.invertible_samples, 0);
  EXPECT_DOUBLE_EQ(L.trQ, 16.0);
}

TEST_F(LedgerTest, ParallelMatchesSerialBitForBit) {
  const auto P = rplace::estimate_constants(*fam_, box_, 100, 42, in_, rplace::Execution::parallel);
  EXPECT_EQ(P.g, serial_.g);
  EXPECT_EQ(P.L_G, serial_.L_G);
  EXPECT_EQ(P.L_dG, serial_.L_dG);
  EXPECT_EQ(P.C_dG, serial_.C_dG);
  EXPECT_EQ(P.K, serial_.K);
  EXPECT_EQ(P.mu, serial_.mu);
  EXPECT_EQ(P.M, serial_.M);
  EXPECT_EQ(P.alpha, serial_.alpha);
}

TEST_F(LedgerTest, FreshPairsRespectLipschitzConstants) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ud(box_.lo(0), box_.hi(0));
  for (int i = 0; i < 200; ++i) {
    const Vector p1 = v1(ud(rng)), p2 = v1(ud(rng));
    const double dp = (p1 - p2).norm();
    const Matrix G1 = fam_->G(p1), G2 = fam_->G(p2);
    EXPECT_LE(rplace::schatten1_norm(G1 - G2), serial_.L_G * dp * (1 + 1e-12));
    EXPECT_LE(rplace::schatten1_norm(fam_->dG(p1, v1(1)) - fam_->dG(p2, v1(1))), serial_.L_dG * dp * (1 + 1e-12));
    EXPECT_LE(rplace::schatten1_norm(G1), serial_.g);
    EXPECT_LE(rplace::schatten1_norm(fam_->dG(p1, v1(1))), serial_.C_dG);
  }
}

TEST(Ledger, ConstantFamilyIsDegenerate) {
  const Matrix A = -Matrix::Identity(3, 3);
  auto fam = doubles::ConstantFamily(Matrix::Identity(3, 3));
  rplace::LedgerInputs in{A, Matrix::Identity(3, 3), Matrix::Identity(3, 3), 1.0, 1.0};
  Box box{v1(-1), v1(1)};
  EXPECT_THROW(rplace::estimate_constants(fam, box, 100, 1, in), rplace::DegenerateFamily);
}

}  // namespace
