#include <algorithm>
#include <cmath>
#include <limits>

#include "rplace/errors.hpp"
#include "rplace/optimize.hpp"

namespace rplace {
namespace {

double tr_prod(const Matrix& A, const Matrix& B) { return (A.array() * B.transpose().array()).sum(); }

double hessian_p2_bilinear(const Problem2Config& cfg, const OptimalityTriple& t, const Vector& q,
                           const Vector& r, double penalty_factor) {
  const auto& fam = *cfg.family;
  const Matrix d2 = eval_d2G(fam, t.p, q, r);
  const double tq = eval_dG(fam, t.p, q).trace();
  const double tr_ = eval_dG(fam, t.p, r).trace();
  return penalty_factor * d2.trace() + cfg.beta * tq * tr_ - tr_prod(t.Lambda, t.X * d2 * t.X);
}

double min_eig_on(const std::vector<Vector>& basis, auto&& form) {
  if (basis.empty()) return std::numeric_limits<double>::infinity();
  const Index k = static_cast<Index>(basis.size());
  Matrix H(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = i; j < k; ++j) H(i, j) = H(j, i) = form(basis[i], basis[j]);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

double hessian_p1(const Problem1Config& cfg, const OptimalityTriple& t, const Vector& q,
                  const Vector& r) {
  const Matrix d2 = eval_d2G(*cfg.family, t.p, q, r);
  return cfg.beta * q.dot(r) - tr_prod(t.Lambda, t.X * d2 * t.X);
}

double hessian_p1_full(const Problem1Config& cfg, const OptimalityTriple& t, const Matrix& Phi,
                       const Vector& q, const Matrix& Psi, const Vector& r) {
  const auto& fam = *cfg.family;
  const Matrix G = eval_G(fam, t.p);
  const Matrix dq = eval_dG(fam, t.p, q);
  const Matrix dr = eval_dG(fam, t.p, r);
  const Matrix& X = t.X;
  const Matrix& L = t.Lambda;
  return -tr_prod(L, Phi * G * Psi + Psi * G * Phi) - tr_prod(L, Phi * dr * X + X * dr * Phi) -
         tr_prod(L, Psi * dq * X + X * dq * Psi) + hessian_p1(cfg, t, q, r);
}

double hessian_p2(const Problem2Config& cfg, const OptimalityTriple& t, const Vector& q) {
  const double gap = eval_G(*cfg.family, t.p).trace() - cfg.gamma;
  return hessian_p2_bilinear(cfg, t, q, q, cfg.beta * gap);
}

Hessian2Variants hessian_p2_variants(const Problem2Config& cfg, const OptimalityTriple& t,
                                     const Vector& q) {
  Hessian2Variants h;
  const Matrix G = eval_G(*cfg.family, t.p);
  h.unsubstituted = hessian_p2(cfg, t, q);
  h.xgx_substituted = hessian_p2_bilinear(cfg, t, q, q, op_norm(t.X * G * t.X));
  h.trace_law_substituted = hessian_p2_bilinear(cfg, t, q, q, op_norm(t.X * t.Lambda * t.X));
  return h;
}

std::vector<Vector> critical_cone_basis(const DeviceFamily& family, const Vector& p,
                                        const Matrix& X) {
  const auto D = family.dG_basis(p);
  const Index m = static_cast<Index>(D.size());
  const Index n = X.rows();
  Matrix S(n * n, m);
  for (Index j = 0; j < m; ++j) {
    const Matrix XDX = X * D[j] * X;
    S.col(j) = Eigen::Map<const Vector>(XDX.data(), n * n);
  }
  const double thresh = 1e-10 * (1.0 + std::pow(op_norm(X), 2));
  Eigen::JacobiSVD<Matrix> svd(S, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  std::vector<Vector> basis;
  for (Index j = 0; j < m; ++j) {
    const double s = j < sv.size() ? sv(j) : 0.0;
    if (s <= thresh) basis.push_back(svd.matrixV().col(j));
  }
  return basis;
}

double cone_min_eigenvalue_p1(const Problem1Config& cfg, const OptimalityTriple& t) {
  const auto basis = critical_cone_basis(*cfg.family, t.p, t.X);
  return min_eig_on(basis, [&](const Vector& q, const Vector& r) { return hessian_p1(cfg, t, q, r); });
}

double cone_min_eigenvalue_p2(const Problem2Config& cfg, const OptimalityTriple& t) {
  const auto basis = critical_cone_basis(*cfg.family, t.p, t.X);
  const double gap = eval_G(*cfg.family, t.p).trace() - cfg.gamma;
  return min_eig_on(basis, [&](const Vector& q, const Vector& r) {
    return hessian_p2_bilinear(cfg, t, q, r, cfg.beta * gap);
  });
}

}  // namespace rplace
