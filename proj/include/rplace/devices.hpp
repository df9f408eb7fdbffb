#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rplace/linalg.hpp"
#include "rplace/semigroup.hpp"

namespace rplace {

/// A parametrized control-device map p -> G_p with analytic derivatives.
class DeviceFamily {
 public:
  virtual ~DeviceFamily() = default;

  virtual int param_dim() const = 0;
  virtual int state_dim() const = 0;
  virtual std::string kind() const = 0;

  virtual Matrix G(const Vector& p) const = 0;
  /// Directional derivative dG_p(q).
  virtual Matrix dG(const Vector& p, const Vector& q) const = 0;
  /// Second variation d2G_p(q, r), bilinear and symmetric in (q, r).
  virtual Matrix d2G(const Vector& p, const Vector& q, const Vector& r) const = 0;

  /// dG_p(e_j) for j = 0..param_dim-1.
  virtual std::vector<Matrix> dG_basis(const Vector& p) const;
};

/// Gaussian-profile actuators on a 1-D grid.
///
/// b_i(p_j) = exp(-(x_i - p_j)^2 / (2 sigma^2)) and
/// G_p = (1/r) sum_j b(p_j) b(p_j)^T, one actuator per parameter component.
class GaussianActuators final : public DeviceFamily {
 public:
  GaussianActuators(Vector grid, double sigma, double r_weight, int actuators = 1);

  int param_dim() const override { return actuators_; }
  int state_dim() const override { return static_cast<int>(grid_.size()); }
  std::string kind() const override { return actuators_ == 1 ? "gaussian_actuator" : "multi_gaussian"; }

  Matrix G(const Vector& p) const override;
  Matrix dG(const Vector& p, const Vector& q) const override;
  Matrix d2G(const Vector& p, const Vector& q, const Vector& r) const override;
  std::vector<Matrix> dG_basis(const Vector& p) const override;

  /// Profile vector b(x) and its first two derivatives in the position x.
  Vector profile(double x) const;
  Vector profile_d1(double x) const;
  Vector profile_d2(double x) const;

  /// sum_j ||b(p_j)||^2 / r, equal to tr(G_p).
  double trace_closed_form(const Vector& p) const;

  const Vector& grid() const { return grid_; }
  double sigma() const { return sigma_; }
  double r_weight() const { return r_; }

 private:
  Vector grid_;
  double sigma_;
  double r_;
  int actuators_;
};

Matrix eval_G(const DeviceFamily& family, const Vector& p);
Matrix eval_dG(const DeviceFamily& family, const Vector& p, const Vector& q);
Matrix eval_d2G(const DeviceFamily& family, const Vector& p, const Vector& q, const Vector& r);

/// v with v . q = tr(T dG_p(q)) for every q.
Vector adjoint_dG(const DeviceFamily& family, const Vector& p, const Matrix& T);

/// Gram matrix [tr(dG_p(e_i) dG_p(e_j))], the matrix of dG_p^* dG_p.
Matrix dG_gram(const DeviceFamily& family, const Vector& p);

/// Axis-aligned box in parameter space.
struct Box {
  Vector lo;
  Vector hi;
  int dim() const { return static_cast<int>(lo.size()); }
  double diameter() const { return (hi - lo).norm(); }
  bool contains(const Vector& p) const;
  Vector clamp(const Vector& p) const;
};

/// Operator data the ledger samples X(p) and Lambda(p) against.
struct LedgerInputs {
  Matrix A;
  Matrix Q;
  Matrix W;
  double beta = 1.0;
  double gamma = 0.0;
};

enum class Execution { serial, parallel };

/// Constants entering the Lipschitz lemmas and the contraction bounds.
///
/// Maps into matrices are measured in the Schatten-1 norm (J1); `_trace`
/// fields repeat the estimate with |tr(.)| in its place. Norms of linear maps
/// P -> matrices use sqrt(sum_j N(L e_j)^2), exact when dim P = 1.
struct ConstantLedger {
  double g = 0.0;          ///< sup ||G_p||_1
  double g_op = 0.0;       ///< sup ||G_p||_op
  double L_G = 0.0;
  double L_dG = 0.0;
  double C_dG = 0.0;       ///< sup ||dG_p||
  double K = 0.0;          ///< sup ||(dG_p^* dG_p)^{-1}||_op
  double mu = 0.0;         ///< inf ||X Lambda X||_op
  double xlx_sup = 0.0;    ///< sup ||X Lambda X||_op
  double M = 1.0;
  double alpha = 0.0;
  double trQ = 0.0;
  double normW = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  double g_trace = 0.0;
  double L_G_trace = 0.0;
  double L_dG_trace = 0.0;
  double C_dG_trace = 0.0;

  int samples = 0;
  int invertible_samples = 0;  ///< samples where dG^* dG was invertible
  std::uint64_t seed = 0;
};

/// Deterministic per-index seed: splitmix64 applied to (seed, index).
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index);

/// Uniform point in the box drawn from split_seed(seed, index).
Vector sample_box(const Box& box, std::uint64_t seed, std::uint64_t index);

/// Sampled constants with 10% headroom on sup-type fields and 10% reduction
/// on mu. M and alpha are the envelope of the open-loop certificate and the
/// closed-loop certificates at every sample. Results do not depend on the
/// thread count.
///
/// Throws DegenerateFamily if dG^* dG is singular at every sample.
ConstantLedger estimate_constants(const DeviceFamily& family, const Box& domain, int samples,
                                  std::uint64_t seed, const LedgerInputs& inputs,
                                  Execution exec = Execution::parallel);

}  // namespace rplace
