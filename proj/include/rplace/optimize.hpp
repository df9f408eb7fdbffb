#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rplace/devices.hpp"
#include "rplace/linalg.hpp"
#include "rplace/semigroup.hpp"

namespace rplace {

/// Data shared by both placement problems.
struct ProblemConfig {
  Matrix A;
  Matrix Q;
  Matrix W;
  std::shared_ptr<const DeviceFamily> family;
  double beta = 1.0;
  double tol = 1e-10;
  int max_iter = 500;
  /// theta in p <- (1 - theta) p + theta f(p); 1 is the undamped map.
  double damping = 0.5;
  /// Iterates are projected onto this box when present.
  std::optional<Box> domain;
  /// Certificate for A, computed on first use when absent.
  std::optional<StabilityCertificate> certificate;
};

/// min tr(X W) + beta/2 ||p||^2.
struct Problem1Config : ProblemConfig {};

/// min tr(X W) + beta/2 (tr G_p - gamma)^2.
struct Problem2Config : ProblemConfig {
  double gamma = 1.0;
};

/// Checks dimensions, PSD tags and scalar ranges; fills `certificate`.
void prepare(ProblemConfig& cfg);

/// Primal and dual solutions at one parameter.
struct PointState {
  Vector p;
  Matrix G;
  Matrix X;
  Matrix Lambda;
  Matrix XLX;  ///< X Lambda X
  double residual_primal = 0.0;  ///< ARE residual / (1 + ||Q||)
  double residual_dual = 0.0;    ///< dual residual / (1 + ||W||)
};

PointState evaluate_point(const ProblemConfig& cfg, const Vector& p);

struct OptimalityTriple {
  Matrix X;
  Matrix Lambda;
  Vector p;
  double residual_primal = 0.0;
  double residual_dual = 0.0;
  /// Gradient norm of the reduced cost divided by max(1, beta).
  double residual_stationarity = 0.0;
  int iterations = 0;
  bool converged = false;
  double cost = 0.0;
  std::vector<Vector> history;  ///< p_0, p_1, ...

  // Problem 2 diagnostics.
  double trace_law_residual = 0.0;   ///< |tr G - gamma - ||XLX||/beta|
  double fixed_point_residual = 0.0; ///< ||f2(p) - p||
  int map_steps = 0;
  int fallback_steps = 0;
};

// ---- Problem 1 ----

double cost_p1(const Problem1Config& cfg, const Vector& p);
/// beta p - dG_p^*(X Lambda X).
Vector gradient_p1(const Problem1Config& cfg, const PointState& s);
double stationarity_residual_p1(const Problem1Config& cfg, const OptimalityTriple& t);
/// (1/beta) dG_p^*(X Lambda X).
Vector fixed_point_map_p1(const Problem1Config& cfg, const PointState& s);

/// Damped fixed-point iteration on the first-order system. Throws
/// MaxIterExceeded carrying the best iterate.
OptimalityTriple solve_p1(const Problem1Config& cfg, const Vector& p0);

// ---- Problem 2 ----

double cost_p2(const Problem2Config& cfg, const Vector& p);
/// beta (tr G - gamma) dG^*(I) - dG^*(X Lambda X).
Vector gradient_p2(const Problem2Config& cfg, const PointState& s);
double stationarity_residual_p2(const Problem2Config& cfg, const OptimalityTriple& t);

/// T(p) = (1/||XLX||) (dG^* dG)^{-1} dG^* XLX dG, so that f2(p) = T(p) p.
/// Throws DegenerateFamily if dG^* dG is numerically singular or XLX = 0.
Matrix fixed_point_operator_p2(const Problem2Config& cfg, const PointState& s);

/// Paper-map steps while they lower the cost, then Newton on the reduced
/// cost (finite-difference Hessian of the analytic gradient, Armijo line
/// search, gradient steps where the Hessian is indefinite).
OptimalityTriple solve_p2(const Problem2Config& cfg, const Vector& p0);

// ---- contraction constants ----

struct ContractionReport {
  double k = 0.0;
  bool is_contraction = false;
  std::vector<std::pair<std::string, double>> term_breakdown;
  /// Smallest beta giving k < 1 with everything else fixed; +inf if none.
  double beta_threshold = 0.0;
};

ContractionReport contraction_constant_p1(const ConstantLedger& L);
/// Uses gamma_beta = gamma + xlx_sup / beta.
ContractionReport contraction_constant_p2(const ConstantLedger& L);

// ---- second order ----

/// beta q.r - tr(Lambda X d2G(q, r) X), the form on the critical cone.
double hessian_p1(const Problem1Config& cfg, const OptimalityTriple& t, const Vector& q,
                  const Vector& r);
/// All six terms of the Lagrangian second variation with state directions.
double hessian_p1_full(const Problem1Config& cfg, const OptimalityTriple& t, const Matrix& Phi,
                       const Vector& q, const Matrix& Psi, const Vector& r);

/// beta (tr G - gamma) tr d2G(q,q) + beta (tr dG(q))^2 - tr(Lambda X d2G(q,q) X).
double hessian_p2(const Problem2Config& cfg, const OptimalityTriple& t, const Vector& q);

/// The same form with beta (tr G - gamma) replaced by ||X G X||_op or by
/// ||X Lambda X||_op; reported for comparison only.
struct Hessian2Variants {
  double unsubstituted = 0.0;
  double xgx_substituted = 0.0;
  double trace_law_substituted = 0.0;
};
Hessian2Variants hessian_p2_variants(const Problem2Config& cfg, const OptimalityTriple& t,
                                     const Vector& q);

/// Orthonormal basis of {q : ||X dG_p(q) X|| <= 1e-10 (1 + ||X||^2)}.
std::vector<Vector> critical_cone_basis(const DeviceFamily& family, const Vector& p,
                                        const Matrix& X);

/// Smallest eigenvalue of the cone-restricted Hessian; +inf on an empty cone.
double cone_min_eigenvalue_p1(const Problem1Config& cfg, const OptimalityTriple& t);
double cone_min_eigenvalue_p2(const Problem2Config& cfg, const OptimalityTriple& t);

// ---- Lipschitz lemmas ----

struct LipschitzReading {
  std::string norm;               ///< "abs_trace" (|tr|) or "schatten"
  double worst_ratio_X = 0.0;     ///< max lhs / rhs over pairs
  double worst_ratio_Lambda = 0.0;
  bool X_holds = false;
  bool Lambda_holds = false;
};

struct LipschitzReport {
  int pairs = 0;
  LipschitzReading abs_trace;
  LipschitzReading schatten;
  /// Name of a reading under which both lemmas held on every pair, or "none".
  std::string passing_norm;
};

/// Bound constants from the ledger:
///   ||X1 - X2||_1 <= L_G M^6/(8 alpha^3) trQ^2 |p1 - p2|
///   ||L1 - L2||_op <= (M^10 g/(16 alpha^5) trQ^2 + M^6/(4 alpha^3) trQ) L_G ||W|| |p1 - p2|
/// with g = ledger.g_op.
LipschitzReport check_lipschitz_lemmas(const ProblemConfig& cfg, const ConstantLedger& L,
                                       const Box& domain, int pairs, std::uint64_t seed,
                                       Execution exec = Execution::parallel);

}  // namespace rplace
