#pragma once

#include <optional>
#include <vector>

#include "rplace/linalg.hpp"
#include "rplace/semigroup.hpp"

namespace rplace {

/// Newton-Kleinman controls.
struct RiccatiOptions {
  /// Stop when ||X_{k+1} - X_k||_op <= tol (1 + ||X_{k+1}||_op).
  double tol = 1e-11;
  int max_iter = 100;
  /// Starting iterate; zero when absent. Must make A - X0 G stable.
  std::optional<Matrix> initial;
  /// Certificate for A; computed when absent.
  std::optional<StabilityCertificate> certificate;
  bool keep_history = false;
};

/// Solution of A X + X A^T - X G X + Q = 0.
struct RiccatiSolution {
  Matrix X;
  int newton_iters = 0;
  double strong_residual = 0.0;
  /// Filled in by verify_are; NaN until then.
  double bochner_residual;
  /// M^2/(2 alpha) tr(Q) - tr(X) with the certificate of A.
  double trace_bound_slack = 0.0;
  StabilityCertificate certificate;
  std::vector<Matrix> history;  ///< X_0, X_1, ... when requested
};

/// ||A X + X A^T - X G X + Q||_op.
double are_residual(const Matrix& A, const Matrix& G, const Matrix& Q, const Matrix& X);

/// Newton-Kleinman: X_{k+1} solves
/// (A - X_k G) X_{k+1} + X_{k+1} (A - X_k G)^T + X_k G X_k + Q = 0.
///
/// Throws UnstableGenerator for unstable A, ClosedLoopUnstable if some
/// A - X_k G is not stable, NewtonStall when max_iter is reached.
RiccatiSolution solve_are(const Matrix& A, const Matrix& G, const Matrix& Q,
                          const RiccatiOptions& opts = {});
RiccatiSolution solve_are(const Matrix& A, const Matrix& G, const Matrix& Q, double tol);

struct AreVerification {
  double strong_residual = 0.0;
  double bochner_residual = 0.0;       ///< ||X + quad(A, A, Q - XGX)||_op
  double bochner_residual_rel = 0.0;   ///< divided by 1 + ||X||_op
  double trace_X = 0.0;
  double trace_bound = 0.0;            ///< M^2/(2 alpha) tr(Q)
  bool trace_bound_holds = false;      ///< tr(X) <= trace_bound + 1e-9
  bool symmetric = false;
  bool psd = false;
};

AreVerification verify_are(const Matrix& A, const Matrix& G, const Matrix& Q,
                           RiccatiSolution& sol, const StabilityCertificate& cert,
                           double horizon, int nodes);

}  // namespace rplace
