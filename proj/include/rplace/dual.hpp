#pragma once

#include "rplace/linalg.hpp"
#include "rplace/semigroup.hpp"

namespace rplace {

/// Solution of (A^T - G X) Lambda + Lambda (A - X G) = -W.
struct DualSolution {
  Matrix Lambda;
  double residual = 0.0;
  /// M^2/(2 alpha) ||W|| - ||Lambda|| with the closed-loop certificate; NaN
  /// when the solve skipped certification.
  double norm_bound_slack = 0.0;
  StabilityCertificate closed_loop;
  bool certified = false;
};

/// ||(A^T - GX) L + L (A - XG) + W||_op.
double dual_residual(const Matrix& A, const Matrix& G, const Matrix& X, const Matrix& W,
                     const Matrix& Lambda);

/// Throws ClosedLoopUnstable if A^T - G X is not stable. With certify=false
/// only the spectral check runs and norm_bound_slack is NaN; the optimizers
/// use this in their inner loops.
DualSolution solve_dual(const Matrix& A, const Matrix& G, const Matrix& X, const Matrix& W,
                        bool certify = true);

struct DualVerification {
  double norm_Lambda = 0.0;
  double norm_bound = 0.0;          ///< M^2/(2 alpha) ||W|| with the closed-loop pair
  bool norm_bound_holds = false;    ///< norm_Lambda <= norm_bound + 1e-9
  bool symmetric = false;
  bool psd = false;
  double quadrature_error = 0.0;    ///< ||Lambda - int T(t) W T*(t) dt||_op
  double quadrature_error_rel = 0.0;
};

/// `closed_loop` certifies A^T - G X.
DualVerification verify_dual(const Matrix& A, const Matrix& G, const Matrix& X,
                             const DualSolution& sol, const StabilityCertificate& closed_loop,
                             const Matrix& W, double horizon, int nodes);

}  // namespace rplace
