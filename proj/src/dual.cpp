#include "rplace/dual.hpp"

#include <limits>

#include "rplace/errors.hpp"
#include "rplace/quadrature.hpp"

namespace rplace {

double dual_residual(const Matrix& A, const Matrix& G, const Matrix& X, const Matrix& W,
                     const Matrix& Lambda) {
  const Matrix Acl = A.transpose() - G * X;
  return op_norm(Acl * Lambda + Lambda * Acl.transpose() + W);
}

DualSolution solve_dual(const Matrix& A, const Matrix& G, const Matrix& X, const Matrix& W,
                        bool certify) {
  require_square(A, "A");
  const Index n = A.rows();
  for (const Matrix* M : {&G, &X, &W}) {
    if (M->rows() != n || M->cols() != n) throw DimensionMismatch("dual data must match A");
  }
  require_finite(W, "W");
  if (!is_psd(W)) throw InvalidArgument("W must be symmetric positive semi-definite");

  const Matrix Acl = A.transpose() - G * X;
  DualSolution sol;
  sol.certified = certify;
  if (certify) {
    try {
      sol.closed_loop = certify_stability(Acl);
    } catch (const UnstableGenerator&) {
      throw ClosedLoopUnstable("closed-loop generator A^T - G X is not stable", 0);
    }
  }
  try {
    // Acl L + L Acl^T = -W, since Acl^T = A - X G for symmetric G and X.
    sol.Lambda = symmetrize(solve_lyapunov(Acl, -W));
  } catch (const UnstableGenerator&) {
    throw ClosedLoopUnstable("closed-loop generator A^T - G X is not stable", 0);
  }
  sol.residual = dual_residual(A, G, X, W, sol.Lambda);
  if (certify) {
    const auto& c = sol.closed_loop;
    sol.norm_bound_slack = c.M * c.M / (2.0 * c.alpha) * op_norm(W) - op_norm(sol.Lambda);
  } else {
    sol.norm_bound_slack = std::numeric_limits<double>::quiet_NaN();
  }
  return sol;
}

DualVerification verify_dual(const Matrix& A, const Matrix& G, const Matrix& X,
                             const DualSolution& sol, const StabilityCertificate& closed_loop,
                             const Matrix& W, double horizon, int nodes) {
  DualVerification r;
  r.norm_Lambda = op_norm(sol.Lambda);
  r.norm_bound = closed_loop.M * closed_loop.M / (2.0 * closed_loop.alpha) * op_norm(W);
  r.norm_bound_holds = r.norm_Lambda <= r.norm_bound + 1e-9;
  r.symmetric = is_symmetric(sol.Lambda);
  r.psd = is_psd(sol.Lambda);
  const Matrix Acl = A.transpose() - G * X;
  const Matrix integral = -bochner_quadrature(Acl, closed_loop, Acl, closed_loop, W, horizon, nodes);
  r.quadrature_error = op_norm(sol.Lambda - integral);
  r.quadrature_error_rel = r.quadrature_error / (1.0 + r.norm_Lambda);
  return r;
}

}  // namespace rplace
