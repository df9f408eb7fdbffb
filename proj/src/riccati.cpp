#include "rplace/riccati.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rplace/errors.hpp"
#include "rplace/quadrature.hpp"

namespace rplace {
namespace {

void check_inputs(const Matrix& A, const Matrix& G, const Matrix& Q) {
  require_square(A, "A");
  require_finite(A, "A");
  require_finite(G, "G");
  require_finite(Q, "Q");
  if (G.rows() != A.rows() || G.cols() != A.rows() || Q.rows() != A.rows() ||
      Q.cols() != A.rows()) {
    throw DimensionMismatch("A, G and Q must share one dimension");
  }
  if (!is_psd(G)) throw InvalidArgument("G must be symmetric positive semi-definite");
  if (!is_psd(Q)) throw InvalidArgument("Q must be symmetric positive semi-definite");
}

}  // namespace

double are_residual(const Matrix& A, const Matrix& G, const Matrix& Q, const Matrix& X) {
  return op_norm(A * X + X * A.transpose() - X * G * X + Q);
}

RiccatiSolution solve_are(const Matrix& A, const Matrix& G, const Matrix& Q, double tol) {
  RiccatiOptions opts;
  opts.tol = tol;
  return solve_are(A, G, Q, opts);
}

RiccatiSolution solve_are(const Matrix& A, const Matrix& G, const Matrix& Q,
                          const RiccatiOptions& opts) {
  check_inputs(A, G, Q);
  if (!(opts.tol > 0.0)) throw InvalidArgument("Newton tolerance must be positive");
  RiccatiSolution sol;
  sol.bochner_residual = std::numeric_limits<double>::quiet_NaN();
  sol.certificate = opts.certificate ? *opts.certificate : certify_stability(A);

  const Index n = A.rows();
  Matrix X = opts.initial ? symmetrize(*opts.initial) : Matrix::Zero(n, n);
  if (X.rows() != n || X.cols() != n) throw DimensionMismatch("initial guess has wrong size");
  if (opts.keep_history) sol.history.push_back(X);

  double prev_step = std::numeric_limits<double>::infinity();
  bool done = false;
  for (int k = 0; k < opts.max_iter; ++k) {
    const Matrix XG = X * G;
    const Matrix Acl = A - XG;
    Matrix Xn;
    try {
      Xn = solve_lyapunov(Acl, -(XG * X + Q));
    } catch (const UnstableGenerator& e) {
      throw ClosedLoopUnstable("A - X_k G lost stability at Newton step " + std::to_string(k),
                               k);
    }
    Xn = symmetrize(Xn);
    const double step = op_norm(Xn - X);
    const double scale = 1.0 + op_norm(Xn);
    X = std::move(Xn);
    sol.newton_iters = k + 1;
    if (opts.keep_history) sol.history.push_back(X);
    // Converged, or stuck at the rounding floor after getting close.
    if (step <= opts.tol * scale || (step >= prev_step && step <= 1e-8 * scale)) {
      done = true;
      break;
    }
    prev_step = step;
  }
  if (!done) {
    throw NewtonStall("Newton-Kleinman did not converge in " + std::to_string(opts.max_iter) +
                      " iterations");
  }
  sol.X = std::move(X);
  sol.strong_residual = are_residual(A, G, Q, sol.X);
  const auto& c = sol.certificate;
  sol.trace_bound_slack = c.M * c.M / (2.0 * c.alpha) * Q.trace() - sol.X.trace();
  return sol;
}

AreVerification verify_are(const Matrix& A, const Matrix& G, const Matrix& Q,
                           RiccatiSolution& sol, const StabilityCertificate& cert,
                           double horizon, int nodes) {
  AreVerification r;
  const Matrix& X = sol.X;
  r.strong_residual = are_residual(A, G, Q, X);
  const Matrix P = Q - X * G * X;
  const Matrix integral = -bochner_quadrature(A, cert, A, cert, P, horizon, nodes);
  r.bochner_residual = op_norm(X - integral);
  r.bochner_residual_rel = r.bochner_residual / (1.0 + op_norm(X));
  r.trace_X = X.trace();
  r.trace_bound = cert.M * cert.M / (2.0 * cert.alpha) * Q.trace();
  r.trace_bound_holds = r.trace_X <= r.trace_bound + 1e-9;
  r.symmetric = is_symmetric(X);
  r.psd = is_psd(X);
  sol.bochner_residual = r.bochner_residual;
  return r;
}

}  // namespace rplace
