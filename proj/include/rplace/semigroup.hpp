#pragma once

#include <vector>

#include "rplace/linalg.hpp"

namespace rplace {

/// Constants with ||exp(A t)||_op <= M exp(-alpha t) on the sampled horizon.
struct StabilityCertificate {
  double M = 1.0;
  double alpha = 0.0;
  double sample_horizon = 0.0;
  int sample_count = 0;
};

/// alpha = 0.95 * (-abscissa(A)); M is the sup of ||exp(At)|| e^{alpha t}
/// over a log-spaced grid on [0, 20/alpha] with 1% headroom, then checked on a
/// second, interleaved grid. Throws UnstableGenerator if abscissa(A) >= 0.
StabilityCertificate certify_stability(const Matrix& A);

/// Largest sampled ||exp(At)||_op / (M e^{-alpha t}) on the verification grid
/// of `cert`. Values <= 1 + 1e-9 mean the certificate holds for A.
double certificate_violation(const StabilityCertificate& cert, const Matrix& A);

struct PerturbedCertificate {
  StabilityCertificate certificate;  ///< fresh certificate for A - K
  /// Whether the constants of the unperturbed certificate still bound
  /// ||exp((A-K)t)|| on the sample grid.
  bool unperturbed_constants_hold = false;
  double unperturbed_violation = 0.0;
};

PerturbedCertificate perturbed_certificate(const StabilityCertificate& cert, const Matrix& A,
                                           const Matrix& K);

/// Smallest (M, alpha) pair valid for every certificate in the list:
/// max of M and min of alpha.
StabilityCertificate envelope(const std::vector<StabilityCertificate>& certs);

/// Verification grid used by the certificate checks: 500 points on [0, horizon].
std::vector<double> verification_grid(double horizon);

}  // namespace rplace
