#include "rplace/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rplace/errors.hpp"

namespace rplace {
namespace {

constexpr int kSupGridPoints = 1000;
constexpr int kCheckGridPoints = 500;
constexpr double kAlphaFactor = 0.95;
constexpr double kHeadroom = 1.01;
constexpr double kHorizonFactor = 20.0;

// t = 0 plus log-spaced points from 1e-4 * horizon to horizon.
std::vector<double> sup_grid(double horizon) {
  std::vector<double> t(kSupGridPoints);
  t[0] = 0.0;
  const double lo = std::log(1e-4 * horizon), hi = std::log(horizon);
  for (int i = 1; i < kSupGridPoints; ++i) {
    t[i] = std::exp(lo + (hi - lo) * (i - 1) / (kSupGridPoints - 2));
  }
  return t;
}

// ||exp(At)||_op for each t. Symmetric generators use the spectral formula.
std::vector<double> propagator_norms(const Matrix& A, const std::vector<double>& ts) {
  std::vector<double> out(ts.size());
  if (is_symmetric(A)) {
    const double lmax = spectral_abscissa(A);
    for (size_t i = 0; i < ts.size(); ++i) out[i] = std::exp(lmax * ts[i]);
    return out;
  }
  for (size_t i = 0; i < ts.size(); ++i) out[i] = op_norm(matrix_exponential(A, ts[i]));
  return out;
}

}  // namespace

std::vector<double> verification_grid(double horizon) {
  // Log-spaced, shifted half a step against the sup grid so no point repeats.
  std::vector<double> t(kCheckGridPoints);
  const double lo = std::log(1.5e-4 * horizon), hi = std::log(horizon);
  for (int i = 0; i < kCheckGridPoints; ++i) {
    t[i] = std::exp(lo + (hi - lo) * (i + 0.5) / kCheckGridPoints);
  }
  return t;
}

StabilityCertificate certify_stability(const Matrix& A) {
  require_square(A, "generator");
  require_finite(A, "generator");
  const double sigma = spectral_abscissa(A);
  if (!(sigma < 0.0)) {
    throw UnstableGenerator("generator is not exponentially stable (spectral abscissa " +
                                std::to_string(sigma) + ")",
                            sigma);
  }
  StabilityCertificate cert;
  cert.alpha = kAlphaFactor * (-sigma);
  cert.sample_horizon = kHorizonFactor / cert.alpha;
  cert.sample_count = kSupGridPoints;

  const auto ts = sup_grid(cert.sample_horizon);
  const auto ns = propagator_norms(A, ts);
  double sup = 1.0;
  for (size_t i = 0; i < ts.size(); ++i) sup = std::max(sup, ns[i] * std::exp(cert.alpha * ts[i]));
  cert.M = sup * kHeadroom;

  // Fresh grid: if some point between the sup samples exceeds the bound, widen M.
  const double worst = certificate_violation(cert, A);
  if (worst > 1.0 + 1e-9) cert.M *= worst * kHeadroom;
  return cert;
}

double certificate_violation(const StabilityCertificate& cert, const Matrix& A) {
  const auto ts = verification_grid(cert.sample_horizon);
  const auto ns = propagator_norms(A, ts);
  double worst = 0.0;
  for (size_t i = 0; i < ts.size(); ++i) {
    worst = std::max(worst, ns[i] / (cert.M * std::exp(-cert.alpha * ts[i])));
  }
  return worst;
}

PerturbedCertificate perturbed_certificate(const StabilityCertificate& cert, const Matrix& A,
                                           const Matrix& K) {
  require_square(K, "perturbation");
  if (K.rows() != A.rows()) throw DimensionMismatch("perturbation must match the generator");
  if (!is_psd(K)) throw InvalidArgument("perturbation must be symmetric positive semi-definite");
  const Matrix Ak = A - K;
  PerturbedCertificate out;
  out.certificate = certify_stability(Ak);
  // Check the old constants on the (longer) of the two horizons.
  StabilityCertificate probe = cert;
  probe.sample_horizon = std::max(cert.sample_horizon, out.certificate.sample_horizon);
  out.unperturbed_violation = certificate_violation(probe, Ak);
  out.unperturbed_constants_hold = out.unperturbed_violation <= 1.0 + 1e-9;
  return out;
}

StabilityCertificate envelope(const std::vector<StabilityCertificate>& certs) {
  if (certs.empty()) throw InvalidArgument("envelope of an empty certificate list");
  StabilityCertificate e = certs.front();
  for (const auto& c : certs) {
    e.M = std::max(e.M, c.M);
    e.alpha = std::min(e.alpha, c.alpha);
    e.sample_horizon = std::max(e.sample_horizon, c.sample_horizon);
    e.sample_count = std::max(e.sample_count, c.sample_count);
  }
  return e;
}

}  // namespace rplace
