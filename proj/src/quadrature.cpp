#include "rplace/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rplace/errors.hpp"

namespace rplace {
namespace {

constexpr int kPanelPoints = 16;
constexpr double kTailTolerance = 1e-8;

}  // namespace

GaussRule gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("Gauss-Legendre rule needs at least one node");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = n == 1 ? x : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

std::vector<double> quadrature_panels(double horizon, int nodes, double generator_scale) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidArgument("horizon must be positive");
  if (nodes < 1) throw InvalidArgument("quadrature needs at least one node");
  const int panels = (nodes + kPanelPoints - 1) / kPanelPoints;
  double first = horizon / panels;
  if (generator_scale > 0.0) first = std::min(first, 1.0 / generator_scale);

  double ratio = 1.0;
  auto covered = [&](double rho) {
    if (rho == 1.0) return first * panels;
    return first * (std::pow(rho, panels) - 1.0) / (rho - 1.0);
  };
  if (covered(1.0) < horizon) {
    double lo = 1.0, hi = 2.0;
    while (covered(hi) < horizon) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (covered(mid) < horizon ? lo : hi) = mid;
    }
    ratio = hi;
  }
  std::vector<double> edges(panels + 1);
  edges[0] = 0.0;
  double w = first;
  for (int i = 1; i <= panels; ++i) {
    edges[i] = edges[i - 1] + w;
    w *= ratio;
  }
  edges[panels] = horizon;
  return edges;
}

double bochner_tail_bound(const StabilityCertificate& c1, const StabilityCertificate& c2,
                          double normP, double horizon) {
  const double a = c1.alpha + c2.alpha;
  return c1.M * c2.M * normP * std::exp(-a * horizon) / a;
}

Matrix bochner_quadrature(const Matrix& A1, const Matrix& A2, const Matrix& P, double horizon,
                          int nodes) {
  const StabilityCertificate c1 = certify_stability(A1);
  const StabilityCertificate c2 = certify_stability(A2);
  return bochner_quadrature(A1, c1, A2, c2, P, horizon, nodes);
}

Matrix bochner_quadrature(const Matrix& A1, const StabilityCertificate& c1, const Matrix& A2,
                          const StabilityCertificate& c2, const Matrix& P, double horizon,
                          int nodes) {
  require_square(A1, "A1");
  require_square(A2, "A2");
  require_finite(P, "quadrature data");
  if (P.rows() != A1.rows() || P.cols() != A2.rows()) {
    throw DimensionMismatch("quadrature data must be dim(A1) x dim(A2)");
  }
  const double normP = op_norm(P);
  const double tail = bochner_tail_bound(c1, c2, normP, horizon);
  if (tail > kTailTolerance) {
    throw HorizonTooShort("quadrature horizon " + std::to_string(horizon) +
                              " leaves a tail bound of " + std::to_string(tail),
                          tail);
  }
  Matrix acc = Matrix::Zero(P.rows(), P.cols());
  if (normP == 0.0) return acc;

  const GaussRule rule = gauss_legendre(kPanelPoints);
  const auto edges = quadrature_panels(horizon, nodes, op_norm(A1) + op_norm(A2));
  for (size_t k = 0; k + 1 < edges.size(); ++k) {
    const double a = edges[k], b = edges[k + 1];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < kPanelPoints; ++i) {
      const double t = mid + half * rule.nodes[i];
      const Matrix E1 = matrix_exponential(A1, t);
      const Matrix E2 = matrix_exponential(A2, t);
      acc.noalias() += (half * rule.weights[i]) * (E1 * P * E2.transpose());
    }
  }
  return -acc;
}

}  // namespace rplace
