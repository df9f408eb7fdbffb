#include <cmath>
#include <limits>

#include "rplace/errors.hpp"
#include "rplace/optimize.hpp"

namespace rplace {
namespace {

void check_ledger(const ConstantLedger& L) {
  if (!(L.alpha > 0.0)) throw InvalidArgument("ledger alpha must be > 0");
  if (!(L.beta > 0.0)) throw InvalidArgument("ledger beta must be > 0");
  if (!(L.M >= 1.0)) throw InvalidArgument("ledger M must be >= 1");
}

void finish(ContractionReport& r) {
  r.k = 0.0;
  for (const auto& [label, v] : r.term_breakdown) r.k += v;
  r.is_contraction = r.k < 1.0;
}

}  // namespace

ContractionReport contraction_constant_p1(const ConstantLedger& L) {
  check_ledger(L);
  const double M = L.M, a = L.alpha, q = L.trQ, w = L.normW;
  const double M4 = std::pow(M, 4), M6 = std::pow(M, 6), M10 = std::pow(M, 10);
  ContractionReport r;
  r.term_breakdown = {
      {"dG_lipschitz", L.L_dG * M6 / (16 * std::pow(a, 3)) * q * q * w / L.beta},
      {"X_difference", L.L_dG * L.C_dG * M10 / (16 * std::pow(a, 5)) * q * q * q * w / L.beta},
      {"Lambda_difference", L.L_G * L.C_dG * M4 / (2 * a * a) * q * q *
                                (M10 * L.g / (16 * std::pow(a, 5)) * q * q +
                                 M6 / (4 * std::pow(a, 3)) * q) *
                                w / L.beta},
  };
  finish(r);
  // k is proportional to 1/beta.
  r.beta_threshold = L.beta * r.k;
  return r;
}

ContractionReport contraction_constant_p2(const ConstantLedger& L) {
  check_ledger(L);
  if (!(L.mu > 0.0)) throw InvalidArgument("ledger mu must be > 0");
  const double M = L.M, a = L.alpha, q = L.trQ, w = L.normW, mu = L.mu;
  const double M4 = std::pow(M, 4), M6 = std::pow(M, 6), M10 = std::pow(M, 10);
  const double a2 = a * a, a3 = std::pow(a, 3), a5 = std::pow(a, 5);
  const double q2 = q * q, q3 = q2 * q, q4 = q2 * q2;

  // k is affine in gamma_beta: k = base + slope * gamma_beta.
  auto blocks = [&](double gb) {
    const double kI = L.L_G * M10 / (16 * a5 * mu) * q3 * w +
                      L.L_G * M4 / (4 * a2 * mu * mu) * (M10 * gb / (16 * a5) * q4 + M6 / (4 * a3) * q3);
    const double I = L.K * L.C_dG * L.C_dG * M6 / (8 * a) * q2 * w * kI;
    const double L_II = 2 * L.K * L.K * L.C_dG * L.L_dG;
    const double II = L.C_dG * L.C_dG * M6 / (8 * a3 * mu) * q2 * w * L_II;
    const double kIII =
        L.C_dG * (L.L_dG * M6 / (16 * a3) * q2 * w + L.L_dG * L.C_dG * M10 / (16 * a5) * q3 * w +
                  L.L_G * L.C_dG * M4 / (2 * a2) * q2 * (M10 * gb / (16 * a5) * q2 + M6 / (4 * a3) * q)) +
        L.C_dG * L.L_dG * M6 / (8 * a3) * q2 * w;
    const double III = L.K / mu * kIII;
    const double tail = L.K * L.C_dG * L.C_dG * M6 / (8 * a3 * mu);
    return std::vector<std::pair<std::string, double>>{
        {"I_difference", I}, {"II_inverse_lipschitz", II}, {"III_difference", III}, {"tail", tail}};
  };
  const double gb = L.gamma + L.xlx_sup / L.beta;
  ContractionReport r;
  r.term_breakdown = blocks(gb);
  finish(r);

  auto total = [&](double g) {
    double s = 0.0;
    for (const auto& [label, v] : blocks(g)) s += v;
    return s;
  };
  const double base = total(0.0);
  const double slope = total(1.0) - base;
  const double limit = base + slope * L.gamma;  // beta -> infinity
  if (limit >= 1.0) {
    r.beta_threshold = std::numeric_limits<double>::infinity();
  } else if (slope * L.xlx_sup <= 0.0) {
    // k does not depend on beta.
    r.beta_threshold = std::numeric_limits<double>::min();
  } else {
    r.beta_threshold = slope * L.xlx_sup / (1.0 - limit);
  }
  return r;
}

}  // namespace rplace
