#pragma once

#include <vector>

#include "rplace/linalg.hpp"
#include "rplace/semigroup.hpp"

namespace rplace {

struct GaussRule {
  std::vector<double> nodes;    ///< on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, nodes ascending.
GaussRule gauss_legendre(int n);

/// Panel edges used for a quadrature on [0, horizon] with `nodes` total
/// points (16 per panel). Panels grow geometrically from a first width of
/// min(horizon/P, 1/(||A1|| + ||A2||)) so fast transients are resolved.
std::vector<double> quadrature_panels(double horizon, int nodes, double generator_scale);

/// Returns -int_0^horizon exp(A1 t) P exp(A2^T t) dt.
///
/// Throws HorizonTooShort when M1 M2 ||P|| e^{-(a1+a2) H} / (a1+a2) > 1e-8,
/// the discarded tail bound.
Matrix bochner_quadrature(const Matrix& A1, const Matrix& A2, const Matrix& P, double horizon,
                          int nodes);

/// Same, with caller-supplied certificates for A1 and A2.
Matrix bochner_quadrature(const Matrix& A1, const StabilityCertificate& c1, const Matrix& A2,
                          const StabilityCertificate& c2, const Matrix& P, double horizon,
                          int nodes);

/// Analytic tail bound for the truncated integral.
double bochner_tail_bound(const StabilityCertificate& c1, const StabilityCertificate& c2,
                          double normP, double horizon);

}  // namespace rplace
