#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rplace/optimize.hpp"

namespace rplace {

struct SweepEntry {
  double beta = 0.0;
  Vector p;
  double trace_G = 0.0;
  double trace_gap = 0.0;   ///< |tr G - gamma|
  double xlx = 0.0;         ///< ||X Lambda X||_op at the optimum
  double cost = 0.0;
  double cost_state = 0.0;  ///< tr(X W)
  double cost_penalty = 0.0;
  double stationarity = 0.0;
  double trace_law_residual = 0.0;
  std::optional<ContractionReport> contraction;
  bool converged = false;
  int iterations = 0;
  bool law_holds = false;   ///< trace_gap <= sup_xlx / beta
  std::string failure;      ///< empty on success
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  double sup_xlx = 0.0;   ///< over converged entries
  /// Least-squares slope of log(trace_gap) against log(beta) over converged
  /// entries with a positive gap; NaN with fewer than two.
  double slope = 0.0;
  bool all_law_hold = false;
};

/// Solves problem 2 at each beta in ascending order, warm-starting from the
/// previous optimum. With a ledger, each entry carries the contraction
/// report at its beta. Per-beta failures are recorded, not thrown.
SweepReport beta_sweep(const Problem2Config& cfg, const std::vector<double>& betas,
                       const Vector& p0, const ConstantLedger* ledger = nullptr);

/// Log-log least-squares slope.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// `count` points drawn from the box with split_seed(seed, i).
std::vector<Vector> random_starts(const Box& box, int count, std::uint64_t seed);

struct MultistartReport {
  std::vector<Vector> starts;
  std::vector<std::optional<OptimalityTriple>> runs;  ///< empty where the solve failed
  std::vector<std::string> failures;
  /// Distinct limits: a limit joins the first cluster whose representative
  /// is within `cluster_radius`.
  std::vector<Vector> clusters;
  std::vector<double> cluster_costs;
  std::vector<int> cluster_of;  ///< per run; -1 on failure
  int best_cluster = -1;        ///< lowest cost
  double max_spread = 0.0;      ///< largest distance between converged limits
};

MultistartReport multistart_p1(const Problem1Config& cfg, const std::vector<Vector>& starts,
                               double cluster_radius = 1e-6, Execution exec = Execution::parallel);
MultistartReport multistart_p2(const Problem2Config& cfg, const std::vector<Vector>& starts,
                               double cluster_radius = 1e-6, Execution exec = Execution::parallel);

struct GridSearchResult {
  Vector p;
  double cost = 0.0;
  double cell = 0.0;  ///< grid spacing
  std::vector<double> nodes;
  std::vector<double> costs;  ///< NaN where the state solve failed
};

/// cost_p2 on `points` equally spaced positions over a one-dimensional box.
GridSearchResult grid_search_p2(const Problem2Config& cfg, const Box& box, int points,
                                Execution exec = Execution::parallel);

}  // namespace rplace
