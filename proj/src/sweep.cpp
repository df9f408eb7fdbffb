#include "rplace/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "rplace/errors.hpp"

namespace rplace {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class Fn>
void for_each_index(int count, Execution exec, Fn&& fn) {
  if (exec == Execution::parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (int i = 0; i < count; ++i) fn(i);
  }
}

template <class Cfg, class Solve>
MultistartReport multistart(const Cfg& cfg_in, const std::vector<Vector>& starts, double radius,
                            Execution exec, Solve&& solve) {
  Cfg cfg = cfg_in;
  prepare(cfg);
  const int n = static_cast<int>(starts.size());
  MultistartReport rep;
  rep.starts = starts;
  rep.runs.resize(n);
  rep.failures.resize(n);
  for_each_index(n, exec, [&](int i) {
    try {
      rep.runs[i] = solve(cfg, starts[i]);
    } catch (const Error& e) {
      rep.failures[i] = e.what();
    }
  });
  // Clustering runs in input order, so the result does not depend on threads.
  rep.cluster_of.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    if (!rep.runs[i]) continue;
    const Vector& p = rep.runs[i]->p;
    int c = -1;
    for (size_t k = 0; k < rep.clusters.size(); ++k) {
      if ((rep.clusters[k] - p).norm() <= radius) {
        c = static_cast<int>(k);
        break;
      }
    }
    if (c < 0) {
      rep.clusters.push_back(p);
      rep.cluster_costs.push_back(rep.runs[i]->cost);
      c = static_cast<int>(rep.clusters.size()) - 1;
    }
    rep.cluster_of[i] = c;
    for (int j = 0; j < i; ++j) {
      if (rep.runs[j]) rep.max_spread = std::max(rep.max_spread, (rep.runs[j]->p - p).norm());
    }
  }
  for (size_t k = 0; k < rep.clusters.size(); ++k) {
    if (rep.best_cluster < 0 || rep.cluster_costs[k] < rep.cluster_costs[rep.best_cluster]) {
      rep.best_cluster = static_cast<int>(k);
    }
  }
  return rep;
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = std::min(x.size(), y.size());
  if (n < 2) return kNaN;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return kNaN;
  return (n * sxy - sx * sy) / den;
}

SweepReport beta_sweep(const Problem2Config& cfg_in, const std::vector<double>& betas,
                       const Vector& p0, const ConstantLedger* ledger) {
  if (betas.empty()) throw InvalidArgument("beta list is empty");
  for (size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] > 0.0)) throw InvalidArgument("betas must be positive");
    if (i > 0 && !(betas[i] > betas[i - 1])) throw InvalidArgument("betas must be ascending");
  }
  Problem2Config cfg = cfg_in;
  prepare(cfg);
  SweepReport rep;
  Vector start = p0;
  for (double beta : betas) {
    SweepEntry e;
    e.beta = beta;
    cfg.beta = beta;
    if (ledger) {
      ConstantLedger L = *ledger;
      L.beta = beta;
      L.gamma = cfg.gamma;
      e.contraction = contraction_constant_p2(L);
    }
    try {
      const OptimalityTriple t = solve_p2(cfg, start);
      const Matrix G = eval_G(*cfg.family, t.p);
      e.p = t.p;
      e.trace_G = G.trace();
      e.trace_gap = std::abs(e.trace_G - cfg.gamma);
      e.xlx = op_norm(t.X * t.Lambda * t.X);
      e.cost_state = (t.X * cfg.W).trace();
      e.cost_penalty = 0.5 * beta * (e.trace_G - cfg.gamma) * (e.trace_G - cfg.gamma);
      e.cost = e.cost_state + e.cost_penalty;
      e.stationarity = t.residual_stationarity;
      e.trace_law_residual = t.trace_law_residual;
      e.converged = t.converged;
      e.iterations = t.iterations;
      start = t.p;
    } catch (const MaxIterExceeded& ex) {
      e.failure = ex.what();
      e.p = ex.best_iterate();
    } catch (const Error& ex) {
      e.failure = ex.what();
      e.p = start;
    }
    rep.entries.push_back(std::move(e));
  }
  std::vector<double> xs, ys;
  rep.all_law_hold = true;
  for (const auto& e : rep.entries) {
    if (e.converged) rep.sup_xlx = std::max(rep.sup_xlx, e.xlx);
  }
  for (auto& e : rep.entries) {
    if (!e.converged) {
      rep.all_law_hold = false;
      continue;
    }
    e.law_holds = e.trace_gap <= rep.sup_xlx / e.beta;
    rep.all_law_hold = rep.all_law_hold && e.law_holds;
    if (e.trace_gap > 0.0) {
      xs.push_back(e.beta);
      ys.push_back(e.trace_gap);
    }
  }
  rep.slope = loglog_slope(xs, ys);
  return rep;
}

std::vector<Vector> random_starts(const Box& box, int count, std::uint64_t seed) {
  std::vector<Vector> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(sample_box(box, seed, static_cast<std::uint64_t>(i)));
  return out;
}

MultistartReport multistart_p1(const Problem1Config& cfg, const std::vector<Vector>& starts,
                               double cluster_radius, Execution exec) {
  return multistart(cfg, starts, cluster_radius, exec,
                    [](const Problem1Config& c, const Vector& p) { return solve_p1(c, p); });
}

MultistartReport multistart_p2(const Problem2Config& cfg, const std::vector<Vector>& starts,
                               double cluster_radius, Execution exec) {
  return multistart(cfg, starts, cluster_radius, exec,
                    [](const Problem2Config& c, const Vector& p) { return solve_p2(c, p); });
}

GridSearchResult grid_search_p2(const Problem2Config& cfg_in, const Box& box, int points,
                                Execution exec) {
  if (box.dim() != 1) throw InvalidArgument("grid search needs a one-dimensional box");
  if (points < 2) throw InvalidArgument("grid search needs at least two points");
  Problem2Config cfg = cfg_in;
  prepare(cfg);
  GridSearchResult r;
  r.cell = (box.hi(0) - box.lo(0)) / (points - 1);
  r.nodes.resize(points);
  r.costs.assign(points, kNaN);
  for (int i = 0; i < points; ++i) r.nodes[i] = box.lo(0) + i * r.cell;
  for_each_index(points, exec, [&](int i) {
    try {
      r.costs[i] = cost_p2(cfg, Vector::Constant(1, r.nodes[i]));
    } catch (const Error&) {
    }
  });
  int best = -1;
  for (int i = 0; i < points; ++i) {
    if (std::isnan(r.costs[i])) continue;
    if (best < 0 || r.costs[i] < r.costs[best]) best = i;
  }
  if (best < 0) throw Error("grid search: no grid point admits a state solution");
  r.p = Vector::Constant(1, r.nodes[best]);
  r.cost = r.costs[best];
  return r;
}

}  // namespace rplace
