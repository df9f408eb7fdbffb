#include <algorithm>
#include <cmath>
#include <exception>
#include <random>

#include "rplace/dual.hpp"
#include "rplace/errors.hpp"
#include "rplace/optimize.hpp"
#include "rplace/riccati.hpp"

namespace rplace {
namespace {

struct PairRecord {
  double dp = 0.0;
  double dX_schatten = 0.0;
  double dX_trace = 0.0;
  double dLambda_op = 0.0;
};

struct Solved {
  Matrix X;
  Matrix Lambda;
};

Solved solve_at(const ProblemConfig& cfg, const Vector& p) {
  const Matrix G = eval_G(*cfg.family, p);
  RiccatiOptions ro;
  ro.certificate = cfg.certificate;
  Solved s;
  s.X = solve_are(cfg.A, G, cfg.Q, ro).X;
  s.Lambda = solve_dual(cfg.A, G, s.X, cfg.W, false).Lambda;
  return s;
}

// Even pairs are close (1e-3 to 1e-1 of the diameter), odd pairs independent.
PairRecord evaluate_pair(const ProblemConfig& cfg, const Box& domain, std::uint64_t seed, int i) {
  const Vector p1 = sample_box(domain, seed, 2 * static_cast<std::uint64_t>(i));
  Vector p2;
  if (i % 2 == 0) {
    std::mt19937_64 rng(split_seed(seed, 2 * static_cast<std::uint64_t>(i) + 1));
    std::normal_distribution<double> nd;
    Vector u(domain.dim());
    for (int j = 0; j < domain.dim(); ++j) u(j) = nd(rng);
    const double e = -3.0 + 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double h = std::max(domain.diameter(), 1e-12) * std::pow(10.0, e);
    p2 = domain.clamp(p1 + h * u / std::max(u.norm(), 1e-300));
  } else {
    p2 = sample_box(domain, seed, 2 * static_cast<std::uint64_t>(i) + 1);
  }
  const Solved a = solve_at(cfg, p1), b = solve_at(cfg, p2);
  PairRecord r;
  r.dp = (p1 - p2).norm();
  const Matrix dX = a.X - b.X;
  r.dX_schatten = schatten1_norm(dX);
  r.dX_trace = std::abs(dX.trace());
  r.dLambda_op = op_norm(a.Lambda - b.Lambda);
  return r;
}

}  // namespace

LipschitzReport check_lipschitz_lemmas(const ProblemConfig& cfg_in, const ConstantLedger& L,
                                       const Box& domain, int pairs, std::uint64_t seed,
                                       Execution exec) {
  ProblemConfig cfg = cfg_in;
  prepare(cfg);
  if (pairs < 1) throw InvalidArgument("need at least one pair");
  if (domain.dim() != cfg.family->param_dim()) throw DimensionMismatch("domain dimension != param_dim");

  std::vector<PairRecord> rec(pairs);
  if (exec == Execution::parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < pairs; ++i) {
      try {
        rec[i] = evaluate_pair(cfg, domain, seed, i);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (int i = 0; i < pairs; ++i) rec[i] = evaluate_pair(cfg, domain, seed, i);
  }

  const double M = L.M, a = L.alpha, q = L.trQ;
  const double cX = std::pow(M, 6) / (8 * std::pow(a, 3)) * q * q;
  const double cL = (std::pow(M, 10) * L.g_op / (16 * std::pow(a, 5)) * q * q +
                     std::pow(M, 6) / (4 * std::pow(a, 3)) * q) *
                    L.normW;

  auto reading = [&](const char* name, double LG, bool schatten) {
    LipschitzReading out;
    out.norm = name;
    for (const auto& r : rec) {
      if (r.dp == 0.0) continue;
      const double lhsX = schatten ? r.dX_schatten : r.dX_trace;
      out.worst_ratio_X = std::max(out.worst_ratio_X, lhsX / (LG * cX * r.dp));
      out.worst_ratio_Lambda = std::max(out.worst_ratio_Lambda, r.dLambda_op / (LG * cL * r.dp));
    }
    out.X_holds = out.worst_ratio_X <= 1.0 + 1e-9;
    out.Lambda_holds = out.worst_ratio_Lambda <= 1.0 + 1e-9;
    return out;
  };

  LipschitzReport rep;
  rep.pairs = pairs;
  rep.abs_trace = reading("abs_trace", L.L_G_trace, false);
  rep.schatten = reading("schatten", L.L_G, true);
  if (rep.schatten.X_holds && rep.schatten.Lambda_holds) {
    rep.passing_norm = "schatten";
  } else if (rep.abs_trace.X_holds && rep.abs_trace.Lambda_holds) {
    rep.passing_norm = "abs_trace";
  } else {
    rep.passing_norm = "none";
  }
  return rep;
}

}  // namespace rplace
