// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "families.hpp"
#include "oracles.hpp"
#include "rplace/cli.hpp"
#include "rplace/dual.hpp"
#include "rplace/errors.hpp"
#include "rplace/model.hpp"
#include "rplace/optimize.hpp"
#include "rplace/quadrature.hpp"
#include "rplace/riccati.hpp"
#include "rplace/sweep.hpp"

using namespace rplace;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vector v1(double x) { return Vector::Constant(1, x); }

template <class Cfg>
Cfg heat(int actuators, double beta) {
  const auto m = heat1d(16, 0.05, 1.0);
  Cfg c;
  c.A = m.A;
  c.Q = Matrix::Identity(16, 16);
  c.W = weight_preset("rank1:4", 16, "W");
  c.family = std::make_shared<GaussianActuators>(m.grid, 0.1, 1.0, actuators);
  c.beta = beta;
  c.domain = Box{Vector::Constant(actuators, m.grid(0)), Vector::Constant(actuators, m.grid(15))};
  return c;
}

Problem2Config heat_p2(int actuators, double beta) {
  auto c = heat<Problem2Config>(actuators, beta);
  c.gamma = 2.2;
  return c;
}

ConstantLedger heat_ledger(const ProblemConfig& c, double beta, double gamma, std::uint64_t seed) {
  const LedgerInputs in{c.A, c.Q, c.W, beta, gamma};
  return estimate_constants(*c.family, *c.domain, 100, seed, in);
}

// ---- shared random ARE instances for criteria 2-5 ----

struct AreInstance {
  Matrix A, G, Q, W;
};

const std::vector<AreInstance>& are_instances() {
  static const std::vector<AreInstance> list = [] {
    std::vector<AreInstance> out;
    std::mt19937_64 rng(20240601);
    for (int n : {4, 8, 16, 32, 50}) {
      for (int k = 0; k < 10; ++k) {
        AreInstance I;
        I.A = oracle::stable_symmetric(rng, n, 0.2, 4.0);
        I.G = oracle::psd(rng, n, std::max(1, n / 2));
        I.Q = oracle::psd(rng, n, n);
        I.W = oracle::psd(rng, n, std::max(1, n / 3));
        out.push_back(std::move(I));
      }
    }
    return out;
  }();
  return list;
}

Outcome c1_scalar() {
  const Matrix A = Matrix::Constant(1, 1, -1), G = Matrix::Constant(1, 1, 1), Q = Matrix::Constant(1, 1, 3);
  double best = std::numeric_limits<double>::infinity(), err = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto sol = solve_are(A, G, Q, 1e-11);
    best = std::min(best, seconds_since(t0));
    err = std::abs(sol.X(0, 0) - 1.0);
  }
  return {err <= 1e-12 && best < 1e-3, fmt("|X-1| = %.2e, fastest solve %.1f us", err, best * 1e6)};
}

Outcome c2_residuals() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_res = 0, worst_oracle = 0;
  int worst_iters = 0;
  bool ok = true;
  for (const auto& I : are_instances()) {
    const auto sol = solve_are(I.A, I.G, I.Q, 1e-11);
    const double rel = sol.strong_residual / (1 + op_norm(I.Q));
    worst_res = std::max(worst_res, rel);
    worst_iters = std::max(worst_iters, sol.newton_iters);
    ok = ok && rel <= 1e-10 && sol.newton_iters <= 30;
    if (I.A.rows() <= 10) {
      const Matrix Xh = oracle::riccati_hamiltonian(I.A, I.G, I.Q);
      const double d = oracle::op_norm(sol.X - Xh) / (1 + oracle::op_norm(Xh));
      worst_oracle = std::max(worst_oracle, d);
      ok = ok && d <= 1e-8;
    }
  }
  const double t = seconds_since(t0);
  return {ok && t < 30, fmt("50 instances: max rel residual %.2e, max Newton iters %d, max Hamiltonian gap %.2e, %.2f s",
                            worst_res, worst_iters, worst_oracle, t)};
}

Outcome c3_bochner() {
  double worst = 0;
  int count = 0;
  for (const auto& I : are_instances()) {
    if (I.A.rows() > 10) continue;
    auto sol = solve_are(I.A, I.G, I.Q, 1e-11);
    const auto v = verify_are(I.A, I.G, I.Q, sol, sol.certificate, 20.0 / sol.certificate.alpha, 200);
    worst = std::max(worst, v.bochner_residual_rel);
    ++count;
  }
  return {worst <= 1e-6, fmt("%d instances with n <= 10: max relative Bochner residual %.2e", count, worst)};
}

Outcome c4_trace_bound() {
  int holds = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  for (const auto& I : are_instances()) {
    const auto sol = solve_are(I.A, I.G, I.Q, 1e-11);
    min_slack = std::min(min_slack, sol.trace_bound_slack);
    holds += sol.trace_bound_slack >= -1e-9;
  }
  const int n = static_cast<int>(are_instances().size());
  return {holds == n, fmt("%d/%d instances satisfy tr X <= M^2/(2 alpha) tr Q; min slack %.3e", holds, n, min_slack)};
}

Outcome c5_dual_bound() {
  int holds = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  for (const auto& I : are_instances()) {
    const auto sol = solve_are(I.A, I.G, I.Q, 1e-11);
    const auto d = solve_dual(I.A, I.G, sol.X, I.W, true);
    min_slack = std::min(min_slack, d.norm_bound_slack);
    holds += d.norm_bound_slack >= -1e-9 && is_psd(d.Lambda);
  }
  const int n = static_cast<int>(are_instances().size());
  return {holds == n, fmt("%d/%d instances: Lambda PSD and within M^2/(2 alpha)||W||; min slack %.3e", holds, n, min_slack)};
}

Outcome c6_sylvester() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> dim(1, 10);
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    const int n1 = dim(rng), n2 = dim(rng);
    const Matrix A1 = oracle::stable_general(rng, n1, 0.3);
    const Matrix A2 = oracle::stable_general(rng, n2, 0.3);
    const Matrix P = oracle::gaussian(rng, n1, n2);
    const Matrix T = solve_sylvester(A1, A2, P);
    const auto c1 = certify_stability(A1), c2 = certify_stability(A2);
    const double H = 20.0 / std::min(c1.alpha, c2.alpha);
    const Matrix Tq = bochner_quadrature(A1, c1, A2, c2, P, H, 400);
    worst = std::max(worst, op_norm(T - Tq) / op_norm(T));
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-6 && t < 20, fmt("100 triples: max relative gap %.2e, %.2f s", worst, t)};
}

Outcome c7_lipschitz() {
  const auto c = heat_p2(1, 1000.0);
  const auto L = heat_ledger(c, 1000.0, 2.2, 7);
  const auto rep = check_lipschitz_lemmas(c, L, *c.domain, 200, 77);
  const bool ok = rep.passing_norm != "none";
  return {ok, fmt("200 pairs; worst lhs/rhs: X %.3e (schatten) %.3e (|tr|), Lambda %.3e / %.3e; passing norm: %s",
                  rep.schatten.worst_ratio_X, rep.abs_trace.worst_ratio_X, rep.schatten.worst_ratio_Lambda,
                  rep.abs_trace.worst_ratio_Lambda, rep.passing_norm.c_str())};
}

Outcome c8_contraction() {
  const auto t0 = std::chrono::steady_clock::now();
  auto c = heat<Problem1Config>(1, 1.0);
  const auto L0 = heat_ledger(c, 1.0, 0.0, 7);
  const double threshold = contraction_constant_p1(L0).beta_threshold;
  ConstantLedger L = L0;
  L.beta = 2 * threshold;
  const auto rep = contraction_constant_p1(L);
  c.beta = L.beta;
  c.damping = 1.0;
  const auto ms = multistart_p1(c, random_starts(*c.domain, 10, 88), 1e-8);
  int converged = 0, ratios = 0;
  double worst_ratio = 0;
  for (const auto& r : ms.runs) {
    if (!r || !r->converged) continue;
    ++converged;
    const auto& h = r->history;
    for (size_t k = 2; k < h.size(); ++k) {
      const double den = (h[k - 1] - h[k - 2]).norm();
      if (den == 0.0) continue;
      worst_ratio = std::max(worst_ratio, (h[k] - h[k - 1]).norm() / den);
      ++ratios;
    }
  }
  const double t = seconds_since(t0);
  const bool ok = rep.is_contraction && converged == 10 && ms.max_spread <= 1e-8 &&
                  worst_ratio <= rep.k + 0.05 && t < 60;
  return {ok, fmt("beta = %.4e, k = %.3f; %d/10 converged, spread %.2e, max ratio %.2e over %d steps, %.2f s",
                  c.beta, rep.k, converged, ms.max_spread, worst_ratio, ratios, t)};
}

// Fourth-order central difference of the reduced cost along e_j.
template <class F>
Vector fd_gradient(F&& f, const Vector& p, double h) {
  Vector g(p.size());
  for (Index j = 0; j < p.size(); ++j) {
    Vector e = Vector::Zero(p.size());
    e(j) = h;
    g(j) = (8 * (f(p + e) - f(p - e)) - (f(p + 2 * e) - f(p - 2 * e))) / (12 * h);
  }
  return g;
}

Outcome c9_gradients() {
  auto c1 = heat<Problem1Config>(2, 100.0);
  auto c2 = heat_p2(2, 100.0);
  c2.gamma = 4.0;
  prepare(c1);
  prepare(c2);
  double worst1 = 0, worst2 = 0;
  for (int i = 0; i < 20; ++i) {
    const Vector p = sample_box(*c1.domain, 99, i);
    const auto s = evaluate_point(c1, p);
    const Vector g1 = gradient_p1(c1, s), g2 = gradient_p2(c2, s);
    const Vector f1 = fd_gradient([&](const Vector& x) { return cost_p1(c1, x); }, p, 1e-4);
    const Vector f2 = fd_gradient([&](const Vector& x) { return cost_p2(c2, x); }, p, 1e-4);
    worst1 = std::max(worst1, (f1 - g1).norm() / g1.norm());
    worst2 = std::max(worst2, (f2 - g2).norm() / g2.norm());
  }
  return {worst1 <= 1e-5 && worst2 <= 1e-5,
          fmt("20 points, 2 actuators: max relative gap %.2e (problem 1), %.2e (problem 2)", worst1, worst2)};
}

Outcome c10_trace_law() {
  const auto c = heat_p2(1, 10.0);
  const auto rep = beta_sweep(c, {10, 100, 1000, 10000}, v1(-0.3));
  bool ok = true;
  std::string rows;
  for (const auto& e : rep.entries) {
    const bool law = e.converged && e.trace_gap <= e.xlx / e.beta;
    ok = ok && law;
    rows += fmt(" beta=%g gap*beta/||XLX||=%.3f;", e.beta, e.converged ? e.trace_gap * e.beta / e.xlx : NAN);
  }
  ok = ok && std::abs(rep.slope + 1.0) <= 0.1;
  return {ok, fmt("slope %.4f;", rep.slope) + rows};
}

Outcome c11_grid() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto c = heat_p2(1, 1000.0);
  const auto grid = grid_search_p2(c, *c.domain, 10000);
  const auto ms = multistart_p2(c, random_starts(*c.domain, 10, 1111), 1e-6);
  if (ms.best_cluster < 0) return {false, "no multistart run converged"};
  const double p = ms.clusters[ms.best_cluster](0);
  const double t = seconds_since(t0);
  const double gap = std::abs(p - grid.p(0));
  return {gap <= grid.cell && t < 120,
          fmt("solver p* = %.6f (%zu distinct limits), grid argmin %.6f, |diff| = %.2e vs cell %.2e, %.2f s", p,
              ms.clusters.size(), grid.p(0), gap, grid.cell, t)};
}

template <class F>
double fd_curvature(F&& f, const Vector& p, const Vector& q, double h) {
  return (-f(p + 2 * h * q) + 16 * f(p + h * q) - 30 * f(p) + 16 * f(p - h * q) - f(p - 2 * h * q)) /
         (12 * h * h);
}

// Smallest beta on a log grid (refined by bisection) with a positive
// cone-restricted Hessian at the solution started from p0.
double empirical_threshold(const std::function<double(double)>& min_eig) {
  double prev = 0.0;
  for (double b = 1e-3; b <= 1e9; b *= std::sqrt(10.0)) {
    if (min_eig(b) > 0) {
      if (prev == 0.0) return b;
      double lo = prev, hi = b;
      for (int k = 0; k < 50; ++k) {
        const double mid = std::sqrt(lo * hi);
        (min_eig(mid) > 0 ? hi : lo) = mid;
      }
      return hi;
    }
    prev = b;
  }
  return std::numeric_limits<double>::infinity();
}

Outcome c12_second_order() {
  std::mt19937_64 rng(1212);
  std::normal_distribution<double> nd;
  bool ok = true;
  std::string detail;

  // Problem 1: G_p = p^2, A = -1, Q = 3, W = 1; stationary point p = 0.
  {
    Problem1Config c;
    c.A = Matrix::Constant(1, 1, -1);
    c.Q = Matrix::Constant(1, 1, 3);
    c.W = Matrix::Constant(1, 1, 1);
    c.family = std::make_shared<doubles::SquareFamily>(Matrix::Constant(1, 1, 1));
    auto at = [&](double beta) {
      c.beta = beta;
      return solve_p1(c, v1(0.0));
    };
    const double thr = empirical_threshold([&](double b) { return cone_min_eigenvalue_p1(c, at(b)); });
    const auto t = at(2 * thr);
    const auto basis = critical_cone_basis(*c.family, t.p, t.X);
    int positive = 0;
    double fd_err = 0;
    for (int k = 0; k < 100; ++k) {
      Vector q = Vector::Zero(1);
      for (const auto& b : basis) q += nd(rng) * b;
      q.normalize();
      positive += hessian_p1(c, t, q, q) > 0;
    }
    for (const auto& q : basis) {
      const double h = hessian_p1(c, t, q, q);
      const double fd = fd_curvature([&](const Vector& x) { return cost_p1(c, x); }, t.p, q, 1e-3);
      fd_err = std::max(fd_err, std::abs(fd - h) / std::abs(h));
    }
    ok = ok && !basis.empty() && positive == 100 && fd_err <= 1e-4;
    detail += fmt("P1 scalar: threshold %.4f, %d/100 positive at 2x, FD gap %.1e; ", thr, positive, fd_err);
  }
  // Problem 2: A = diag(-1,-2), Q = diag(3,0), G_p = diag(1, e^p), W = I.
  {
    Problem2Config c;
    c.A = Matrix::Zero(2, 2);
    c.A.diagonal() << -1, -2;
    c.Q = Matrix::Zero(2, 2);
    c.Q(0, 0) = 3;
    c.W = Matrix::Identity(2, 2);
    c.gamma = 3.0;
    c.family = std::make_shared<doubles::DiagonalFamily>();
    auto at = [&](double beta) {
      c.beta = beta;
      return solve_p2(c, v1(0.0));
    };
    const double thr = empirical_threshold([&](double b) { return cone_min_eigenvalue_p2(c, at(b)); });
    const auto t = at(2 * thr);
    const auto basis = critical_cone_basis(*c.family, t.p, t.X);
    int positive = 0;
    double fd_err = 0;
    for (int k = 0; k < 100; ++k) {
      Vector q = Vector::Zero(1);
      for (const auto& b : basis) q += nd(rng) * b;
      q.normalize();
      positive += hessian_p2(c, t, q) > 0;
    }
    for (const auto& q : basis) {
      const double h = hessian_p2(c, t, q);
      const double fd = fd_curvature([&](const Vector& x) { return cost_p2(c, x); }, t.p, q, 1e-3);
      fd_err = std::max(fd_err, std::abs(fd - h) / std::abs(h));
    }
    ok = ok && !basis.empty() && positive == 100 && fd_err <= 1e-4;
    const std::string thr_text = thr <= 1e-3 ? std::string("positive at every scanned beta >= 1e-3")
                                              : fmt("threshold %.4g", thr);
    detail += fmt("P2 diagonal: %s, %d/100 positive at 2x, FD gap %.1e; ", thr_text.c_str(), positive, fd_err);
  }
  // Heat model: X is positive definite, so the cone is {0}.
  {
    const auto c = heat_p2(1, 1000.0);
    const auto t = solve_p2(c, v1(-0.3));
    const auto basis = critical_cone_basis(*c.family, t.p, t.X);
    detail += fmt("heat1d cone dimension %zu", basis.size());
  }
  return {ok, detail};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome c13_determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "rplace_acceptance";
  fs::remove_all(root);
  auto cfg = cli::parse_config(R"({
    "model": {"kind": "heat1d", "n": 16, "diffusivity": 0.05, "domain_length": 1.0},
    "device": {"kind": "gaussian_actuator", "sigma": 0.1, "r_weight": 1.0},
    "problem": {"variant": 2, "beta": 1000, "gamma": 2.2, "W": "rank1:4", "Q": "identity"},
    "solver": {"seed": 31, "multistart": 4, "betas": [10, 100, 1000]}
  })");
  int files = 0;
  bool same = true;
  for (auto cmd : {cli::Command::optimize, cli::Command::sweep_beta}) {
    const auto a = root / ("a_" + cli::command_name(cmd)), b = root / ("b_" + cli::command_name(cmd));
    if (cli::run(cfg, cmd, a.string()) != 0 || cli::run(cfg, cmd, b.string()) != 0) return {false, "run failed"};
    for (const auto& entry : fs::directory_iterator(a)) {
      ++files;
      same = same && slurp(entry.path()) == slurp(b / entry.path().filename());
    }
  }
  fs::remove_all(root);
  return {same && files >= 3, fmt("%d report files compared across repeated runs: %s", files,
                                  same ? "byte-identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"scalar ARE exactness", c1_scalar},
      {"ARE residuals at scale", c2_residuals},
      {"Bochner equivalence", c3_bochner},
      {"trace bound", c4_trace_bound},
      {"dual bound", c5_dual_bound},
      {"Sylvester oracle equivalence", c6_sylvester},
      {"Lipschitz lemmas", c7_lipschitz},
      {"problem 1 contraction and uniqueness", c8_contraction},
      {"gradient fidelity", c9_gradients},
      {"problem 2 constraint law", c10_trace_law},
      {"global check vs brute force", c11_grid},
      {"second-order conditions", c12_second_order},
      {"determinism", c13_determinism},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %2zu %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
