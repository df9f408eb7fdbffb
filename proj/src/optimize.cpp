#include "rplace/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rplace/dual.hpp"
#include "rplace/errors.hpp"
#include "rplace/riccati.hpp"

namespace rplace {
namespace {

void require_dim(const Matrix& T, Index n, const char* what) {
  if (T.rows() != n || T.cols() != n) {
    throw DimensionMismatch(std::string(what) + " must be " + std::to_string(n) + "x" +
                            std::to_string(n));
  }
}

const StabilityCertificate& certificate_of(const ProblemConfig& cfg) {
  if (!cfg.certificate) throw InvalidArgument("problem config has not been prepared");
  return *cfg.certificate;
}

ProblemConfig prepared(const ProblemConfig& cfg) {
  ProblemConfig c = cfg;
  prepare(c);
  return c;
}

Matrix solve_state(const ProblemConfig& cfg, const Matrix& G) {
  RiccatiOptions ro;
  ro.certificate = certificate_of(cfg);
  return solve_are(cfg.A, G, cfg.Q, ro).X;
}

Vector project(const ProblemConfig& cfg, const Vector& p) {
  return cfg.domain ? cfg.domain->clamp(p) : p;
}

PointState evaluate_prepared(const ProblemConfig& cfg, const Vector& p) {
  PointState s;
  s.p = p;
  s.G = eval_G(*cfg.family, p);
  RiccatiOptions ro;
  ro.certificate = certificate_of(cfg);
  const auto are = solve_are(cfg.A, s.G, cfg.Q, ro);
  s.X = are.X;
  s.residual_primal = are.strong_residual / (1.0 + op_norm(cfg.Q));
  const auto dual = solve_dual(cfg.A, s.G, s.X, cfg.W, false);
  s.Lambda = dual.Lambda;
  s.residual_dual = dual.residual / (1.0 + op_norm(cfg.W));
  s.XLX = s.X * s.Lambda * s.X;
  return s;
}

double trace_penalty_gap(const Problem2Config& cfg, const Matrix& G) { return G.trace() - cfg.gamma; }

// Size of the two terms whose difference is the gradient; the relative
// stationarity residual divides by it.
double scale_p1(const Problem1Config& cfg, const PointState& s) {
  const Vector v = adjoint_dG(*cfg.family, s.p, s.XLX);
  return std::max({1.0, cfg.beta * s.p.norm(), v.norm()});
}

double scale_p2(const Problem2Config& cfg, const PointState& s) {
  const Index n = s.G.rows();
  const Vector u = adjoint_dG(*cfg.family, s.p, Matrix::Identity(n, n));
  const Vector v = adjoint_dG(*cfg.family, s.p, s.XLX);
  return std::max({1.0, cfg.beta * std::abs(trace_penalty_gap(cfg, s.G)) * u.norm(), v.norm()});
}

OptimalityTriple make_triple(const PointState& s) {
  OptimalityTriple t;
  t.X = s.X;
  t.Lambda = s.Lambda;
  t.p = s.p;
  t.residual_primal = s.residual_primal;
  t.residual_dual = s.residual_dual;
  return t;
}

double cost_from_state_p2(const Problem2Config& cfg, const PointState& s) {
  const double gap = trace_penalty_gap(cfg, s.G);
  return (s.X * cfg.W).trace() + 0.5 * cfg.beta * gap * gap;
}

PointState state_of(const ProblemConfig& cfg, const OptimalityTriple& t) {
  PointState s;
  s.p = t.p;
  s.G = eval_G(*cfg.family, t.p);
  s.X = t.X;
  s.Lambda = t.Lambda;
  s.XLX = t.X * t.Lambda * t.X;
  s.residual_primal = t.residual_primal;
  s.residual_dual = t.residual_dual;
  return s;
}

}  // namespace

void prepare(ProblemConfig& cfg) {
  if (!cfg.family) throw InvalidArgument("problem config has no device family");
  require_square(cfg.A, "A");
  const Index n = cfg.A.rows();
  if (cfg.family->state_dim() != n) throw DimensionMismatch("device family state_dim != dim(A)");
  require_dim(cfg.Q, n, "Q");
  require_dim(cfg.W, n, "W");
  require_finite(cfg.A, "A");
  if (!is_psd(cfg.Q)) throw InvalidArgument("Q must be symmetric positive semi-definite");
  if (!is_psd(cfg.W)) throw InvalidArgument("W must be symmetric positive semi-definite");
  if (!(cfg.beta > 0.0) || !std::isfinite(cfg.beta)) throw InvalidArgument("beta must be > 0");
  if (!(cfg.tol > 0.0)) throw InvalidArgument("tol must be > 0");
  if (cfg.max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) throw InvalidArgument("damping must be in (0, 1]");
  if (cfg.domain && cfg.domain->dim() != cfg.family->param_dim()) {
    throw DimensionMismatch("domain dimension != param_dim");
  }
  if (!cfg.certificate) cfg.certificate = certify_stability(cfg.A);
}

PointState evaluate_point(const ProblemConfig& cfg, const Vector& p) {
  if (cfg.certificate) return evaluate_prepared(cfg, p);
  return evaluate_prepared(prepared(cfg), p);
}

// ---- Problem 1 ----

double cost_p1(const Problem1Config& cfg, const Vector& p) {
  const ProblemConfig c = cfg.certificate ? static_cast<const ProblemConfig&>(cfg) : prepared(cfg);
  const Matrix X = solve_state(c, eval_G(*c.family, p));
  return (X * c.W).trace() + 0.5 * c.beta * p.squaredNorm();
}

Vector gradient_p1(const Problem1Config& cfg, const PointState& s) {
  return cfg.beta * s.p - adjoint_dG(*cfg.family, s.p, s.XLX);
}

double stationarity_residual_p1(const Problem1Config& cfg, const OptimalityTriple& t) {
  return (cfg.beta * t.p - adjoint_dG(*cfg.family, t.p, t.X * t.Lambda * t.X)).norm();
}

Vector fixed_point_map_p1(const Problem1Config& cfg, const PointState& s) {
  return adjoint_dG(*cfg.family, s.p, s.XLX) / cfg.beta;
}

OptimalityTriple solve_p1(const Problem1Config& cfg_in, const Vector& p0) {
  Problem1Config cfg = cfg_in;
  prepare(cfg);
  if (p0.size() != cfg.family->param_dim()) throw DimensionMismatch("p0 has the wrong dimension");
  Vector p = project(cfg, p0);
  std::vector<Vector> history{p};
  Vector best = p;
  double best_res = std::numeric_limits<double>::infinity();

  for (int it = 0; it <= cfg.max_iter; ++it) {
    const PointState s = evaluate_prepared(cfg, p);
    const double raw = gradient_p1(cfg, s).norm();
    const double rel = raw / scale_p1(cfg, s);
    if (rel < best_res) {
      best_res = rel;
      best = p;
    }
    if (rel <= cfg.tol && s.residual_primal <= cfg.tol && s.residual_dual <= cfg.tol) {
      OptimalityTriple t = make_triple(s);
      t.residual_stationarity = rel;
      t.iterations = it;
      t.converged = true;
      t.cost = (s.X * cfg.W).trace() + 0.5 * cfg.beta * p.squaredNorm();
      t.history = std::move(history);
      return t;
    }
    if (it == cfg.max_iter) break;
    const Vector next = project(cfg, (1.0 - cfg.damping) * p + cfg.damping * fixed_point_map_p1(cfg, s));
    if (next == p) {
      // A projected fixed point that is not stationary.
      throw MaxIterExceeded("problem 1 iteration stalled on the domain boundary", best);
    }
    p = next;
    history.push_back(p);
  }
  throw MaxIterExceeded("problem 1 fixed-point iteration did not converge in " +
                            std::to_string(cfg.max_iter) + " steps",
                        best);
}

// ---- Problem 2 ----

double cost_p2(const Problem2Config& cfg, const Vector& p) {
  const ProblemConfig c = cfg.certificate ? static_cast<const ProblemConfig&>(cfg) : prepared(cfg);
  const Matrix G = eval_G(*c.family, p);
  const Matrix X = solve_state(c, G);
  const double gap = G.trace() - cfg.gamma;
  return (X * c.W).trace() + 0.5 * c.beta * gap * gap;
}

Vector gradient_p2(const Problem2Config& cfg, const PointState& s) {
  const Index n = s.G.rows();
  const Vector u = adjoint_dG(*cfg.family, s.p, Matrix::Identity(n, n));
  return cfg.beta * trace_penalty_gap(cfg, s.G) * u - adjoint_dG(*cfg.family, s.p, s.XLX);
}

double stationarity_residual_p2(const Problem2Config& cfg, const OptimalityTriple& t) {
  return gradient_p2(cfg, state_of(cfg, t)).norm();
}

Matrix fixed_point_operator_p2(const Problem2Config& cfg, const PointState& s) {
  const double xlx = op_norm(s.XLX);
  if (!(xlx > 0.0)) throw DegenerateFamily("X Lambda X vanishes; the trace-law map is undefined");
  const auto D = cfg.family->dG_basis(s.p);
  const Index m = static_cast<Index>(D.size());
  const Matrix gram = dG_gram(*cfg.family, s.p);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  const double lmax = es.eigenvalues().maxCoeff(), lmin = es.eigenvalues().minCoeff();
  if (!(lmax > 0.0) || lmin <= 1e-12 * lmax) {
    throw DegenerateFamily("dG_p^* dG_p is numerically singular");
  }
  // Column j is dG^*(XLX dG(e_j)): entries tr(XLX D_j D_i).
  Matrix C(m, m);
  for (Index j = 0; j < m; ++j) {
    const Matrix T = s.XLX * D[j];
    for (Index i = 0; i < m; ++i) C(i, j) = (T * D[i]).trace();
  }
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose() * C / xlx;
}

namespace {

Matrix fd_hessian_p2(const Problem2Config& cfg, const Vector& p) {
  const Index m = p.size();
  Matrix H(m, m);
  for (Index j = 0; j < m; ++j) {
    const double h = 1e-5 * std::max(1.0, std::abs(p(j)));
    Vector e = Vector::Zero(m);
    e(j) = h;
    const Vector gp = gradient_p2(cfg, evaluate_prepared(cfg, p + e));
    const Vector gm = gradient_p2(cfg, evaluate_prepared(cfg, p - e));
    H.col(j) = (gp - gm) / (2.0 * h);
  }
  return symmetrize(H);
}

}  // namespace

OptimalityTriple solve_p2(const Problem2Config& cfg_in, const Vector& p0) {
  Problem2Config cfg = cfg_in;
  prepare(cfg);
  if (!(cfg.gamma > 0.0)) throw InvalidArgument("gamma must be > 0");
  if (p0.size() != cfg.family->param_dim()) throw DimensionMismatch("p0 has the wrong dimension");

  Vector p = project(cfg, p0);
  PointState s = evaluate_prepared(cfg, p);
  double J = cost_from_state_p2(cfg, s);
  std::vector<Vector> history{p};
  Vector best = p;
  double best_res = std::numeric_limits<double>::infinity();
  bool use_map = true;
  int map_steps = 0, fallback_steps = 0;
  bool converged = false;
  double rel = 0.0;
  int it = 0;

  for (;; ++it) {
    const Vector g = gradient_p2(cfg, s);
    rel = g.norm() / scale_p2(cfg, s);
    if (rel < best_res) {
      best_res = rel;
      best = p;
    }
    if (rel <= cfg.tol && s.residual_primal <= cfg.tol && s.residual_dual <= cfg.tol) {
      converged = true;
      break;
    }
    if (it == cfg.max_iter) break;

    bool accepted = false;
    if (use_map) {
      try {
        const Matrix T = fixed_point_operator_p2(cfg, s);
        const Vector trial = project(cfg, (1.0 - cfg.damping) * p + cfg.damping * (T * p));
        PointState st = evaluate_prepared(cfg, trial);
        const double Jt = cost_from_state_p2(cfg, st);
        if (Jt < J) {
          p = trial;
          s = std::move(st);
          J = Jt;
          accepted = true;
          ++map_steps;
        }
      } catch (const Error&) {
      }
      // Once the map fails to descend it is not used again in this solve.
      if (!accepted) use_map = false;
    }

    if (!accepted) {
      const Matrix H = fd_hessian_p2(cfg, p);
      Vector d;
      Eigen::LLT<Matrix> llt(H);
      if (llt.info() == Eigen::Success) {
        d = -llt.solve(g);
      } else {
        d = -g / std::max(op_norm(H), 1e-300);
      }
      // Cap the step at the domain diameter (or 1 + |p| without a domain).
      const double cap = cfg.domain ? std::max(cfg.domain->diameter(), 1e-12) : 1.0 + p.norm();
      if (d.norm() > cap) d *= cap / d.norm();
      const double slope = g.dot(d);
      double t = 1.0;
      for (int ls = 0; ls < 60 && !accepted; ++ls, t *= 0.5) {
        const Vector trial = project(cfg, p + t * d);
        if (trial == p) break;
        PointState st;
        try {
          st = evaluate_prepared(cfg, trial);
        } catch (const Error&) {
          continue;
        }
        const double Jt = cost_from_state_p2(cfg, st);
        if (Jt <= J + 1e-4 * t * slope) {
          p = trial;
          s = std::move(st);
          J = Jt;
          accepted = true;
        }
      }
      if (!accepted) {
        // Near the optimum cost differences sit at the rounding level; take
        // the full step if it reduces the gradient instead.
        const Vector trial = project(cfg, p + d);
        PointState st;
        bool ok = trial != p;
        if (ok) {
          try {
            st = evaluate_prepared(cfg, trial);
          } catch (const Error&) {
            ok = false;
          }
        }
        if (ok && gradient_p2(cfg, st).norm() < g.norm()) {
          p = trial;
          s = std::move(st);
          J = cost_from_state_p2(cfg, s);
          accepted = true;
        }
      }
      if (!accepted) {
        throw MaxIterExceeded("problem 2 line search stalled", best);
      }
      ++fallback_steps;
    }
    history.push_back(p);
  }
  if (!converged) {
    throw MaxIterExceeded("problem 2 solver did not converge in " + std::to_string(cfg.max_iter) +
                              " steps",
                          best);
  }

  OptimalityTriple t = make_triple(s);
  t.residual_stationarity = rel;
  t.iterations = it;
  t.converged = true;
  t.cost = J;
  t.history = std::move(history);
  t.map_steps = map_steps;
  t.fallback_steps = fallback_steps;
  const double xlx = op_norm(s.XLX);
  t.trace_law_residual = std::abs(s.G.trace() - cfg.gamma - xlx / cfg.beta);
  try {
    t.fixed_point_residual = (fixed_point_operator_p2(cfg, s) * p - p).norm();
  } catch (const DegenerateFamily&) {
    t.fixed_point_residual = std::numeric_limits<double>::quiet_NaN();
  }
  return t;
}

}  // namespace rplace
