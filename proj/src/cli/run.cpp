#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>

#include "report.hpp"
#include "rplace/cli.hpp"
#include "rplace/dual.hpp"
#include "rplace/errors.hpp"
#include "rplace/riccati.hpp"
#include "rplace/sweep.hpp"

namespace rplace::cli {
namespace {

constexpr int kOk = 0;
constexpr int kConfig = 1;
constexpr int kNoConvergence = 2;

ojson config_json(const ExperimentConfig& c) {
  ojson j;
  j["model"] = {{"kind", c.model.kind},
                {"n", c.model.n},
                {"diffusivity", c.model.diffusivity},
                {"domain_length", c.model.domain_length}};
  if (!c.model.file_path.empty()) j["model"]["file_path"] = c.model.file_path;
  j["device"] = {{"kind", c.device.kind},
                 {"sigma", c.device.sigma},
                 {"r_weight", c.device.r_weight},
                 {"actuators", c.device.actuators}};
  j["problem"] = {{"variant", c.problem.variant}, {"beta", c.problem.beta}, {"W", c.problem.W}, {"Q", c.problem.Q}};
  if (c.problem.gamma) j["problem"]["gamma"] = *c.problem.gamma;
  j["solver"] = {{"tol", c.solver.tol},
                 {"max_iter", c.solver.max_iter},
                 {"nodes", c.solver.nodes},
                 {"seed", c.solver.seed},
                 {"damping", c.solver.damping},
                 {"ledger_samples", c.solver.ledger_samples},
                 {"lipschitz_pairs", c.solver.lipschitz_pairs},
                 {"multistart", c.solver.multistart}};
  if (c.solver.horizon) j["solver"]["horizon"] = *c.solver.horizon;
  ojson b = ojson::array();
  for (double x : c.solver.betas) b.push_back(x);
  j["solver"]["betas"] = std::move(b);
  return j;
}

ojson header(const ExperimentConfig& cfg, Command cmd, const Experiment& e) {
  ojson j;
  j["command"] = command_name(cmd);
  j["config"] = config_json(cfg);
  j["state_dim"] = e.model.A.rows();
  j["param_dim"] = e.family->param_dim();
  j["domain"] = {{"lo", to_json(e.domain.lo)}, {"hi", to_json(e.domain.hi)}};
  j["p0"] = to_json(e.p0);
  return j;
}

template <class Cfg>
Cfg problem_config(const ExperimentConfig& cfg, const Experiment& e) {
  Cfg c;
  c.A = e.model.A;
  c.Q = e.Q;
  c.W = e.W;
  c.family = e.family;
  c.beta = cfg.problem.beta;
  c.tol = cfg.solver.tol;
  c.max_iter = cfg.solver.max_iter;
  c.damping = cfg.solver.damping;
  c.domain = e.domain;
  return c;
}

Problem2Config problem2_config(const ExperimentConfig& cfg, const Experiment& e) {
  auto c = problem_config<Problem2Config>(cfg, e);
  c.gamma = cfg.problem.gamma.value_or(0.0);
  return c;
}

std::optional<ConstantLedger> ledger_for(const ExperimentConfig& cfg, const Experiment& e) {
  if (cfg.solver.ledger_samples == 0) return std::nullopt;
  const LedgerInputs in{e.model.A, e.Q, e.W, cfg.problem.beta, cfg.problem.gamma.value_or(0.0)};
  return estimate_constants(*e.family, e.domain, cfg.solver.ledger_samples, cfg.solver.seed, in);
}

double horizon_for(const ExperimentConfig& cfg, const StabilityCertificate& c) {
  return cfg.solver.horizon.value_or(20.0 / c.alpha);
}

int cmd_certify(const ExperimentConfig& cfg, const Experiment& e, const std::string& out) {
  const auto cert = certify_stability(e.model.A);
  ojson c = to_json(cert);
  c["spectral_abscissa"] = num(spectral_abscissa(e.model.A));
  c["verification_violation"] = num(certificate_violation(cert, e.model.A));
  write_json(out, "certificate.json", c);
  ojson r = header(cfg, Command::certify, e);
  r["certificate"] = c;
  write_json(out, "report.json", r);
  return kOk;
}

int cmd_solve_are(const ExperimentConfig& cfg, const Experiment& e, const std::string& out) {
  const auto cert = certify_stability(e.model.A);
  const Matrix G = e.family->G(e.p0);
  RiccatiOptions ro;
  ro.tol = std::min(1e-11, cfg.solver.tol);
  ro.max_iter = std::max(100, std::min(cfg.solver.max_iter, 1000));
  ro.certificate = cert;
  ojson r = header(cfg, Command::solve_are, e);
  r["certificate"] = to_json(cert);
  write_json(out, "certificate.json", to_json(cert));
  RiccatiSolution sol;
  try {
    sol = solve_are(e.model.A, G, e.Q, ro);
  } catch (const NewtonStall& ex) {
    r["converged"] = false;
    r["error"] = ex.what();
    write_json(out, "report.json", r);
    return kNoConvergence;
  }
  const double H = horizon_for(cfg, cert);
  AreVerification v;
  try {
    v = verify_are(e.model.A, G, e.Q, sol, cert, H, cfg.solver.nodes);
  } catch (const HorizonTooShort& ex) {
    throw ConfigError("solver.quadrature.horizon", ex.what());
  }
  const auto dual = solve_dual(e.model.A, G, sol.X, e.W, true);
  const auto dv = verify_dual(e.model.A, G, sol.X, dual, dual.closed_loop, e.W,
                              cfg.solver.horizon.value_or(20.0 / dual.closed_loop.alpha), cfg.solver.nodes);
  r["converged"] = true;
  r["riccati"] = {{"newton_iters", sol.newton_iters},
                  {"strong_residual", num(v.strong_residual)},
                  {"bochner_residual", num(v.bochner_residual)},
                  {"bochner_residual_rel", num(v.bochner_residual_rel)},
                  {"trace_X", num(v.trace_X)},
                  {"trace_bound", num(v.trace_bound)},
                  {"trace_bound_holds", v.trace_bound_holds},
                  {"symmetric", v.symmetric},
                  {"psd", v.psd},
                  {"X", to_json(sol.X)}};
  r["dual"] = {{"residual", num(dual.residual)},
               {"closed_loop", to_json(dual.closed_loop)},
               {"norm_Lambda", num(dv.norm_Lambda)},
               {"norm_bound", num(dv.norm_bound)},
               {"norm_bound_holds", dv.norm_bound_holds},
               {"symmetric", dv.symmetric},
               {"psd", dv.psd},
               {"quadrature_error_rel", num(dv.quadrature_error_rel)},
               {"Lambda", to_json(dual.Lambda)}};
  write_json(out, "report.json", r);
  return kOk;
}

ojson multistart_json(const MultistartReport& m) {
  ojson j;
  ojson runs = ojson::array();
  for (size_t i = 0; i < m.runs.size(); ++i) {
    ojson r;
    r["start"] = to_json(m.starts[i]);
    if (m.runs[i]) {
      r["p"] = to_json(m.runs[i]->p);
      r["cost"] = num(m.runs[i]->cost);
      r["iterations"] = m.runs[i]->iterations;
      r["cluster"] = m.cluster_of[i];
    } else {
      r["error"] = m.failures[i];
    }
    runs.push_back(std::move(r));
  }
  j["runs"] = std::move(runs);
  ojson cl = ojson::array();
  for (size_t k = 0; k < m.clusters.size(); ++k) {
    cl.push_back({{"p", to_json(m.clusters[k])}, {"cost", num(m.cluster_costs[k])}});
  }
  j["clusters"] = std::move(cl);
  j["best_cluster"] = m.best_cluster;
  j["max_spread"] = num(m.max_spread);
  return j;
}

int cmd_optimize(const ExperimentConfig& cfg, const Experiment& e, const std::string& out) {
  ojson r = header(cfg, Command::optimize, e);
  r["variant"] = cfg.problem.variant;
  const auto ledger = ledger_for(cfg, e);
  if (ledger) r["ledger"] = to_json(*ledger);

  std::optional<OptimalityTriple> t;
  std::string failure;
  Vector best;
  const Problem1Config c1 = problem_config<Problem1Config>(cfg, e);
  const Problem2Config c2 = problem2_config(cfg, e);
  try {
    t = cfg.problem.variant == 1 ? solve_p1(c1, e.p0) : solve_p2(c2, e.p0);
  } catch (const MaxIterExceeded& ex) {
    failure = ex.what();
    best = ex.best_iterate();
  } catch (const NewtonStall& ex) {
    failure = ex.what();
  } catch (const ClosedLoopUnstable& ex) {
    failure = ex.what();
  } catch (const DegenerateFamily& ex) {
    failure = ex.what();
  }

  if (ledger) {
    r["contraction"] = to_json(cfg.problem.variant == 1 ? contraction_constant_p1(*ledger)
                                                        : contraction_constant_p2(*ledger));
  }
  if (!t) {
    r["converged"] = false;
    r["error"] = failure;
    if (best.size()) r["best_iterate"] = to_json(best);
    write_json(out, "report.json", r);
    return kNoConvergence;
  }
  r["converged"] = true;
  r["solution"] = to_json(*t, true);
  const auto basis = critical_cone_basis(*e.family, t->p, t->X);
  ojson so;
  so["cone_dimension"] = basis.size();
  if (cfg.problem.variant == 1) {
    so["stationarity_residual"] = num(stationarity_residual_p1(c1, *t));
    so["cone_min_eigenvalue"] = num(cone_min_eigenvalue_p1(c1, *t));
  } else {
    so["stationarity_residual"] = num(stationarity_residual_p2(c2, *t));
    so["cone_min_eigenvalue"] = num(cone_min_eigenvalue_p2(c2, *t));
    const Matrix G = e.family->G(t->p);
    so["trace_G"] = num(G.trace());
    so["trace_gap"] = num(std::abs(G.trace() - c2.gamma));
    ojson var = ojson::array();
    for (const auto& q : basis) {
      const auto h = hessian_p2_variants(c2, *t, q);
      var.push_back({{"unsubstituted", num(h.unsubstituted)},
                     {"xgx_substituted", num(h.xgx_substituted)},
                     {"trace_law_substituted", num(h.trace_law_substituted)}});
    }
    so["hessian_variants"] = std::move(var);
  }
  r["second_order"] = std::move(so);

  if (cfg.solver.multistart > 0) {
    const auto starts = random_starts(e.domain, cfg.solver.multistart, split_seed(cfg.solver.seed, 0x6d73));
    r["multistart"] = multistart_json(cfg.problem.variant == 1 ? multistart_p1(c1, starts, 1e-6)
                                                               : multistart_p2(c2, starts, 1e-6));
  }
  write_json(out, "report.json", r);
  return kOk;
}

int cmd_sweep(const ExperimentConfig& cfg, const Experiment& e, const std::string& out) {
  if (cfg.problem.variant != 2) throw ConfigError("problem.variant", "sweep-beta needs variant 2");
  const auto ledger = ledger_for(cfg, e);
  const auto rep = beta_sweep(problem2_config(cfg, e), cfg.solver.betas, e.p0, ledger ? &*ledger : nullptr);
  ojson r = header(cfg, Command::sweep_beta, e);
  if (ledger) r["ledger"] = to_json(*ledger);
  ojson entries = ojson::array();
  bool ok = true;
  for (const auto& x : rep.entries) {
    ojson j;
    j["beta"] = num(x.beta);
    j["converged"] = x.converged;
    j["iterations"] = x.iterations;
    j["p"] = to_json(x.p);
    j["trace_G"] = num(x.trace_G);
    j["trace_gap"] = num(x.trace_gap);
    j["xlx"] = num(x.xlx);
    j["cost"] = num(x.cost);
    j["cost_state"] = num(x.cost_state);
    j["cost_penalty"] = num(x.cost_penalty);
    j["stationarity"] = num(x.stationarity);
    j["trace_law_residual"] = num(x.trace_law_residual);
    j["law_holds"] = x.law_holds;
    if (x.contraction) j["contraction"] = to_json(*x.contraction);
    if (!x.failure.empty()) j["error"] = x.failure;
    ok = ok && x.converged;
    entries.push_back(std::move(j));
  }
  r["entries"] = std::move(entries);
  r["sup_xlx"] = num(rep.sup_xlx);
  r["loglog_slope"] = num(rep.slope);
  r["all_law_hold"] = rep.all_law_hold;
  write_text(out, "sweep.csv", sweep_csv(rep));
  write_json(out, "report.json", r);
  return ok ? kOk : kNoConvergence;
}

int cmd_verify(const ExperimentConfig& cfg, const Experiment& e, const std::string& out) {
  ojson r = header(cfg, Command::verify_bounds, e);
  const auto cert = certify_stability(e.model.A);
  write_json(out, "certificate.json", to_json(cert));
  r["certificate"] = to_json(cert);
  ExperimentConfig lc = cfg;
  if (lc.solver.ledger_samples == 0) lc.solver.ledger_samples = 100;
  const auto L = *ledger_for(lc, e);
  r["ledger"] = to_json(L);
  r["contraction_p1"] = to_json(contraction_constant_p1(L));
  if (cfg.problem.gamma) r["contraction_p2"] = to_json(contraction_constant_p2(L));
  const auto c1 = problem_config<Problem1Config>(cfg, e);
  const auto lip = check_lipschitz_lemmas(c1, L, e.domain, cfg.solver.lipschitz_pairs,
                                          split_seed(cfg.solver.seed, 0x6c6970));
  r["lipschitz"] = to_json(lip);

  const Matrix G = e.family->G(e.p0);
  RiccatiOptions ro;
  ro.certificate = cert;
  auto sol = solve_are(e.model.A, G, e.Q, ro);
  AreVerification v;
  try {
    v = verify_are(e.model.A, G, e.Q, sol, cert, horizon_for(cfg, cert), cfg.solver.nodes);
  } catch (const HorizonTooShort& ex) {
    throw ConfigError("solver.quadrature.horizon", ex.what());
  }
  const auto dual = solve_dual(e.model.A, G, sol.X, e.W, true);
  const auto dv = verify_dual(e.model.A, G, sol.X, dual, dual.closed_loop, e.W,
                              cfg.solver.horizon.value_or(20.0 / dual.closed_loop.alpha), cfg.solver.nodes);
  r["bounds_at_p0"] = {{"trace_X", num(v.trace_X)},
                       {"trace_bound", num(v.trace_bound)},
                       {"trace_bound_holds", v.trace_bound_holds},
                       {"bochner_residual_rel", num(v.bochner_residual_rel)},
                       {"norm_Lambda", num(dv.norm_Lambda)},
                       {"norm_Lambda_bound", num(dv.norm_bound)},
                       {"norm_Lambda_bound_holds", dv.norm_bound_holds}};
  write_json(out, "report.json", r);
  return kOk;
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "certify") return Command::certify;
  if (name == "solve-are") return Command::solve_are;
  if (name == "optimize") return Command::optimize;
  if (name == "sweep-beta") return Command::sweep_beta;
  if (name == "verify-bounds") return Command::verify_bounds;
  throw ConfigError("command", "unknown command '" + name + "'");
}

std::string command_name(Command c) {
  switch (c) {
    case Command::certify: return "certify";
    case Command::solve_are: return "solve-are";
    case Command::optimize: return "optimize";
    case Command::sweep_beta: return "sweep-beta";
    case Command::verify_bounds: return "verify-bounds";
  }
  return "?";
}

int run(const ExperimentConfig& cfg, Command command, const std::string& out_dir) {
  try {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw ConfigError("--out", "cannot create " + out_dir + ": " + ec.message());
    const Experiment e = build_experiment(cfg);
    switch (command) {
      case Command::certify: return cmd_certify(cfg, e, out_dir);
      case Command::solve_are: return cmd_solve_are(cfg, e, out_dir);
      case Command::optimize: return cmd_optimize(cfg, e, out_dir);
      case Command::sweep_beta: return cmd_sweep(cfg, e, out_dir);
      case Command::verify_bounds: return cmd_verify(cfg, e, out_dir);
    }
  } catch (const ConfigError& ex) {
    std::cerr << "riccati-place: config error: " << ex.what() << "\n";
    return kConfig;
  } catch (const Error& ex) {
    std::cerr << "riccati-place: " << ex.what() << "\n";
    return kNoConvergence;
  }
  return kOk;
}

}  // namespace rplace::cli
