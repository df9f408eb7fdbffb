#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rplace/errors.hpp"

namespace rplace::cli {

ojson num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

ojson to_json(const Vector& v) {
  ojson a = ojson::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

ojson to_json(const Matrix& M) {
  ojson rows = ojson::array();
  for (Index i = 0; i < M.rows(); ++i) {
    ojson r = ojson::array();
    for (Index j = 0; j < M.cols(); ++j) r.push_back(num(M(i, j)));
    rows.push_back(std::move(r));
  }
  return rows;
}

ojson to_json(const StabilityCertificate& c) {
  ojson j;
  j["M"] = num(c.M);
  j["alpha"] = num(c.alpha);
  j["sample_horizon"] = num(c.sample_horizon);
  j["sample_count"] = c.sample_count;
  return j;
}

ojson to_json(const ConstantLedger& L) {
  ojson j;
  j["g"] = num(L.g);
  j["g_op"] = num(L.g_op);
  j["L_G"] = num(L.L_G);
  j["L_dG"] = num(L.L_dG);
  j["C_dG"] = num(L.C_dG);
  j["K"] = num(L.K);
  j["mu"] = num(L.mu);
  j["xlx_sup"] = num(L.xlx_sup);
  j["M"] = num(L.M);
  j["alpha"] = num(L.alpha);
  j["trQ"] = num(L.trQ);
  j["normW"] = num(L.normW);
  j["beta"] = num(L.beta);
  j["gamma"] = num(L.gamma);
  j["g_trace"] = num(L.g_trace);
  j["L_G_trace"] = num(L.L_G_trace);
  j["L_dG_trace"] = num(L.L_dG_trace);
  j["C_dG_trace"] = num(L.C_dG_trace);
  j["samples"] = L.samples;
  j["invertible_samples"] = L.invertible_samples;
  j["seed"] = L.seed;
  return j;
}

ojson to_json(const ContractionReport& r) {
  ojson j;
  j["k"] = num(r.k);
  j["is_contraction"] = r.is_contraction;
  ojson terms = ojson::array();
  for (const auto& [label, v] : r.term_breakdown) terms.push_back({{"label", label}, {"value", num(v)}});
  j["term_breakdown"] = std::move(terms);
  j["beta_threshold"] = num(r.beta_threshold);
  return j;
}

ojson to_json(const OptimalityTriple& t, bool include_history) {
  ojson j;
  j["p"] = to_json(t.p);
  j["converged"] = t.converged;
  j["iterations"] = t.iterations;
  j["cost"] = num(t.cost);
  j["residual_primal"] = num(t.residual_primal);
  j["residual_dual"] = num(t.residual_dual);
  j["residual_stationarity"] = num(t.residual_stationarity);
  j["trace_law_residual"] = num(t.trace_law_residual);
  j["fixed_point_residual"] = num(t.fixed_point_residual);
  j["map_steps"] = t.map_steps;
  j["fallback_steps"] = t.fallback_steps;
  if (include_history) {
    ojson h = ojson::array();
    for (const auto& p : t.history) h.push_back(to_json(p));
    j["history"] = std::move(h);
  }
  j["X"] = to_json(t.X);
  j["Lambda"] = to_json(t.Lambda);
  return j;
}

ojson to_json(const LipschitzReport& r) {
  auto reading = [](const LipschitzReading& x) {
    ojson j;
    j["norm"] = x.norm;
    j["worst_ratio_X"] = num(x.worst_ratio_X);
    j["worst_ratio_Lambda"] = num(x.worst_ratio_Lambda);
    j["X_holds"] = x.X_holds;
    j["Lambda_holds"] = x.Lambda_holds;
    return j;
  };
  ojson j;
  j["pairs"] = r.pairs;
  j["abs_trace"] = reading(r.abs_trace);
  j["schatten"] = reading(r.schatten);
  j["passing_norm"] = r.passing_norm;
  return j;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sweep_csv(const SweepReport& rep) {
  std::ostringstream out;
  size_t m = 0;
  for (const auto& e : rep.entries) m = std::max(m, static_cast<size_t>(e.p.size()));
  out << "beta,trace_gap,cost,k,converged,iters";
  for (size_t j = 0; j < m; ++j) out << ",p_" << j;
  out << "\n";
  for (const auto& e : rep.entries) {
    const double nan = std::nan("");
    out << format_double(e.beta) << ',' << format_double(e.converged ? e.trace_gap : nan) << ','
        << format_double(e.converged ? e.cost : nan) << ','
        << format_double(e.contraction ? e.contraction->k : nan) << ',' << (e.converged ? 1 : 0) << ','
        << e.iterations;
    for (size_t j = 0; j < m; ++j) {
      out << ',' << format_double(j < static_cast<size_t>(e.p.size()) ? e.p(j) : nan);
    }
    out << "\n";
  }
  return out.str();
}

void write_text(const std::string& dir, const std::string& name, const std::string& text) {
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("--out", "cannot write " + path.string());
  out << text;
}

void write_json(const std::string& dir, const std::string& name, const ojson& j) {
  write_text(dir, name, j.dump(2) + "\n");
}

}  // namespace rplace::cli
