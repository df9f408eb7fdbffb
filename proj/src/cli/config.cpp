#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rplace/cli.hpp"
#include "rplace/errors.hpp"
#include "rplace/model.hpp"
#include "rplace/riccati.hpp"

namespace rplace::cli {
namespace {

using json = nlohmann::json;

// Typed access to one JSON object, remembering the path for messages.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!ok.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
    }
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  Node child(const char* key) const { return Node(j_.at(key), field(key)); }

  double real(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    return v.get<double>();
  }

  long long integer(const char* key, long long fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
    return v.get<long long>();
  }

  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> reals(const char* key) const {
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(field(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(field(key), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
};

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) out(static_cast<Index>(i)) = v[i];
  return out;
}

bool is_preset(const std::string& s) {
  return s == "identity" || s == "zero" || s.rfind("rank1:", 0) == 0;
}

std::string resolve(const std::string& base, const std::string& p) {
  namespace fs = std::filesystem;
  const fs::path path(p);
  return path.is_absolute() ? p : (fs::path(base) / path).string();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  ExperimentConfig c;
  c.base_dir = base_dir;
  const Node root(j, "");
  root.allow({"model", "device", "problem", "solver"});

  if (root.has("model")) {
    const Node m = root.child("model");
    m.allow({"kind", "n", "diffusivity", "domain_length", "file_path"});
    c.model.kind = m.text("kind", c.model.kind);
    require(c.model.kind == "heat1d" || c.model.kind == "matrix_file", "model.kind",
            "expected \"heat1d\" or \"matrix_file\"");
    c.model.n = static_cast<int>(m.integer("n", c.model.n));
    c.model.diffusivity = m.real("diffusivity", c.model.diffusivity);
    c.model.domain_length = m.real("domain_length", c.model.domain_length);
    require(c.model.n >= 1, "model.n", "must be >= 1");
    require(c.model.diffusivity > 0, "model.diffusivity", "must be > 0");
    require(c.model.domain_length > 0, "model.domain_length", "must be > 0");
    if (m.has("file_path")) c.model.file_path = resolve(base_dir, m.text("file_path", ""));
    if (c.model.kind == "matrix_file") {
      require(!c.model.file_path.empty(), "model.file_path", "required when kind is matrix_file");
      require(std::filesystem::exists(c.model.file_path), "model.file_path",
              "file not found: " + c.model.file_path);
    }
  }

  if (root.has("device")) {
    const Node d = root.child("device");
    d.allow({"kind", "sigma", "r_weight", "actuators", "p0", "lo", "hi"});
    c.device.kind = d.text("kind", c.device.kind);
    require(c.device.kind == "gaussian_actuator" || c.device.kind == "multi_gaussian", "device.kind",
            "expected \"gaussian_actuator\" or \"multi_gaussian\"");
    c.device.sigma = d.real("sigma", c.device.sigma);
    c.device.r_weight = d.real("r_weight", c.device.r_weight);
    c.device.actuators = static_cast<int>(d.integer("actuators", c.device.kind == "multi_gaussian" ? 2 : 1));
    require(c.device.sigma > 0, "device.sigma", "must be > 0");
    require(c.device.r_weight > 0, "device.r_weight", "must be > 0");
    require(c.device.actuators >= 1, "device.actuators", "must be >= 1");
    require(c.device.kind == "multi_gaussian" || c.device.actuators == 1, "device.actuators",
            "gaussian_actuator has exactly one actuator");
    for (const char* key : {"p0", "lo", "hi"}) {
      if (!d.has(key)) continue;
      const Vector v = to_vector(d.reals(key));
      require(v.size() == c.device.actuators, d.field(key), "needs one entry per actuator");
      if (std::string(key) == "p0") c.device.p0 = v;
      if (std::string(key) == "lo") c.device.lo = v;
      if (std::string(key) == "hi") c.device.hi = v;
    }
    if (c.device.lo && c.device.hi) {
      require((c.device.lo->array() <= c.device.hi->array()).all(), "device.lo", "must not exceed device.hi");
    }
  }

  if (root.has("problem")) {
    const Node p = root.child("problem");
    p.allow({"variant", "beta", "gamma", "W", "Q"});
    c.problem.variant = static_cast<int>(p.integer("variant", c.problem.variant));
    require(c.problem.variant == 1 || c.problem.variant == 2, "problem.variant", "expected 1 or 2");
    c.problem.beta = p.real("beta", c.problem.beta);
    require(c.problem.beta > 0, "problem.beta", "must be > 0");
    if (p.has("gamma")) {
      c.problem.gamma = p.real("gamma", 0.0);
      require(*c.problem.gamma > 0, "problem.gamma", "must be > 0");
    }
    require(c.problem.variant == 1 || c.problem.gamma.has_value(), "problem.gamma", "required for variant 2");
    for (const char* key : {"W", "Q"}) {
      std::string v = p.text(key, "identity");
      if (!is_preset(v)) {
        v = resolve(base_dir, v);
        require(std::filesystem::exists(v), p.field(key), "file not found: " + v);
      }
      (std::string(key) == "W" ? c.problem.W : c.problem.Q) = v;
    }
  }

  if (root.has("solver")) {
    const Node s = root.child("solver");
    s.allow({"tol", "max_iter", "quadrature", "seed", "damping", "ledger_samples", "lipschitz_pairs",
             "multistart", "betas"});
    c.solver.tol = s.real("tol", c.solver.tol);
    require(c.solver.tol > 0, "solver.tol", "must be > 0");
    c.solver.max_iter = static_cast<int>(s.integer("max_iter", c.solver.max_iter));
    require(c.solver.max_iter >= 1, "solver.max_iter", "must be >= 1");
    const long long seed = s.integer("seed", 0);
    require(seed >= 0, "solver.seed", "must be >= 0");
    c.solver.seed = static_cast<std::uint64_t>(seed);
    c.solver.damping = s.real("damping", c.solver.damping);
    require(c.solver.damping > 0 && c.solver.damping <= 1, "solver.damping", "must be in (0, 1]");
    c.solver.ledger_samples = static_cast<int>(s.integer("ledger_samples", c.solver.ledger_samples));
    require(c.solver.ledger_samples == 0 || c.solver.ledger_samples >= 100, "solver.ledger_samples",
            "must be 0 or at least 100");
    c.solver.lipschitz_pairs = static_cast<int>(s.integer("lipschitz_pairs", c.solver.lipschitz_pairs));
    require(c.solver.lipschitz_pairs >= 1, "solver.lipschitz_pairs", "must be >= 1");
    c.solver.multistart = static_cast<int>(s.integer("multistart", c.solver.multistart));
    require(c.solver.multistart >= 0, "solver.multistart", "must be >= 0");
    if (s.has("betas")) {
      c.solver.betas = s.reals("betas");
      require(!c.solver.betas.empty(), "solver.betas", "must not be empty");
      for (size_t i = 0; i < c.solver.betas.size(); ++i) {
        require(c.solver.betas[i] > 0, "solver.betas", "entries must be > 0");
        require(i == 0 || c.solver.betas[i] > c.solver.betas[i - 1], "solver.betas", "must be ascending");
      }
    }
    if (s.has("quadrature")) {
      const Node q = s.child("quadrature");
      q.allow({"horizon", "nodes"});
      if (q.has("horizon")) {
        c.solver.horizon = q.real("horizon", 0.0);
        require(*c.solver.horizon > 0, "solver.quadrature.horizon", "must be > 0");
      }
      c.solver.nodes = static_cast<int>(q.integer("nodes", c.solver.nodes));
      require(c.solver.nodes >= 16, "solver.quadrature.nodes", "must be >= 16");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto parent = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), parent.empty() ? "." : parent.string());
}

BuiltModel build_model(const ExperimentConfig& cfg) {
  BuiltModel m;
  const double L = cfg.model.domain_length;
  if (cfg.model.kind == "heat1d") {
    const HeatModel h = heat1d(cfg.model.n, cfg.model.diffusivity, L);
    m.A = h.A;
    m.grid = h.grid;
    return m;
  }
  try {
    m.A = read_matrix_file(cfg.model.file_path);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("model.file_path", e.what());
  }
  if (m.A.rows() != m.A.cols()) throw ConfigError("model.file_path", "generator must be square");
  const int n = static_cast<int>(m.A.rows());
  const double h = L / (n + 1);
  m.grid = Vector::LinSpaced(n, -L / 2 + h, L / 2 - h);
  if (n == 1) m.grid(0) = 0.0;
  if (!m.A.allFinite()) throw ConfigError("model.file_path", "generator has non-finite entries");
  if (!(spectral_abscissa(m.A) < 0.0)) {
    throw ConfigError("model.file_path", "generator is not stable (spectral abscissa >= 0)");
  }
  return m;
}

Experiment build_experiment(const ExperimentConfig& cfg) {
  Experiment e;
  e.model = build_model(cfg);
  const int n = static_cast<int>(e.model.A.rows());
  e.Q = weight_preset(cfg.problem.Q, n, "problem.Q");
  e.W = weight_preset(cfg.problem.W, n, "problem.W");
  try {
    e.family = std::make_shared<GaussianActuators>(e.model.grid, cfg.device.sigma, cfg.device.r_weight,
                                                   cfg.device.actuators);
  } catch (const Error& ex) {
    throw ConfigError("device", ex.what());
  }
  const int m = cfg.device.actuators;
  e.domain.lo = cfg.device.lo.value_or(Vector::Constant(m, e.model.grid.minCoeff()));
  e.domain.hi = cfg.device.hi.value_or(Vector::Constant(m, e.model.grid.maxCoeff()));
  if ((e.domain.lo.array() > e.domain.hi.array()).any()) throw ConfigError("device.lo", "domain box is empty");
  if (cfg.device.p0) {
    e.p0 = *cfg.device.p0;
  } else if (m == 1) {
    e.p0 = 0.5 * (e.domain.lo + e.domain.hi);
  } else {
    // Spread several actuators evenly so dG^* dG starts invertible.
    e.p0.resize(m);
    for (int j = 0; j < m; ++j) {
      const double t = (j + 1.0) / (m + 1.0);
      e.p0(j) = e.domain.lo(j) + t * (e.domain.hi(j) - e.domain.lo(j));
    }
  }
  if (!e.domain.contains(e.p0)) throw ConfigError("device.p0", "must lie inside the placement domain");
  return e;
}

}  // namespace rplace::cli
