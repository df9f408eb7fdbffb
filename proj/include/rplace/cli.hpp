#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rplace/devices.hpp"
#include "rplace/linalg.hpp"
#include "rplace/optimize.hpp"

namespace rplace::cli {

struct ModelSpec {
  std::string kind = "heat1d";  ///< "heat1d" or "matrix_file"
  int n = 16;
  double diffusivity = 0.05;
  double domain_length = 1.0;
  std::string file_path;        ///< resolved against the config directory
};

struct DeviceSpec {
  std::string kind = "gaussian_actuator";  ///< or "multi_gaussian"
  double sigma = 0.1;
  double r_weight = 1.0;
  int actuators = 1;
  std::optional<Vector> p0;      ///< default: centre of the domain
  std::optional<Vector> lo, hi;  ///< default: convex hull of the grid
};

struct ProblemSpec {
  int variant = 1;
  double beta = 1.0;
  std::optional<double> gamma;
  std::string W = "identity";
  std::string Q = "identity";
};

struct SolverSpec {
  double tol = 1e-10;
  int max_iter = 500;
  std::optional<double> horizon;  ///< default 20 / alpha
  int nodes = 200;
  std::uint64_t seed = 0;
  double damping = 0.5;
  int ledger_samples = 100;  ///< 0 skips the constant ledger
  int lipschitz_pairs = 200;
  int multistart = 0;
  std::vector<double> betas{10, 100, 1000, 10000};
};

struct ExperimentConfig {
  ModelSpec model;
  DeviceSpec device;
  ProblemSpec problem;
  SolverSpec solver;
  std::string base_dir = ".";
};

/// Strict JSON reader: unknown keys and wrong types raise ConfigError with
/// the dotted path of the field.
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

struct BuiltModel {
  Matrix A;
  Vector grid;
};

/// heat1d stencil or a matrix file; rejects generators that are not stable.
BuiltModel build_model(const ExperimentConfig& cfg);

struct Experiment {
  BuiltModel model;
  std::shared_ptr<GaussianActuators> family;
  Matrix Q;
  Matrix W;
  Box domain;
  Vector p0;
};

/// Everything `run` needs, with presets and files resolved.
Experiment build_experiment(const ExperimentConfig& cfg);

enum class Command { certify, solve_are, optimize, sweep_beta, verify_bounds };

/// Throws ConfigError("command", ...) for unknown names.
Command parse_command(const std::string& name);
std::string command_name(Command c);

/// Runs one command and writes its reports into out_dir. Returns 0 on
/// success, 1 on configuration errors and 2 on non-convergence.
int run(const ExperimentConfig& cfg, Command command, const std::string& out_dir);

/// Entry point behind the riccati-place executable.
int main(int argc, char** argv);

}  // namespace rplace::cli
