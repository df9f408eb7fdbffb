#include <iostream>

#include <CLI11.hpp>

#include "rplace/cli.hpp"
#include "rplace/errors.hpp"

namespace rplace::cli {

int main(int argc, char** argv) {
  CLI::App app("Riccati-constrained control-device placement", "riccati-place");
  std::string command, config, out;
  std::optional<std::uint64_t> seed;
  std::vector<double> betas;
  app.add_option("command", command, "certify | solve-are | optimize | sweep-beta | verify-bounds")->required();
  app.add_option("--config", config, "experiment config (JSON)")->required();
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--seed", seed, "overrides solver.seed");
  app.add_option("--betas", betas, "comma-separated ascending penalty values")->delimiter(',');
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  try {
    const Command cmd = parse_command(command);
    ExperimentConfig cfg = load_config(config);
    if (seed) cfg.solver.seed = *seed;
    if (!betas.empty()) {
      for (size_t i = 0; i < betas.size(); ++i) {
        if (!(betas[i] > 0) || (i > 0 && !(betas[i] > betas[i - 1]))) {
          throw ConfigError("--betas", "must be positive and ascending");
        }
      }
      cfg.solver.betas = betas;
    }
    return run(cfg, cmd, out);
  } catch (const ConfigError& e) {
    std::cerr << "riccati-place: config error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace rplace::cli
