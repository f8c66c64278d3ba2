#include <CLI11.hpp>
#include <iostream>

#include "bdp/pipeline.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Certified ergodicity bounds for inhomogeneous birth-death processes"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  double tol = 0.0;
  std::size_t trunc = 0;
  bool quiet = false;

  const char *names[][2] = {
      {"run", "run the analyses listed in the config"},
      {"feasibility", "check hypotheses and construct weights"},
      {"bounds", "emit certificates and envelopes"},
      {"verify", "check certificates against the ODE oracle"},
      {"sweep", "drift-rate table over rho or epsilon"},
      {"spectrum", "eigenvalues of the frozen generator"}};
  for (auto &n : names) {
    CLI::App *sub = app.add_subcommand(n[0], n[1]);
    sub->add_option("--config", config_path, "model config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--tol", tol, "ODE tolerance per unit time")->check(CLI::PositiveNumber);
    sub->add_option("--trunc", trunc, "truncation level for infinite chains")->check(CLI::Range(2, 1000000));
    sub->add_flag("--quiet", quiet, "suppress the summary table");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    bdp::RunConfig config = bdp::load_config(config_path);
    if (!out_dir.empty())
      config.output = out_dir;
    if (tol > 0.0)
      config.ode.tol = tol;
    if (trunc > 0)
      config.model.params.truncation = trunc;
    const bdp::Command cmd = bdp::parse_command(app.get_subcommands().front()->get_name());
    const bdp::RunOutcome out = bdp::run(config, cmd);
    if (!quiet) {
      for (const auto &line : out.lines)
        std::cout << line << '\n';
      std::cout << "wrote " << out.artifacts.size() << " files to " << config.output << '\n';
    }
    return out.exit_code;
  } catch (const bdp::Error &e) {
    std::cerr << e.what() << '\n';
    return bdp::exit_code_for(e);
  }
}
