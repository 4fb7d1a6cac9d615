// Command-line front end: spectrum, sweep, wavefunction, verify.
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mlqm/mlqm.hpp"

namespace {

struct Overrides {
  std::optional<std::string> model, format, output;
  std::optional<double> hbar, beta, gamma, mass, omega, lambda, delta, p_max, tol;
  std::optional<int> levels, nodes, jobs;
  std::optional<std::size_t> grid, p_points;
  std::string config;

  void add_to(CLI::App& app) {
    app.add_option("--config", config, "JSON config file; flags override its values");
    app.add_option("--model", model, "displaced | swanson");
    app.add_option("--hbar", hbar);
    app.add_option("--beta", beta);
    app.add_option("--gamma", gamma);
    app.add_option("--mass", mass, "mu (displaced) or m (swanson)");
    app.add_option("--omega", omega);
    app.add_option("--lambda", lambda);
    app.add_option("--delta", delta);
    app.add_option("--levels", levels, "number of levels");
    app.add_option("--grid", grid, "q-space intervals");
    app.add_option("--nodes", nodes, "Gauss-Legendre nodes for scalar products");
    app.add_option("--p-points", p_points, "p-space grid points");
    app.add_option("--p-max", p_max, "p-space half width");
    app.add_option("--tol", tol, "classification tolerance");
    app.add_option("--format", format, "csv | json");
    app.add_option("--output", output, "output file (default stdout)");
    app.add_option("--jobs", jobs, "concurrent sweep steps");
  }

  mlqm::RunConfig resolve() const {
    mlqm::RunConfig c = config.empty() ? mlqm::RunConfig{} : mlqm::RunConfig::from_file(config);
    if (model) c.model = *model;
    if (format) c.format = *format;
    if (output) c.output = *output;
    if (hbar) c.hbar = *hbar;
    if (beta) c.beta = *beta;
    if (gamma) c.gamma = *gamma;
    if (mass) c.mass = *mass;
    if (omega) c.omega = *omega;
    if (lambda) c.lambda = *lambda;
    if (delta) c.delta = *delta;
    if (p_max) c.p_max = *p_max;
    if (tol) c.tol = *tol;
    if (levels) c.levels = *levels;
    if (nodes) c.nodes = *nodes;
    if (jobs) c.jobs = *jobs;
    if (grid) c.grid = *grid;
    if (p_points) c.p_points = *p_points;
    c.validate();
    return c;
  }
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimal-length non-Hermitian oscillators: spectra, sweeps, wavefunctions, verification"};
  app.require_subcommand(1);
  Overrides ov;

  auto* spectrum = app.add_subcommand("spectrum", "closed-form vs numeric levels");
  ov.add_to(*spectrum);

  auto* sweep = app.add_subcommand("sweep", "levels along a parameter sweep");
  ov.add_to(*sweep);
  std::string param = "beta";
  double from = 0.0, to = 0.0;
  int steps = 11;
  sweep->add_option("--param", param, "beta | lambda | delta | omega");
  sweep->add_option("--from", from)->required();
  sweep->add_option("--to", to)->required();
  sweep->add_option("--steps", steps);

  auto* wave = app.add_subcommand("wavefunction", "eigenfunction samples uniform in q");
  ov.add_to(*wave);
  int level = 0, samples = 399;
  wave->add_option("--n", level, "level index");
  wave->add_option("--samples", samples);

  auto* verify = app.add_subcommand("verify", "verification battery as JSON records");
  ov.add_to(*verify);
  bool list = false;
  std::string metric_override;
  verify->add_flag("--list", list, "print check names and exit");
  verify->add_option("--metric-override", metric_override, "displaced | swanson | identity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? mlqm::exit_code::ok : mlqm::exit_code::config_error;
  }

  try {
    if (verify->parsed() && list) {
      for (const auto& name : mlqm::verification_checks()) std::cout << name << '\n';
      return mlqm::exit_code::ok;
    }
    const mlqm::RunConfig cfg = ov.resolve();
    if (spectrum->parsed()) return mlqm::cmd_spectrum(cfg, std::cout);
    if (sweep->parsed()) return mlqm::cmd_sweep(cfg, std::cout, param, from, to, steps);
    if (wave->parsed()) return mlqm::cmd_wavefunction(cfg, std::cout, level, samples);
    return mlqm::cmd_verify(cfg, std::cout, metric_override);
  } catch (const mlqm::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return mlqm::exit_code::config_error;
  } catch (const mlqm::model_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return mlqm::exit_code::config_error;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return mlqm::exit_code::numeric_failure;
  }
}
