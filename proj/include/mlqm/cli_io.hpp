#ifndef MLQM_CLI_IO_HPP
#define MLQM_CLI_IO_HPP

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mlqm/eigensolver.hpp"
#include "mlqm/models.hpp"
#include "mlqm/verification.hpp"

namespace mlqm {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int verification_failed = 1;
inline constexpr int config_error = 2;
inline constexpr int numeric_failure = 3;
} // namespace exit_code

/// Round-trip decimal with 17 significant digits, locale independent.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// Parameters of one CLI run. Model-specific values left unset take the
/// model's preset (displaced: beta 0.1, lambda 0.5; swanson: beta 0.5,
/// lambda = delta = 0.2).
struct RunConfig {
  std::string model = "displaced";
  double hbar = 1.0;
  std::optional<double> beta;
  double gamma = 0.0;
  double mass = 1.0;
  double omega = 1.0;
  std::optional<double> lambda;
  double delta = 0.2;
  int levels = 8;
  std::size_t grid = 2000;
  int nodes = 512;
  std::optional<std::size_t> p_points;
  std::optional<double> p_max;
  double tol = 1e-7;
  std::string format = "csv";
  std::string output;
  int jobs = 1;

  ModelParams model_params() const {
    if (model == "displaced") {
      DisplacedOscillatorParams p;
      p.deformation = {hbar, beta.value_or(0.1), gamma};
      p.mu = mass;
      p.omega = omega;
      p.lambda = lambda.value_or(0.5);
      return p;
    }
    if (model == "swanson") {
      SwansonParams p;
      p.deformation = {hbar, beta.value_or(0.5), gamma};
      p.m = mass;
      p.omega = omega;
      p.lambda = lambda.value_or(0.2);
      p.delta = delta;
      return p;
    }
    throw invalid_argument("unknown model '" + model + "' (expected displaced or swanson)");
  }

  PSpaceOptions p_space_options() const {
    PSpaceOptions o;
    const bool displaced = model == "displaced";
    o.p_max = p_max.value_or(displaced ? 15.0 : 20.0);
    o.points = p_points.value_or(displaced ? 1200 : 1001);
    o.tol = tol;
    return o;
  }

  QuadratureSpec quadrature() const {
    QuadratureSpec q;
    q.node_count = nodes;
    return q;
  }

  void validate() const {
    if (format != "csv" && format != "json") throw invalid_argument("format must be csv or json");
    if (levels < 0) throw invalid_argument("levels must be non-negative");
    if (grid < 64) throw invalid_argument("grid must be at least 64");
    if (nodes < 16) throw invalid_argument("nodes must be at least 16");
    if (jobs < 1) throw invalid_argument("jobs must be at least 1");
    if (p_points && *p_points < 5) throw invalid_argument("p_points must be at least 5");
    if (p_max && !(*p_max > 0.0)) throw invalid_argument("p_max must be positive");
    if (!(tol > 0.0)) throw invalid_argument("tol must be positive");
    validate_model(model_params());
  }

  static void validate_model(const ModelParams& m) { mlqm::validate(m); }

  /// Reads a JSON object; unknown keys are rejected.
  static RunConfig from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw invalid_argument("config must be a JSON object");
    RunConfig c;
    for (const auto& [key, value] : j.items()) {
      try {
        if (key == "model") c.model = value.get<std::string>();
        else if (key == "hbar") c.hbar = value.get<double>();
        else if (key == "beta") c.beta = value.get<double>();
        else if (key == "gamma") c.gamma = value.get<double>();
        else if (key == "mass") c.mass = value.get<double>();
        else if (key == "omega") c.omega = value.get<double>();
        else if (key == "lambda") c.lambda = value.get<double>();
        else if (key == "delta") c.delta = value.get<double>();
        else if (key == "levels") c.levels = value.get<int>();
        else if (key == "grid") c.grid = value.get<std::size_t>();
        else if (key == "nodes") c.nodes = value.get<int>();
        else if (key == "p_points") c.p_points = value.get<std::size_t>();
        else if (key == "p_max") c.p_max = value.get<double>();
        else if (key == "tol") c.tol = value.get<double>();
        else if (key == "format") c.format = value.get<std::string>();
        else if (key == "output") c.output = value.get<std::string>();
        else if (key == "jobs") c.jobs = value.get<int>();
        else throw invalid_argument("unknown config key '" + key + "'");
      } catch (const nlohmann::json::exception& e) {
        throw invalid_argument("config key '" + key + "': " + e.what());
      }
    }
    return c;
  }

  static RunConfig from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_argument("cannot open config file '" + path + "'");
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw invalid_argument("config file '" + path + "' is not valid JSON: " + e.what());
    }
  }
};

/// Rows of numbers written as CSV or as a JSON array of objects.
class Table {
public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add(std::vector<double> row) {
    if (row.size() != columns_.size()) throw invalid_argument("table row has the wrong width");
    rows_.push_back(std::move(row));
  }

  const std::vector<std::vector<double>>& rows() const { return rows_; }

  void write(std::ostream& out, const std::string& format) const {
    if (format == "json") {
      out << "[";
      for (std::size_t r = 0; r < rows_.size(); ++r) {
        out << (r ? ",\n " : "\n ") << "{";
        for (std::size_t c = 0; c < columns_.size(); ++c) {
          out << (c ? "," : "") << '"' << columns_[c] << "\":";
          out << (std::isfinite(rows_[r][c]) ? format_number(rows_[r][c]) : "null");
        }
        out << "}";
      }
      out << (rows_.empty() ? "]\n" : "\n]\n");
      return;
    }
    for (std::size_t c = 0; c < columns_.size(); ++c) out << (c ? "," : "") << columns_[c];
    out << '\n';
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
      out << '\n';
    }
  }

private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

namespace detail {

inline constexpr double nan = std::numeric_limits<double>::quiet_NaN();

/// p-space levels with Im >= -tol scale: one member of each conjugate pair.
inline std::vector<complex> upper_levels(const SpectrumResult& r, double tol) {
  std::vector<complex> out;
  for (const auto& e : r.eigenvalues)
    if (e.imag() >= -tol * std::max(1.0, std::abs(e.real()))) out.push_back(e);
  return out;
}

inline double relative_error(complex value, complex ref) {
  return std::abs(value - ref) / std::max(std::abs(ref), std::numeric_limits<double>::min());
}

} // namespace detail

inline Table spectrum_table(const RunConfig& cfg) {
  cfg.validate();
  const ModelParams model = cfg.model_params();
  Table t({"n", "E_closed", "E_q", "E_p_re", "E_p_im", "err_q", "err_p"});
  if (cfg.levels == 0) return t;

  std::vector<double> eq(static_cast<std::size_t>(cfg.levels), detail::nan);
  bool q_applicable = true;
  if (const auto* s = std::get_if<SwansonParams>(&model)) q_applicable = swanson_spectrum_real(*s);
  if (q_applicable) {
    const SpectrumResult q = q_space_energies(model, cfg.grid, cfg.levels);
    for (std::size_t i = 0; i < q.eigenvalues.size(); ++i) eq[i] = q.eigenvalues[i].real();
  }
  const auto ep = detail::upper_levels(p_space_energies(model, cfg.levels, cfg.p_space_options()), cfg.tol);

  for (int n = 0; n < cfg.levels; ++n) {
    const complex closed = closed_form_energy(n, model);
    const double q = eq[static_cast<std::size_t>(n)];
    const complex p = static_cast<std::size_t>(n) < ep.size() ? ep[static_cast<std::size_t>(n)]
                                                             : complex(detail::nan, detail::nan);
    t.add({static_cast<double>(n), closed.real(), q, p.real(), p.imag(),
           std::isnan(q) ? detail::nan : detail::relative_error(q, closed), detail::relative_error(p, closed)});
  }
  return t;
}

/// Parameter that a sweep varies.
inline ModelParams with_parameter(ModelParams m, const std::string& name, double value) {
  std::visit(
      [&](auto& p) {
        using P = std::decay_t<decltype(p)>;
        if (name == "beta") p.deformation.beta = value;
        else if (name == "lambda") p.lambda = value;
        else if (name == "omega") p.omega = value;
        else if (name == "delta") {
          if constexpr (std::is_same_v<P, SwansonParams>) p.delta = value;
          else throw invalid_argument("delta is not a parameter of the displaced model");
        } else throw invalid_argument("sweep parameter must be one of beta, lambda, delta, omega");
      },
      m);
  return m;
}

inline Table sweep_table(const RunConfig& cfg, const std::string& param, double from, double to, int steps) {
  cfg.validate();
  if (steps < 2) throw invalid_argument("sweep needs at least 2 steps");
  if (from == to) throw invalid_argument("sweep range is empty (from == to)");
  const ModelParams base = cfg.model_params();
  (void)with_parameter(base, param, from);

  std::vector<std::string> cols{param};
  for (int n = 0; n < cfg.levels; ++n) {
    cols.push_back("E_" + std::to_string(n) + "_re");
    cols.push_back("E_" + std::to_string(n) + "_im");
  }
  cols.push_back("beta_c");

  std::vector<std::vector<double>> rows(static_cast<std::size_t>(steps));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(steps));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < steps; i = next++) {
      try {
        const double v = from + (to - from) * i / (steps - 1);
        const ModelParams m = with_parameter(base, param, v);
        validate(m);
        const auto levels = detail::upper_levels(p_space_energies(m, cfg.levels, cfg.p_space_options()), cfg.tol);
        std::vector<double> row{v};
        for (int n = 0; n < cfg.levels; ++n) {
          const complex e = static_cast<std::size_t>(n) < levels.size() ? levels[static_cast<std::size_t>(n)]
                                                                       : complex(detail::nan, detail::nan);
          row.push_back(e.real());
          row.push_back(e.imag());
        }
        double bc = detail::nan;
        if (const auto* s = std::get_if<SwansonParams>(&m)) {
          try {
            bc = swanson_beta_c(*s).value_or(detail::nan);
          } catch (const model_error&) {
          }
        }
        row.push_back(bc);
        rows[static_cast<std::size_t>(i)] = std::move(row);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::min(cfg.jobs, steps); ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  Table t(cols);
  for (auto& r : rows) t.add(std::move(r));
  return t;
}

/// Samples uniform in q on the open interval, excluding both ends.
inline Table wavefunction_table(const RunConfig& cfg, int n, int samples) {
  cfg.validate();
  if (n < 0) throw invalid_argument("level index must be non-negative");
  if (samples < 1) throw invalid_argument("sample count must be positive");
  const ModelParams model = cfg.model_params();
  const SecantEigenfunction psi = model_wavefunction(n, model);
  const MetricFunction eta = model_metric(model);
  const QMap qmap = deformed_q_map(deformation_of(model).beta);
  Table t({"p", "re_psi", "im_psi", "eta_of_p", "q_of_p"});
  const double dq = (qmap.q_max - qmap.q_min) / (samples + 1);
  for (int j = 1; j <= samples; ++j) {
    const double q = qmap.q_min + j * dq;
    const double p = qmap.p_of_q(q);
    const complex v = psi(p);
    t.add({p, v.real(), v.imag(), eta(p), qmap.q_of_p(p)});
  }
  return t;
}

/// Names of the checks run by cmd_verify, in order.
inline std::vector<std::string> verification_checks() {
  return {"commutator_order",         "pseudo_hermiticity",  "pseudo_hermiticity_probe",
          "hermiticity_defect_probe", "gram_orthonormality", "ode_residual",
          "gamma_independence"};
}

/// Metric used by cmd_verify; `override_kind` swaps in another model's closed form.
inline MetricFunction verification_metric(const ModelParams& model, const std::string& override_kind) {
  if (override_kind.empty()) return model_metric(model);
  const DeformationParams d = deformation_of(model);
  if (override_kind == "identity") return MetricFunction::identity();
  if (override_kind == "displaced") {
    if (const auto* p = std::get_if<DisplacedOscillatorParams>(&model)) return displaced_metric(*p);
    const auto& s = std::get<SwansonParams>(model);
    return displaced_metric(DisplacedOscillatorParams{d, s.m, s.omega, s.lambda});
  }
  if (override_kind == "swanson") {
    if (const auto* s = std::get_if<SwansonParams>(&model)) return swanson_metric(*s);
    const auto& p = std::get<DisplacedOscillatorParams>(model);
    SwansonParams s;
    s.deformation = d;
    s.m = p.mu;
    s.omega = p.omega;
    s.lambda = p.lambda;
    s.delta = 0.2;
    return swanson_metric(s);
  }
  throw invalid_argument("metric override must be displaced, swanson or identity");
}

inline bool model_is_hermitian(const ModelParams& m) {
  if (const auto* p = std::get_if<DisplacedOscillatorParams>(&m)) return p->lambda == 0.0;
  const auto& s = std::get<SwansonParams>(m);
  return s.lambda == s.delta;
}

/// The verification battery. Every check is run; records are returned in order.
inline std::vector<ResidualReport> verification_reports(const RunConfig& cfg, const std::string& metric_override = "") {
  cfg.validate();
  const ModelParams model = cfg.model_params();
  const DeformationParams d = deformation_of(model);
  const nlohmann::ordered_json params = to_json(model);
  std::vector<ResidualReport> out;
  auto push = [&](ResidualReport r) {
    for (const auto& [k, v] : params.items())
      if (!r.params.contains(k)) r.params[k] = v;
    out.push_back(std::move(r));
  };

  const double ratio = commutator_convergence_ratio(d);
  ResidualReport comm = make_report("commutator_order", std::abs(ratio - tolerance::commutator_ratio),
                                    tolerance::commutator_ratio_band);
  comm.params["ratio"] = ratio;
  comm.grid = {{"p_max", 8.0}, {"points", {201, 401}}};
  push(comm);

  const MetricFunction eta = verification_metric(model, metric_override);
  const MomentumGrid grid = MomentumGrid::symmetric(20.0, 2000);
  const CoefficientSet coeffs = coefficients(model);
  const Eigen::MatrixXcd h = build_p_space_matrix(coeffs, grid);
  const ProbeBasis probe = make_probe_basis(d, grid);
  push(pseudo_hermiticity_residual(h, eta, d, grid));
  push(pseudo_hermiticity_residual(h, eta, d, grid, probe));

  const double defect = hermiticity_defect(h, d, grid, probe);
  ResidualReport def = model_is_hermitian(model)
                           ? make_report("hermiticity_defect_probe", defect, tolerance::hermitian_adjoint)
                           : make_report("hermiticity_defect_probe", defect, tolerance::hermiticity_defect_min,
                                         Bound::lower);
  def.grid = to_json(grid);
  def.grid["probe_functions"] = probe.phi.cols();
  push(def);

  const int n_states = 6;
  std::vector<SecantEigenfunction> states;
  for (int n = 0; n < n_states; ++n) states.push_back(model_wavefunction(n, model));
  push(gram_matrix(states, eta, d, cfg.quadrature()).report);

  const TransformedProblem problem = transformed_problem(model);
  ResidualReport ode = make_report("ode_residual", 0.0, tolerance::ode_residual);
  for (int n = 0; n < n_states; ++n) {
    const double eps = coeffs.energy_map().to_epsilon(closed_form_energy(n, model).real());
    const ResidualReport r = ode_residual(states[static_cast<std::size_t>(n)], coeffs, eps, problem);
    if (r.value >= ode.value) ode = r;
  }
  ode = make_report("ode_residual", ode.value, tolerance::ode_residual);
  ode.params["levels"] = n_states;
  ode.grid = {{"samples", 1000}, {"sampling", "uniform-q"}};
  push(ode);

  push(gamma_independence(model, {0.0, d.beta / 2.0, d.beta}, 6, cfg.p_space_options()));
  return out;
}

namespace detail {

template <class Body>
int with_output(const RunConfig& cfg, std::ostream& fallback, Body&& body) {
  if (cfg.output.empty()) return body(fallback);
  std::ofstream file(cfg.output, std::ios::binary);
  if (!file) throw invalid_argument("cannot open output file '" + cfg.output + "'");
  return body(file);
}

} // namespace detail

inline int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  const Table t = spectrum_table(cfg);
  return detail::with_output(cfg, out, [&](std::ostream& o) {
    t.write(o, cfg.format);
    return exit_code::ok;
  });
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out, const std::string& param, double from, double to,
                     int steps) {
  const Table t = sweep_table(cfg, param, from, to, steps);
  return detail::with_output(cfg, out, [&](std::ostream& o) {
    t.write(o, cfg.format);
    return exit_code::ok;
  });
}

inline int cmd_wavefunction(const RunConfig& cfg, std::ostream& out, int n, int samples) {
  const Table t = wavefunction_table(cfg, n, samples);
  return detail::with_output(cfg, out, [&](std::ostream& o) {
    t.write(o, cfg.format);
    return exit_code::ok;
  });
}

/// JSON Lines, one record per check; exit 1 if any check fails.
inline int cmd_verify(const RunConfig& cfg, std::ostream& out, const std::string& metric_override = "") {
  const auto reports = verification_reports(cfg, metric_override);
  return detail::with_output(cfg, out, [&](std::ostream& o) {
    bool all = true;
    for (const auto& r : reports) {
      o << to_json(r).dump() << '\n';
      all = all && r.pass;
    }
    return all ? exit_code::ok : exit_code::verification_failed;
  });
}

} // namespace mlqm

#endif
