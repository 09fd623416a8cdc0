#include "run.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include "exinf/consistency.hpp"
#include "exinf/error.hpp"
#include "output.hpp"

#ifndef EXINF_VERSION
#define EXINF_VERSION "unknown"
#endif

namespace exinf::app {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Artifacts written so far and a short result digest for the summary.
struct Artifacts {
  fs::path dir;
  Json outputs = Json::array();
  Json results = Json::object();

  void write(const std::string& name, std::string_view content) {
    write_file_atomic(dir / name, content);
    outputs.push_back(name);
  }
};

std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

Json nullable(std::optional<double> x) { return x ? Json(*x) : Json(nullptr); }

std::string states_csv(const Spectrum& s) {
  const Grid& g = s.grid();
  std::string out = "q";
  for (std::size_t k = 0; k < s.size(); ++k) {
    out += ",re_" + std::to_string(k) + ",im_" + std::to_string(k);
  }
  out += '\n';
  for (std::size_t i = 0; i < g.size(); ++i) {
    out += format_real(g.point(i));
    for (const auto& p : s) {
      out += ',' + format_real(p.state[i].real());
      out += ',' + format_real(p.state[i].imag());
    }
    out += '\n';
  }
  return out;
}

void run_eigensolve(const ExperimentConfig& c, Artifacts& a) {
  const Spectrum s = solve_spectrum(*c.potential, *c.grid, c.states, c.eigensolver);
  std::string table = "index,energy,residual\n";
  Json energies = Json::array();
  for (std::size_t k = 0; k < s.size(); ++k) {
    table += std::to_string(k) + ',' + format_real(s[k].energy) + ',' +
             format_real(residual_norm(s[k], *c.potential)) + '\n';
    energies.push_back(s[k].energy);
  }
  a.write("spectrum.csv", table);
  a.write("states.csv", states_csv(s));
  a.results["energies"] = energies;
  a.results["orthonormality_defect"] = orthonormality_defect(s);
}

void run_variational(const ExperimentConfig& c, Artifacts& a) {
  std::vector<std::size_t> iterations(c.states, 0);
  std::vector<double> gradients(c.states, 0.0);
  const Spectrum s = minimize_functional(*c.potential, *c.grid, c.states, c.variational,
                                         [&](const IterationRecord& r) {
                                           iterations[r.state] = r.iteration;
                                           gradients[r.state] = r.gradient_norm;
                                         });
  std::string table = "index,energy,iterations,gradient_norm\n";
  Json energies = Json::array();
  for (std::size_t k = 0; k < s.size(); ++k) {
    table += std::to_string(k) + ',' + format_real(s[k].energy) + ',' + std::to_string(iterations[k]) + ',' +
             format_real(gradients[k]) + '\n';
    energies.push_back(s[k].energy);
  }
  a.write("spectrum.csv", table);
  a.write("states.csv", states_csv(s));
  a.results["energies"] = energies;
  a.results["orthonormality_defect"] = orthonormality_defect(s);
}

void run_consistency(const ExperimentConfig& c, Artifacts& a) {
  const auto& in = c.consistency;
  std::size_t needed = 0;
  for (std::size_t k : in.states) needed = std::max(needed, k + 1);
  const Spectrum s = solve_spectrum(*c.potential, *c.grid, needed, c.eigensolver);

  std::vector<Complex> mix(c.grid->size(), Complex{});
  Json components = Json::array();
  for (std::size_t j = 0; j < in.states.size(); ++j) {
    const auto& pair = s[in.states[j]];
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] += in.coefficients[j] * pair.state[i];
    components.push_back({{"state", in.states[j]},
                          {"energy", pair.energy},
                          {"coefficient", Json::array({in.coefficients[j].real(), in.coefficients[j].imag()})}});
  }
  const ScalarField psi(*c.grid, std::move(mix));
  const ConsistencyReport r = observability_verdict(psi, in.assigned_energy, *c.potential, in.tolerance);
  const Json report{{"assigned_energy", r.assigned_energy},
                    {"mean_energy", r.mean_energy},
                    {"energy_variance", r.energy_variance},
                    {"el_residual", r.el_residual},
                    {"observable", r.observable},
                    {"tolerance", r.tolerance},
                    {"components", components}};
  a.write("report.json", json_text(report));
  a.results["observable"] = r.observable;
  a.results["energy_variance"] = r.energy_variance;
}

void run_doubleslit(const ExperimentConfig& c, Artifacts& a) {
  const DetectorPattern p = detector_pattern(c.slits);
  const FringeMetrics m = fringe_metrics(p);
  a.write("pattern.csv", pattern_csv(p));
  const Json metrics{{"spacing", nullable(m.spacing)},
                     {"visibility", m.visibility},
                     {"maxima", m.maxima},
                     {"far_field_spacing",
                      c.slits.wavelength() * c.slits.screen_distance / c.slits.separation}};
  a.write("metrics.json", json_text(metrics));
  a.results["spacing"] = nullable(m.spacing);
  a.results["visibility"] = m.visibility;
}

void run_sample(const ExperimentConfig& c, Artifacts& a) {
  const DetectorPattern p = detector_pattern(c.slits);
  const auto counts = sample_hits(p, c.hits, c.seed);
  std::string table = "x,count\n";
  for (std::size_t b = 0; b < counts.size(); ++b) {
    table += format_real(p.bin_centers[b]) + ',' + std::to_string(counts[b]) + '\n';
  }
  a.write("hits.csv", table);
  a.results["hits"] = c.hits;
}

Json error_json(const std::exception& e) {
  Json j{{"message", e.what()}};
  if (const auto* ce = dynamic_cast<const ConvergenceError*>(&e)) {
    j["type"] = "convergence";
    j["residual"] = ce->residual();
  } else if (const auto* ne = dynamic_cast<const NodeError*>(&e)) {
    j["type"] = "node";
    j["indices"] = ne->indices();
  } else if (const auto* no = dynamic_cast<const NormalizationError*>(&e)) {
    j["type"] = "normalization";
    j["deviation"] = no->deviation();
  } else if (dynamic_cast<const OutputError*>(&e)) {
    j["type"] = "io";
  } else {
    j["type"] = "computation";
  }
  return j;
}

Json summary_head(std::string_view command) {
  return Json{{"tool", "exinf"}, {"version", EXINF_VERSION}, {"command", command}};
}

bool write_summary(const fs::path& dir, const Json& summary, std::ostream& log) {
  try {
    write_file_atomic(dir / "summary.json", json_text(summary));
    return true;
  } catch (const OutputError& e) {
    log << "error: " << e.what() << '\n';
    return false;
  }
}

}  // namespace

int run(const ExperimentConfig& config, const fs::path& out_dir, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  Json summary = summary_head(command_name(config.command));
  summary["config"] = config.echo;
  summary["warnings"] = config.warnings;
  for (const auto& w : config.warnings) log << "warning: " << w << '\n';

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    log << "error: cannot create output directory " << out_dir.string() << '\n';
    return exit_failure;
  }

  Artifacts a{out_dir};
  int code = exit_ok;
  try {
    switch (config.command) {
      case Command::eigensolve: run_eigensolve(config, a); break;
      case Command::variational: run_variational(config, a); break;
      case Command::consistency: run_consistency(config, a); break;
      case Command::doubleslit: run_doubleslit(config, a); break;
      case Command::sample: run_sample(config, a); break;
    }
    summary["status"] = "ok";
  } catch (const std::exception& e) {
    code = exit_failure;
    summary["status"] = "failed";
    summary["error"] = error_json(e);
    log << "error: " << e.what() << '\n';
  }
  summary["exit_code"] = code;
  summary["outputs"] = a.outputs;
  summary["results"] = a.results;
  summary["wall_time_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!write_summary(out_dir, summary, log)) return exit_failure;
  return code;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& log) {
  CLI::App cli{"exinf: external-influence model of stationary quantum states", "exinf"};
  cli.set_version_flag("--version", EXINF_VERSION);
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  cli.add_option("command", command, "eigensolve | variational | consistency | doubleslit | sample")
      ->required()
      ->check(CLI::IsMember({"eigensolve", "variational", "consistency", "doubleslit", "sample"}));
  cli.add_option("--config", config_path, "YAML experiment description")->required();
  cli.add_option("--out", out_dir, "output directory (default: current directory)");
  cli.add_option("--seed", seed, "overrides the seed in the config");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << cli.help();
    return exit_ok;
  } catch (const CLI::CallForVersion&) {
    out << EXINF_VERSION << '\n';
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    log << "error: " << e.what() << '\n' << cli.help();
    return exit_config;
  }

  const Command cmd = *parse_command(command);
  auto config_failure = [&](const std::string& message, const Json& detail) {
    log << "error: " << message << '\n';
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!ec) {
      Json summary = summary_head(command);
      summary["status"] = "config_error";
      summary["error"] = detail;
      summary["exit_code"] = static_cast<int>(exit_config);
      write_summary(out_dir, summary, log);
    }
    return exit_config;
  };

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    return config_failure("cannot read config file " + config_path,
                          Json{{"type", "config"}, {"message", "cannot read " + config_path}});
  }
  std::ostringstream text;
  text << in.rdbuf();

  ExperimentConfig config;
  try {
    config = parse_config(text.str(), cmd);
  } catch (const ConfigError& e) {
    return config_failure(config_path + ": " + e.what(), Json{{"type", "config"},
                                                              {"field", e.field()},
                                                              {"position", e.where()},
                                                              {"message", e.what()}});
  }
  if (seed) override_seed(config, *seed);
  const int code = run(config, out_dir, log);
  if (code == exit_ok) out << command << ": wrote results to " << out_dir << '\n';
  return code;
}

}  // namespace exinf::app
