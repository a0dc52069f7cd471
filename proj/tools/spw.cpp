// spw: command-line front end for sweeps, verdicts, certificate checks,
// sample extraction and sample generation.
//
// Exit codes: 0 success, 1 usage or input error, 2 certificate or verdict
// failure, 3 solver failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spw/errors.hpp"
#include "spw/experiment.hpp"
#include "spw/serialization.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;
constexpr int kExitSolver = 3;

struct Overrides {
  std::string config_path;
  double p1 = 0.0;
  double p2 = 0.0;
  std::string loss_mode;
  double eta_a = 1.0;
  double eta_b = 1.0;
  std::vector<double> eta;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> bounds;
  double k_sigma = 0.0;
  double box_k_sigma = 0.0;
  bool no_tomography = false;
  int levels = 3;
  unsigned workers = 0;

  std::vector<std::pair<std::string, CLI::Option*>> options;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
    options = {
        {"p1", app->add_option("--p1", p1, "Single-photon component of the source")},
        {"p2", app->add_option("--p2", p2, "Two-photon component of the source")},
        {"loss_mode", app->add_option("--loss-mode", loss_mode, "sym, asym or explicit")},
        {"eta_a", app->add_option("--eta-a", eta_a, "Transmission to Alice (explicit mode)")},
        {"eta_b", app->add_option("--eta-b", eta_b, "Transmission to Bob (explicit mode)")},
        {"eta", app->add_option("--eta", eta, "Total transmissions eta_AB (comma separated)")->delimiter(',')},
        {"samples", app->add_option("--samples", samples, "Samples per setting (0: exact only)")},
        {"seed", app->add_option("--seed", seed, "Random seed")},
        {"bounds", app->add_option("--bounds", bounds, "Bound methods (comma separated)")->delimiter(',')},
        {"k_sigma", app->add_option("--k-sigma", k_sigma, "Verdict margin in standard errors")},
        {"box_k_sigma", app->add_option("--box-k-sigma", box_k_sigma, "Probability box half-width for SDP bounds")},
        {"no_tomography", app->add_flag("--no-tomography", no_tomography, "Read local statistics from the state")},
        {"levels", app->add_option("--tomography-levels", levels, "Photon-number classes estimated (3..5)")},
        {"workers", app->add_option("--workers", workers, "Worker threads (0: all cores)")},
    };
  }

  bool given(const std::string& name) const {
    for (const auto& [n, opt] : options)
      if (n == name) return opt->count() > 0;
    return false;
  }

  spw::ExperimentConfig resolve() const {
    spw::ExperimentConfig c;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      c = spw::config_from_json(spw::Json::parse(in));
    }
    if (given("p1")) c.source.p1 = p1;
    if (given("p2")) c.source.p2 = p2;
    if (given("loss_mode")) c.loss_mode = spw::parse_loss_mode(loss_mode);
    if (given("eta_a")) c.eta_a = eta_a;
    if (given("eta_b")) c.eta_b = eta_b;
    if (given("eta")) c.eta_grid = eta;
    if (given("samples")) c.samples_per_setting = samples;
    if (given("seed")) c.seed = seed;
    if (given("bounds")) {
      c.bounds.clear();
      for (const auto& b : bounds) c.bounds.push_back(spw::parse_bound_method(b));
    }
    if (given("k_sigma")) c.k_sigma = k_sigma;
    if (given("box_k_sigma")) c.box_k_sigma = box_k_sigma;
    if (no_tomography) c.tomography = false;
    if (given("levels")) c.tomography_levels = levels;
    if (given("workers")) c.workers = workers;
    c.validate();
    return c;
  }
};

// Writes to the file when a path is given, otherwise to stdout.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  out << text;
}

int cmd_sweep(const Overrides& o, const std::string& output) {
  const spw::ExperimentConfig config = o.resolve();
  const auto rows = spw::run_sweep(config);
  std::ostringstream os;
  spw::write_sweep_csv(os, config, rows);
  emit(output.empty() ? config.outputs.sweep_csv : output, os.str());
  return kExitOk;
}

int cmd_verdict(const Overrides& o, const std::string& output, bool require_witness) {
  const spw::ExperimentConfig config = o.resolve();
  const spw::Json report = spw::run_verdict(config);
  emit(output.empty() ? config.outputs.report_json : output, report.dump(2) + "\n");

  const auto& bounds = report["point"]["bounds"];
  for (const auto& b : bounds) {
    if (b.contains("error")) {
      std::cerr << "spw: bound " << b["method"].get<std::string>() << " failed: " << b["error"].get<std::string>()
                << "\n";
      return kExitSolver;
    }
  }
  if (!report["point"]["errors"].empty()) return kExitSolver;
  if (require_witness) {
    for (const auto& b : bounds) {
      if (b["verdict"] != "witnessed") return kExitFailure;
    }
  }
  return kExitOk;
}

int cmd_certify(const std::vector<double>& grid, double perturb, double tol, const std::string& output) {
  const spw::CertifyReport report = spw::run_certify(grid, perturb, tol);
  emit(output, spw::to_json(report).dump(2) + "\n");
  return report.all_pass ? kExitOk : kExitFailure;
}

int cmd_extract(const std::string& input, int levels, const std::string& output) {
  std::ifstream in(input);
  if (!in) throw std::invalid_argument("cannot open '" + input + "'");
  const spw::SampleBatch batch = spw::read_samples_csv(in);
  emit(output, spw::run_extract(batch, levels).dump(2) + "\n");
  return kExitOk;
}

int cmd_sample(const Overrides& o, const std::string& output) {
  spw::ExperimentConfig config = o.resolve();
  const auto grid = config.effective_grid();
  if (grid.size() != 1) throw std::invalid_argument("sample: the configuration must describe a single point");
  if (config.samples_per_setting == 0) throw std::invalid_argument("sample: --samples must be positive");
  const spw::TwoModeState state = spw::experiment_state(config.source, config.loss_at(grid.front()));
  const spw::SampleBatch batch =
      spw::sample_batch(state, config.samples_per_setting, spw::derive_seed(config.seed, 0));
  std::ostringstream os;
  spw::write_samples_csv(os, batch);
  emit(output.empty() ? config.outputs.samples_csv : output, os.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-photon entanglement witness toolkit"};
  app.require_subcommand(1);

  Overrides sweep_o;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Loss sweep to CSV");
  sweep_o.attach(sweep);
  sweep->add_option("--output", sweep_out, "CSV path (default: stdout)");

  Overrides verdict_o;
  std::string verdict_out;
  bool require_witness = false;
  auto* verdict = app.add_subcommand("verdict", "Full report for one loss setting");
  verdict_o.attach(verdict);
  verdict->add_option("--output", verdict_out, "JSON path (default: stdout)");
  verdict->add_flag("--require-witness", require_witness, "Exit with 2 unless every bound is beaten");

  std::vector<double> grid{0.05, 0.1, 0.25, 0.5};
  double perturb = 0.0;
  double tol = 1e-10;
  std::string certify_out;
  auto* certify = app.add_subcommand("certify", "Check the closed-form dual certificate");
  certify->add_option("--grid", grid, "p_joint values in (0, 0.5] (comma separated)")->delimiter(',');
  certify->add_option("--perturb-lambda", perturb, "Offset added to lambda before checking");
  certify->add_option("--tolerance", tol, "Residual and eigenvalue tolerance");
  certify->add_option("--output", certify_out, "JSON path (default: stdout)");

  std::string extract_in;
  std::string extract_out;
  int extract_levels = 3;
  auto* extract = app.add_subcommand("extract", "Witness and photon statistics from a samples CSV");
  extract->add_option("--input", extract_in, "Samples CSV")->required()->check(CLI::ExistingFile);
  extract->add_option("--tomography-levels", extract_levels, "Photon-number classes estimated (3..5)");
  extract->add_option("--output", extract_out, "JSON path (default: stdout)");

  Overrides sample_o;
  std::string sample_out;
  auto* sample = app.add_subcommand("sample", "Emit raw quadrature samples for one loss setting");
  sample_o.attach(sample);
  sample->add_option("--output", sample_out, "CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sweep) return cmd_sweep(sweep_o, sweep_out);
    if (*verdict) return cmd_verdict(verdict_o, verdict_out, require_witness);
    if (*certify) return cmd_certify(grid, perturb, tol, certify_out);
    if (*extract) return cmd_extract(extract_in, extract_levels, extract_out);
    if (*sample) return cmd_sample(sample_o, sample_out);
  } catch (const spw::SolverError& e) {
    std::cerr << "spw: " << e.what() << "\n";
    for (const auto& line : e.trace()) std::cerr << "  " << line << "\n";
    return kExitSolver;
  } catch (const spw::Json::exception& e) {
    std::cerr << "spw: malformed JSON: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "spw: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "spw: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "spw: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitUsage;
}
