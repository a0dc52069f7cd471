#include "spw/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "spw/tomography.hpp"

namespace spw {

namespace {

constexpr double kChainTol = 1e-12;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("config: " + what);
}

std::vector<double> grid_from_json(const Json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  if (!j.is_object()) throw std::invalid_argument("config: eta_grid must be an array or a range object");
  const double start = j.at("start").get<double>();
  const double stop = j.at("stop").get<double>();
  const int count = j.at("count").get<int>();
  const std::string spacing = j.value("spacing", std::string("linear"));
  require(count >= 1, "eta_grid.count must be positive");
  require(spacing == "linear" || spacing == "log", "eta_grid.spacing must be 'linear' or 'log'");
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    grid[i] = spacing == "linear" ? start + t * (stop - start) : start * std::pow(stop / start, t);
  }
  return grid;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

Json stats_pair(const BipartiteStats& s, bool from_tomography) {
  return {{"source", from_tomography ? "tomography" : "state"}, {"a", to_json(s.a)}, {"b", to_json(s.b)}};
}

}  // namespace

std::string to_string(LossMode mode) {
  switch (mode) {
    case LossMode::Sym:
      return "sym";
    case LossMode::Asym:
      return "asym";
    case LossMode::Explicit:
      return "explicit";
  }
  return "unknown";
}

LossMode parse_loss_mode(const std::string& tag) {
  if (tag == "sym") return LossMode::Sym;
  if (tag == "asym") return LossMode::Asym;
  if (tag == "explicit") return LossMode::Explicit;
  throw std::invalid_argument("unknown loss mode '" + tag + "' (expected sym, asym or explicit)");
}

void ExperimentConfig::validate() const {
  require(source.p1 >= 0.0 && source.p1 <= 1.0, "source.p1 must lie in [0, 1]");
  require(source.p2 >= 0.0 && source.p2 <= 1.0, "source.p2 must lie in [0, 1]");
  require(source.p1 + source.p2 <= 1.0 + 1e-12, "source.p1 + source.p2 must not exceed 1");
  if (loss_mode == LossMode::Explicit) {
    require(eta_a > 0.0 && eta_a <= 1.0, "eta_a must lie in (0, 1]");
    require(eta_b > 0.0 && eta_b <= 1.0, "eta_b must lie in (0, 1]");
  } else {
    require(!eta_grid.empty(), "eta_grid must not be empty");
    for (double e : eta_grid) require(e > 0.0 && e <= 1.0, "eta_grid values must lie in (0, 1]");
  }
  if (tomography) {
    require(samples_per_setting >= kMinTomographySamples,
            "tomography needs samples_per_setting >= " + std::to_string(kMinTomographySamples));
  }
  require(tomography_levels >= 3 && tomography_levels <= PatternFunctions::kMaxLevel,
          "tomography_levels must lie in [3, 5]");
  require(k_sigma >= 0.0, "k_sigma must be non-negative");
  require(box_k_sigma >= 0.0, "box_k_sigma must be non-negative");
}

LossParams ExperimentConfig::loss_at(double eta_ab) const {
  switch (loss_mode) {
    case LossMode::Sym:
      return LossParams::symmetric(eta_ab);
    case LossMode::Asym:
      return LossParams::asymmetric(eta_ab);
    case LossMode::Explicit:
      return {eta_a, eta_b};
  }
  throw std::invalid_argument("unknown loss mode");
}

std::vector<double> ExperimentConfig::effective_grid() const {
  if (loss_mode == LossMode::Explicit) return {eta_a * eta_b};
  return eta_grid;
}

ExperimentConfig config_from_json(const Json& j) {
  static const std::set<std::string> known{"source",  "loss_mode", "eta_a",      "eta_b",
                                           "eta_grid", "samples_per_setting", "seed", "bounds",
                                           "k_sigma", "box_k_sigma", "tomography", "tomography_levels",
                                           "workers", "outputs"};
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  ExperimentConfig c;
  if (j.contains("source")) {
    c.source.p1 = j["source"].value("p1", c.source.p1);
    c.source.p2 = j["source"].value("p2", c.source.p2);
  }
  if (j.contains("loss_mode")) c.loss_mode = parse_loss_mode(j["loss_mode"].get<std::string>());
  c.eta_a = j.value("eta_a", c.eta_a);
  c.eta_b = j.value("eta_b", c.eta_b);
  if (j.contains("eta_grid")) c.eta_grid = grid_from_json(j["eta_grid"]);
  c.samples_per_setting = j.value("samples_per_setting", c.samples_per_setting);
  c.seed = j.value("seed", c.seed);
  if (j.contains("bounds")) {
    c.bounds.clear();
    for (const auto& b : j["bounds"]) c.bounds.push_back(parse_bound_method(b.get<std::string>()));
  }
  c.k_sigma = j.value("k_sigma", c.k_sigma);
  c.box_k_sigma = j.value("box_k_sigma", c.box_k_sigma);
  c.tomography = j.value("tomography", c.tomography);
  c.tomography_levels = j.value("tomography_levels", c.tomography_levels);
  c.workers = j.value("workers", c.workers);
  if (j.contains("outputs")) {
    c.outputs.sweep_csv = j["outputs"].value("sweep_csv", std::string());
    c.outputs.report_json = j["outputs"].value("report_json", std::string());
    c.outputs.samples_csv = j["outputs"].value("samples_csv", std::string());
  }
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["source"] = {{"p1", c.source.p1}, {"p2", c.source.p2}};
  j["loss_mode"] = to_string(c.loss_mode);
  if (c.loss_mode == LossMode::Explicit) {
    j["eta_a"] = c.eta_a;
    j["eta_b"] = c.eta_b;
  } else {
    j["eta_grid"] = c.eta_grid;
  }
  j["samples_per_setting"] = c.samples_per_setting;
  j["seed"] = c.seed;
  Json bounds = Json::array();
  for (BoundMethod m : c.bounds) bounds.push_back(to_string(m));
  j["bounds"] = std::move(bounds);
  j["k_sigma"] = c.k_sigma;
  j["box_k_sigma"] = c.box_k_sigma;
  j["tomography"] = c.tomography;
  j["tomography_levels"] = c.tomography_levels;
  return j;
}

TwoModeState experiment_state(const SourceConfig& source, const LossParams& loss) {
  const SingleModeState photon = heralded_source_state(source.p1, source.p2, FockCutoff{2});
  return apply_loss(beam_splitter_split(photon, 0.5), loss);
}

SweepRow evaluate_point(const ExperimentConfig& config, double eta_ab, std::size_t index) {
  SweepRow row;
  row.index = index;
  row.eta_ab = eta_ab;
  try {
    row.km = km_equivalent(eta_ab);
    const LossParams loss = config.loss_at(eta_ab);
    row.eta_a = loss.eta_a;
    row.eta_b = loss.eta_b;
    const TwoModeState state = experiment_state(config.source, loss);
    row.s_exact = s_exact(state);
    row.stats = local_photon_probs(state);

    if (config.samples_per_setting > 0) {
      const SampleBatch batch = sample_batch(state, config.samples_per_setting, derive_seed(config.seed, index));
      row.witness = s_from_samples(batch);
      if (config.tomography) {
        row.stats.a = estimate_local_probs(batch, Party::A, config.tomography_levels);
        row.stats.b = estimate_local_probs(batch, Party::B, config.tomography_levels);
        row.stats_from_tomography = true;
      }
    }

    const LocalPhotonStats a = sanitized(row.stats.a);
    const LocalPhotonStats b = sanitized(row.stats.b);
    WitnessResult observed;
    if (row.witness) {
      observed = *row.witness;
    } else {
      observed.s = row.s_exact;
    }
    for (BoundMethod method : config.bounds) {
      PointBound pb;
      pb.method = method;
      try {
        pb.result = compute_bound(method, a, b, loss, config.box_k_sigma);
        pb.verdict = verdict(observed, *pb.result, config.k_sigma);
      } catch (const std::exception& e) {
        pb.error = e.what();
        row.errors.push_back(to_string(method) + ": " + e.what());
      }
      row.bounds.push_back(std::move(pb));
    }
  } catch (const std::exception& e) {
    row.errors.push_back(e.what());
    for (std::size_t i = row.bounds.size(); i < config.bounds.size(); ++i) {
      PointBound pb;
      pb.method = config.bounds[i];
      pb.error = e.what();
      row.bounds.push_back(std::move(pb));
    }
  }
  return row;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config) {
  config.validate();
  const std::vector<double> grid = config.effective_grid();
  std::vector<SweepRow> rows(grid.size());
  unsigned workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(grid.size()));

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
      rows[i] = evaluate_point(config, grid[i], i);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return rows;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  if (v == 0.0) return "0";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string sweep_csv_header(const std::vector<BoundMethod>& bounds) {
  std::string h = "eta_ab,km,s_exact,s_mc,s_se,p0a,p1a,pge2a,p0b,p1b,pge2b";
  for (BoundMethod m : bounds) h += ",bound_" + to_string(m);
  for (BoundMethod m : bounds) h += ",verdict_" + to_string(m);
  return h + ",errors";
}

std::string sweep_csv_line(const SweepRow& row) {
  std::ostringstream os;
  os << format_number(row.eta_ab) << ',' << format_number(row.km) << ',' << format_number(row.s_exact) << ',';
  if (row.witness) {
    os << format_number(row.witness->s) << ',' << format_number(row.witness->standard_error);
  } else {
    os << ',';
  }
  for (const auto* s : {&row.stats.a, &row.stats.b}) {
    os << ',' << format_number(s->p0) << ',' << format_number(s->p1) << ',' << format_number(s->p_ge2);
  }
  for (const auto& b : row.bounds) os << ',' << (b.result ? format_number(b.result->value) : "");
  for (const auto& b : row.bounds) os << ',' << (b.verdict ? to_string(*b.verdict) : "");
  std::string errors;
  for (const auto& e : row.errors) errors += (errors.empty() ? "" : "; ") + e;
  os << ',' << csv_escape(errors);
  return os.str();
}

void write_sweep_csv(std::ostream& out, const ExperimentConfig& config, const std::vector<SweepRow>& rows) {
  out << sweep_csv_header(config.bounds) << '\n';
  for (const auto& r : rows) out << sweep_csv_line(r) << '\n';
}

Json to_json(const SweepRow& row) {
  Json j;
  j["index"] = row.index;
  j["eta_ab"] = row.eta_ab;
  j["eta_a"] = row.eta_a;
  j["eta_b"] = row.eta_b;
  j["km"] = row.km;
  j["s_exact"] = row.s_exact;
  j["witness"] = row.witness ? to_json(*row.witness) : Json(nullptr);
  j["stats"] = stats_pair(row.stats, row.stats_from_tomography);
  Json bounds = Json::array();
  for (const auto& b : row.bounds) {
    Json bj = b.result ? to_json(*b.result) : Json{{"method", to_string(b.method)}};
    bj["verdict"] = b.verdict ? Json(to_string(*b.verdict)) : Json(nullptr);
    if (!b.error.empty()) bj["error"] = b.error;
    bounds.push_back(std::move(bj));
  }
  j["bounds"] = std::move(bounds);
  j["errors"] = row.errors;
  return j;
}

Json run_verdict(const ExperimentConfig& config) {
  config.validate();
  const auto grid = config.effective_grid();
  if (grid.size() != 1) throw std::invalid_argument("verdict: the configuration must describe a single point");
  const SweepRow row = evaluate_point(config, grid.front(), 0);
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = "verdict";
  j["config"] = to_json(config);
  j["k_sigma"] = config.k_sigma;
  j["point"] = to_json(row);
  return j;
}

CertifyReport run_certify(const std::vector<double>& grid, double lambda_perturbation, double tolerance) {
  if (grid.empty()) throw std::invalid_argument("certify: empty p_joint grid");
  for (double p : grid) {
    if (!(p > 0.0 && p <= 0.5)) {
      throw std::invalid_argument("certify: p_joint " + format_number(p) + " is outside (0, 1/2]");
    }
  }
  CertifyReport report;
  report.tolerance = tolerance;
  const RealMatrix m = witness_matrix();
  const RealMatrix n = qubit_projector();
  const RealMatrix id = RealMatrix::Identity(m.rows(), m.cols());
  for (double p : grid) {
    CertifyRow row;
    row.p_joint = p;
    row.certificate = build_certificate(p);
    CertificateData& c = row.certificate;
    c.lambda += lambda_perturbation;
    c.residual_norm = (c.a_matrix + partial_transpose_01(c.b_matrix) - c.mu * n - c.lambda * id + m).norm();
    c.dual_bound = c.lambda + c.mu * (1.0 - p) + 2.0 * std::numbers::sqrt2 * p;
    row.residual = c.residual_norm;
    row.closed_form = pjoint_closed_form_bound(p).value;
    row.chain_error = std::abs(c.dual_bound - row.closed_form);
    row.pass = row.residual <= tolerance && c.min_eig_a >= -tolerance && c.min_eig_b >= -tolerance &&
               row.chain_error <= kChainTol;
    report.all_pass = report.all_pass && row.pass;
    report.rows.push_back(std::move(row));
  }
  return report;
}

Json to_json(const CertifyReport& r) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = "certify";
  j["tolerance"] = r.tolerance;
  j["all_pass"] = r.all_pass;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"p_joint", row.p_joint},
                    {"lambda", row.certificate.lambda},
                    {"mu", row.certificate.mu},
                    {"ell", row.certificate.ell},
                    {"m", row.certificate.m},
                    {"residual_norm", row.residual},
                    {"min_eig_a", row.certificate.min_eig_a},
                    {"min_eig_b", row.certificate.min_eig_b},
                    {"dual_bound", row.certificate.dual_bound},
                    {"closed_form", row.closed_form},
                    {"chain_error", row.chain_error},
                    {"pass", row.pass}});
  }
  j["rows"] = std::move(rows);
  return j;
}

Json run_extract(const SampleBatch& batch, int n_levels) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = "extract";
  j["n_records"] = batch.count();
  j["witness"] = to_json(s_from_samples(batch));
  j["witness_phase_averaged"] = to_json(s_phase_averaged_from_samples(batch));
  const LocalPhotonStats a = estimate_local_probs(batch, Party::A, n_levels);
  const LocalPhotonStats b = estimate_local_probs(batch, Party::B, n_levels);
  j["stats"] = {{"source", "tomography"}, {"a", to_json(a)}, {"b", to_json(b)}};
  const PStar ps = p_star(a, b);
  j["p_star"] = {{"value", ps.p_star}, {"sigma", ps.sigma}};
  return j;
}

}  // namespace spw
