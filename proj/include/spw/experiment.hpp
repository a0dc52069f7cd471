#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spw/bounds.hpp"
#include "spw/fock.hpp"
#include "spw/homodyne.hpp"
#include "spw/serialization.hpp"
#include "spw/witness.hpp"

namespace spw {

inline constexpr const char* kReportSchemaVersion = "1.0";

enum class LossMode { Sym, Asym, Explicit };
std::string to_string(LossMode mode);
LossMode parse_loss_mode(const std::string& tag);

struct SourceConfig {
  double p1 = 1.0;
  double p2 = 0.0;
};

struct OutputPaths {
  std::string sweep_csv;
  std::string report_json;
  std::string samples_csv;
};

/// One experiment: a heralded source split on a balanced beam splitter, with
/// channel losses applied per grid point.
struct ExperimentConfig {
  SourceConfig source;
  LossMode loss_mode = LossMode::Sym;
  /// Used when loss_mode is Explicit (the grid is then ignored).
  double eta_a = 1.0;
  double eta_b = 1.0;
  /// Total transmissions eta_AB in (0, 1].
  std::vector<double> eta_grid{1.0};
  /// 0 disables Monte Carlo (exact values only).
  std::size_t samples_per_setting = 100000;
  std::uint64_t seed = 1;
  std::vector<BoundMethod> bounds{BoundMethod::SdpEnhanced};
  /// Verdict margin: witnessed iff S - k_sigma * SE > bound.
  double k_sigma = 3.0;
  /// Probability boxes for the SDP bounds (0: point estimates).
  double box_k_sigma = 0.0;
  /// Local statistics from pattern-function tomography of the samples
  /// (otherwise read from the state).
  bool tomography = true;
  int tomography_levels = 3;
  /// Worker threads for sweeps; 0 picks the hardware concurrency.
  unsigned workers = 0;
  OutputPaths outputs;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  /// Loss parameters of a grid point.
  LossParams loss_at(double eta_ab) const;
  /// Grid points actually evaluated (a single point in explicit mode).
  std::vector<double> effective_grid() const;
};

/// Keys as in to_json; unknown keys are rejected. The grid may be an array or
/// {"start", "stop", "count", "spacing": "linear" | "log"}.
ExperimentConfig config_from_json(const Json& j);
Json to_json(const ExperimentConfig& c);

/// The shared state for a loss setting.
TwoModeState experiment_state(const SourceConfig& source, const LossParams& loss);

struct PointBound {
  BoundMethod method = BoundMethod::SdpEnhanced;
  std::optional<BoundResult> result;
  std::optional<Verdict> verdict;
  std::string error;
};

struct SweepRow {
  std::size_t index = 0;
  double eta_ab = 0.0;
  double eta_a = 0.0;
  double eta_b = 0.0;
  double km = 0.0;
  double s_exact = 0.0;
  std::optional<WitnessResult> witness;
  BipartiteStats stats;
  bool stats_from_tomography = false;
  std::vector<PointBound> bounds;
  std::vector<std::string> errors;
};

/// One grid point: state, exact S, sampling, statistics, bounds, verdicts.
/// Failures are collected in the row instead of thrown.
SweepRow evaluate_point(const ExperimentConfig& config, double eta_ab, std::size_t index);

/// All grid points on a worker pool; rows come back in grid order.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config);

std::string sweep_csv_header(const std::vector<BoundMethod>& bounds);
/// 12 significant digits, empty cells for missing values.
std::string sweep_csv_line(const SweepRow& row);
void write_sweep_csv(std::ostream& out, const ExperimentConfig& config, const std::vector<SweepRow>& rows);

/// Full report for the first grid point.
Json run_verdict(const ExperimentConfig& config);
Json to_json(const SweepRow& row);

struct CertifyRow {
  double p_joint = 0.0;
  CertificateData certificate;
  double closed_form = 0.0;
  double chain_error = 0.0;
  double residual = 0.0;
  bool pass = false;
};

struct CertifyReport {
  std::vector<CertifyRow> rows;
  double tolerance = 1e-10;
  bool all_pass = true;
};

/// Residual table for build_certificate over a grid in (0, 1/2]. A nonzero
/// lambda_perturbation is added to lambda before the checks. Grid values
/// outside (0, 1/2] throw std::invalid_argument.
CertifyReport run_certify(const std::vector<double>& grid, double lambda_perturbation = 0.0,
                          double tolerance = 1e-10);
Json to_json(const CertifyReport& r);

/// Witness and local statistics from a samples file.
Json run_extract(const SampleBatch& batch, int n_levels = 3);

/// Formats with 12 significant digits (shortest round-trip is not used so that
/// files are stable across platforms).
std::string format_number(double v);

}  // namespace spw
