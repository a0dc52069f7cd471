#pragma once

#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "spw/photon_stats.hpp"

namespace spw {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

/// Maximum photon number kept per mode.
class FockCutoff {
 public:
  explicit FockCutoff(int n_max = 2);

  int n_max() const { return n_max_; }
  int levels() const { return n_max_ + 1; }
  int two_mode_dim() const { return levels() * levels(); }
  /// Bob-fast ordering: |n_A n_B> -> n_A * levels + n_B.
  int index(int n_a, int n_b) const { return n_a * levels() + n_b; }

  friend bool operator==(const FockCutoff&, const FockCutoff&) = default;

  static constexpr int kMaxSimulation = 6;

 private:
  int n_max_;
};

class SingleModeState {
 public:
  /// Validates Hermiticity, positivity and trace.
  explicit SingleModeState(ComplexMatrix rho);

  static SingleModeState fock(int n, FockCutoff cutoff);
  static SingleModeState vacuum(FockCutoff cutoff) { return fock(0, cutoff); }
  static SingleModeState diagonal(const Eigen::VectorXd& populations);

  const ComplexMatrix& rho() const { return rho_; }
  FockCutoff cutoff() const { return FockCutoff(static_cast<int>(rho_.rows()) - 1); }
  double population(int n) const;
  double trace() const { return rho_.trace().real(); }

 private:
  ComplexMatrix rho_;
};

class TwoModeState {
 public:
  /// rho is indexed |n_A n_B> with Bob fast; dimension must be (n_max+1)^2.
  TwoModeState(ComplexMatrix rho, FockCutoff cutoff);

  static TwoModeState product(const SingleModeState& a, const SingleModeState& b);
  /// Projector onto a (not necessarily normalised) pure state.
  static TwoModeState pure(const Eigen::VectorXcd& psi, FockCutoff cutoff);

  const ComplexMatrix& rho() const { return rho_; }
  FockCutoff cutoff() const { return cutoff_; }
  double trace() const { return rho_.trace().real(); }
  cplx element(int a_row, int b_row, int a_col, int b_col) const;
  double population(int n_a, int n_b) const { return element(n_a, n_b, n_a, n_b).real(); }

  SingleModeState reduced_a() const;
  SingleModeState reduced_b() const;

  /// Same state embedded in a larger cutoff (zero padding).
  TwoModeState embedded(FockCutoff larger) const;

 private:
  ComplexMatrix rho_;
  FockCutoff cutoff_;
};

/// Channel transmissions towards Alice and Bob.
struct LossParams {
  double eta_a = 1.0;
  double eta_b = 1.0;

  double eta_ab() const { return eta_a * eta_b; }
  void validate() const;

  /// Source in the middle: eta_a = eta_b = sqrt(eta_ab).
  static LossParams symmetric(double eta_ab);
  /// Source at Alice: eta_a = 1, eta_b = eta_ab.
  static LossParams asymmetric(double eta_ab);
};

/// Phase-averaged heralded photon diag(1-p1-p2, p1, p2, 0, ...).
SingleModeState heralded_source_state(double p1, double p2, FockCutoff cutoff = FockCutoff{2});

/// input (x) vacuum through a beam splitter of the given intensity transmittance;
/// the transmitted arm goes to Alice. The output cutoff defaults to the input's.
TwoModeState beam_splitter_split(const SingleModeState& input, double transmittance,
                                 std::optional<FockCutoff> output_cutoff = std::nullopt);

/// Pure-loss channel in Kraus form.
SingleModeState apply_loss(const SingleModeState& state, double eta);
TwoModeState apply_loss(const TwoModeState& state, const LossParams& loss);

/// Ideal single-photon entanglement after losses, in closed form:
/// <00|rho|00> = (2-eta_a-eta_b)/2, <10|rho|10> = eta_a/2, <01|rho|01> = eta_b/2,
/// <10|rho|01> = sqrt(eta_a eta_b)/2.
TwoModeState lossy_bell_state(double eta_a, double eta_b, FockCutoff cutoff = FockCutoff{2});

/// Marginal photon-number populations, levels >= 2 aggregated.
BipartiteStats local_photon_probs(const TwoModeState& state);

/// Probability that at least one mode holds two or more photons.
double joint_multiphoton_probability(const TwoModeState& state);

/// Projection onto cutoff 2 for bound inputs: populations are aggregated into
/// the classes {0,1,>=2} and only the d, e, f coherences (<01|rho|10>,
/// <20|rho|11>, <02|rho|11>) survive.
TwoModeState coarse_grain(const TwoModeState& state);

/// Mode-matching efficiency of a double-exponential temporal mode
/// sqrt(gamma) exp(-gamma |t|) shifted by tau: [exp(-gamma|tau|)(1+gamma|tau|)]^2.
double temporal_overlap_efficiency(double gamma, double tau);

/// Fibre length with the same loss at 0.2 dB/km.
double km_equivalent(double eta_ab, double db_per_km = 0.2);

}  // namespace spw
