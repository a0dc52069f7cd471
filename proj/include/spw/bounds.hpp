#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spw/fock.hpp"
#include "spw/photon_stats.hpp"
#include "spw/sdp.hpp"
#include "spw/witness.hpp"

namespace spw {

enum class BoundMethod {
  Qubit,
  LossySym,
  LossyAsym,
  AnalyticMultiphoton,
  PjointClosedForm,
  SdpOriginal,
  SdpEnhanced,
};

std::string to_string(BoundMethod method);
/// Accepts the snake_case tags produced by to_string.
BoundMethod parse_bound_method(const std::string& tag);
std::vector<BoundMethod> all_bound_methods();

/// Dual certificate of the closed-form p_joint bound.
struct CertificateData {
  double p_joint = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  double ell = 0.0;
  double m = 0.0;
  RealMatrix a_matrix;
  RealMatrix b_matrix;
  /// Frobenius norm of A + B^{T_B(0,1)} - mu N - lambda I + M.
  double residual_norm = 0.0;
  double min_eig_a = 0.0;
  double min_eig_b = 0.0;
  /// lambda + mu (1 - p_joint) + 2 sqrt2 p_joint.
  double dual_bound = 0.0;
};

/// Audit trail of a bound obtained from the semidefinite solver.
struct SdpSummary {
  SdpStatus status = SdpStatus::MaxIterations;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double safe_bound = 0.0;
  double gap = 0.0;
  double stationarity = 0.0;
  double scalar_stationarity = 0.0;
  double sign_violation = 0.0;
  std::vector<double> min_eigenvalues;
  int iterations = 0;
  int dimension = 0;
  int constraints = 0;
};

struct BoundResult {
  double value = 0.0;
  BoundMethod method = BoundMethod::Qubit;
  /// False for bounds that are valid but known not to be optimal.
  bool tight = true;
  std::string note;
  std::optional<CertificateData> certificate;
  std::optional<SdpSummary> sdp;
  /// Inputs echoed for audit, in insertion order.
  std::vector<std::pair<std::string, double>> inputs;
};

inline constexpr double kQubitPrefactor = 3.6012652646284242;  // 16 / (pi sqrt 2)

/// Largest qubit-space S compatible with the vacuum probabilities.
double qubit_s_max(double p0_a, double p0_b);

/// Separable bound in the qubit space: (16/(pi sqrt2)) sqrt(p0A p0B (1-p0A)(1-p0B)).
BoundResult qubit_sep_bound(double p0_a, double p0_b);

/// (8/(pi sqrt2)) sqrt(eta_A eta_B (1 - eta_A/2)(1 - eta_B/2)); tagged
/// lossy_sym when eta_A == eta_B and lossy_asym otherwise.
BoundResult sep_bound_lossy(double eta_a, double eta_b);
/// Source midway: eta_A = eta_B = sqrt(eta_AB).
BoundResult sep_bound_lossy_sym(double eta_ab);
/// Source at Alice: eta_A = 1, eta_B = eta_AB.
BoundResult sep_bound_lossy_asym(double eta_ab);

/// Analytic bound for multiphoton states with p00 = p0A p0B / z,
/// z = 1 + p_ge2(A) + p_ge2(B), and p_joint replaced by p*. Valid but not tight.
BoundResult analytic_multiphoton_bound(const LocalPhotonStats& a, const LocalPhotonStats& b);

/// 2 sqrt2 [ (sqrt(1-p) + sqrt p)^2 / pi + p ] for p in [0, 1/2]; the
/// certificate is attached for p > 0. Throws std::domain_error outside.
BoundResult pjoint_closed_form_bound(double p_joint);

/// Matrices A, B and multipliers certifying the closed-form bound, for
/// 0 < p_joint <= 1/2. B is assembled as (lambda + mu) v v^T with
/// v = |00> - (x_-/x_+)|11>, algebraically identical to the tabulated
/// (lambda + mu - ell) form but free of the 0/0 at p_joint = 1/2.
CertificateData build_certificate(double p_joint);

/// Partial transpose on Bob's index restricted to photon numbers {0, 1}:
/// <ij|rho'|kl> = <il|rho|kj> for j,l in {0,1}. Square two-mode dimension.
RealMatrix partial_transpose_01(const RealMatrix& rho);
ComplexMatrix partial_transpose_01(const ComplexMatrix& rho);

/// Witness matrix M (tr(M rho) = (16/(pi sqrt2)) d + (8/pi)(e + f)) and the
/// projector N onto {0,1}^2, both at cutoff 2.
RealMatrix witness_matrix();
RealMatrix qubit_projector();

// ---------------------------------------------------------------------------
// Semidefinite bounds.

/// Photon-number classes of one party: 0, 1 and >= 2.
inline constexpr int kPhotonClasses = 3;

enum class FrechetFamily {
  /// All nonempty subsets of {0, 1, >=2} on each side (full x full dropped).
  AllSubsets,
  /// Singleton subsets {0} and {1} on each side (four pairs).
  Singletons01,
};

struct ProgramShape {
  FrechetFamily family = FrechetFamily::AllSubsets;
  /// Objective carries 2 sqrt2 (1 - tr N rho) when true, 2 sqrt2 p* otherwise.
  bool joint_from_state = true;
  /// Half-width multiplier of the probability boxes; nullopt for point values.
  std::optional<double> k_sigma;
};

/// The program of the given shape. Photon classes whose probability is
/// provably zero are removed from the basis; the remaining classes keep their
/// order with Bob fast.
SdpProblem build_bound_program(const LocalPhotonStats& a, const LocalPhotonStats& b, const ProgramShape& shape);

/// max tr(M rho) + 2 sqrt2 p s.t. rho >= 0, tr rho <= 1, rho^{T_B(0,1)} >= 0,
/// tr(N rho) = 1 - p.
SdpProblem pjoint_program(double p_joint);

/// Same cones and trace constraint without any photon-number information.
SdpProblem unconstrained_program();

/// Solves and converts to a BoundResult; the value is the certified dual
/// bound. Throws SolverError with the iteration trace on failure.
BoundResult solve_bound_program(const SdpProblem& problem, BoundMethod method, const SdpOptions& options = {});

BoundResult sdp_enhanced_bound(const LocalPhotonStats& a, const LocalPhotonStats& b, const SdpOptions& options = {});
BoundResult sdp_original_bound(const LocalPhotonStats& a, const LocalPhotonStats& b, const SdpOptions& options = {});

/// Worst case over local probabilities in [p - k sigma, p + k sigma] (clipped
/// to [0, 1], each party's classes summing to one). Supports the two SDP
/// methods.
BoundResult bound_with_uncertainties(const LocalPhotonStats& a, const LocalPhotonStats& b, double k_sigma,
                                     BoundMethod method = BoundMethod::SdpEnhanced, const SdpOptions& options = {});

/// Dispatch on a method tag using local statistics (and the channel
/// transmissions for the loss-curve formulas).
BoundResult compute_bound(BoundMethod method, const LocalPhotonStats& a, const LocalPhotonStats& b,
                          const std::optional<LossParams>& loss = std::nullopt, double k_sigma = 0.0);

enum class Verdict { Witnessed, NotWitnessed };
std::string to_string(Verdict v);

/// Witnessed iff S - k_sigma * SE > bound (strict).
Verdict verdict(const WitnessResult& witness, const BoundResult& bound, double k_sigma);

}  // namespace spw
