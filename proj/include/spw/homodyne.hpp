#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spw/fock.hpp"

namespace spw {

// Quadrature convention: X_theta = cos(theta) X + sin(theta) P with vacuum
// variance 1/2, psi_n(x) = pi^(-1/4) (2^n n!)^(-1/2) H_n(x) exp(-x^2/2) and
// <x_theta|n> = exp(-i n theta) psi_n(x).

enum class AliceSetting : std::uint8_t { X, P };
enum class BobSetting : std::uint8_t { XPlusP, XMinusP };

double phase_of(AliceSetting s);
double phase_of(BobSetting s);
std::string label_of(AliceSetting s);
std::string label_of(BobSetting s);
AliceSetting parse_alice_setting(const std::string& label);
BobSetting parse_bob_setting(const std::string& label);

/// One of the four CHSH combinations.
struct QuadratureSetting {
  AliceSetting a;
  BobSetting b;

  double phase_a() const { return phase_of(a); }
  double phase_b() const { return phase_of(b); }
  /// theta_B - theta_A.
  double relative_phase() const { return phase_b() - phase_a(); }
  /// +1 for the three positive CHSH terms, -1 for E_{P,X-P}.
  int chsh_sign() const { return (a == AliceSetting::P && b == BobSetting::XMinusP) ? -1 : 1; }
  std::string label() const { return label_of(a) + "," + label_of(b); }

  friend bool operator==(const QuadratureSetting&, const QuadratureSetting&) = default;
};

inline constexpr std::array<QuadratureSetting, 4> kChshSettings{{
    {AliceSetting::X, BobSetting::XPlusP},
    {AliceSetting::X, BobSetting::XMinusP},
    {AliceSetting::P, BobSetting::XPlusP},
    {AliceSetting::P, BobSetting::XMinusP},
}};

std::size_t chsh_index(const QuadratureSetting& s);

struct SampleRecord {
  QuadratureSetting setting;
  double x_a;
  double x_b;
  double global_phase;
};

/// Phase-averaged homodyne outcomes. Records are grouped by setting in the
/// order of kChshSettings.
struct SampleBatch {
  std::vector<SampleRecord> records;
  std::uint64_t rng_seed = 0;

  std::size_t count() const { return records.size(); }
  std::size_t count_for(const QuadratureSetting& s) const;
};

/// psi_n(x) by the three-term recurrence.
double fock_wavefunction(int n, double x);
/// psi_0(x) ... psi_{out.size()-1}(x).
void fock_wavefunctions(double x, std::span<double> out);

/// Matrix elements s_nm = integral sgn(x) psi_n(x) psi_m(x) dx.
class SgnOperator {
 public:
  explicit SgnOperator(RealMatrix s) : s_(std::move(s)) {}
  const RealMatrix& elements() const { return s_; }
  int n_max() const { return static_cast<int>(s_.rows()) - 1; }
  /// sgn(X_theta) with elements exp(i (n-m) theta) s_nm.
  ComplexMatrix at_phase(double theta) const;

 private:
  RealMatrix s_;
};

/// Adaptive Gauss-Kronrod on [0, 14] doubled by parity; throws
/// ConvergenceError if an element misses 1e-13 absolute accuracy.
SgnOperator sgn_matrix_elements(int n_max);

/// tr[rho sgn(X_thetaA) (x) sgn(X_thetaB)], exact in the truncated space.
double exact_correlator(const TwoModeState& state, double theta_a, double theta_b);

/// (1/2pi) integral E(phi, phi + delta) dphi by the periodic trapezoid rule.
double phase_averaged_correlator(const TwoModeState& state, double delta, int phase_points = 64);

/// P(x_A, x_B | theta_A, theta_B).
double joint_quadrature_density(const TwoModeState& state, double theta_a, double theta_b, double x_a, double x_b);

enum class Party : std::uint8_t { A, B };

/// Phase-averaged marginal density sum_n p_n psi_n(x)^2 of one party.
double phase_averaged_marginal_density(const TwoModeState& state, Party party, double x);
/// Its CDF, by quadrature.
double phase_averaged_marginal_cdf(const TwoModeState& state, Party party, double x);

/// Stream seed for batch `index` derived from a user seed (splitmix64 of
/// seed + golden-ratio * (index + 1)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Draws n_per_setting samples for each requested setting. A fresh uniform
/// global phase phi is drawn per shot and the quadratures measured are
/// theta_A = phi + phase(a), theta_B = phi + phase(b). Setting k uses the
/// stream derive_seed(seed, k), so the result does not depend on the order
/// in which settings are generated.
SampleBatch sample_batch(const TwoModeState& state, std::size_t n_per_setting, std::uint64_t seed,
                         std::span<const QuadratureSetting> settings = kChshSettings);

/// Columns setting_a, setting_b, x_a, x_b, global_phase; header required.
void write_samples_csv(std::ostream& out, const SampleBatch& batch);
SampleBatch read_samples_csv(std::istream& in);

}  // namespace spw
