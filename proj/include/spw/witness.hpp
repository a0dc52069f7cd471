#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "spw/fock.hpp"
#include "spw/homodyne.hpp"

namespace spw {

/// +1 for x >= 0, -1 otherwise (zero goes to +1).
inline int sign_bin(double x) { return x >= 0.0 ? 1 : -1; }

/// Running (count, sum) of sign products; merging is commutative.
struct SignAccumulator {
  std::size_t count = 0;
  long long sum = 0;

  void add(int product) {
    ++count;
    sum += product;
  }
  SignAccumulator& merge(const SignAccumulator& other) {
    count += other.count;
    sum += other.sum;
    return *this;
  }
  double mean() const { return count ? static_cast<double>(sum) / static_cast<double>(count) : 0.0; }
  /// Binomial standard error sqrt((1 - E^2) / N).
  double standard_error() const;
};

struct CorrelatorEstimate {
  std::string label;
  double e = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

struct WitnessResult {
  double s = 0.0;
  double standard_error = 0.0;
  std::vector<CorrelatorEstimate> correlators;
  std::size_t n_per_setting = 0;
};

/// S = E_{X,X+P} + E_{X,X-P} + E_{P,X+P} - E_{P,X-P} from sign-binned samples.
WitnessResult s_from_samples(const SampleBatch& batch);

/// S = 2 E_{+pi/4} + 2 E_{-pi/4}, pooling settings by relative phase
/// theta_B - theta_A. E_{P,X-P} enters E_{+pi/4} with its sign flipped
/// (a relative phase of -3pi/4 is pi away from +pi/4).
WitnessResult s_phase_averaged_from_samples(const SampleBatch& batch);

/// (16 / (pi sqrt 2)) Re<01|rho|10>; requires support in the {0,1}^2 subspace.
double s_exact_qubit(const TwoModeState& state);

/// Four-term CHSH sum of exact correlators.
double s_exact(const TwoModeState& state);

/// Closed form for lossy_bell_state: (16 / (pi sqrt 2)) sqrt(eta_a eta_b) / 2.
double s_lossy(double eta_a, double eta_b);

}  // namespace spw
