#pragma once

#include <memory>
#include <span>

#include "spw/homodyne.hpp"
#include "spw/photon_stats.hpp"

namespace spw {

/// Phase-averaged diagonal pattern functions f_n(x) = d/dx[psi_n(x) phi_n(x)],
/// where phi_n is the irregular solution of the oscillator equation with
/// parity opposite to psi_n and Wronskian psi_n phi_n' - psi_n' phi_n = 2.
/// With this normalisation int f_n(x) psi_m(x)^2 dx = delta_nm.
///
/// Values are tabulated on [-6, 6] (RK4 outward from the origin, step 1e-4)
/// and interpolated with a cubic B-spline. Outside the table f_n is clamped to
/// the boundary value; for states with at most six photons the quadrature mass
/// beyond |x| = 6 is below 1e-11, so the clamping bias is below
/// max|f_n| * 1e-11.
class PatternFunctions {
 public:
  static constexpr int kMaxLevel = 5;
  static constexpr double kDomain = 6.0;

  PatternFunctions();
  double operator()(int n, double x) const;

 private:
  struct Table;
  std::shared_ptr<const Table> table_;
};

/// Shared immutable table.
const PatternFunctions& pattern_functions();

/// f_n(x) for 0 <= n <= 5.
double pattern_function(int n, double x);

/// Photon-number statistics from phase-averaged quadrature samples of one party.
///
/// n_levels is the number of photon-number classes reported: levels
/// 0 .. n_levels-2 are estimated explicitly as sample means of f_n, the last
/// class aggregates the tail as 1 - sum of the others. p0, p1 and
/// p_ge2 = 1 - p0 - p1 are always filled. Uncertainties are i.i.d.
/// sample-mean errors (sample standard deviation / sqrt(N)).
LocalPhotonStats estimate_local_probs(std::span<const double> quadratures, int n_levels = 3);
LocalPhotonStats estimate_local_probs(const SampleBatch& batch, Party party, int n_levels = 3);

inline constexpr std::size_t kMinTomographySamples = 1000;

struct PStar {
  double p_star = 0.0;
  double sigma = 0.0;
  double p_ge2_a = 0.0;
  double p_ge2_b = 0.0;
};

/// p* = p_ge2(A) + p_ge2(B), an upper bound on the joint multiphoton probability.
PStar p_star(const LocalPhotonStats& a, const LocalPhotonStats& b);

}  // namespace spw
