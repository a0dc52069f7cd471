#pragma once

#include <cstddef>
#include <vector>

namespace spw {

/// Photon-number statistics seen by one party, aggregated into the classes
/// {0, 1, >=2}. Values computed from a state carry zero sigmas; values
/// estimated from quadrature samples carry sample-mean standard errors.
struct LocalPhotonStats {
  double p0 = 1.0;
  double p1 = 0.0;
  double p_ge2 = 0.0;
  double sigma0 = 0.0;
  double sigma1 = 0.0;
  double sigma_ge2 = 0.0;
  std::size_t n_samples = 0;

  /// Finer resolution when available: levels[k] = p_k for k < levels.size()-1,
  /// last entry is the aggregated tail.
  std::vector<double> levels;
  std::vector<double> level_sigmas;

  static LocalPhotonStats exact(double p0, double p1, double p_ge2);
};

struct BipartiteStats {
  LocalPhotonStats a;
  LocalPhotonStats b;
};

/// Clip to [0,1] and renormalise so p0+p1+p_ge2 = 1. Sigmas are kept.
LocalPhotonStats sanitized(const LocalPhotonStats& stats);

}  // namespace spw
