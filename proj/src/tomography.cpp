#include "spw/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

namespace spw {

namespace {

constexpr double kWronskian = 2.0;
constexpr double kOdeStep = 1e-4;
constexpr int kStepsPerNode = 10;  // table spacing 1e-3

// d/dx psi_n = (sqrt(n) psi_{n-1} - sqrt(n+1) psi_{n+1}) / sqrt(2)
double psi_derivative(int n, std::span<const double> psi) {
  double d = -std::sqrt((n + 1) / 2.0) * psi[n + 1];
  if (n > 0) d += std::sqrt(n / 2.0) * psi[n - 1];
  return d;
}

// f_n on [0, kDomain]; f_n is even.
std::vector<double> tabulate(int n) {
  std::vector<double> psi(n + 2);
  fock_wavefunctions(0.0, psi);
  const double psi0 = psi[n];
  const double dpsi0 = psi_derivative(n, psi);

  // phi'' = (x^2 - (2n+1)) phi with opposite parity to psi_n.
  double y = 0.0;
  double dy = 0.0;
  if (n % 2 == 0) {
    dy = kWronskian / psi0;
  } else {
    y = -kWronskian / dpsi0;
  }
  const double energy = 2.0 * n + 1.0;
  auto accel = [energy](double x, double v) { return (x * x - energy) * v; };

  const int nodes = static_cast<int>(std::lround(PatternFunctions::kDomain / (kOdeStep * kStepsPerNode))) + 1;
  std::vector<double> out(nodes);
  double x = 0.0;
  for (int i = 0; i < nodes; ++i) {
    fock_wavefunctions(x, psi);
    out[i] = psi_derivative(n, psi) * y + psi[n] * dy;
    if (i + 1 == nodes) break;
    for (int s = 0; s < kStepsPerNode; ++s) {
      const double h = kOdeStep;
      const double k1y = dy;
      const double k1v = accel(x, y);
      const double k2y = dy + 0.5 * h * k1v;
      const double k2v = accel(x + 0.5 * h, y + 0.5 * h * k1y);
      const double k3y = dy + 0.5 * h * k2v;
      const double k3v = accel(x + 0.5 * h, y + 0.5 * h * k2y);
      const double k4y = dy + h * k3v;
      const double k4v = accel(x + h, y + h * k3y);
      y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
      dy += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      x += h;
    }
    x = (i + 1) * kOdeStep * kStepsPerNode;
  }
  return out;
}

}  // namespace

struct PatternFunctions::Table {
  std::vector<boost::math::interpolators::cardinal_cubic_b_spline<double>> splines;
};

PatternFunctions::PatternFunctions() {
  auto table = std::make_shared<Table>();
  const double step = kOdeStep * kStepsPerNode;
  for (int n = 0; n <= kMaxLevel; ++n) {
    const auto values = tabulate(n);
    // f_n is even, so its slope vanishes at the origin.
    table->splines.emplace_back(values.data(), values.size(), 0.0, step, 0.0);
  }
  table_ = std::move(table);
}

double PatternFunctions::operator()(int n, double x) const {
  if (n < 0 || n > kMaxLevel) throw std::invalid_argument("pattern_function: level must lie in [0, 5]");
  return table_->splines[n](std::min(std::abs(x), kDomain));
}

const PatternFunctions& pattern_functions() {
  static const PatternFunctions table;
  return table;
}

double pattern_function(int n, double x) { return pattern_functions()(n, x); }

LocalPhotonStats estimate_local_probs(std::span<const double> quadratures, int n_levels) {
  if (n_levels < 3 || n_levels > PatternFunctions::kMaxLevel) {
    throw std::invalid_argument("estimate_local_probs: n_levels must lie in [3, 5]");
  }
  const std::size_t n = quadratures.size();
  if (n < kMinTomographySamples) {
    throw std::invalid_argument("estimate_local_probs: need at least " + std::to_string(kMinTomographySamples) +
                                " samples, got " + std::to_string(n));
  }
  const int explicit_levels = n_levels - 1;
  const auto& f = pattern_functions();

  // Running sums of f_k and of the cumulative sums g_k = f_0 + ... + f_k
  // (the tail 1 - g_k needs the covariance).
  std::vector<double> sum(explicit_levels, 0.0);
  std::vector<double> sum_sq(explicit_levels, 0.0);
  std::vector<double> cum(explicit_levels, 0.0);
  std::vector<double> cum_sq(explicit_levels, 0.0);
  for (double x : quadratures) {
    double running = 0.0;
    for (int k = 0; k < explicit_levels; ++k) {
      const double v = f(k, x);
      sum[k] += v;
      sum_sq[k] += v * v;
      running += v;
      cum[k] += running;
      cum_sq[k] += running * running;
    }
  }
  const double nd = static_cast<double>(n);
  auto sem = [nd](double s, double s2) {
    const double mean = s / nd;
    const double var = std::max(0.0, (s2 - nd * mean * mean) / (nd - 1.0));
    return std::sqrt(var / nd);
  };

  LocalPhotonStats out;
  out.n_samples = n;
  for (int k = 0; k < explicit_levels; ++k) {
    out.levels.push_back(sum[k] / nd);
    out.level_sigmas.push_back(sem(sum[k], sum_sq[k]));
  }
  out.levels.push_back(1.0 - cum[explicit_levels - 1] / nd);
  out.level_sigmas.push_back(sem(cum[explicit_levels - 1], cum_sq[explicit_levels - 1]));

  out.p0 = out.levels[0];
  out.sigma0 = out.level_sigmas[0];
  out.p1 = out.levels[1];
  out.sigma1 = out.level_sigmas[1];
  out.p_ge2 = 1.0 - cum[1] / nd;
  out.sigma_ge2 = sem(cum[1], cum_sq[1]);
  return out;
}

LocalPhotonStats estimate_local_probs(const SampleBatch& batch, Party party, int n_levels) {
  std::vector<double> xs;
  xs.reserve(batch.count());
  for (const auto& r : batch.records) xs.push_back(party == Party::A ? r.x_a : r.x_b);
  return estimate_local_probs(xs, n_levels);
}

PStar p_star(const LocalPhotonStats& a, const LocalPhotonStats& b) {
  PStar out;
  out.p_ge2_a = a.p_ge2;
  out.p_ge2_b = b.p_ge2;
  out.p_star = a.p_ge2 + b.p_ge2;
  out.sigma = std::hypot(a.sigma_ge2, b.sigma_ge2);
  return out;
}

}  // namespace spw
