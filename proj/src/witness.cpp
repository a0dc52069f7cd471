#include "spw/witness.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spw {

namespace {

constexpr double kQubitCoefficient = 16.0 / (std::numbers::pi * std::numbers::sqrt2);
constexpr double kSubspaceTol = 1e-10;

std::array<SignAccumulator, 4> accumulate(const SampleBatch& batch) {
  std::array<SignAccumulator, 4> acc{};
  for (const auto& r : batch.records) acc[chsh_index(r.setting)].add(sign_bin(r.x_a) * sign_bin(r.x_b));
  for (std::size_t k = 0; k < acc.size(); ++k) {
    if (acc[k].count == 0) {
      throw std::invalid_argument("witness: batch has no samples for setting pair " + kChshSettings[k].label());
    }
  }
  return acc;
}

}  // namespace

double SignAccumulator::standard_error() const {
  if (count == 0) return 0.0;
  const double e = mean();
  return std::sqrt(std::max(0.0, 1.0 - e * e) / static_cast<double>(count));
}

WitnessResult s_from_samples(const SampleBatch& batch) {
  const auto acc = accumulate(batch);
  WitnessResult out;
  double var = 0.0;
  std::size_t n_min = acc[0].count;
  for (std::size_t k = 0; k < acc.size(); ++k) {
    const auto& setting = kChshSettings[k];
    out.s += setting.chsh_sign() * acc[k].mean();
    var += acc[k].standard_error() * acc[k].standard_error();
    out.correlators.push_back({setting.label(), acc[k].mean(), acc[k].standard_error(), acc[k].count});
    n_min = std::min(n_min, acc[k].count);
  }
  out.standard_error = std::sqrt(var);
  out.n_per_setting = n_min;
  return out;
}

WitnessResult s_phase_averaged_from_samples(const SampleBatch& batch) {
  // Relative phases: (X,X+P) +pi/4, (X,X-P) -pi/4, (P,X+P) -pi/4, (P,X-P) -3pi/4.
  std::array<SignAccumulator, 4> acc{};
  for (const auto& r : batch.records) {
    const int product = sign_bin(r.x_a) * sign_bin(r.x_b);
    acc[chsh_index(r.setting)].add(r.setting.chsh_sign() * product);
  }
  for (std::size_t k = 0; k < acc.size(); ++k) {
    if (acc[k].count == 0) {
      throw std::invalid_argument("witness: batch has no samples for setting pair " + kChshSettings[k].label());
    }
  }
  SignAccumulator plus = acc[0];
  plus.merge(acc[3]);
  SignAccumulator minus = acc[1];
  minus.merge(acc[2]);

  WitnessResult out;
  out.s = 2.0 * plus.mean() + 2.0 * minus.mean();
  out.standard_error = 2.0 * std::hypot(plus.standard_error(), minus.standard_error());
  out.correlators.push_back({"+pi/4", plus.mean(), plus.standard_error(), plus.count});
  out.correlators.push_back({"-pi/4", minus.mean(), minus.standard_error(), minus.count});
  out.n_per_setting = std::min({acc[0].count, acc[1].count, acc[2].count, acc[3].count});
  return out;
}

double s_exact_qubit(const TwoModeState& state) {
  double outside = 0.0;
  const int n = state.cutoff().n_max();
  for (int a = 0; a <= n; ++a)
    for (int b = 0; b <= n; ++b)
      if (a > 1 || b > 1) outside += std::abs(state.population(a, b));
  if (outside > kSubspaceTol) {
    throw std::invalid_argument(
        "s_exact_qubit: state has support outside the {0,1}^2 subspace; use exact correlators (s_exact)");
  }
  return kQubitCoefficient * state.element(0, 1, 1, 0).real();
}

double s_exact(const TwoModeState& state) {
  double s = 0.0;
  for (const auto& setting : kChshSettings) {
    s += setting.chsh_sign() * exact_correlator(state, setting.phase_a(), setting.phase_b());
  }
  return s;
}

double s_lossy(double eta_a, double eta_b) {
  if (!(eta_a >= 0.0 && eta_a <= 1.0 && eta_b >= 0.0 && eta_b <= 1.0)) {
    throw std::invalid_argument("s_lossy: transmissions must lie in [0,1]");
  }
  return kQubitCoefficient * std::sqrt(eta_a * eta_b) / 2.0;
}

}  // namespace spw
