#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "spw/fock.hpp"
#include "spw/homodyne.hpp"
#include "spw/tomography.hpp"

using namespace spw;
using doctest::Approx;

namespace {

// Midpoint rule over [-10, 10]; psi_m^2 is below 1e-30 outside for m <= 5.
double gram(int n, int m) {
  const int steps = 200000;
  const double h = 20.0 / steps;
  double acc = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double x = -10.0 + (i + 0.5) * h;
    const double psi = fock_wavefunction(m, x);
    acc += pattern_function(n, x) * psi * psi;
  }
  return acc * h;
}

std::vector<double> alice_quadratures(const SingleModeState& local, std::size_t n, std::uint64_t seed) {
  const auto state = TwoModeState::product(local, SingleModeState::vacuum(local.cutoff()));
  const std::array<QuadratureSetting, 1> one{kChshSettings[0]};
  const SampleBatch b = sample_batch(state, n, seed, one);
  std::vector<double> xs;
  xs.reserve(b.count());
  for (const auto& r : b.records) xs.push_back(r.x_a);
  return xs;
}

SingleModeState diag(std::initializer_list<double> p) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(p.size()));
  Eigen::Index i = 0;
  for (double x : p) v(i++) = x;
  return SingleModeState::diagonal(v);
}

}  // namespace

TEST_CASE("pattern functions are dual to Fock densities") {
  for (int n = 0; n <= PatternFunctions::kMaxLevel; ++n) {
    for (int m = 0; m <= PatternFunctions::kMaxLevel; ++m) {
      CAPTURE(n);
      CAPTURE(m);
      CHECK(gram(n, m) == Approx(n == m ? 1.0 : 0.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("pattern functions are even, bounded and clamped") {
  for (int n = 0; n <= 5; ++n) {
    for (double x : {0.0, 0.4, 1.7, 3.3, 5.9}) {
      CHECK(pattern_function(n, x) == Approx(pattern_function(n, -x)).epsilon(1e-14));
      CHECK(std::isfinite(pattern_function(n, x)));
    }
    CHECK(pattern_function(n, 9.0) == pattern_function(n, PatternFunctions::kDomain));
  }
  CHECK_THROWS_AS(pattern_function(6, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pattern_function(-1, 0.0), std::invalid_argument);
}

TEST_CASE("estimates on known diagonal states") {
  SUBCASE("vacuum") {
    const auto s = estimate_local_probs(alice_quadratures(diag({1.0, 0.0, 0.0}), 20000, 1));
    CHECK(std::abs(s.p0 - 1.0) <= 3.0 * s.sigma0);
    CHECK(s.n_samples == 20000);
  }
  SUBCASE("68 percent single photon") {
    const auto s = estimate_local_probs(alice_quadratures(diag({0.32, 0.68, 0.0}), 100000, 2));
    CHECK(std::abs(s.p0 - 0.32) <= 3.0 * s.sigma0);
    CHECK(std::abs(s.p1 - 0.68) <= 3.0 * s.sigma1);
    CHECK(s.p0 + s.p1 + s.p_ge2 == Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("modeled source after the split") {
    const auto state = beam_splitter_split(heralded_source_state(0.68, 0.02), 0.5);
    const SampleBatch b = sample_batch(state, 25000, 3);
    for (Party party : {Party::A, Party::B}) {
      const auto s = estimate_local_probs(b, party);
      CHECK(std::abs(s.p1 - 0.35) <= 3.0 * s.sigma1);
      CHECK(std::abs(s.p_ge2 - 0.005) <= 3.0 * s.sigma_ge2);
    }
  }
  SUBCASE("finer levels") {
    const auto s = estimate_local_probs(alice_quadratures(diag({0.3, 0.3, 0.2, 0.2, 0.0, 0.0}), 50000, 4), 5);
    REQUIRE(s.levels.size() == 5);
    REQUIRE(s.level_sigmas.size() == 5);
    const std::array<double, 5> truth{0.3, 0.3, 0.2, 0.2, 0.0};
    for (int k = 0; k < 5; ++k) CHECK(std::abs(s.levels[k] - truth[k]) <= 3.0 * s.level_sigmas[k] + 1e-12);
    CHECK(s.p_ge2 == Approx(s.levels[2] + s.levels[3] + s.levels[4]).epsilon(1e-10));
  }
}

TEST_CASE("estimates agree with the state oracle across seeds") {
  const auto state = apply_loss(beam_splitter_split(heralded_source_state(0.68, 0.02), 0.5), LossParams{0.8, 0.5});
  const auto truth = local_photon_probs(state);
  int inside = 0;
  const int reps = 30;
  for (int r = 0; r < reps; ++r) {
    const SampleBatch b = sample_batch(state, 2500, derive_seed(5, r));
    const auto s = estimate_local_probs(b, Party::B);
    if (std::abs(s.p0 - truth.b.p0) <= 3.0 * s.sigma0 && std::abs(s.p1 - truth.b.p1) <= 3.0 * s.sigma1) ++inside;
  }
  CHECK(inside >= reps - 2);
}

TEST_CASE("too few samples or levels are refused") {
  std::vector<double> few(999, 0.0);
  CHECK_THROWS_AS(estimate_local_probs(few), std::invalid_argument);
  std::vector<double> enough(1000, 0.1);
  CHECK_NOTHROW(estimate_local_probs(enough));
  CHECK_THROWS_AS(estimate_local_probs(enough, 2), std::invalid_argument);
  CHECK_THROWS_AS(estimate_local_probs(enough, 6), std::invalid_argument);
}

TEST_CASE("p* bound") {
  const auto zero = p_star(LocalPhotonStats::exact(0.5, 0.5, 0.0), LocalPhotonStats::exact(0.5, 0.5, 0.0));
  CHECK(zero.p_star == 0.0);
  CHECK(zero.sigma == 0.0);

  const auto modeled = local_photon_probs(beam_splitter_split(heralded_source_state(0.68, 0.02), 0.5));
  const auto ps = p_star(modeled.a, modeled.b);
  CHECK(ps.p_star == Approx(0.01).epsilon(1e-12));
  CHECK(ps.p_ge2_a == Approx(0.005).epsilon(1e-12));

  TwoModeState both(ComplexMatrix::Zero(9, 9), FockCutoff{2});
  {
    Eigen::VectorXd pop = Eigen::VectorXd::Zero(9);
    pop(4) = 0.5;  // |11>
    pop(8) = 0.5;  // |22>
    ComplexMatrix rho = pop.cast<std::complex<double>>().asDiagonal();
    both = TwoModeState(rho, FockCutoff{2});
  }
  const auto bs = local_photon_probs(both);
  CHECK(joint_multiphoton_probability(both) == Approx(0.5));
  CHECK(p_star(bs.a, bs.b).p_star == Approx(1.0));

  for (double p2 : {0.02, 0.1, 0.3}) {
    for (double eta : {1.0, 0.7, 0.2}) {
      const auto s = apply_loss(beam_splitter_split(heralded_source_state(0.6, p2), 0.5), LossParams{1.0, eta});
      const auto st = local_photon_probs(s);
      const double pj = joint_multiphoton_probability(s);
      CHECK(pj == Approx(1.0 - (s.population(0, 0) + s.population(0, 1) + s.population(1, 0) + s.population(1, 1))));
      CHECK(p_star(st.a, st.b).p_star >= pj - 1e-15);
      // At most two photons in total: joint multiphoton events are |20> and |02>.
      CHECK(p_star(st.a, st.b).p_star == Approx(pj).epsilon(1e-12));
    }
  }
}
