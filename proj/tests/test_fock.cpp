#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "spw/errors.hpp"
#include "spw/fock.hpp"

using namespace spw;
using doctest::Approx;

namespace {

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

double min_eigenvalue(const ComplexMatrix& m) {
  return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

ComplexMatrix split_projector() {
  const FockCutoff c{2};
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(c.two_mode_dim());
  psi(c.index(1, 0)) = 1.0 / std::sqrt(2.0);
  psi(c.index(0, 1)) = 1.0 / std::sqrt(2.0);
  return psi * psi.adjoint();
}

}  // namespace

TEST_CASE("heralded source populations") {
  const auto ideal = heralded_source_state(1.0, 0.0);
  CHECK(ideal.population(1) == Approx(1.0));
  CHECK(ideal.population(0) == Approx(0.0));

  const auto modeled = heralded_source_state(0.68, 0.02);
  CHECK(modeled.population(0) == Approx(0.30).epsilon(1e-14));
  CHECK(modeled.population(1) == Approx(0.68).epsilon(1e-14));
  CHECK(modeled.population(2) == Approx(0.02).epsilon(1e-14));

  const auto no_two = heralded_source_state(0.68, 0.0);
  CHECK(no_two.population(0) == Approx(0.32));

  CHECK_THROWS_AS(heralded_source_state(0.9, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(heralded_source_state(0.5, 0.1, FockCutoff{1}), CutoffOverflow);
}

TEST_CASE("beam splitter on Fock inputs") {
  const FockCutoff c{2};
  SUBCASE("single photon on a balanced splitter") {
    const auto out = beam_splitter_split(SingleModeState::fock(1, c), 0.5);
    CHECK(max_abs_diff(out.rho(), split_projector()) < 1e-12);
  }
  SUBCASE("vacuum stays vacuum") {
    for (double t : {0.0, 0.3, 1.0}) {
      const auto out = beam_splitter_split(SingleModeState::vacuum(c), t);
      CHECK(out.population(0, 0) == Approx(1.0).epsilon(1e-14));
      CHECK(out.trace() == Approx(1.0).epsilon(1e-14));
    }
  }
  SUBCASE("two photons split binomially") {
    const auto out = beam_splitter_split(SingleModeState::fock(2, c), 0.5);
    CHECK(out.population(2, 0) == Approx(0.25).epsilon(1e-12));
    CHECK(out.population(0, 2) == Approx(0.25).epsilon(1e-12));
    CHECK(out.population(1, 1) == Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("photon number distribution is preserved") {
    Eigen::VectorXd pops(3);
    pops << 0.3, 0.5, 0.2;
    const auto out = beam_splitter_split(SingleModeState::diagonal(pops), 0.37);
    std::array<double, 5> total{};
    for (int a = 0; a <= 2; ++a)
      for (int b = 0; b <= 2; ++b) total[a + b] += out.population(a, b);
    CHECK(total[0] == Approx(0.3).epsilon(1e-12));
    CHECK(total[1] == Approx(0.5).epsilon(1e-12));
    CHECK(total[2] == Approx(0.2).epsilon(1e-12));
    CHECK(std::abs(total[3]) < 1e-14);
    CHECK(std::abs(total[4]) < 1e-14);
  }
  SUBCASE("support above the output cutoff is refused") {
    CHECK_THROWS_AS(beam_splitter_split(SingleModeState::fock(3, FockCutoff{3}), 0.5, FockCutoff{2}), CutoffOverflow);
  }
}

TEST_CASE("pure loss channel") {
  const FockCutoff c{2};
  SUBCASE("single photon through loss") {
    const auto out = apply_loss(SingleModeState::fock(1, c), 0.3);
    CHECK(out.population(0) == Approx(0.7).epsilon(1e-14));
    CHECK(out.population(1) == Approx(0.3).epsilon(1e-14));
  }
  SUBCASE("unit transmission is the identity") {
    const auto in = beam_splitter_split(heralded_source_state(0.68, 0.02), 0.5);
    const auto out = apply_loss(in, LossParams{1.0, 1.0});
    CHECK(max_abs_diff(in.rho(), out.rho()) < 1e-15);
  }
  SUBCASE("composition multiplies transmissions") {
    const auto in = beam_splitter_split(heralded_source_state(0.68, 0.02), 0.5);
    const auto twice = apply_loss(apply_loss(in, LossParams{0.8, 0.6}), LossParams{0.5, 0.9});
    const auto once = apply_loss(in, LossParams{0.4, 0.54});
    CHECK(max_abs_diff(twice.rho(), once.rho()) < 1e-12);
  }
  SUBCASE("outputs remain states") {
    const auto in = beam_splitter_split(heralded_source_state(0.68, 0.02), 0.5);
    for (double ea : {0.0, 0.2, 0.77, 1.0}) {
      for (double eb : {0.05, 0.5, 1.0}) {
        const auto out = apply_loss(in, LossParams{ea, eb});
        CHECK(out.trace() == Approx(1.0).epsilon(1e-12));
        CHECK(min_eigenvalue(out.rho()) >= -1e-10);
      }
    }
  }
}

TEST_CASE("split-then-loss matches the closed-form lossy state") {
  const FockCutoff c{2};
  const auto split = beam_splitter_split(SingleModeState::fock(1, c), 0.5);
  const double grid[][2] = {{1.0, 1.0}, {0.8, 0.5}, {0.5, 0.8}, {0.1, 0.9}, {0.3, 0.3},
                            {1.0, 0.05}, {0.05, 1.0}, {0.0, 0.7}, {0.62, 0.41}, {0.99, 0.01}};
  for (const auto& g : grid) {
    const auto lossy = apply_loss(split, LossParams{g[0], g[1]});
    CHECK(max_abs_diff(lossy.rho(), lossy_bell_state(g[0], g[1]).rho()) < 1e-12);
  }
}

TEST_CASE("closed-form lossy state entries") {
  const auto s = lossy_bell_state(0.8, 0.5);
  CHECK(s.population(0, 0) == Approx(0.35).epsilon(1e-14));
  CHECK(s.population(0, 1) == Approx(0.25).epsilon(1e-14));
  CHECK(s.population(1, 0) == Approx(0.40).epsilon(1e-14));
  CHECK(s.population(1, 1) == Approx(0.0));
  CHECK(s.element(1, 0, 0, 1).real() == Approx(std::sqrt(0.4) / 2.0).epsilon(1e-14));

  const auto ideal = lossy_bell_state(1.0, 1.0);
  CHECK(max_abs_diff(ideal.rho(), split_projector()) < 1e-14);

  const auto one_sided = lossy_bell_state(0.6, 0.0);
  CHECK(std::abs(one_sided.element(0, 1, 1, 0)) < 1e-15);
}

TEST_CASE("local photon statistics") {
  SUBCASE("lossy state marginals") {
    const auto stats = local_photon_probs(lossy_bell_state(0.7, 0.4));
    CHECK(stats.a.p1 == Approx(0.35).epsilon(1e-14));
    CHECK(stats.b.p1 == Approx(0.20).epsilon(1e-14));
    CHECK(stats.a.p0 + stats.a.p1 + stats.a.p_ge2 == Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("ideal split") {
    const auto stats = local_photon_probs(lossy_bell_state(1.0, 1.0));
    CHECK(stats.a.p0 == Approx(0.5));
    CHECK(stats.b.p1 == Approx(0.5));
  }
  SUBCASE("modeled heralded source after a balanced split") {
    const auto stats = local_photon_probs(beam_splitter_split(heralded_source_state(0.68, 0.02), 0.5));
    CHECK(stats.a.p1 == Approx(0.35).epsilon(1e-12));
    CHECK(stats.b.p1 == Approx(0.35).epsilon(1e-12));
    CHECK(stats.a.p_ge2 == Approx(0.005).epsilon(1e-12));
    CHECK(stats.b.p_ge2 == Approx(0.005).epsilon(1e-12));
  }
  SUBCASE("levels above one are aggregated") {
    const auto in = beam_splitter_split(heralded_source_state(0.6, 0.0), 0.5, FockCutoff{4});
    const auto stats = local_photon_probs(in.embedded(FockCutoff{5}));
    CHECK(stats.a.p0 + stats.a.p1 + stats.a.p_ge2 == Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("joint multiphoton probability never exceeds p*") {
    const auto s = apply_loss(beam_splitter_split(heralded_source_state(0.5, 0.3), 0.5), LossParams{0.9, 0.7});
    const auto stats = local_photon_probs(s);
    CHECK(joint_multiphoton_probability(s) <= stats.a.p_ge2 + stats.b.p_ge2 + 1e-15);
  }
}

TEST_CASE("coarse graining keeps populations and witness coherences") {
  const auto s = apply_loss(beam_splitter_split(heralded_source_state(0.6, 0.2), 0.5, FockCutoff{4}),
                            LossParams{0.9, 0.8});
  const auto cg = coarse_grain(s);
  CHECK(cg.cutoff().n_max() == 2);
  const auto fine = local_photon_probs(s);
  const auto coarse = local_photon_probs(cg);
  CHECK(coarse.a.p0 == Approx(fine.a.p0).epsilon(1e-12));
  CHECK(coarse.a.p_ge2 == Approx(fine.a.p_ge2).epsilon(1e-12));
  CHECK(coarse.b.p1 == Approx(fine.b.p1).epsilon(1e-12));
  CHECK(cg.element(0, 1, 1, 0).real() == Approx(s.element(0, 1, 1, 0).real()).epsilon(1e-12));
  CHECK(cg.element(2, 0, 1, 1).real() == Approx(s.element(2, 0, 1, 1).real()).epsilon(1e-12));
  CHECK(cg.trace() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("temporal overlap efficiency against the overlap integral") {
  // Trapezoid quadrature of the overlap of sqrt(g) exp(-g|t|) with its shift.
  auto overlap = [](double g, double tau) {
    const int n = 400000;
    const double lo = -40.0;
    const double hi = 40.0;
    const double h = (hi - lo) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double t = lo + i * h;
      const double w = (i == 0 || i == n) ? 0.5 : 1.0;
      acc += w * g * std::exp(-g * std::abs(t + tau)) * std::exp(-g * std::abs(t));
    }
    return acc * h;
  };
  CHECK(temporal_overlap_efficiency(2.0, 0.0) == Approx(1.0));
  const double e11 = temporal_overlap_efficiency(1.0, 1.0);
  CHECK(e11 == Approx(std::pow(2.0 / std::numbers::e, 2)).epsilon(1e-12));
  CHECK(e11 == Approx(std::pow(overlap(1.0, 1.0), 2)).epsilon(1e-6));
  const double e15 = temporal_overlap_efficiency(1.0, 5.0);
  CHECK(e15 == Approx(std::pow(6.0 * std::exp(-5.0), 2)).epsilon(1e-12));
  CHECK(e15 == Approx(std::pow(overlap(1.0, 5.0), 2)).epsilon(1e-5));

  double prev = 1.0;
  for (double tau = 0.0; tau < 8.0; tau += 0.25) {
    const double e = temporal_overlap_efficiency(1.3, -tau);
    CHECK(e <= prev + 1e-15);
    prev = e;
  }
  CHECK_THROWS_AS(temporal_overlap_efficiency(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("fibre length equivalent") {
  CHECK(km_equivalent(0.05) == Approx(65.0515).epsilon(1e-5));
  CHECK(km_equivalent(0.03) == Approx(76.1439).epsilon(1e-5));
  CHECK(km_equivalent(1.0) == Approx(0.0));
  CHECK_THROWS_AS(km_equivalent(0.0), std::invalid_argument);
}

TEST_CASE("state validation") {
  ComplexMatrix bad = ComplexMatrix::Zero(3, 3);
  bad(0, 0) = 1.5;
  CHECK_THROWS_AS(SingleModeState{bad}, std::invalid_argument);
  ComplexMatrix neg = ComplexMatrix::Zero(3, 3);
  neg(0, 0) = 1.1;
  neg(1, 1) = -0.1;
  CHECK_THROWS_AS(SingleModeState{neg}, std::invalid_argument);
  CHECK_THROWS_AS(FockCutoff{0}, std::invalid_argument);
  CHECK_THROWS_AS((TwoModeState{ComplexMatrix::Identity(8, 8) / 8.0, FockCutoff{2}}), std::invalid_argument);
}
