#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "spw/bounds.hpp"
#include "spw/errors.hpp"
#include "spw/fock.hpp"
#include "spw/witness.hpp"

using namespace spw;
using doctest::Approx;
using std::numbers::pi;
using std::numbers::sqrt2;

namespace {

LocalPhotonStats modeled() { return LocalPhotonStats::exact(0.645, 0.35, 0.005); }

SingleModeState random_local(std::mt19937_64& rng, bool pure) {
  std::normal_distribution<double> g;
  const int cols = pure ? 1 : 3;
  ComplexMatrix v(3, cols);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < cols; ++j) v(i, j) = {g(rng), g(rng)};
  ComplexMatrix rho = v * v.adjoint();
  rho /= rho.trace().real();
  return SingleModeState(rho);
}

}  // namespace

TEST_CASE("qubit-space formulas") {
  CHECK(kQubitPrefactor == Approx(16.0 / (pi * sqrt2)).epsilon(1e-15));
  CHECK(qubit_s_max(0.5, 0.5) == Approx(kQubitPrefactor / 2.0).epsilon(1e-14));
  CHECK(qubit_s_max(1.0, 1.0) == 0.0);
  CHECK(qubit_s_max(0.75, 0.75) == Approx(0.9003163161571).epsilon(1e-12));

  CHECK(qubit_sep_bound(0.5, 0.5).value == Approx(2.0 * sqrt2 / pi).epsilon(1e-14));
  CHECK(qubit_sep_bound(1.0, 0.3).value == 0.0);
  CHECK(qubit_sep_bound(0.66, 0.66).value == Approx(0.8081).epsilon(1e-4));
  CHECK(qubit_sep_bound(0.5, 0.5).method == BoundMethod::Qubit);
  CHECK_THROWS_AS(qubit_sep_bound(1.2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(qubit_s_max(-0.1, 0.5), std::invalid_argument);

  // Saturation: the lossy Bell state reaches qubit_s_max on its own vacuum probabilities.
  for (double ea : {1.0, 0.9, 0.4}) {
    for (double eb : {1.0, 0.7, 0.2}) {
      const auto st = local_photon_probs(lossy_bell_state(ea, eb));
      CHECK(qubit_s_max(st.a.p0, st.b.p0) == Approx(s_lossy(ea, eb)).epsilon(1e-10));
    }
  }
}

TEST_CASE("loss-curve bounds") {
  const auto asym = sep_bound_lossy_asym(0.68);
  const auto sym = sep_bound_lossy_sym(0.68);
  CHECK(asym.value == Approx(4.0 / pi * std::sqrt(0.68 * 0.66)).epsilon(1e-14));
  CHECK(asym.value == Approx(0.8530).epsilon(1e-4));
  CHECK(sym.value == Approx(0.8727).epsilon(1e-4));
  CHECK(asym.method == BoundMethod::LossyAsym);
  CHECK(sym.method == BoundMethod::LossySym);
  CHECK(sep_bound_lossy(1.0, 1.0).value == Approx(qubit_sep_bound(0.5, 0.5).value).epsilon(1e-14));
  for (int i = 1; i <= 20; ++i) {
    const double eta = i / 20.0;
    CHECK(s_lossy(1.0, eta) > sep_bound_lossy_asym(eta).value);
    CHECK(s_lossy(std::sqrt(eta), std::sqrt(eta)) > sep_bound_lossy_sym(eta).value);
  }
}

TEST_CASE("analytic multiphoton bound") {
  const auto q = LocalPhotonStats::exact(0.5, 0.5, 0.0);
  CHECK(analytic_multiphoton_bound(q, q).value == Approx(qubit_sep_bound(0.5, 0.5).value).epsilon(1e-14));
  const auto a = LocalPhotonStats::exact(0.7, 0.3, 0.0);
  const auto b = LocalPhotonStats::exact(0.4, 0.6, 0.0);
  CHECK(analytic_multiphoton_bound(a, b).value == Approx(qubit_sep_bound(0.7, 0.4).value).epsilon(1e-14));
  const auto r = analytic_multiphoton_bound(modeled(), modeled());
  CHECK_FALSE(r.tight);
  CHECK(r.value == Approx(0.998511651).epsilon(1e-8));
  CHECK_THROWS_AS(analytic_multiphoton_bound(LocalPhotonStats::exact(0.5, 0.6, 0.0), q), std::invalid_argument);
}

TEST_CASE("closed-form p_joint bound") {
  CHECK(pjoint_closed_form_bound(0.0).value == Approx(2.0 * sqrt2 / pi).epsilon(1e-14));
  CHECK(pjoint_closed_form_bound(0.1).value == Approx(2.0 * sqrt2 * (1.6 / pi + 0.1)).epsilon(1e-13));
  CHECK(pjoint_closed_form_bound(0.1).value == Approx(1.7234).epsilon(1e-4));
  CHECK(pjoint_closed_form_bound(0.5).value == Approx(3.2147).epsilon(1e-4));
  CHECK_FALSE(pjoint_closed_form_bound(0.0).certificate.has_value());
  CHECK(pjoint_closed_form_bound(0.3).certificate.has_value());
  CHECK_THROWS_AS(pjoint_closed_form_bound(0.6), std::domain_error);
  CHECK_THROWS_AS(pjoint_closed_form_bound(-0.01), std::domain_error);
  CHECK_THROWS_AS(build_certificate(0.0), std::domain_error);
}

TEST_CASE("certificate on a dense grid") {
  const RealMatrix m = witness_matrix();
  const RealMatrix n = qubit_projector();
  for (int i = 1; i <= 50; ++i) {
    const double p = 0.5 * i / 50.0;
    CAPTURE(p);
    const CertificateData c = build_certificate(p);
    // Independent residual assembly from the returned matrices.
    const RealMatrix res = c.a_matrix + partial_transpose_01(c.b_matrix) - c.mu * n -
                           c.lambda * RealMatrix::Identity(9, 9) + m;
    CHECK(res.norm() <= 1e-10);
    CHECK(c.residual_norm <= 1e-10);
    CHECK(Eigen::SelfAdjointEigenSolver<RealMatrix>(c.a_matrix).eigenvalues().minCoeff() >= -1e-10);
    CHECK(Eigen::SelfAdjointEigenSolver<RealMatrix>(c.b_matrix).eigenvalues().minCoeff() >= -1e-10);
    const double chain = c.lambda + c.mu * (1.0 - p) + 2.0 * sqrt2 * p;
    CHECK(std::abs(chain - pjoint_closed_form_bound(p).value) <= 1e-12);
    const double xp = std::sqrt(1.0 - p) + std::sqrt(p);
    CHECK(c.lambda == Approx(2.0 / pi * std::sqrt(2.0 / p) * xp).epsilon(1e-13));
    CHECK(c.ell == Approx(8.0 * std::sqrt(2.0 * p) / (pi * xp)).epsilon(1e-13));
  }
}

TEST_CASE("witness and projector matrices") {
  const RealMatrix m = witness_matrix();
  CHECK(m(1, 3) == Approx(4.0 * sqrt2 / pi));
  CHECK(m(2, 4) == Approx(4.0 / pi));
  CHECK(m(4, 6) == Approx(4.0 / pi));
  CHECK((m - m.transpose()).norm() == 0.0);
  // tr(M rho) on the ideal state is the ideal S.
  const auto ideal = lossy_bell_state(1.0, 1.0);
  CHECK((m * ideal.rho().real()).trace() == Approx(s_exact(ideal)).epsilon(1e-12));
  CHECK(qubit_projector().trace() == 4.0);
}

TEST_CASE("semidefinite bounds reduce to the qubit bound") {
  const double qubit = qubit_sep_bound(0.5, 0.5).value;
  const auto q = LocalPhotonStats::exact(0.5, 0.5, 0.0);
  CHECK(sdp_enhanced_bound(q, q).value == Approx(qubit).epsilon(1e-5));
  CHECK(sdp_original_bound(q, q).value == Approx(qubit).epsilon(1e-5));
  const auto a = LocalPhotonStats::exact(0.8, 0.2, 0.0);
  const auto b = LocalPhotonStats::exact(0.3, 0.7, 0.0);
  CHECK(sdp_enhanced_bound(a, b).value == Approx(qubit_sep_bound(0.8, 0.3).value).epsilon(1e-5));
}

TEST_CASE("bound ordering on identical inputs") {
  const LocalPhotonStats cases[] = {modeled(), LocalPhotonStats::exact(0.9, 0.099, 0.001),
                                    LocalPhotonStats::exact(0.5, 0.45, 0.05),
                                    LocalPhotonStats::exact(0.3, 0.5, 0.2)};
  for (const auto& s : cases) {
    CAPTURE(s.p_ge2);
    const double enhanced = sdp_enhanced_bound(s, s).value;
    const double original = sdp_original_bound(s, s).value;
    CHECK(enhanced <= original + 1e-7);
    CHECK(enhanced <= analytic_multiphoton_bound(s, s).value + 1e-7);
    CHECK(enhanced <= pjoint_closed_form_bound(std::min(0.5, 2.0 * s.p_ge2)).value + 1e-6);
  }
  CHECK(sdp_enhanced_bound(modeled(), modeled()).value == Approx(0.956231066).epsilon(1e-6));
  CHECK(sdp_original_bound(modeled(), modeled()).value == Approx(1.249144213).epsilon(1e-5));
  // The modeled source at zero added loss is witnessed.
  const auto source = beam_splitter_split(heralded_source_state(0.68, 0.02), 0.5);
  const auto st = local_photon_probs(source);
  CHECK(st.a.p1 == Approx(0.35));
  CHECK(st.b.p_ge2 == Approx(0.005));
  CHECK(sdp_enhanced_bound(st.a, st.b).value < s_exact(source));
}

TEST_CASE("semidefinite results carry an audit trail") {
  const BoundResult r = sdp_enhanced_bound(modeled(), modeled());
  REQUIRE(r.sdp.has_value());
  CHECK(r.sdp->status == SdpStatus::Optimal);
  CHECK(r.sdp->stationarity <= 1e-5);
  CHECK(r.value >= r.sdp->primal_value - 1e-9);
  CHECK(r.inputs.size() == 6);
  CHECK_THROWS_AS(sdp_enhanced_bound(LocalPhotonStats::exact(0.5, 0.6, 0.0), modeled()), std::invalid_argument);
}

TEST_CASE("probability boxes") {
  LocalPhotonStats s = modeled();
  s.sigma0 = 0.01;
  s.sigma1 = 0.01;
  s.sigma_ge2 = 0.002;
  const double point = sdp_enhanced_bound(s, s).value;
  CHECK(bound_with_uncertainties(s, s, 0.0).value == Approx(point).epsilon(1e-6));
  double previous = point - 1e-6;
  for (double k : {0.0, 1.0, 2.0, 3.0}) {
    const double v = bound_with_uncertainties(s, s, k).value;
    CHECK(v >= previous - 1e-6);
    previous = v;
  }
  CHECK(previous > point + 1e-3);

  const double original_point = sdp_original_bound(s, s).value;
  CHECK(bound_with_uncertainties(s, s, 0.0, BoundMethod::SdpOriginal).value ==
        Approx(original_point).epsilon(1e-5));
  CHECK(bound_with_uncertainties(s, s, 2.0, BoundMethod::SdpOriginal).value >= original_point - 1e-6);

  const LocalPhotonStats exact = modeled();
  CHECK(bound_with_uncertainties(exact, exact, 3.0).value == Approx(point).epsilon(1e-6));

  LocalPhotonStats wide = modeled();
  wide.sigma0 = wide.sigma1 = wide.sigma_ge2 = 0.5;
  const double cap = solve(unconstrained_program()).dual_value;
  const double half = bound_with_uncertainties(wide, wide, 1.0).value;
  CHECK(half > previous);
  CHECK(half <= cap + 1e-6);
  CHECK(bound_with_uncertainties(wide, wide, 2.0).value == Approx(cap).epsilon(1e-5));

  CHECK_THROWS_AS(bound_with_uncertainties(s, s, 1.0, BoundMethod::Qubit), std::invalid_argument);
}

TEST_CASE("soundness on random separable product states") {
  std::mt19937_64 rng(2024);
  int violations = 0;
  for (int i = 0; i < 40; ++i) {
    const auto state = TwoModeState::product(random_local(rng, i % 2 == 0), random_local(rng, i % 3 == 0));
    const auto st = local_photon_probs(state);
    const double s = s_exact(state);
    if (s > sdp_enhanced_bound(st.a, st.b).value + 1e-7) ++violations;
    if (s > sdp_original_bound(st.a, st.b).value + 1e-7) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("compute_bound dispatch") {
  const auto q = LocalPhotonStats::exact(0.5, 0.5, 0.0);
  for (BoundMethod m : all_bound_methods()) {
    CHECK(parse_bound_method(to_string(m)) == m);
    const auto r = compute_bound(m, q, q, LossParams::symmetric(1.0));
    CHECK(r.method == m);
    CHECK(r.value >= 0.0);
  }
  CHECK_THROWS_AS(compute_bound(BoundMethod::LossySym, q, q), std::invalid_argument);
  CHECK_THROWS_AS(parse_bound_method("nope"), std::invalid_argument);
}

TEST_CASE("verdicts") {
  WitnessResult w;
  w.s = 1.48;
  w.standard_error = 0.01;
  BoundResult b;
  b.value = 0.91;
  CHECK(verdict(w, b, 3.0) == Verdict::Witnessed);
  w.s = 0.5;
  w.standard_error = 0.0;
  b.value = 0.9;
  CHECK(verdict(w, b, 3.0) == Verdict::NotWitnessed);
  w.s = 0.9;
  CHECK(verdict(w, b, 0.0) == Verdict::NotWitnessed);
  CHECK(to_string(Verdict::Witnessed) == "witnessed");
  CHECK(to_string(Verdict::NotWitnessed) == "not_witnessed");
}
