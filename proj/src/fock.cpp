#include "spw/fock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "spw/errors.hpp"

namespace spw {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kEigenFloor = -1e-10;
constexpr double kTraceTol = 1e-12;
constexpr double kSupportTol = 1e-14;

void validate_density(const ComplexMatrix& rho, const char* what) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": density matrix must be square and non-empty");
  }
  const double asym = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTol) {
    throw std::invalid_argument(std::string(what) + ": density matrix is not Hermitian (deviation " +
                                std::to_string(asym) + ")");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < kEigenFloor) {
    throw std::invalid_argument(std::string(what) + ": density matrix has negative eigenvalue " +
                                std::to_string(es.eigenvalues().minCoeff()));
  }
  if (rho.trace().real() > 1.0 + kTraceTol) {
    throw std::invalid_argument(std::string(what) + ": trace exceeds one");
  }
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
  }
}

double binomial(int n, int k) { return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)); }

// Kraus operators of the pure-loss channel: K_k |n> = sqrt(C(n,k) eta^(n-k) (1-eta)^k) |n-k>.
std::vector<RealMatrix> loss_kraus(int levels, double eta) {
  std::vector<RealMatrix> ops;
  for (int k = 0; k < levels; ++k) {
    RealMatrix op = RealMatrix::Zero(levels, levels);
    for (int n = k; n < levels; ++n) {
      op(n - k, n) = std::sqrt(binomial(n, k) * std::pow(eta, n - k) * std::pow(1.0 - eta, k));
    }
    if (op.cwiseAbs().maxCoeff() > 0.0) ops.push_back(std::move(op));
  }
  return ops;
}

RealMatrix kron(const RealMatrix& a, const RealMatrix& b) {
  RealMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix apply_kraus(const ComplexMatrix& rho, const std::vector<RealMatrix>& ops) {
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : ops) {
    const ComplexMatrix kc = k.cast<cplx>();
    out.noalias() += kc * rho * kc.adjoint();
  }
  return out;
}

}  // namespace

FockCutoff::FockCutoff(int n_max) : n_max_(n_max) {
  if (n_max < 1) throw std::invalid_argument("FockCutoff: n_max must be >= 1");
}

LocalPhotonStats LocalPhotonStats::exact(double p0, double p1, double p_ge2) {
  LocalPhotonStats s;
  s.p0 = p0;
  s.p1 = p1;
  s.p_ge2 = p_ge2;
  s.levels = {p0, p1, p_ge2};
  s.level_sigmas = {0.0, 0.0, 0.0};
  return s;
}

LocalPhotonStats sanitized(const LocalPhotonStats& stats) {
  LocalPhotonStats s = stats;
  s.p0 = std::clamp(s.p0, 0.0, 1.0);
  s.p1 = std::clamp(s.p1, 0.0, 1.0);
  s.p_ge2 = std::clamp(s.p_ge2, 0.0, 1.0);
  const double total = s.p0 + s.p1 + s.p_ge2;
  if (total <= 0.0) throw std::invalid_argument("sanitized: all photon-number probabilities vanish");
  s.p0 /= total;
  s.p1 /= total;
  s.p_ge2 /= total;
  return s;
}

// ---------------------------------------------------------------------------

SingleModeState::SingleModeState(ComplexMatrix rho) : rho_(std::move(rho)) {
  validate_density(rho_, "SingleModeState");
}

SingleModeState SingleModeState::fock(int n, FockCutoff cutoff) {
  if (n < 0 || n > cutoff.n_max()) throw std::invalid_argument("SingleModeState::fock: level outside cutoff");
  ComplexMatrix rho = ComplexMatrix::Zero(cutoff.levels(), cutoff.levels());
  rho(n, n) = 1.0;
  return SingleModeState(std::move(rho));
}

SingleModeState SingleModeState::diagonal(const Eigen::VectorXd& populations) {
  return SingleModeState(populations.cast<cplx>().asDiagonal().toDenseMatrix());
}

double SingleModeState::population(int n) const {
  if (n < 0 || n >= rho_.rows()) return 0.0;
  return rho_(n, n).real();
}

TwoModeState::TwoModeState(ComplexMatrix rho, FockCutoff cutoff) : rho_(std::move(rho)), cutoff_(cutoff) {
  if (rho_.rows() != cutoff_.two_mode_dim()) {
    throw std::invalid_argument("TwoModeState: dimension does not match cutoff");
  }
  validate_density(rho_, "TwoModeState");
}

TwoModeState TwoModeState::product(const SingleModeState& a, const SingleModeState& b) {
  if (a.rho().rows() != b.rho().rows()) throw std::invalid_argument("TwoModeState::product: cutoff mismatch");
  const FockCutoff cutoff = a.cutoff();
  const int l = cutoff.levels();
  ComplexMatrix rho(l * l, l * l);
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < l; ++j) rho.block(i * l, j * l, l, l) = a.rho()(i, j) * b.rho();
  }
  return TwoModeState(std::move(rho), cutoff);
}

TwoModeState TwoModeState::pure(const Eigen::VectorXcd& psi, FockCutoff cutoff) {
  return TwoModeState(psi * psi.adjoint(), cutoff);
}

cplx TwoModeState::element(int a_row, int b_row, int a_col, int b_col) const {
  const int n = cutoff_.n_max();
  if (std::max({a_row, b_row, a_col, b_col}) > n || std::min({a_row, b_row, a_col, b_col}) < 0) return 0.0;
  return rho_(cutoff_.index(a_row, b_row), cutoff_.index(a_col, b_col));
}

SingleModeState TwoModeState::reduced_a() const {
  const int l = cutoff_.levels();
  ComplexMatrix r = ComplexMatrix::Zero(l, l);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j)
      for (int k = 0; k < l; ++k) r(i, j) += rho_(cutoff_.index(i, k), cutoff_.index(j, k));
  return SingleModeState(std::move(r));
}

SingleModeState TwoModeState::reduced_b() const {
  const int l = cutoff_.levels();
  ComplexMatrix r = ComplexMatrix::Zero(l, l);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j)
      for (int k = 0; k < l; ++k) r(i, j) += rho_(cutoff_.index(k, i), cutoff_.index(k, j));
  return SingleModeState(std::move(r));
}

TwoModeState TwoModeState::embedded(FockCutoff larger) const {
  if (larger.n_max() < cutoff_.n_max()) throw std::invalid_argument("TwoModeState::embedded: cutoff must not shrink");
  const int l = cutoff_.levels();
  ComplexMatrix out = ComplexMatrix::Zero(larger.two_mode_dim(), larger.two_mode_dim());
  for (int a = 0; a < l; ++a)
    for (int b = 0; b < l; ++b)
      for (int c = 0; c < l; ++c)
        for (int d = 0; d < l; ++d) out(larger.index(a, b), larger.index(c, d)) = rho_(cutoff_.index(a, b), cutoff_.index(c, d));
  return TwoModeState(std::move(out), larger);
}

void LossParams::validate() const {
  check_probability(eta_a, "eta_a");
  check_probability(eta_b, "eta_b");
}

LossParams LossParams::symmetric(double eta_ab) {
  check_probability(eta_ab, "eta_ab");
  return {std::sqrt(eta_ab), std::sqrt(eta_ab)};
}

LossParams LossParams::asymmetric(double eta_ab) {
  check_probability(eta_ab, "eta_ab");
  return {1.0, eta_ab};
}

// ---------------------------------------------------------------------------

SingleModeState heralded_source_state(double p1, double p2, FockCutoff cutoff) {
  check_probability(p1, "p1");
  check_probability(p2, "p2");
  if (p1 + p2 > 1.0 + 1e-15) throw std::invalid_argument("heralded_source_state: p1 + p2 exceeds one");
  if (p2 > 0.0 && cutoff.n_max() < 2) throw CutoffOverflow("heralded_source_state: two-photon component needs n_max >= 2");
  Eigen::VectorXd pops = Eigen::VectorXd::Zero(cutoff.levels());
  pops(0) = std::max(0.0, 1.0 - p1 - p2);
  pops(1) = p1;
  if (cutoff.n_max() >= 2) pops(2) = p2;
  return SingleModeState::diagonal(pops);
}

TwoModeState beam_splitter_split(const SingleModeState& input, double transmittance,
                                 std::optional<FockCutoff> output_cutoff) {
  check_probability(transmittance, "transmittance");
  const FockCutoff out = output_cutoff.value_or(input.cutoff());
  const int in_levels = static_cast<int>(input.rho().rows());
  for (int n = out.levels(); n < in_levels; ++n) {
    if (input.rho().row(n).cwiseAbs().maxCoeff() > kSupportTol) {
      throw CutoffOverflow("beam_splitter_split: input has support above the output cutoff");
    }
  }
  const double t = std::sqrt(transmittance);
  const double r = std::sqrt(1.0 - transmittance);
  const int usable = std::min(in_levels, out.levels());
  // Isometry |n> -> sum_k sqrt(C(n,k)) t^k r^(n-k) |k, n-k>.
  ComplexMatrix iso = ComplexMatrix::Zero(out.two_mode_dim(), in_levels);
  for (int n = 0; n < usable; ++n) {
    for (int k = 0; k <= n; ++k) {
      iso(out.index(k, n - k), n) = std::sqrt(binomial(n, k)) * std::pow(t, k) * std::pow(r, n - k);
    }
  }
  ComplexMatrix rho = iso * input.rho() * iso.adjoint();
  return TwoModeState(0.5 * (rho + rho.adjoint()), out);
}

SingleModeState apply_loss(const SingleModeState& state, double eta) {
  check_probability(eta, "eta");
  const auto ops = loss_kraus(static_cast<int>(state.rho().rows()), eta);
  ComplexMatrix rho = apply_kraus(state.rho(), ops);
  return SingleModeState(0.5 * (rho + rho.adjoint()));
}

TwoModeState apply_loss(const TwoModeState& state, const LossParams& loss) {
  loss.validate();
  const int l = state.cutoff().levels();
  const RealMatrix id = RealMatrix::Identity(l, l);
  std::vector<RealMatrix> ops_a;
  for (const auto& k : loss_kraus(l, loss.eta_a)) ops_a.push_back(kron(k, id));
  std::vector<RealMatrix> ops_b;
  for (const auto& k : loss_kraus(l, loss.eta_b)) ops_b.push_back(kron(id, k));
  ComplexMatrix rho = apply_kraus(apply_kraus(state.rho(), ops_a), ops_b);
  return TwoModeState(0.5 * (rho + rho.adjoint()), state.cutoff());
}

TwoModeState lossy_bell_state(double eta_a, double eta_b, FockCutoff cutoff) {
  check_probability(eta_a, "eta_a");
  check_probability(eta_b, "eta_b");
  ComplexMatrix rho = ComplexMatrix::Zero(cutoff.two_mode_dim(), cutoff.two_mode_dim());
  const int i00 = cutoff.index(0, 0);
  const int i10 = cutoff.index(1, 0);
  const int i01 = cutoff.index(0, 1);
  rho(i00, i00) = (2.0 - eta_a - eta_b) / 2.0;
  rho(i10, i10) = eta_a / 2.0;
  rho(i01, i01) = eta_b / 2.0;
  rho(i10, i01) = rho(i01, i10) = std::sqrt(eta_a * eta_b) / 2.0;
  return TwoModeState(std::move(rho), cutoff);
}

BipartiteStats local_photon_probs(const TwoModeState& state) {
  auto from = [](const SingleModeState& s) {
    const double p0 = s.population(0);
    const double p1 = s.population(1);
    double tail = 0.0;
    for (int n = 2; n < s.rho().rows(); ++n) tail += s.population(n);
    return LocalPhotonStats::exact(p0, p1, tail);
  };
  return {from(state.reduced_a()), from(state.reduced_b())};
}

double joint_multiphoton_probability(const TwoModeState& state) {
  double low = 0.0;
  for (int a = 0; a <= 1; ++a)
    for (int b = 0; b <= 1; ++b) low += state.population(a, b);
  return state.trace() - low;
}

TwoModeState coarse_grain(const TwoModeState& state) {
  const FockCutoff target{2};
  const int l = state.cutoff().levels();
  ComplexMatrix out = ComplexMatrix::Zero(target.two_mode_dim(), target.two_mode_dim());
  for (int a = 0; a < l; ++a) {
    for (int b = 0; b < l; ++b) {
      const int k = target.index(std::min(a, 2), std::min(b, 2));
      out(k, k) += state.population(a, b);
    }
  }
  // Coherences within the one- and two-photon blocks.
  const int pairs[][4] = {{0, 1, 1, 0}, {2, 0, 1, 1}, {0, 2, 1, 1}, {2, 0, 0, 2}};
  for (const auto& p : pairs) {
    const cplx v = state.element(p[0], p[1], p[2], p[3]);
    out(target.index(p[0], p[1]), target.index(p[2], p[3])) = v;
    out(target.index(p[2], p[3]), target.index(p[0], p[1])) = std::conj(v);
  }
  return TwoModeState(std::move(out), target);
}

double temporal_overlap_efficiency(double gamma, double tau) {
  if (!(gamma > 0.0)) throw std::invalid_argument("temporal_overlap_efficiency: gamma must be positive");
  const double g = gamma * std::abs(tau);
  const double overlap = std::exp(-g) * (1.0 + g);
  return overlap * overlap;
}

double km_equivalent(double eta_ab, double db_per_km) {
  if (!(eta_ab > 0.0 && eta_ab <= 1.0)) throw std::invalid_argument("km_equivalent: eta_ab must lie in (0,1]");
  if (!(db_per_km > 0.0)) throw std::invalid_argument("km_equivalent: attenuation must be positive");
  return -10.0 * std::log10(eta_ab) / db_per_km;
}

}  // namespace spw
