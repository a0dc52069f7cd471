#include "spw/homodyne.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "spw/errors.hpp"

namespace spw {

namespace {

using std::numbers::pi;

constexpr double kSgnTol = 1e-13;
// Fock wavefunctions up to the simulation cutoff are below 1e-30 beyond this.
constexpr double kSgnUpper = 14.0;

// Sampler grid: [-6, 6] with 4001 nodes.
constexpr double kGridLo = -6.0;
constexpr double kGridHi = 6.0;
constexpr int kGridPoints = 4001;

const SgnOperator& cached_sgn(int n_max) {
  static const std::vector<SgnOperator> blocks = [] {
    const SgnOperator full = sgn_matrix_elements(FockCutoff::kMaxSimulation);
    std::vector<SgnOperator> out;
    for (int n = 0; n <= FockCutoff::kMaxSimulation; ++n) {
      out.emplace_back(full.elements().topLeftCorner(n + 1, n + 1));
    }
    return out;
  }();
  if (n_max < 1 || n_max > FockCutoff::kMaxSimulation) {
    throw std::invalid_argument("sgn operator: cutoff outside the supported range");
  }
  return blocks[n_max];
}

/// Cumulative integrals int_{-6}^{x_i} psi_n psi_m dx for n <= m on the
/// sampler grid, stored node-major.
class CumulativeTable {
 public:
  explicit CumulativeTable(int levels) : levels_(levels), pairs_(levels * (levels + 1) / 2) {
    values_.assign(static_cast<std::size_t>(kGridPoints) * pairs_, 0.0);
    // 5-point Gauss-Legendre per cell.
    static constexpr std::array<double, 5> nodes{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                                 0.9061798459386640};
    static constexpr std::array<double, 5> weights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                   0.4786286704993665, 0.2369268850561891};
    std::vector<double> psi(levels_);
    std::vector<double> cell(pairs_);
    const double h = step();
    for (int i = 1; i < kGridPoints; ++i) {
      std::fill(cell.begin(), cell.end(), 0.0);
      const double mid = node(i - 1) + 0.5 * h;
      for (int q = 0; q < 5; ++q) {
        fock_wavefunctions(mid + 0.5 * h * nodes[q], psi);
        int p = 0;
        for (int n = 0; n < levels_; ++n)
          for (int m = n; m < levels_; ++m) cell[p++] += 0.5 * h * weights[q] * psi[n] * psi[m];
      }
      for (int p = 0; p < pairs_; ++p) values_[i * pairs_ + p] = values_[(i - 1) * pairs_ + p] + cell[p];
    }
  }

  static double step() { return (kGridHi - kGridLo) / (kGridPoints - 1); }
  static double node(int i) { return kGridLo + i * step(); }
  int pairs() const { return pairs_; }
  int levels() const { return levels_; }

  /// sum_p coeff[p] * I_p(x_i)
  double cdf(int i, const double* coeff) const {
    const double* row = values_.data() + static_cast<std::size_t>(i) * pairs_;
    double acc = 0.0;
    for (int p = 0; p < pairs_; ++p) acc += coeff[p] * row[p];
    return acc;
  }

 private:
  int levels_;
  int pairs_;
  std::vector<double> values_;
};

/// Inverse-CDF draw from a density sum_{n<=m} coeff_nm psi_n psi_m.
double draw_from_quadratic_form(const CumulativeTable& table, const double* coeff, double u) {
  const double total = table.cdf(kGridPoints - 1, coeff);
  if (!(total > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double target = u * total;
  int lo = 0;
  int hi = kGridPoints - 1;
  double f_lo = 0.0;
  double f_hi = total;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    const double f = table.cdf(mid, coeff);
    if (f <= target) {
      lo = mid;
      f_lo = f;
    } else {
      hi = mid;
      f_hi = f;
    }
  }
  const double span = f_hi - f_lo;
  const double frac = span > 0.0 ? std::clamp((target - f_lo) / span, 0.0, 1.0) : 0.5;
  return CumulativeTable::node(lo) + frac * CumulativeTable::step();
}

class QuadratureSampler {
 public:
  explicit QuadratureSampler(const TwoModeState& state) : levels_(state.cutoff().levels()), table_(levels_) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(state.rho());
    const auto& evals = es.eigenvalues();
    if (evals.minCoeff() < -1e-9) {
      throw std::domain_error("sample_batch: negative quadrature density (truncation artifact)");
    }
    std::vector<double> weights;
    for (Eigen::Index k = 0; k < evals.size(); ++k) {
      if (evals(k) <= 1e-15) continue;
      weights.push_back(evals(k));
      ComplexMatrix c(levels_, levels_);
      for (int a = 0; a < levels_; ++a)
        for (int b = 0; b < levels_; ++b) c(a, b) = es.eigenvectors()(state.cutoff().index(a, b), k);
      coeffs_.push_back(c);
      grams_.push_back(c * c.adjoint());
    }
    if (weights.empty()) throw std::invalid_argument("sample_batch: state has zero trace");
    pick_ = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
    phase_a_.resize(levels_);
    phase_b_.resize(levels_);
    psi_.resize(levels_);
    amp_.resize(levels_);
    coeff_.resize(table_.pairs());
  }

  template <class Rng>
  void draw(Rng& rng, double theta_a, double theta_b, double& x_a, double& x_b) {
    const std::size_t k = pick_(rng);
    const ComplexMatrix& c = coeffs_[k];
    const ComplexMatrix& gram = grams_[k];

    auto& wa = phase_a_;
    auto& wb = phase_b_;
    auto& coeff = coeff_;
    auto& psi = psi_;
    auto& amp = amp_;
    for (int n = 0; n < levels_; ++n) {
      wa[n] = std::polar(1.0, -n * theta_a);
      wb[n] = std::polar(1.0, -n * theta_b);
    }

    for (;;) {
      int p = 0;
      for (int n = 0; n < levels_; ++n) {
        for (int m = n; m < levels_; ++m) {
          const double v = (gram(n, m) * wa[n] * std::conj(wa[m])).real();
          coeff[p++] = (n == m) ? v : 2.0 * v;
        }
      }
      x_a = draw_from_quadratic_form(table_, coeff.data(), unit_(rng));

      fock_wavefunctions(x_a, psi);
      for (int m = 0; m < levels_; ++m) {
        cplx g = 0.0;
        for (int n = 0; n < levels_; ++n) g += c(n, m) * wa[n] * psi[n];
        amp[m] = g * wb[m];
      }
      p = 0;
      for (int n = 0; n < levels_; ++n) {
        for (int m = n; m < levels_; ++m) {
          const double v = (amp[n] * std::conj(amp[m])).real();
          coeff[p++] = (n == m) ? v : 2.0 * v;
        }
      }
      x_b = draw_from_quadratic_form(table_, coeff.data(), unit_(rng));
      if (!std::isnan(x_b)) return;
    }
  }

 private:
  int levels_;
  CumulativeTable table_;
  std::vector<ComplexMatrix> coeffs_;
  std::vector<ComplexMatrix> grams_;
  std::discrete_distribution<std::size_t> pick_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  // scratch
  std::vector<cplx> phase_a_;
  std::vector<cplx> phase_b_;
  std::vector<double> psi_;
  std::vector<cplx> amp_;
  std::vector<double> coeff_;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

double phase_of(AliceSetting s) { return s == AliceSetting::X ? 0.0 : pi / 2.0; }
double phase_of(BobSetting s) { return s == BobSetting::XPlusP ? pi / 4.0 : -pi / 4.0; }
std::string label_of(AliceSetting s) { return s == AliceSetting::X ? "X" : "P"; }
std::string label_of(BobSetting s) { return s == BobSetting::XPlusP ? "X+P" : "X-P"; }

AliceSetting parse_alice_setting(const std::string& label) {
  if (label == "X") return AliceSetting::X;
  if (label == "P") return AliceSetting::P;
  throw std::invalid_argument("unknown Alice setting '" + label + "'");
}

BobSetting parse_bob_setting(const std::string& label) {
  if (label == "X+P") return BobSetting::XPlusP;
  if (label == "X-P") return BobSetting::XMinusP;
  throw std::invalid_argument("unknown Bob setting '" + label + "'");
}

std::size_t chsh_index(const QuadratureSetting& s) {
  return (s.a == AliceSetting::P ? 2 : 0) + (s.b == BobSetting::XMinusP ? 1 : 0);
}

std::size_t SampleBatch::count_for(const QuadratureSetting& s) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [&](const SampleRecord& r) { return r.setting == s; }));
}

// ---------------------------------------------------------------------------

void fock_wavefunctions(double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = std::pow(pi, -0.25) * std::exp(-0.5 * x * x);
  if (out.size() > 1) out[1] = std::sqrt(2.0) * x * out[0];
  for (std::size_t n = 1; n + 1 < out.size(); ++n) {
    const double nd = static_cast<double>(n);
    out[n + 1] = std::sqrt(2.0 / (nd + 1.0)) * x * out[n] - std::sqrt(nd / (nd + 1.0)) * out[n - 1];
  }
}

double fock_wavefunction(int n, double x) {
  if (n < 0) throw std::invalid_argument("fock_wavefunction: negative level");
  std::vector<double> psi(n + 1);
  fock_wavefunctions(x, psi);
  return psi[n];
}

ComplexMatrix SgnOperator::at_phase(double theta) const {
  const int l = static_cast<int>(s_.rows());
  ComplexMatrix out(l, l);
  for (int n = 0; n < l; ++n)
    for (int m = 0; m < l; ++m) out(n, m) = std::polar(s_(n, m), (n - m) * theta);
  return out;
}

SgnOperator sgn_matrix_elements(int n_max) {
  if (n_max < 1) throw std::invalid_argument("sgn_matrix_elements: n_max must be >= 1");
  using boost::math::quadrature::gauss_kronrod;
  RealMatrix s = RealMatrix::Zero(n_max + 1, n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    for (int m = n + 1; m <= n_max; m += 2) {
      auto integrand = [n, m](double x) {
        std::vector<double> psi(m + 1);
        fock_wavefunctions(x, psi);
        return psi[n] * psi[m];
      };
      double err = 0.0;
      const double half = gauss_kronrod<double, 61>::integrate(integrand, 0.0, kSgnUpper, 15, 1e-14, &err);
      if (!(err <= kSgnTol)) {
        throw ConvergenceError("sgn_matrix_elements: quadrature did not converge for (" + std::to_string(n) + "," +
                               std::to_string(m) + ")");
      }
      s(n, m) = s(m, n) = 2.0 * half;
    }
  }
  return SgnOperator(std::move(s));
}

double exact_correlator(const TwoModeState& state, double theta_a, double theta_b) {
  const int l = state.cutoff().levels();
  const SgnOperator& sgn = cached_sgn(state.cutoff().n_max());
  const ComplexMatrix sa = sgn.at_phase(theta_a);
  const ComplexMatrix sb = sgn.at_phase(theta_b);
  const ComplexMatrix& rho = state.rho();
  cplx acc = 0.0;
  for (int a = 0; a < l; ++a)
    for (int b = 0; b < l; ++b)
      for (int c = 0; c < l; ++c) {
        if (sa(c, a) == 0.0) continue;
        for (int d = 0; d < l; ++d) acc += rho(a * l + b, c * l + d) * sa(c, a) * sb(d, b);
      }
  return acc.real();
}

double phase_averaged_correlator(const TwoModeState& state, double delta, int phase_points) {
  if (phase_points < 1) throw std::invalid_argument("phase_averaged_correlator: need at least one phase point");
  double acc = 0.0;
  for (int k = 0; k < phase_points; ++k) {
    const double phi = 2.0 * pi * k / phase_points;
    acc += exact_correlator(state, phi, phi + delta);
  }
  return acc / phase_points;
}

double joint_quadrature_density(const TwoModeState& state, double theta_a, double theta_b, double x_a, double x_b) {
  const int l = state.cutoff().levels();
  std::vector<double> pa(l);
  std::vector<double> pb(l);
  fock_wavefunctions(x_a, pa);
  fock_wavefunctions(x_b, pb);
  Eigen::VectorXcd amp(l * l);
  for (int a = 0; a < l; ++a)
    for (int b = 0; b < l; ++b) amp(a * l + b) = std::polar(pa[a] * pb[b], -a * theta_a - b * theta_b);
  return (amp.adjoint() * state.rho() * amp)(0, 0).real();
}

double phase_averaged_marginal_density(const TwoModeState& state, Party party, double x) {
  const SingleModeState local = party == Party::A ? state.reduced_a() : state.reduced_b();
  const int l = static_cast<int>(local.rho().rows());
  std::vector<double> psi(l);
  fock_wavefunctions(x, psi);
  double acc = 0.0;
  for (int n = 0; n < l; ++n) acc += local.population(n) * psi[n] * psi[n];
  return acc;
}

double phase_averaged_marginal_cdf(const TwoModeState& state, Party party, double x) {
  using boost::math::quadrature::gauss_kronrod;
  const SingleModeState local = party == Party::A ? state.reduced_a() : state.reduced_b();
  const int l = static_cast<int>(local.rho().rows());
  auto density = [&](double t) {
    std::vector<double> psi(l);
    fock_wavefunctions(t, psi);
    double acc = 0.0;
    for (int n = 0; n < l; ++n) acc += local.population(n) * psi[n] * psi[n];
    return acc;
  };
  // The phase-averaged marginal is even.
  const double half = gauss_kronrod<double, 31>::integrate(density, 0.0, std::abs(x), 10, 1e-14);
  return 0.5 * local.trace() + (x >= 0.0 ? half : -half);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SampleBatch sample_batch(const TwoModeState& state, std::size_t n_per_setting, std::uint64_t seed,
                         std::span<const QuadratureSetting> settings) {
  if (n_per_setting < 1) throw std::invalid_argument("sample_batch: n_per_setting must be >= 1");
  QuadratureSampler sampler(state);
  SampleBatch batch;
  batch.rng_seed = seed;
  batch.records.reserve(n_per_setting * settings.size());
  for (const auto& setting : settings) {
    std::mt19937_64 rng(derive_seed(seed, chsh_index(setting)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < n_per_setting; ++i) {
      const double phi = 2.0 * pi * unit(rng);
      SampleRecord r{setting, 0.0, 0.0, phi};
      sampler.draw(rng, phi + setting.phase_a(), phi + setting.phase_b(), r.x_a, r.x_b);
      batch.records.push_back(r);
    }
  }
  return batch;
}

void write_samples_csv(std::ostream& out, const SampleBatch& batch) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "setting_a,setting_b,x_a,x_b,global_phase\n";
  for (const auto& r : batch.records) {
    out << label_of(r.setting.a) << ',' << label_of(r.setting.b) << ',' << r.x_a << ',' << r.x_b << ','
        << r.global_phase << '\n';
  }
  out.precision(old_precision);
}

SampleBatch read_samples_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("samples csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "setting_a,setting_b,x_a,x_b,global_phase") {
    throw std::invalid_argument("samples csv: unexpected header '" + line + "'");
  }
  SampleBatch batch;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 5) {
      throw std::invalid_argument("samples csv: line " + std::to_string(line_no) + " has " +
                                  std::to_string(fields.size()) + " fields");
    }
    try {
      SampleRecord r{{parse_alice_setting(fields[0]), parse_bob_setting(fields[1])},
                     std::stod(fields[2]),
                     std::stod(fields[3]),
                     std::stod(fields[4])};
      batch.records.push_back(r);
    } catch (const std::logic_error& e) {
      throw std::invalid_argument("samples csv: line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return batch;
}

}  // namespace spw
