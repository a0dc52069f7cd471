#include "spw/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "spw/errors.hpp"

namespace spw {

namespace {

using std::numbers::pi;
using std::numbers::sqrt2;

constexpr double kTwoSqrt2 = 2.0 * sqrt2;
constexpr double kProbabilityTol = 1e-9;
constexpr double kCertificateTol = 1e-5;
constexpr int kCutoffTwoDim = 9;

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

// Class probabilities {p0, p1, p_ge2}, validated and renormalised.
std::array<double, kPhotonClasses> class_probabilities(const LocalPhotonStats& s, const char* party) {
  std::array<double, kPhotonClasses> p{s.p0, s.p1, s.p_ge2};
  double total = 0.0;
  for (double v : p) {
    if (!(v >= -kProbabilityTol && v <= 1.0 + kProbabilityTol)) {
      throw std::invalid_argument(std::string("photon statistics of party ") + party +
                                  " are not probabilities (use sanitized() on estimates)");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kProbabilityTol) {
    throw std::invalid_argument(std::string("photon statistics of party ") + party + " do not sum to one");
  }
  for (double& v : p) v = std::clamp(v, 0.0, 1.0) / total;
  return p;
}

std::array<double, kPhotonClasses> class_sigmas(const LocalPhotonStats& s) {
  return {s.sigma0, s.sigma1, s.sigma_ge2};
}

void echo_stats(BoundResult& r, const LocalPhotonStats& a, const LocalPhotonStats& b) {
  r.inputs = {{"p0a", a.p0}, {"p1a", a.p1}, {"pge2a", a.p_ge2}, {"p0b", b.p0}, {"p1b", b.p1}, {"pge2b", b.p_ge2}};
}

RealMatrix select(const RealMatrix& m, const std::vector<int>& idx) {
  const int n = static_cast<int>(idx.size());
  RealMatrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = m(idx[i], idx[j]);
  return out;
}

bool mask_has(int mask, int cls) { return (mask >> cls) & 1; }

constexpr int kFullMask = (1 << kPhotonClasses) - 1;

std::vector<int> family_masks(FrechetFamily family) {
  if (family == FrechetFamily::Singletons01) return {0b001, 0b010};
  std::vector<int> masks;
  for (int m = 1; m <= kFullMask; ++m) masks.push_back(m);
  return masks;
}

std::string mask_label(int mask) {
  static const std::array<const char*, kPhotonClasses> names{"0", "1", ">=2"};
  std::string out = "{";
  bool first = true;
  for (int c = 0; c < kPhotonClasses; ++c) {
    if (!mask_has(mask, c)) continue;
    if (!first) out += ",";
    out += names[c];
    first = false;
  }
  return out + "}";
}

SdpSummary summarize(const SdpProblem& problem, const SdpSolution& sol) {
  SdpSummary s;
  s.status = sol.status;
  s.primal_value = sol.primal_value;
  s.dual_value = sol.dual_value;
  s.safe_bound = sol.residuals.safe_bound;
  s.gap = sol.gap;
  s.stationarity = sol.residuals.stationarity;
  s.scalar_stationarity = sol.residuals.scalar_stationarity;
  s.sign_violation = sol.residuals.sign_violation;
  s.min_eigenvalues = sol.residuals.min_eigenvalues;
  s.iterations = sol.iterations;
  s.dimension = problem.dim;
  s.constraints = static_cast<int>(problem.constraints.size());
  return s;
}

std::vector<std::string> trace_lines(const SdpSolution& sol) {
  std::vector<std::string> lines;
  for (const auto& t : sol.trace) {
    std::ostringstream os;
    os.precision(6);
    os << "iter " << t.iteration << " pobj " << t.primal_objective << " dobj " << t.dual_objective << " pinf "
       << t.primal_infeasibility << " dinf " << t.dual_infeasibility << " mu " << t.mu;
    lines.push_back(os.str());
  }
  return lines;
}

}  // namespace

std::string to_string(BoundMethod method) {
  switch (method) {
    case BoundMethod::Qubit:
      return "qubit";
    case BoundMethod::LossySym:
      return "lossy_sym";
    case BoundMethod::LossyAsym:
      return "lossy_asym";
    case BoundMethod::AnalyticMultiphoton:
      return "analytic_multiphoton";
    case BoundMethod::PjointClosedForm:
      return "pjoint_closed_form";
    case BoundMethod::SdpOriginal:
      return "sdp_original";
    case BoundMethod::SdpEnhanced:
      return "sdp_enhanced";
  }
  return "unknown";
}

std::vector<BoundMethod> all_bound_methods() {
  return {BoundMethod::Qubit,           BoundMethod::LossySym,    BoundMethod::LossyAsym,
          BoundMethod::AnalyticMultiphoton, BoundMethod::PjointClosedForm, BoundMethod::SdpOriginal,
          BoundMethod::SdpEnhanced};
}

BoundMethod parse_bound_method(const std::string& tag) {
  for (BoundMethod m : all_bound_methods())
    if (to_string(m) == tag) return m;
  throw std::invalid_argument("unknown bound method '" + tag + "'");
}

double qubit_s_max(double p0_a, double p0_b) {
  require_probability(p0_a, "p0A");
  require_probability(p0_b, "p0B");
  if (p0_a + p0_b <= 1.0) return kQubitPrefactor * std::sqrt(p0_a * p0_b);
  return kQubitPrefactor * std::sqrt((1.0 - p0_a) * (1.0 - p0_b));
}

BoundResult qubit_sep_bound(double p0_a, double p0_b) {
  require_probability(p0_a, "p0A");
  require_probability(p0_b, "p0B");
  BoundResult r;
  r.method = BoundMethod::Qubit;
  r.value = kQubitPrefactor * std::sqrt(p0_a * p0_b * (1.0 - p0_a) * (1.0 - p0_b));
  r.note = "valid for states supported on {0,1}^2 only";
  r.inputs = {{"p0a", p0_a}, {"p0b", p0_b}};
  return r;
}

BoundResult sep_bound_lossy(double eta_a, double eta_b) {
  require_probability(eta_a, "eta_A");
  require_probability(eta_b, "eta_B");
  BoundResult r;
  r.method = eta_a == eta_b ? BoundMethod::LossySym : BoundMethod::LossyAsym;
  r.value = 0.5 * kQubitPrefactor * std::sqrt(eta_a * eta_b * (1.0 - eta_a / 2.0) * (1.0 - eta_b / 2.0));
  r.note = "qubit bound along the lossy single-photon curve";
  r.inputs = {{"eta_a", eta_a}, {"eta_b", eta_b}};
  return r;
}

BoundResult sep_bound_lossy_sym(double eta_ab) {
  require_probability(eta_ab, "eta_AB");
  BoundResult r = sep_bound_lossy(std::sqrt(eta_ab), std::sqrt(eta_ab));
  r.method = BoundMethod::LossySym;
  return r;
}

BoundResult sep_bound_lossy_asym(double eta_ab) {
  require_probability(eta_ab, "eta_AB");
  BoundResult r = sep_bound_lossy(1.0, eta_ab);
  r.method = BoundMethod::LossyAsym;
  return r;
}

BoundResult analytic_multiphoton_bound(const LocalPhotonStats& a, const LocalPhotonStats& b) {
  const auto pa = class_probabilities(a, "A");
  const auto pb = class_probabilities(b, "B");
  const double z = 1.0 + pa[2] + pb[2];
  const double p00 = pa[0] * pb[0] / z;
  const double d2 = pa[0] * pb[0] * (1.0 - pb[0] / z) * (1.0 - pa[0] / z);
  const double p11_cap = z + p00 - pa[0] - pb[0];
  const double p_star = pa[2] + pb[2];

  BoundResult r;
  r.method = BoundMethod::AnalyticMultiphoton;
  r.tight = false;
  r.value = kQubitPrefactor * std::sqrt(std::max(0.0, d2)) +
            (8.0 / pi) * (std::sqrt(pa[2]) + std::sqrt(pb[2])) * std::sqrt(std::max(0.0, p11_cap)) +
            kTwoSqrt2 * p_star;
  r.note = "p00 = p0A p0B / z (optimal for small multiphoton components); not always tight";
  echo_stats(r, a, b);
  r.inputs.emplace_back("p_star", p_star);
  return r;
}

RealMatrix witness_matrix() {
  RealMatrix m = RealMatrix::Zero(kCutoffTwoDim, kCutoffTwoDim);
  const double d = 4.0 * sqrt2 / pi;  // half of 16/(pi sqrt2)
  const double ef = 4.0 / pi;          // half of 8/pi
  m(1, 3) = m(3, 1) = d;
  m(2, 4) = m(4, 2) = ef;
  m(4, 6) = m(6, 4) = ef;
  return m;
}

RealMatrix qubit_projector() {
  RealMatrix n = RealMatrix::Zero(kCutoffTwoDim, kCutoffTwoDim);
  for (int i : {0, 1, 3, 4}) n(i, i) = 1.0;
  return n;
}

RealMatrix partial_transpose_01(const RealMatrix& rho) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("partial_transpose_01: matrix must be square");
  return apply_cone_map(ConeMap::PartialTranspose01, rho);
}

ComplexMatrix partial_transpose_01(const ComplexMatrix& rho) {
  const int dim = static_cast<int>(rho.rows());
  const int l = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim))));
  if (rho.rows() != rho.cols() || l * l != dim) {
    throw std::invalid_argument("partial_transpose_01: matrix must be square over a two-mode basis");
  }
  ComplexMatrix out = rho;
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < l; ++k)
        for (int m = 0; m < 2; ++m) out(i * l + j, k * l + m) = rho(i * l + m, k * l + j);
  return out;
}

CertificateData build_certificate(double p_joint) {
  if (!(p_joint > 0.0 && p_joint <= 0.5)) {
    throw std::domain_error("build_certificate: p_joint must lie in (0, 1/2]; use the qubit bound at p_joint = 0");
  }
  const double p = p_joint;
  const double xp = std::sqrt(1.0 - p) + std::sqrt(p);
  const double xm = std::sqrt(1.0 - p) - std::sqrt(p);

  CertificateData c;
  c.p_joint = p;
  c.lambda = (2.0 / pi) * std::sqrt(2.0 / p) * xp;
  c.mu = ((2.0 / pi) * sqrt2 * xp * xp - c.lambda) / (1.0 - p);
  c.ell = 8.0 * std::sqrt(2.0 * p) / (pi * xp);
  const double lm = c.lambda + c.mu;
  const double ratio = xm / xp;
  c.m = lm * ratio - 4.0 * sqrt2 / pi;

  RealMatrix& a = c.a_matrix;
  a = RealMatrix::Zero(kCutoffTwoDim, kCutoffTwoDim);
  a(1, 1) = a(3, 3) = lm;
  a(1, 3) = a(3, 1) = c.m;
  for (int i : {2, 5, 6, 7, 8}) a(i, i) = c.lambda;
  a(2, 4) = a(4, 2) = a(4, 6) = a(6, 4) = -4.0 / pi;
  a(4, 4) = c.ell;

  RealMatrix& b = c.b_matrix;
  b = RealMatrix::Zero(kCutoffTwoDim, kCutoffTwoDim);
  b(0, 0) = lm;
  b(0, 4) = b(4, 0) = -lm * ratio;
  b(4, 4) = lm * ratio * ratio;

  const RealMatrix residual = a + partial_transpose_01(b) - c.mu * qubit_projector() -
                              c.lambda * RealMatrix::Identity(kCutoffTwoDim, kCutoffTwoDim) + witness_matrix();
  c.residual_norm = residual.norm();
  c.min_eig_a = Eigen::SelfAdjointEigenSolver<RealMatrix>(a, Eigen::EigenvaluesOnly).eigenvalues()(0);
  c.min_eig_b = Eigen::SelfAdjointEigenSolver<RealMatrix>(b, Eigen::EigenvaluesOnly).eigenvalues()(0);
  c.dual_bound = c.lambda + c.mu * (1.0 - p) + kTwoSqrt2 * p;
  return c;
}

BoundResult pjoint_closed_form_bound(double p_joint) {
  if (!(p_joint >= 0.0 && p_joint <= 0.5)) {
    throw std::domain_error("pjoint_closed_form_bound: p_joint must lie in [0, 1/2]");
  }
  const double s = std::sqrt(1.0 - p_joint) + std::sqrt(p_joint);
  BoundResult r;
  r.method = BoundMethod::PjointClosedForm;
  r.value = kTwoSqrt2 * (s * s / pi + p_joint);
  r.inputs = {{"p_joint", p_joint}};
  if (p_joint > 0.0) {
    r.certificate = build_certificate(p_joint);
  } else {
    r.note = "p_joint = 0: qubit limit";
  }
  return r;
}

// ---------------------------------------------------------------------------

SdpProblem build_bound_program(const LocalPhotonStats& a, const LocalPhotonStats& b, const ProgramShape& shape) {
  const auto pa = class_probabilities(a, "A");
  const auto pb = class_probabilities(b, "B");
  const bool boxed = shape.k_sigma.has_value();
  const double k = boxed ? *shape.k_sigma : 0.0;
  if (boxed && !(k >= 0.0)) throw std::invalid_argument("k_sigma must be non-negative");

  // Probability ranges per class; point values collapse to lo == hi.
  std::array<std::array<double, kPhotonClasses>, 2> lo{};
  std::array<std::array<double, kPhotonClasses>, 2> hi{};
  const std::array<std::array<double, kPhotonClasses>, 2> sig{class_sigmas(a), class_sigmas(b)};
  const std::array<std::array<double, kPhotonClasses>, 2> pt{pa, pb};
  for (int party = 0; party < 2; ++party) {
    for (int c = 0; c < kPhotonClasses; ++c) {
      const double s = boxed ? std::max(0.0, sig[party][c]) : 0.0;
      lo[party][c] = std::clamp(pt[party][c] - k * s, 0.0, 1.0);
      hi[party][c] = std::clamp(pt[party][c] + k * s, 0.0, 1.0);
    }
  }

  // Kept classes (upper bound > 0), in natural order.
  std::array<std::vector<int>, 2> kept;
  for (int party = 0; party < 2; ++party)
    for (int c = 0; c < kPhotonClasses; ++c)
      if (hi[party][c] > 0.0) kept[party].push_back(c);
  const int la = static_cast<int>(kept[0].size());
  const int lb = static_cast<int>(kept[1].size());
  std::vector<int> basis;
  for (int ca : kept[0])
    for (int cb : kept[1]) basis.push_back(ca * kPhotonClasses + cb);

  SdpProblem prob;
  prob.dim = la * lb;
  prob.levels_b = lb;
  const bool bob_has_01 = lb >= 2 && kept[1][0] == 0 && kept[1][1] == 1;
  prob.cones = {ConeMap::Identity};
  if (bob_has_01) prob.cones.push_back(ConeMap::PartialTranspose01);

  // Scalar variables: one per kept class in box mode.
  std::array<std::array<int, kPhotonClasses>, 2> scalar_index{};
  for (auto& row : scalar_index) row.fill(-1);
  if (boxed) {
    static const std::array<const char*, 2> party_name{"a", "b"};
    static const std::array<const char*, kPhotonClasses> class_name{"0", "1", "ge2"};
    for (int party = 0; party < 2; ++party) {
      for (int c : kept[party]) {
        scalar_index[party][c] = static_cast<int>(prob.scalar_names.size());
        prob.scalar_names.push_back(std::string("p") + class_name[c] + party_name[party]);
      }
    }
  }
  const int ns = prob.scalar_count();

  const RealMatrix m = select(witness_matrix(), basis);
  const RealMatrix n = select(qubit_projector(), basis);
  if (shape.joint_from_state) {
    prob.objective = m - kTwoSqrt2 * n;
    prob.objective_offset = kTwoSqrt2;
  } else {
    prob.objective = m;
    if (boxed) {
      prob.objective_scalars = Vector::Zero(ns);
      for (int party = 0; party < 2; ++party)
        if (scalar_index[party][2] >= 0) prob.objective_scalars(scalar_index[party][2]) = kTwoSqrt2;
    } else {
      prob.objective_offset = kTwoSqrt2 * (pa[2] + pb[2]);
    }
  }

  prob.constraints.push_back({RealMatrix::Identity(prob.dim, prob.dim), Vector(), Relation::LessEqual, 1.0, "trace"});

  if (boxed) {
    for (int party = 0; party < 2; ++party) {
      Vector total = Vector::Zero(ns);
      for (int c : kept[party]) {
        const int j = scalar_index[party][c];
        Vector e = Vector::Zero(ns);
        e(j) = 1.0;
        total(j) = 1.0;
        const std::string& name = prob.scalar_names[j];
        prob.constraints.push_back({RealMatrix(), e, Relation::GreaterEqual, lo[party][c], name + " lower"});
        prob.constraints.push_back({RealMatrix(), e, Relation::LessEqual, hi[party][c], name + " upper"});
      }
      prob.constraints.push_back(
          {RealMatrix(), total, Relation::Equal, 1.0, party == 0 ? "normalisation a" : "normalisation b"});
    }
  }

  // Projector onto the event (A in S) and (B in T) in the kept basis.
  auto event = [&](int mask_a, int mask_b) {
    RealMatrix g = RealMatrix::Zero(prob.dim, prob.dim);
    for (int i = 0; i < prob.dim; ++i) {
      const int ca = basis[i] / kPhotonClasses;
      const int cb = basis[i] % kPhotonClasses;
      if (mask_has(mask_a, ca) && mask_has(mask_b, cb)) g(i, i) = 1.0;
    }
    return g;
  };
  auto point_prob = [&](int party, int mask) {
    double s = 0.0;
    for (int c = 0; c < kPhotonClasses; ++c)
      if (mask_has(mask, c)) s += pt[party][c];
    return s;
  };
  // Coefficients of p(S) in the scalar variables (constant 1 for the full set).
  auto scalar_row = [&](int party, int mask) {
    Vector h = Vector::Zero(ns);
    for (int c : kept[party])
      if (mask_has(mask, c)) h(scalar_index[party][c]) = 1.0;
    return h;
  };

  const auto masks = family_masks(shape.family);
  for (int sa : masks) {
    for (int sb : masks) {
      if (sa == kFullMask && sb == kFullMask) continue;
      const RealMatrix g = event(sa, sb);
      const std::string label = "P(A in " + mask_label(sa) + ", B in " + mask_label(sb) + ")";
      if (!boxed) {
        const double ps = point_prob(0, sa);
        const double pt_b = point_prob(1, sb);
        const double lower = std::max(0.0, ps + pt_b - 1.0);
        const double upper = std::min(ps, pt_b);
        if (lower > 0.0) prob.constraints.push_back({g, Vector(), Relation::GreaterEqual, lower, label + " lower"});
        prob.constraints.push_back({g, Vector(), Relation::LessEqual, upper, label + " upper"});
        continue;
      }
      // P >= p(S) + p(T) - 1, P <= p(S), P <= p(T); P >= 0 is implied by rho >= 0.
      const bool full_a = sa == kFullMask;
      const bool full_b = sb == kFullMask;
      Vector h = Vector::Zero(ns);
      double rhs = -1.0;
      if (full_a) rhs += 1.0; else h -= scalar_row(0, sa);
      if (full_b) rhs += 1.0; else h -= scalar_row(1, sb);
      prob.constraints.push_back({g, h, Relation::GreaterEqual, rhs, label + " lower"});
      if (!full_a) prob.constraints.push_back({g, -scalar_row(0, sa), Relation::LessEqual, 0.0, label + " upper A"});
      if (!full_b) prob.constraints.push_back({g, -scalar_row(1, sb), Relation::LessEqual, 0.0, label + " upper B"});
    }
  }
  return prob;
}

SdpProblem pjoint_program(double p_joint) {
  require_probability(p_joint, "p_joint");
  SdpProblem prob;
  prob.dim = kCutoffTwoDim;
  prob.objective = witness_matrix();
  prob.objective_offset = kTwoSqrt2 * p_joint;
  prob.cones = {ConeMap::Identity, ConeMap::PartialTranspose01};
  prob.constraints.push_back(
      {RealMatrix::Identity(kCutoffTwoDim, kCutoffTwoDim), Vector(), Relation::LessEqual, 1.0, "trace"});
  prob.constraints.push_back({qubit_projector(), Vector(), Relation::Equal, 1.0 - p_joint, "tr(N rho)"});
  return prob;
}

SdpProblem unconstrained_program() {
  SdpProblem prob;
  prob.dim = kCutoffTwoDim;
  prob.objective = witness_matrix() - kTwoSqrt2 * qubit_projector();
  prob.objective_offset = kTwoSqrt2;
  prob.cones = {ConeMap::Identity, ConeMap::PartialTranspose01};
  prob.constraints.push_back(
      {RealMatrix::Identity(kCutoffTwoDim, kCutoffTwoDim), Vector(), Relation::LessEqual, 1.0, "trace"});
  return prob;
}

BoundResult solve_bound_program(const SdpProblem& problem, BoundMethod method, const SdpOptions& options) {
  const SdpSolution sol = solve(problem, options);
  if (sol.status != SdpStatus::Optimal || !sol.residuals.within(kCertificateTol)) {
    std::ostringstream os;
    os << "sdp bound (" << to_string(method) << "): status " << to_string(sol.status) << ", stationarity "
       << sol.residuals.stationarity << ", gap " << sol.gap;
    throw SolverError(os.str(), trace_lines(sol));
  }
  BoundResult r;
  r.method = method;
  r.value = std::isfinite(sol.residuals.safe_bound) ? sol.residuals.safe_bound : sol.dual_value;
  r.sdp = summarize(problem, sol);
  return r;
}

BoundResult sdp_enhanced_bound(const LocalPhotonStats& a, const LocalPhotonStats& b, const SdpOptions& options) {
  BoundResult r = solve_bound_program(build_bound_program(a, b, {FrechetFamily::AllSubsets, true, std::nullopt}),
                                      BoundMethod::SdpEnhanced, options);
  echo_stats(r, a, b);
  return r;
}

BoundResult sdp_original_bound(const LocalPhotonStats& a, const LocalPhotonStats& b, const SdpOptions& options) {
  BoundResult r = solve_bound_program(build_bound_program(a, b, {FrechetFamily::Singletons01, false, std::nullopt}),
                                      BoundMethod::SdpOriginal, options);
  echo_stats(r, a, b);
  r.inputs.emplace_back("p_star", a.p_ge2 + b.p_ge2);
  return r;
}

BoundResult bound_with_uncertainties(const LocalPhotonStats& a, const LocalPhotonStats& b, double k_sigma,
                                     BoundMethod method, const SdpOptions& options) {
  ProgramShape shape;
  if (method == BoundMethod::SdpEnhanced) {
    shape = {FrechetFamily::AllSubsets, true, k_sigma};
  } else if (method == BoundMethod::SdpOriginal) {
    shape = {FrechetFamily::Singletons01, false, k_sigma};
  } else {
    throw std::invalid_argument("bound_with_uncertainties: only sdp_enhanced and sdp_original are supported");
  }
  BoundResult r = solve_bound_program(build_bound_program(a, b, shape), method, options);
  echo_stats(r, a, b);
  r.inputs.emplace_back("k_sigma", k_sigma);
  r.inputs.emplace_back("sigma0a", a.sigma0);
  r.inputs.emplace_back("sigma1a", a.sigma1);
  r.inputs.emplace_back("sigmage2a", a.sigma_ge2);
  r.inputs.emplace_back("sigma0b", b.sigma0);
  r.inputs.emplace_back("sigma1b", b.sigma1);
  r.inputs.emplace_back("sigmage2b", b.sigma_ge2);
  r.note = "local probabilities boxed to p +- k sigma, clipped to [0, 1]";
  return r;
}

BoundResult compute_bound(BoundMethod method, const LocalPhotonStats& a, const LocalPhotonStats& b,
                          const std::optional<LossParams>& loss, double k_sigma) {
  auto need_loss = [&]() -> const LossParams& {
    if (!loss) throw std::invalid_argument(to_string(method) + " needs the channel transmissions");
    return *loss;
  };
  switch (method) {
    case BoundMethod::Qubit:
      return qubit_sep_bound(std::clamp(a.p0, 0.0, 1.0), std::clamp(b.p0, 0.0, 1.0));
    case BoundMethod::LossySym:
      return sep_bound_lossy_sym(need_loss().eta_ab());
    case BoundMethod::LossyAsym:
      return sep_bound_lossy_asym(need_loss().eta_ab());
    case BoundMethod::AnalyticMultiphoton:
      return analytic_multiphoton_bound(a, b);
    case BoundMethod::PjointClosedForm: {
      BoundResult r = pjoint_closed_form_bound(a.p_ge2 + b.p_ge2);
      r.note = r.note.empty() ? "p_joint bounded by p*" : r.note + "; p_joint bounded by p*";
      return r;
    }
    case BoundMethod::SdpOriginal:
    case BoundMethod::SdpEnhanced:
      if (k_sigma > 0.0) return bound_with_uncertainties(a, b, k_sigma, method);
      return method == BoundMethod::SdpEnhanced ? sdp_enhanced_bound(a, b) : sdp_original_bound(a, b);
  }
  throw std::invalid_argument("compute_bound: unknown method");
}

std::string to_string(Verdict v) { return v == Verdict::Witnessed ? "witnessed" : "not_witnessed"; }

Verdict verdict(const WitnessResult& witness, const BoundResult& bound, double k_sigma) {
  return witness.s - k_sigma * witness.standard_error > bound.value ? Verdict::Witnessed : Verdict::NotWitnessed;
}

}  // namespace spw
