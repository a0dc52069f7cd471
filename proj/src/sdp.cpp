#include "spw/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "spw/errors.hpp"

namespace spw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRankTol = 1e-10;
constexpr double kConstantRowTol = 1e-12;
constexpr double kPresolveFeasTol = 1e-9;
constexpr double kDivergence = 1e8;
constexpr double kStallStep = 1e-8;
constexpr int kStallIterations = 5;
// Tolerance multiplier applied when the iterates stop moving.
constexpr double kRelaxedFactor = 1e3;

// ---------------------------------------------------------------------------
// Variable vector v = (rho_ij for i <= j, row-major; scalars).

struct Layout {
  int dim = 0;
  int scalars = 0;
  int rho_size() const { return dim * (dim + 1) / 2; }
  int size() const { return rho_size() + scalars; }
};

// Coefficients of the functional rho -> <G, rho> in v coordinates.
Vector functional(const RealMatrix& g, const Layout& layout) {
  Vector a = Vector::Zero(layout.rho_size());
  if (g.size() == 0) return a;
  int p = 0;
  for (int i = 0; i < layout.dim; ++i)
    for (int j = i; j < layout.dim; ++j) a(p++) = (i == j) ? g(i, i) : g(i, j) + g(j, i);
  return a;
}

RealMatrix rho_from(const Vector& v, const Layout& layout) {
  RealMatrix rho(layout.dim, layout.dim);
  int p = 0;
  for (int i = 0; i < layout.dim; ++i)
    for (int j = i; j < layout.dim; ++j) rho(i, j) = rho(j, i) = v(p++);
  return rho;
}

Vector row_of(const LinearConstraint& c, const Layout& layout) {
  Vector a(layout.size());
  a.head(layout.rho_size()) = functional(c.g, layout);
  a.tail(layout.scalars).setZero();
  if (c.h.size() > 0) a.tail(layout.scalars) = c.h;
  return a;
}

Vector objective_row(const SdpProblem& p, const Layout& layout) {
  Vector c(layout.size());
  c.head(layout.rho_size()) = functional(p.objective, layout);
  c.tail(layout.scalars).setZero();
  if (p.objective_scalars.size() > 0) c.tail(layout.scalars) = p.objective_scalars;
  return c;
}

double min_eigenvalue(const RealMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eigenvalue(const RealMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

RealMatrix psd_projection(const RealMatrix& m) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (m + m.transpose()));
  const Vector clipped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
}

// ---------------------------------------------------------------------------
// Block-diagonal cone element: PSD blocks plus a nonnegative orthant.

struct Block {
  std::vector<RealMatrix> psd;
  Vector lp;

  double dot(const Block& o) const {
    double s = lp.dot(o.lp);
    for (std::size_t k = 0; k < psd.size(); ++k) s += psd[k].cwiseProduct(o.psd[k]).sum();
    return s;
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Block& axpy(double a, const Block& o) {
    for (std::size_t k = 0; k < psd.size(); ++k) psd[k] += a * o.psd[k];
    lp += a * o.lp;
    return *this;
  }
  Block scaled(double a) const {
    Block out = *this;
    for (auto& m : out.psd) m *= a;
    out.lp *= a;
    return out;
  }
};

Block zeros_like(const Block& b) {
  Block out;
  for (const auto& m : b.psd) out.psd.push_back(RealMatrix::Zero(m.rows(), m.cols()));
  out.lp = Vector::Zero(b.lp.size());
  return out;
}

Block identity_like(const Block& b, double scale) {
  Block out;
  for (const auto& m : b.psd) out.psd.push_back(scale * RealMatrix::Identity(m.rows(), m.cols()));
  out.lp = Vector::Constant(b.lp.size(), scale);
  return out;
}

// Largest alpha with x + alpha dx in the cone (inf if unrestricted).
double max_step(const Block& x, const Block& dx) {
  double alpha = kInf;
  for (std::size_t k = 0; k < x.psd.size(); ++k) {
    Eigen::LLT<RealMatrix> llt(x.psd[k]);
    if (llt.info() != Eigen::Success) return 0.0;
    const RealMatrix l = llt.matrixL();
    RealMatrix w = l.triangularView<Eigen::Lower>().solve(dx.psd[k]);
    w = l.triangularView<Eigen::Lower>().solve(w.transpose()).eval();
    const double lmin = min_eigenvalue(w);
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  for (Eigen::Index i = 0; i < x.lp.size(); ++i) {
    if (dx.lp(i) < 0.0) alpha = std::min(alpha, -x.lp(i) / dx.lp(i));
  }
  return alpha;
}

// ---------------------------------------------------------------------------
// Presolved standard form:  max b.w  s.t.  Z = C - sum_j w_j A_j in cone.

struct InequalityRow {
  Vector a;        // <= form
  double b = 0.0;  // <= form
  int source = -1;
  double sign = 1.0;  // original multiplier = sign * lp multiplier
};

struct EqualityRow {
  Vector a;
  double b = 0.0;
  // Original constraints that carry the multiplier: `plus` takes positive
  // values, `minus` negative ones (both -1 when not applicable).
  int plus = -1;
  double plus_sign = 1.0;
  int minus = -1;
  double minus_sign = 1.0;
};

struct Presolved {
  Layout layout;
  std::vector<EqualityRow> equalities;
  std::vector<InequalityRow> inequalities;  // kept, non-constant
  Eigen::MatrixXd eq_matrix;                // rows = equalities
  Vector v0;
  Eigen::MatrixXd basis;  // columns span the null space of eq_matrix
  Vector objective;       // full objective row
  // standard form
  Block c;
  std::vector<Block> a;
  Vector b;
  double constant = 0.0;
};

bool rows_opposite(const InequalityRow& x, const InequalityRow& y) {
  const double scale = 1.0 + x.a.cwiseAbs().maxCoeff();
  return (x.a + y.a).cwiseAbs().maxCoeff() <= 1e-14 * scale;
}

enum class PresolveOutcome { Ok, Infeasible };

PresolveOutcome presolve(const SdpProblem& p, Presolved& out, std::string& why) {
  Layout layout{p.dim, p.scalar_count()};
  out.layout = layout;
  out.objective = objective_row(p, layout);

  std::vector<InequalityRow> ineq;
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const auto& c = p.constraints[i];
    const Vector a = row_of(c, layout);
    if (c.relation == Relation::Equal) {
      out.equalities.push_back({a, c.rhs, static_cast<int>(i), 1.0, static_cast<int>(i), 1.0});
    } else {
      const double s = c.relation == Relation::LessEqual ? 1.0 : -1.0;
      ineq.push_back({s * a, s * c.rhs, static_cast<int>(i), s});
    }
  }

  // Pairs a.v <= b and -a.v <= -b collapse to an equality.
  std::vector<bool> merged(ineq.size(), false);
  for (std::size_t i = 0; i < ineq.size(); ++i) {
    if (merged[i]) continue;
    for (std::size_t j = i + 1; j < ineq.size(); ++j) {
      if (merged[j] || !rows_opposite(ineq[i], ineq[j])) continue;
      const double width = ineq[i].b + ineq[j].b;
      if (width < -kPresolveFeasTol) {
        why = "constraints '" + p.constraints[ineq[i].source].label + "' and '" + p.constraints[ineq[j].source].label +
              "' are contradictory";
        return PresolveOutcome::Infeasible;
      }
      if (width <= 1e-14 * (1.0 + std::abs(ineq[i].b))) {
        out.equalities.push_back(
            {ineq[i].a, ineq[i].b, ineq[i].source, ineq[i].sign, ineq[j].source, ineq[j].sign});
        merged[i] = merged[j] = true;
        break;
      }
    }
  }

  const int nv = layout.size();
  const int ne = static_cast<int>(out.equalities.size());
  out.eq_matrix.resize(ne, nv);
  Vector e(ne);
  for (int i = 0; i < ne; ++i) {
    out.eq_matrix.row(i) = out.equalities[i].a.transpose();
    e(i) = out.equalities[i].b;
  }
  if (ne > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.eq_matrix, Eigen::ComputeFullV | Eigen::ComputeThinU);
    const Vector& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv(k) > kRankTol * std::max(1.0, sv(0))) ++rank;
    svd.setThreshold(kRankTol * std::max(1.0, sv(0)) / std::max(1.0, sv(0)));
    out.v0 = svd.solve(e);
    const double resid = (out.eq_matrix * out.v0 - e).norm();
    if (resid > kPresolveFeasTol * (1.0 + e.norm())) {
      why = "equality constraints are inconsistent (residual " + std::to_string(resid) + ")";
      return PresolveOutcome::Infeasible;
    }
    out.basis = svd.matrixV().rightCols(nv - rank);
  } else {
    out.v0 = Vector::Zero(nv);
    out.basis = Eigen::MatrixXd::Identity(nv, nv);
  }

  for (std::size_t i = 0; i < ineq.size(); ++i) {
    if (merged[i]) continue;
    const Vector projected = out.basis.transpose() * ineq[i].a;
    const double slack = ineq[i].b - ineq[i].a.dot(out.v0);
    if (projected.norm() <= kConstantRowTol * (1.0 + ineq[i].a.norm())) {
      if (slack < -kPresolveFeasTol) {
        why = "constraint '" + p.constraints[ineq[i].source].label + "' cannot be satisfied";
        return PresolveOutcome::Infeasible;
      }
      continue;  // implied by the equalities
    }
    out.inequalities.push_back(ineq[i]);
  }

  // Standard form.
  const int m = static_cast<int>(out.basis.cols());
  const int n_ineq = static_cast<int>(out.inequalities.size());
  const RealMatrix rho0 = rho_from(out.v0.head(layout.rho_size()), layout);
  out.c.lp.resize(n_ineq);
  for (int i = 0; i < n_ineq; ++i) out.c.lp(i) = out.inequalities[i].b - out.inequalities[i].a.dot(out.v0);
  for (ConeMap map : p.cones) out.c.psd.push_back(apply_cone_map(map, rho0, p.levels_b));
  out.a.reserve(m);
  out.b.resize(m);
  for (int j = 0; j < m; ++j) {
    const Vector fj = out.basis.col(j);
    const RealMatrix rj = rho_from(fj.head(layout.rho_size()), layout);
    Block aj;
    for (ConeMap map : p.cones) aj.psd.push_back(-apply_cone_map(map, rj, p.levels_b));
    aj.lp.resize(n_ineq);
    for (int i = 0; i < n_ineq; ++i) aj.lp(i) = out.inequalities[i].a.dot(fj);
    out.a.push_back(std::move(aj));
    out.b(j) = out.objective.dot(fj);
  }
  out.constant = out.objective.dot(out.v0) + p.objective_offset;
  return PresolveOutcome::Ok;
}

Vector apply_a(const std::vector<Block>& a, const Block& x) {
  Vector out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out(j) = a[j].dot(x);
  return out;
}

Block apply_at(const std::vector<Block>& a, const Vector& y, const Block& like) {
  Block out = zeros_like(like);
  for (std::size_t j = 0; j < a.size(); ++j) out.axpy(y(j), a[j]);
  return out;
}

// ---------------------------------------------------------------------------

struct IpmResult {
  SdpStatus status = SdpStatus::MaxIterations;
  Block x;
  Vector y;
  Block z;
  int iterations = 0;
  std::vector<SdpIteration> trace;
  std::string message;
};

std::string format_trace(const std::vector<SdpIteration>& trace, std::vector<std::string>& lines) {
  std::ostringstream last;
  for (const auto& t : trace) {
    std::ostringstream os;
    os.precision(6);
    os << "iter " << t.iteration << " pobj " << t.primal_objective << " dobj " << t.dual_objective << " pinf "
       << t.primal_infeasibility << " dinf " << t.dual_infeasibility << " mu " << t.mu << " step " << t.step_primal
       << "/" << t.step_dual;
    lines.push_back(os.str());
  }
  return lines.empty() ? std::string() : lines.back();
}

IpmResult interior_point(const Presolved& ps, const SdpOptions& opt) {
  const auto& a = ps.a;
  const Vector& b = ps.b;
  const Block& c = ps.c;
  const int m = static_cast<int>(a.size());

  double nu = static_cast<double>(c.lp.size());
  for (const auto& blk : c.psd) nu += static_cast<double>(blk.rows());

  double max_a = 0.0;
  for (const auto& aj : a) max_a = std::max(max_a, aj.norm());
  double xi = std::max(10.0, std::sqrt(nu));
  for (int j = 0; j < m; ++j) xi = std::max(xi, nu * (1.0 + std::abs(b(j))) / (1.0 + a[j].norm()));
  const double eta = std::max({10.0, std::sqrt(nu), max_a, c.norm()});

  IpmResult r;
  r.x = identity_like(c, xi);
  r.z = identity_like(c, eta);
  r.y = Vector::Zero(m);

  const double b_norm = b.norm();
  const double c_norm = c.norm();
  int stalled = 0;
  IpmResult best;
  double best_score = kInf;

  for (int it = 0; it <= opt.max_iter; ++it) {
    const Vector rp = b - apply_a(a, r.x);
    Block rd = c;
    rd.axpy(-1.0, apply_at(a, r.y, c)).axpy(-1.0, r.z);
    const double pobj = c.dot(r.x) + ps.constant;  // upper bound side
    const double dobj = b.dot(r.y) + ps.constant;  // rho side
    const double mu = r.x.dot(r.z) / nu;
    const double pinf = rp.norm() / (1.0 + b_norm);
    const double dinf = rd.norm() / (1.0 + c_norm);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    SdpIteration rec{it, dobj, pobj, dinf, pinf, mu, 0.0, 0.0};
    r.iterations = it;
    const double score = std::max({pinf / opt.feasibility_tol, dinf / opt.feasibility_tol, gap / opt.gap_tol});
    if (score < best_score) {
      best_score = score;
      best.x = r.x;
      best.y = r.y;
      best.z = r.z;
      best.iterations = it;
    }

    if (pinf <= opt.feasibility_tol && dinf <= opt.feasibility_tol && gap <= opt.gap_tol) {
      r.trace.push_back(rec);
      r.status = SdpStatus::Optimal;
      return r;
    }
    // Rays: an X with A(X) ~ 0 and <C,X> < 0 certifies an empty rho-set; a y
    // with -A^*(y) in the cone and b.y > 0 certifies an unbounded objective.
    const double xn = r.x.norm();
    if (xn > kDivergence * xi && c.dot(r.x) / xn < -opt.feasibility_tol &&
        (b - rp).norm() / xn < opt.feasibility_tol) {
      r.trace.push_back(rec);
      r.status = SdpStatus::Infeasible;
      r.message = "certificate iterates diverge along an infeasibility ray";
      return r;
    }
    const double yn = r.y.norm();
    if (yn > kDivergence && b.dot(r.y) / yn > opt.feasibility_tol && dinf < opt.feasibility_tol * yn) {
      r.trace.push_back(rec);
      r.status = SdpStatus::Unbounded;
      r.message = "objective is unbounded";
      return r;
    }
    if (it == opt.max_iter) {
      r.trace.push_back(rec);
      break;
    }

    // Schur complement M_ij = <A_i, X A_j Z^-1>.
    std::vector<RealMatrix> zinv;
    for (const auto& zk : r.z.psd) zinv.push_back(zk.llt().solve(RealMatrix::Identity(zk.rows(), zk.cols())));
    const Vector x_over_z = r.x.lp.cwiseQuotient(r.z.lp);

    auto hkm = [&](const Block& dz) {  // X dZ Z^-1, symmetrised
      Block out = zeros_like(c);
      for (std::size_t k = 0; k < c.psd.size(); ++k) {
        const RealMatrix t = r.x.psd[k] * dz.psd[k] * zinv[k];
        out.psd[k] = 0.5 * (t + t.transpose());
      }
      out.lp = x_over_z.cwiseProduct(dz.lp);
      return out;
    };

    Eigen::MatrixXd schur(m, m);
    for (int j = 0; j < m; ++j) {
      const Block t = hkm(a[j]);
      for (int i = 0; i <= j; ++i) schur(i, j) = schur(j, i) = a[i].dot(t);
    }
    Eigen::LDLT<Eigen::MatrixXd> factor(schur);
    if (factor.info() != Eigen::Success) {
      r.trace.push_back(rec);
      r.message = "Schur complement factorisation failed";
      break;
    }

    const Block xrdz = hkm(rd);
    auto direction = [&](const Block& rc, Block& dx, Vector& dy, Block& dz) {
      const Vector rhs = rp - apply_a(a, rc) + apply_a(a, xrdz);
      dy = factor.solve(rhs);
      dz = rd;
      dz.axpy(-1.0, apply_at(a, dy, c));
      dx = rc;
      dx.axpy(-1.0, hkm(dz));
    };

    // Predictor.
    Block dx_p;
    Block dz_p;
    Vector dy_p;
    direction(r.x.scaled(-1.0), dx_p, dy_p, dz_p);
    const double ap_pred = std::min(1.0, max_step(r.x, dx_p));
    const double ad_pred = std::min(1.0, max_step(r.z, dz_p));
    Block xa = r.x;
    xa.axpy(ap_pred, dx_p);
    Block za = r.z;
    za.axpy(ad_pred, dz_p);
    const double mu_aff = xa.dot(za) / nu;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // Corrector: rc = sigma mu Z^-1 - X - sym(dX_p dZ_p Z^-1).
    Block rc = zeros_like(c);
    for (std::size_t k = 0; k < c.psd.size(); ++k) {
      const RealMatrix t = dx_p.psd[k] * dz_p.psd[k] * zinv[k];
      rc.psd[k] = sigma * mu * zinv[k] - r.x.psd[k] - 0.5 * (t + t.transpose());
    }
    rc.lp = (sigma * mu) * r.z.lp.cwiseInverse() - r.x.lp - dx_p.lp.cwiseProduct(dz_p.lp).cwiseQuotient(r.z.lp);

    Block dx;
    Block dz;
    Vector dy;
    direction(rc, dx, dy, dz);
    const double gamma = 0.9 + 0.09 * std::min(ap_pred, ad_pred);
    const double ap = std::min(1.0, gamma * max_step(r.x, dx));
    const double ad = std::min(1.0, gamma * max_step(r.z, dz));
    r.x.axpy(ap, dx);
    r.y += ad * dy;
    r.z.axpy(ad, dz);
    rec.step_primal = ap;
    rec.step_dual = ad;
    r.trace.push_back(rec);

    stalled = std::min(ap, ad) < kStallStep ? stalled + 1 : 0;
    if (stalled >= kStallIterations) {
      r.message = "step lengths collapsed";
      break;
    }
  }
  if (best_score <= kRelaxedFactor) {
    r.x = std::move(best.x);
    r.y = std::move(best.y);
    r.z = std::move(best.z);
    r.status = SdpStatus::Optimal;
    r.message = "accepted best iterate " + std::to_string(best.iterations) + " at reduced accuracy (" +
                (r.message.empty() ? std::string("iteration limit") : r.message) + ")";
  }
  return r;
}

struct ScalarBox {
  double lower = -kInf;
  double upper = kInf;
};

std::vector<ScalarBox> scalar_boxes(const SdpProblem& p) {
  std::vector<ScalarBox> boxes(p.scalar_count());
  for (const auto& c : p.constraints) {
    if (c.g.size() > 0 && c.g.cwiseAbs().maxCoeff() > 0.0) continue;
    if (c.h.size() == 0) continue;
    int idx = -1;
    int nonzero = 0;
    for (Eigen::Index j = 0; j < c.h.size(); ++j) {
      if (c.h(j) != 0.0) {
        idx = static_cast<int>(j);
        ++nonzero;
      }
    }
    if (nonzero != 1) continue;
    const double v = c.rhs / c.h(idx);
    const bool flips = c.h(idx) < 0.0;
    const bool upper = (c.relation == Relation::LessEqual) != flips;
    if (c.relation == Relation::Equal || upper) boxes[idx].upper = std::min(boxes[idx].upper, v);
    if (c.relation == Relation::Equal || !upper) boxes[idx].lower = std::max(boxes[idx].lower, v);
  }
  return boxes;
}

double trace_bound(const SdpProblem& p) {
  const bool has_identity =
      std::find(p.cones.begin(), p.cones.end(), ConeMap::Identity) != p.cones.end();
  if (!has_identity) return kInf;
  double bound = kInf;
  const RealMatrix id = RealMatrix::Identity(p.dim, p.dim);
  for (const auto& c : p.constraints) {
    if (c.g.size() == 0 || c.relation == Relation::GreaterEqual) continue;
    if (c.h.size() > 0 && c.h.cwiseAbs().maxCoeff() > 0.0) continue;
    if (!c.g.isApprox(id * c.g(0, 0), 1e-15) || !(c.g(0, 0) > 0.0)) continue;
    bound = std::min(bound, c.rhs / c.g(0, 0));
  }
  return bound;
}

struct Residuals {
  RealMatrix matrix;
  Vector scalars;
  double bound;
};

Residuals residuals_of(const SdpProblem& p, const std::vector<RealMatrix>& cone_mult, const Vector& lin) {
  Residuals out;
  out.matrix = p.objective;
  out.scalars = p.objective_scalars.size() > 0 ? p.objective_scalars : Vector::Zero(p.scalar_count());
  out.bound = p.objective_offset;
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const auto& c = p.constraints[i];
    if (c.g.size() > 0) out.matrix -= lin(i) * c.g;
    if (c.h.size() > 0) out.scalars -= lin(i) * c.h;
    out.bound += lin(i) * c.rhs;
  }
  for (std::size_t k = 0; k < p.cones.size(); ++k) out.matrix += apply_cone_map(p.cones[k], cone_mult[k], p.levels_b);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

void SdpProblem::validate() const {
  if (dim < 1) throw std::invalid_argument("SdpProblem: dimension must be positive");
  if (objective.rows() != dim || objective.cols() != dim) throw std::invalid_argument("SdpProblem: objective shape");
  if (objective_scalars.size() != 0 && objective_scalars.size() != scalar_count()) {
    throw std::invalid_argument("SdpProblem: objective scalar coefficients shape");
  }
  if (cones.empty()) throw std::invalid_argument("SdpProblem: at least one PSD map is required");
  if (constraints.empty()) throw std::invalid_argument("SdpProblem: constraint set is empty");
  for (const auto& c : constraints) {
    if (c.g.size() != 0 && (c.g.rows() != dim || c.g.cols() != dim)) {
      throw std::invalid_argument("SdpProblem: constraint '" + c.label + "' has the wrong matrix shape");
    }
    if (c.h.size() != 0 && c.h.size() != scalar_count()) {
      throw std::invalid_argument("SdpProblem: constraint '" + c.label + "' has the wrong scalar shape");
    }
  }
  if (levels_b < 0 || (levels_b > 0 && dim % levels_b != 0)) {
    throw std::invalid_argument("SdpProblem: levels_b must divide the dimension");
  }
  for (ConeMap map : cones) {
    if (map == ConeMap::PartialTranspose01 && levels_b == 0) {
      const int l = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim))));
      if (l * l != dim) throw std::invalid_argument("SdpProblem: partial transpose needs a two-mode dimension");
    }
  }
}

RealMatrix apply_cone_map(ConeMap map, const RealMatrix& rho, int levels_b) {
  if (map == ConeMap::Identity) return rho;
  const int dim = static_cast<int>(rho.rows());
  int lb = levels_b;
  if (lb == 0) {
    lb = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim))));
    if (lb * lb != dim) throw std::invalid_argument("partial transpose: dimension is not a two-mode square");
  }
  if (lb < 1 || dim % lb != 0) throw std::invalid_argument("partial transpose: levels_b must divide the dimension");
  const int la = dim / lb;
  const int sub = std::min(lb, 2);
  RealMatrix out = rho;
  for (int i = 0; i < la; ++i)
    for (int j = 0; j < sub; ++j)
      for (int k = 0; k < la; ++k)
        for (int m = 0; m < sub; ++m) out(i * lb + j, k * lb + m) = rho(i * lb + m, k * lb + j);
  return out;
}

bool DualResidualReport::within(double tol) const {
  if (stationarity > tol || scalar_stationarity > tol || sign_violation > tol) return false;
  return std::all_of(min_eigenvalues.begin(), min_eigenvalues.end(), [tol](double e) { return e >= -tol; });
}

DualResidualReport check_dual_feasibility(const SdpProblem& problem, const DualCertificate& certificate) {
  problem.validate();
  if (certificate.cone_multipliers.size() != problem.cones.size()) {
    throw std::invalid_argument("check_dual_feasibility: one cone multiplier per cone is required");
  }
  if (certificate.linear_multipliers.size() != static_cast<Eigen::Index>(problem.constraints.size())) {
    throw std::invalid_argument("check_dual_feasibility: one multiplier per linear constraint is required");
  }
  for (const auto& x : certificate.cone_multipliers) {
    if (x.rows() != problem.dim || x.cols() != problem.dim) {
      throw std::invalid_argument("check_dual_feasibility: cone multiplier has the wrong shape");
    }
  }

  DualResidualReport report;
  const Vector& lin = certificate.linear_multipliers;
  const Residuals raw = residuals_of(problem, certificate.cone_multipliers, lin);
  report.stationarity = raw.matrix.norm();
  report.scalar_stationarity = raw.scalars.norm();
  report.bound = raw.bound;
  for (const auto& x : certificate.cone_multipliers) report.min_eigenvalues.push_back(min_eigenvalue(x));

  Vector clipped = lin;
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    const auto rel = problem.constraints[i].relation;
    double wrong = 0.0;
    if (rel == Relation::LessEqual && lin(i) < 0.0) wrong = -lin(i);
    if (rel == Relation::GreaterEqual && lin(i) > 0.0) wrong = lin(i);
    if (wrong > 0.0) clipped(i) = 0.0;
    report.sign_violation = std::max(report.sign_violation, wrong);
  }

  // Safe bound from the repaired certificate.
  std::vector<RealMatrix> projected;
  for (const auto& x : certificate.cone_multipliers) projected.push_back(psd_projection(x));
  const Residuals fixed = residuals_of(problem, projected, clipped);
  double safe = fixed.bound;
  const double lmax = max_eigenvalue(fixed.matrix);
  if (lmax > 0.0) {
    const double tau = trace_bound(problem);
    safe = std::isfinite(tau) ? safe + lmax * tau : kInf;
  }
  const auto boxes = scalar_boxes(problem);
  for (int j = 0; j < problem.scalar_count() && std::isfinite(safe); ++j) {
    const double r = fixed.scalars(j);
    if (r == 0.0) continue;
    const double worst = std::max(r * boxes[j].lower, r * boxes[j].upper);
    safe = std::isfinite(worst) ? safe + std::max(0.0, worst) : kInf;
  }
  report.safe_bound = safe;
  return report;
}

std::string to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::Optimal:
      return "optimal";
    case SdpStatus::MaxIterations:
      return "max_iter";
    case SdpStatus::Infeasible:
      return "infeasible";
    case SdpStatus::Unbounded:
      return "unbounded";
  }
  return "unknown";
}

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options) {
  problem.validate();
  SdpSolution sol;
  Presolved ps;
  std::string why;
  if (presolve(problem, ps, why) == PresolveOutcome::Infeasible) {
    sol.status = SdpStatus::Infeasible;
    std::vector<std::string> lines{"presolve: " + why};
    throw SolverError("sdp: problem is infeasible (" + why + ")", lines);
  }
  const Layout& layout = ps.layout;
  const int m = static_cast<int>(ps.basis.cols());

  IpmResult ipm;
  if (m == 0) {
    ipm.status = SdpStatus::Optimal;
    ipm.x = zeros_like(ps.c);
    ipm.y = Vector::Zero(0);
    ipm.z = ps.c;
    if (ps.c.lp.size() > 0 && ps.c.lp.minCoeff() < -options.feasibility_tol) ipm.status = SdpStatus::Infeasible;
    for (const auto& blk : ps.c.psd)
      if (min_eigenvalue(blk) < -options.feasibility_tol) ipm.status = SdpStatus::Infeasible;
  } else {
    ipm = interior_point(ps, options);
  }
  sol.iterations = ipm.iterations;
  sol.trace = ipm.trace;
  sol.status = ipm.status;

  if (ipm.status == SdpStatus::Infeasible || ipm.status == SdpStatus::Unbounded) {
    std::vector<std::string> lines;
    format_trace(ipm.trace, lines);
    throw SolverError("sdp: " + to_string(ipm.status) + (ipm.message.empty() ? "" : " (" + ipm.message + ")"), lines);
  }

  // rho side.
  const Vector v = ps.v0 + ps.basis * ipm.y;
  sol.rho = rho_from(v.head(layout.rho_size()), layout);
  sol.scalars = v.tail(layout.scalars);
  sol.primal_value = ps.objective.dot(v) + problem.objective_offset;

  // Certificate side: cone blocks and inequality multipliers come straight
  // from the interior point iterate, equality multipliers by least squares.
  DualCertificate cert;
  cert.cone_multipliers = ipm.x.psd;
  cert.linear_multipliers = Vector::Zero(static_cast<Eigen::Index>(problem.constraints.size()));
  for (std::size_t i = 0; i < ps.inequalities.size(); ++i) {
    const auto& row = ps.inequalities[i];
    cert.linear_multipliers(row.source) = row.sign * ipm.x.lp(static_cast<Eigen::Index>(i));
  }
  if (!ps.equalities.empty()) {
    Vector target = ps.objective;
    for (std::size_t i = 0; i < ps.inequalities.size(); ++i) {
      target -= ipm.x.lp(static_cast<Eigen::Index>(i)) * ps.inequalities[i].a;
    }
    for (std::size_t k = 0; k < problem.cones.size(); ++k) {
      Vector adj(layout.size());
      adj.head(layout.rho_size()) = functional(apply_cone_map(problem.cones[k], ipm.x.psd[k], problem.levels_b), layout);
      adj.tail(layout.scalars).setZero();
      target += adj;
    }
    const Vector nu = ps.eq_matrix.transpose().colPivHouseholderQr().solve(target);
    for (std::size_t i = 0; i < ps.equalities.size(); ++i) {
      const auto& eq = ps.equalities[i];
      const double val = nu(static_cast<Eigen::Index>(i));
      if (eq.plus == eq.minus) {
        cert.linear_multipliers(eq.plus) += eq.plus_sign * val;
      } else if (val >= 0.0) {
        cert.linear_multipliers(eq.plus) += eq.plus_sign * val;
      } else {
        cert.linear_multipliers(eq.minus) += eq.minus_sign * (-val);
      }
    }
  }
  sol.certificate = std::move(cert);
  sol.residuals = check_dual_feasibility(problem, sol.certificate);
  sol.dual_value = sol.residuals.bound;
  sol.gap = sol.dual_value - sol.primal_value;
  return sol;
}

}  // namespace spw
