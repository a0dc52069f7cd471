#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spw {

using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Small dense semidefinite programs over one real symmetric matrix variable
// rho (dimension <= 16) plus optional free scalar variables u:
//
//   maximize   <C, rho> + c_u . u + offset
//   subject to L_k(rho) >= 0           (PSD, one per cone map)
//              <G_i, rho> + h_i . u  (<=, =, >=)  g_i
//
// The engine reports the certificate side: PSD matrices X_k and multipliers
// y_i with
//   sum_i y_i G_i - sum_k L_k^*(X_k) = C,   sum_i y_i h_i = c_u,
//   y_i >= 0 for <=, y_i <= 0 for >=,
// which bounds the objective by sum_i y_i g_i + offset (weak duality).

enum class Relation { LessEqual, Equal, GreaterEqual };

enum class ConeMap {
  Identity,
  /// Partial transpose on Bob's index restricted to photon numbers {0,1};
  /// requires a square two-mode dimension.
  PartialTranspose01,
};

struct LinearConstraint {
  RealMatrix g;  // symmetric; may be empty (no rho dependence)
  Vector h;      // coefficients of the scalar variables; may be empty
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
  std::string label;
};

struct SdpProblem {
  int dim = 0;
  RealMatrix objective;
  Vector objective_scalars;  // may be empty
  double objective_offset = 0.0;
  std::vector<ConeMap> cones{ConeMap::Identity};
  std::vector<LinearConstraint> constraints;
  std::vector<std::string> scalar_names;
  /// Bob's local dimension in the product basis (Bob fast) used by the
  /// partial transpose; 0 means dim is a perfect square with equal sides.
  int levels_b = 0;

  int scalar_count() const { return static_cast<int>(scalar_names.size()); }
  /// Throws std::invalid_argument when shapes are inconsistent.
  void validate() const;
};

/// Apply a cone map to a symmetric matrix.
RealMatrix apply_cone_map(ConeMap map, const RealMatrix& rho, int levels_b = 0);

struct DualCertificate {
  std::vector<RealMatrix> cone_multipliers;  // X_k, one per cone
  Vector linear_multipliers;                 // y_i, one per constraint
};

struct DualResidualReport {
  /// Frobenius norm of C - (sum y_i G_i - sum L_k^*(X_k)).
  double stationarity = 0.0;
  /// Euclidean norm of c_u - sum y_i h_i.
  double scalar_stationarity = 0.0;
  std::vector<double> min_eigenvalues;
  /// Largest magnitude of a multiplier with the wrong sign.
  double sign_violation = 0.0;
  /// sum_i y_i g_i + offset.
  double bound = 0.0;
  /// Bound after projecting the multipliers onto their cones and charging the
  /// remaining stationarity residual against the a-priori size of the
  /// feasible set; +inf when the problem carries no trace or scalar box bound.
  double safe_bound = 0.0;

  bool within(double tol) const;
};

DualResidualReport check_dual_feasibility(const SdpProblem& problem, const DualCertificate& certificate);

enum class SdpStatus { Optimal, MaxIterations, Infeasible, Unbounded };
std::string to_string(SdpStatus status);

struct SdpIteration {
  int iteration = 0;
  double primal_objective = 0.0;  // rho side (lower bound)
  double dual_objective = 0.0;    // certificate side (upper bound)
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double mu = 0.0;
  double step_primal = 0.0;
  double step_dual = 0.0;
};

struct SdpOptions {
  double feasibility_tol = 1e-9;
  double gap_tol = 1e-9;
  int max_iter = 100;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::MaxIterations;
  double primal_value = 0.0;  // objective at rho_opt
  double dual_value = 0.0;    // certified bound, the reported value
  double gap = 0.0;
  RealMatrix rho;
  Vector scalars;
  DualCertificate certificate;
  DualResidualReport residuals;
  int iterations = 0;
  std::vector<SdpIteration> trace;
};

/// Primal-dual interior point method (HKM direction with Mehrotra-type
/// predictor-corrector) after eliminating equality constraints. Deterministic.
SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

}  // namespace spw
