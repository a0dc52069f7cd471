#include "spw/serialization.hpp"

#include <cmath>
#include <stdexcept>

namespace spw {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

Vector vector_from_json(const Json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

std::string relation_tag(Relation r) {
  switch (r) {
    case Relation::LessEqual:
      return "<=";
    case Relation::Equal:
      return "=";
    case Relation::GreaterEqual:
      return ">=";
  }
  return "?";
}

Relation relation_from(const std::string& tag) {
  if (tag == "<=") return Relation::LessEqual;
  if (tag == "=") return Relation::Equal;
  if (tag == ">=") return Relation::GreaterEqual;
  throw std::invalid_argument("unknown relation '" + tag + "'");
}

std::string cone_tag(ConeMap m) { return m == ConeMap::Identity ? "identity" : "partial_transpose_01"; }

ConeMap cone_from(const std::string& tag) {
  if (tag == "identity") return ConeMap::Identity;
  if (tag == "partial_transpose_01") return ConeMap::PartialTranspose01;
  throw std::invalid_argument("unknown cone map '" + tag + "'");
}

}  // namespace

Json matrix_to_json(const RealMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

RealMatrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
  RealMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols) throw std::invalid_argument("ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

Json to_json(const LocalPhotonStats& s) {
  Json j;
  j["p0"] = s.p0;
  j["p1"] = s.p1;
  j["p_ge2"] = s.p_ge2;
  j["sigma0"] = s.sigma0;
  j["sigma1"] = s.sigma1;
  j["sigma_ge2"] = s.sigma_ge2;
  j["n_samples"] = s.n_samples;
  if (!s.levels.empty()) {
    j["levels"] = s.levels;
    j["level_sigmas"] = s.level_sigmas;
  }
  return j;
}

LocalPhotonStats stats_from_json(const Json& j) {
  LocalPhotonStats s;
  s.p0 = j.at("p0").get<double>();
  s.p1 = j.at("p1").get<double>();
  s.p_ge2 = j.contains("p_ge2") ? j["p_ge2"].get<double>() : 1.0 - s.p0 - s.p1;
  s.sigma0 = j.value("sigma0", 0.0);
  s.sigma1 = j.value("sigma1", 0.0);
  s.sigma_ge2 = j.value("sigma_ge2", 0.0);
  s.n_samples = j.value("n_samples", std::size_t{0});
  return s;
}

Json to_json(const WitnessResult& w) {
  Json j;
  j["s"] = w.s;
  j["se"] = w.standard_error;
  j["n_per_setting"] = w.n_per_setting;
  Json corr = Json::array();
  for (const auto& c : w.correlators) corr.push_back({{"label", c.label}, {"e", c.e}, {"se", c.se}, {"n", c.n}});
  j["correlators"] = std::move(corr);
  return j;
}

Json to_json(const CertificateData& c) {
  Json j;
  j["p_joint"] = c.p_joint;
  j["lambda"] = c.lambda;
  j["mu"] = c.mu;
  j["ell"] = c.ell;
  j["m"] = c.m;
  j["residual_norm"] = c.residual_norm;
  j["min_eig_a"] = c.min_eig_a;
  j["min_eig_b"] = c.min_eig_b;
  j["dual_bound"] = c.dual_bound;
  j["a_matrix"] = matrix_to_json(c.a_matrix);
  j["b_matrix"] = matrix_to_json(c.b_matrix);
  return j;
}

Json to_json(const SdpSummary& s) {
  Json j;
  j["status"] = to_string(s.status);
  j["primal_value"] = number(s.primal_value);
  j["dual_value"] = number(s.dual_value);
  j["safe_bound"] = number(s.safe_bound);
  j["gap"] = number(s.gap);
  j["stationarity"] = number(s.stationarity);
  j["scalar_stationarity"] = number(s.scalar_stationarity);
  j["sign_violation"] = number(s.sign_violation);
  j["min_eigenvalues"] = s.min_eigenvalues;
  j["iterations"] = s.iterations;
  j["dimension"] = s.dimension;
  j["constraints"] = s.constraints;
  return j;
}

Json to_json(const BoundResult& b) {
  Json j;
  j["method"] = to_string(b.method);
  j["value"] = number(b.value);
  j["tight"] = b.tight;
  if (!b.note.empty()) j["note"] = b.note;
  Json inputs = Json::object();
  for (const auto& [k, v] : b.inputs) inputs[k] = number(v);
  j["inputs"] = std::move(inputs);
  if (b.certificate) j["certificate"] = to_json(*b.certificate);
  if (b.sdp) j["sdp"] = to_json(*b.sdp);
  return j;
}

Json to_json(const SdpProblem& p) {
  Json j;
  j["dim"] = p.dim;
  j["levels_b"] = p.levels_b;
  j["objective"] = matrix_to_json(p.objective);
  j["objective_scalars"] = vector_to_json(p.objective_scalars);
  j["objective_offset"] = p.objective_offset;
  Json cones = Json::array();
  for (ConeMap m : p.cones) cones.push_back(cone_tag(m));
  j["cones"] = std::move(cones);
  j["scalar_names"] = p.scalar_names;
  Json cons = Json::array();
  for (const auto& c : p.constraints) {
    Json cj;
    cj["label"] = c.label;
    cj["g"] = matrix_to_json(c.g);
    cj["h"] = vector_to_json(c.h);
    cj["relation"] = relation_tag(c.relation);
    cj["rhs"] = c.rhs;
    cons.push_back(std::move(cj));
  }
  j["constraints"] = std::move(cons);
  return j;
}

SdpProblem problem_from_json(const Json& j) {
  SdpProblem p;
  p.dim = j.at("dim").get<int>();
  p.levels_b = j.value("levels_b", 0);
  p.objective = matrix_from_json(j.at("objective"));
  if (j.contains("objective_scalars")) p.objective_scalars = vector_from_json(j["objective_scalars"]);
  p.objective_offset = j.value("objective_offset", 0.0);
  if (j.contains("cones")) {
    p.cones.clear();
    for (const auto& c : j["cones"]) p.cones.push_back(cone_from(c.get<std::string>()));
  }
  if (j.contains("scalar_names")) p.scalar_names = j["scalar_names"].get<std::vector<std::string>>();
  for (const auto& cj : j.at("constraints")) {
    LinearConstraint c;
    c.label = cj.value("label", std::string());
    if (cj.contains("g")) c.g = matrix_from_json(cj["g"]);
    if (cj.contains("h")) c.h = vector_from_json(cj["h"]);
    c.relation = relation_from(cj.at("relation").get<std::string>());
    c.rhs = cj.at("rhs").get<double>();
    p.constraints.push_back(std::move(c));
  }
  p.validate();
  return p;
}

Json to_json(const SdpSolution& s) {
  Json j;
  j["status"] = to_string(s.status);
  j["primal_value"] = number(s.primal_value);
  j["dual_value"] = number(s.dual_value);
  j["gap"] = number(s.gap);
  j["iterations"] = s.iterations;
  j["rho"] = matrix_to_json(s.rho);
  j["scalars"] = vector_to_json(s.scalars);
  Json cert;
  Json cones = Json::array();
  for (const auto& x : s.certificate.cone_multipliers) cones.push_back(matrix_to_json(x));
  cert["cone_multipliers"] = std::move(cones);
  cert["linear_multipliers"] = vector_to_json(s.certificate.linear_multipliers);
  j["certificate"] = std::move(cert);
  j["residuals"] = {{"stationarity", number(s.residuals.stationarity)},
                    {"scalar_stationarity", number(s.residuals.scalar_stationarity)},
                    {"min_eigenvalues", s.residuals.min_eigenvalues},
                    {"sign_violation", number(s.residuals.sign_violation)},
                    {"bound", number(s.residuals.bound)},
                    {"safe_bound", number(s.residuals.safe_bound)}};
  return j;
}

}  // namespace spw
