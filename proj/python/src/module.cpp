#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "spw/bounds.hpp"
#include "spw/errors.hpp"
#include "spw/experiment.hpp"
#include "spw/fock.hpp"
#include "spw/homodyne.hpp"
#include "spw/serialization.hpp"
#include "spw/tomography.hpp"
#include "spw/witness.hpp"

namespace py = pybind11;

namespace {

spw::TwoModeState model_state(double p1, double p2, double eta_a, double eta_b) {
  return spw::experiment_state({p1, p2}, {eta_a, eta_b});
}

std::string bound_json(const spw::BoundResult& b) { return spw::to_json(b).dump(); }

std::string sweep_csv(const std::string& config_json) {
  const spw::ExperimentConfig config = spw::config_from_json(spw::Json::parse(config_json));
  std::ostringstream os;
  spw::write_sweep_csv(os, config, spw::run_sweep(config));
  return os.str();
}

std::string verdict_json(const std::string& config_json) {
  return spw::run_verdict(spw::config_from_json(spw::Json::parse(config_json))).dump();
}

std::string certify_json(const std::vector<double>& grid, double perturbation, double tolerance) {
  return spw::to_json(spw::run_certify(grid, perturbation, tolerance)).dump();
}

std::string sample_csv(double p1, double p2, double eta_a, double eta_b, std::size_t n, std::uint64_t seed) {
  std::ostringstream os;
  spw::write_samples_csv(os, spw::sample_batch(model_state(p1, p2, eta_a, eta_b), n, seed));
  return os.str();
}

std::string extract_json(const std::string& csv, int levels) {
  std::istringstream in(csv);
  return spw::run_extract(spw::read_samples_csv(in), levels).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Single-photon entanglement witness: states, witness values and separable bounds";

  py::register_exception<spw::SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<spw::CutoffOverflow>(m, "CutoffOverflow", PyExc_ValueError);

  py::class_<spw::LocalPhotonStats>(m, "LocalPhotonStats")
      .def(py::init<>())
      .def(py::init([](double p0, double p1, double p_ge2) { return spw::LocalPhotonStats::exact(p0, p1, p_ge2); }),
           py::arg("p0"), py::arg("p1"), py::arg("p_ge2"))
      .def_readwrite("p0", &spw::LocalPhotonStats::p0)
      .def_readwrite("p1", &spw::LocalPhotonStats::p1)
      .def_readwrite("p_ge2", &spw::LocalPhotonStats::p_ge2)
      .def_readwrite("sigma0", &spw::LocalPhotonStats::sigma0)
      .def_readwrite("sigma1", &spw::LocalPhotonStats::sigma1)
      .def_readwrite("sigma_ge2", &spw::LocalPhotonStats::sigma_ge2)
      .def_readwrite("n_samples", &spw::LocalPhotonStats::n_samples)
      .def("__repr__", [](const spw::LocalPhotonStats& s) {
        std::ostringstream os;
        os << "LocalPhotonStats(p0=" << s.p0 << ", p1=" << s.p1 << ", p_ge2=" << s.p_ge2 << ")";
        return os.str();
      });

  py::class_<spw::BoundResult>(m, "BoundResult")
      .def_readonly("value", &spw::BoundResult::value)
      .def_property_readonly("method", [](const spw::BoundResult& b) { return spw::to_string(b.method); })
      .def_readonly("tight", &spw::BoundResult::tight)
      .def_readonly("note", &spw::BoundResult::note)
      .def_readonly("inputs", &spw::BoundResult::inputs)
      .def("to_json", &bound_json)
      .def("__repr__", [](const spw::BoundResult& b) {
        std::ostringstream os;
        os.precision(12);
        os << "BoundResult(method='" << spw::to_string(b.method) << "', value=" << b.value << ")";
        return os.str();
      });

  m.def("s_lossy", &spw::s_lossy, py::arg("eta_a"), py::arg("eta_b"));
  m.def(
      "s_exact",
      [](double p1, double p2, double eta_a, double eta_b) { return spw::s_exact(model_state(p1, p2, eta_a, eta_b)); },
      py::arg("p1"), py::arg("p2"), py::arg("eta_a") = 1.0, py::arg("eta_b") = 1.0,
      "Exact S of the split heralded source after channel losses.");
  m.def(
      "local_stats",
      [](double p1, double p2, double eta_a, double eta_b) {
        const auto s = spw::local_photon_probs(model_state(p1, p2, eta_a, eta_b));
        return py::make_tuple(s.a, s.b);
      },
      py::arg("p1"), py::arg("p2"), py::arg("eta_a") = 1.0, py::arg("eta_b") = 1.0);
  m.def("km_equivalent", &spw::km_equivalent, py::arg("eta_ab"), py::arg("db_per_km") = 0.2);
  m.def("pattern_function", &spw::pattern_function, py::arg("n"), py::arg("x"));
  m.def("fock_wavefunction", &spw::fock_wavefunction, py::arg("n"), py::arg("x"));

  m.def("qubit_s_max", &spw::qubit_s_max, py::arg("p0_a"), py::arg("p0_b"));
  m.def("qubit_sep_bound", &spw::qubit_sep_bound, py::arg("p0_a"), py::arg("p0_b"));
  m.def("sep_bound_lossy", &spw::sep_bound_lossy, py::arg("eta_a"), py::arg("eta_b"));
  m.def("sep_bound_lossy_sym", &spw::sep_bound_lossy_sym, py::arg("eta_ab"));
  m.def("sep_bound_lossy_asym", &spw::sep_bound_lossy_asym, py::arg("eta_ab"));
  m.def("analytic_multiphoton_bound", &spw::analytic_multiphoton_bound, py::arg("a"), py::arg("b"));
  m.def("pjoint_closed_form_bound", &spw::pjoint_closed_form_bound, py::arg("p_joint"));
  m.def(
      "sdp_enhanced_bound", [](const spw::LocalPhotonStats& a, const spw::LocalPhotonStats& b) {
        return spw::sdp_enhanced_bound(a, b);
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "sdp_original_bound", [](const spw::LocalPhotonStats& a, const spw::LocalPhotonStats& b) {
        return spw::sdp_original_bound(a, b);
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "bound_with_uncertainties",
      [](const spw::LocalPhotonStats& a, const spw::LocalPhotonStats& b, double k_sigma, const std::string& method) {
        return spw::bound_with_uncertainties(a, b, k_sigma, spw::parse_bound_method(method));
      },
      py::arg("a"), py::arg("b"), py::arg("k_sigma"), py::arg("method") = "sdp_enhanced");
  m.def("witness_matrix", &spw::witness_matrix);
  m.def("qubit_projector", &spw::qubit_projector);
  m.def("partial_transpose_01", py::overload_cast<const spw::RealMatrix&>(&spw::partial_transpose_01),
        py::arg("rho"));

  m.def("_sweep_csv", &sweep_csv, py::arg("config_json"));
  m.def("_verdict_json", &verdict_json, py::arg("config_json"));
  m.def("_certify_json", &certify_json, py::arg("grid"), py::arg("lambda_perturbation") = 0.0,
        py::arg("tolerance") = 1e-10);
  m.def("_sample_csv", &sample_csv, py::arg("p1"), py::arg("p2"), py::arg("eta_a"), py::arg("eta_b"),
        py::arg("n_per_setting"), py::arg("seed"));
  m.def("_extract_json", &extract_json, py::arg("csv"), py::arg("levels") = 3);
}
