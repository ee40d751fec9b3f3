#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>
#include <optional>

#include "json.hpp"
#include "modefisher/error.hpp"
#include "modefisher/estimation.hpp"
#include "modefisher/fisher.hpp"
#include "modefisher/grid.hpp"
#include "modefisher/modes.hpp"
#include "modefisher/psf.hpp"

namespace py = pybind11;
using namespace modefisher;

namespace {

Grid grid_or_default(std::optional<double> x_max, std::optional<std::size_t> n_points, const Grid& def) {
  return Grid(x_max.value_or(def.x_max()), n_points.value_or(def.n_points()));
}

std::vector<double> grid_points(const Grid& grid) { return grid.points(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Optimal mode bases, Fisher information and Monte Carlo separation estimation";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<PsfModel>(m, "PsfModel")
      .def_property_readonly("kind", [](const PsfModel& p) { return std::string(to_string(p.kind())); })
      .def_property_readonly("sigma", &PsfModel::sigma)
      .def_property_readonly("x", [](const PsfModel& p) { return grid_points(p.x_grid()); })
      .def_property_readonly("p", [](const PsfModel& p) { return grid_points(p.p_grid()); })
      .def_property_readonly("amp_x", &PsfModel::amp_x)
      .def_property_readonly("amp_p", &PsfModel::amp_p)
      .def_property_readonly("norm_residual", &PsfModel::norm_residual)
      .def("amplitude", &PsfModel::amplitude, py::arg("x"))
      .def("momentum_amplitude", &PsfModel::momentum_amplitude, py::arg("p"))
      .def("intensity", [](const PsfModel& p, double s, double x) { return two_source_intensity(p, {s}, x); },
           py::arg("s"), py::arg("x"), "Two-source intensity at separation s");

  m.def("gaussian_psf",
        [](double sigma, std::optional<double> x_max, std::optional<std::size_t> n_points) {
          return make_gaussian_psf(sigma, grid_or_default(x_max, n_points, default_gaussian_grid(sigma)));
        },
        py::arg("sigma") = 1.0, py::arg("x_max") = py::none(), py::arg("n_points") = py::none());
  m.def("sinc_psf",
        [](std::optional<double> x_max, std::optional<std::size_t> n_points) {
          return make_sinc_psf(grid_or_default(x_max, n_points, default_sinc_grid()));
        },
        py::arg("x_max") = py::none(), py::arg("n_points") = py::none());
  m.def("sampled_psf",
        [](double x_max, std::vector<double> amplitudes) {
          return make_sampled_psf(Grid(x_max, amplitudes.size()), std::move(amplitudes));
        },
        py::arg("x_max"), py::arg("amplitudes"), "PSF from amplitudes sampled on the symmetric grid [-x_max, x_max]");

  py::class_<ModeSet>(m, "ModeSet")
      .def_property_readonly("provenance", [](const ModeSet& s) { return std::string(to_string(s.provenance)); })
      .def_property_readonly("x", [](const ModeSet& s) { return grid_points(s.x_grid); })
      .def_readonly("modes_x", &ModeSet::modes_x)
      .def_readonly("modes_p", &ModeSet::modes_p)
      .def_property_readonly("parity",
                             [](const ModeSet& s) {
                               std::vector<int> out;
                               for (auto p : s.parity) out.push_back(p == Parity::Even ? 1 : -1);
                               return out;
                             })
      .def("__len__", &ModeSet::size);

  m.def("build_adapted_modes", &build_adapted_modes, py::arg("psf"), py::arg("count"));
  m.def("build_sinc_closed_form_modes",
        [](std::size_t count, const PsfModel& psf) { return build_sinc_closed_form_modes(count, psf.x_grid()); },
        py::arg("count"), py::arg("psf"));
  m.def("build_hermite_gauss_modes",
        [](double sigma, std::size_t count, const PsfModel& psf) {
          return build_hermite_gauss_modes(sigma, count, hermite_gauss_grid(sigma, count), psf.p_grid());
        },
        py::arg("sigma"), py::arg("count"), py::arg("psf"),
        "Hermite-Gauss modes with intensity width sigma, sampled in momentum on the PSF grid");
  m.def("sinc_mode_closed_form", &sinc_mode_closed_form, py::arg("n"), py::arg("x"));
  m.def("gram_matrix",
        [](const ModeSet& s, bool momentum) {
          return gram_matrix(s, momentum ? Representation::Momentum : Representation::Position);
        },
        py::arg("modes"), py::arg("momentum") = false);

  py::class_<FisherCurve>(m, "FisherCurve")
      .def_readonly("separations", &FisherCurve::separations)
      .def_readonly("per_mode", &FisherCurve::per_mode)
      .def_readonly("cumulative", &FisherCurve::cumulative)
      .def_readonly("direct", &FisherCurve::direct)
      .def_readonly("tail", &FisherCurve::tail)
      .def_readonly("quantum", &FisherCurve::quantum);

  m.def("quantum_fisher", &quantum_fisher, py::arg("psf"));
  m.def("direct_imaging_fisher", &direct_imaging_fisher, py::arg("psf"), py::arg("s"));
  m.def("sinc_per_mode_fisher_closed", &sinc_per_mode_fisher_closed, py::arg("n"), py::arg("s"));
  m.def("cumulative_fisher",
        [](const std::vector<double>& row, std::size_t depth) { return cumulative_fisher(row, depth); },
        py::arg("per_mode_row"), py::arg("depth"));
  m.def("fisher_curve",
        [](const PsfModel& psf, const ModeSet& modes, const std::vector<double>& seps, bool with_direct) {
          return fisher_curve(psf, modes, seps, with_direct);
        },
        py::arg("psf"), py::arg("modes"), py::arg("separations"), py::arg("with_direct") = true);
  m.def("plane_wave_fisher",
        [](const PsfModel& psf, double s) {
          const auto pw = plane_wave_fisher(psf, s);
          py::dict d;
          d["sine"] = pw.sine;
          d["cosine"] = pw.cosine;
          d["printed"] = pw.printed;
          return d;
        },
        py::arg("psf"), py::arg("s"));

  m.def("run_study",
        [](const std::string& config_json) {
          const SimulationReport report = run_study(config_from_json(config_json));
          py::module_ json = py::module_::import("json");
          py::dict out = json.attr("loads")(report_to_json(report));
          out["estimates"] = report.estimates;
          out["boundary_flags"] = std::vector<bool>(report.boundary_flags.begin(), report.boundary_flags.end());
          return out;
        },
        py::arg("config_json"), "Run a Monte Carlo study from a JSON config string; returns the report as a dict");
}
