#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qlab/qlab.hpp"

namespace py = pybind11;
using namespace qlab;

namespace {

Field field_from_pairs(
    int k_grid, const std::vector<std::pair<int, std::complex<double>>>& m) {
  return Field::from_modes(k_grid, m);
}

DispersionSymbol symbol_from_doubles(int j, const std::vector<long long>& g) {
  std::vector<Rational> gr;
  for (long long x : g) gr.emplace_back(x);
  return DispersionSymbol(j, std::move(gr));
}

py::dict traj_dict(const Trajectory& t) {
  py::dict d;
  d["t"] = t.times;
  std::vector<double> s4, s8, ss, pv, mn, tail;
  for (const FrameDiag& fd : t.diag) {
    s4.push_back(fd.sob4);
    s8.push_back(fd.sob8);
    ss.push_back(fd.sob_s);
    pv.push_back(fd.p_value);
    mn.push_back(fd.mean_value);
    tail.push_back(fd.tail_energy);
  }
  d["sob_4"] = s4;
  d["sob_8"] = s8;
  d["sob_s"] = ss;
  d["p_value"] = pv;
  d["mean"] = mn;
  d["tail_energy"] = tail;
  d["status"] = t.status == RunStatus::Completed        ? "completed"
                : t.status == RunStatus::BlowUpSuspected ? "blowup_suspected"
                                                         : "nonfinite";
  d["used_dt"] = t.used_dt;
  return d;
}

}  // namespace

PYBIND11_MODULE(quintlab, m) {
  m.doc() = "spectral laboratory for higher-order dispersive equations on "
            "the torus";

  py::class_<Field>(m, "Field")
      .def(py::init<int>(), py::arg("k_grid") = kDefaultKGrid)
      .def_static("from_modes", &field_from_pairs, py::arg("k_grid"),
                  py::arg("modes"))
      .def_property_readonly("k_grid", &Field::k_grid)
      .def("mode", &Field::mode)
      .def("sample_values",
           [](const Field& f, int n) { return sample_values(f, n); })
      .def("__add__", [](const Field& a, const Field& b) { return a + b; })
      .def("__sub__", [](const Field& a, const Field& b) { return a - b; })
      .def("__rmul__", [](const Field& f, double c) { return c * f; });

  m.def("random_band_field", &random_band_field, py::arg("seed"), py::arg("s"),
        py::arg("amplitude"), py::arg("k_grid") = kDefaultKGrid);
  m.def("derivative", &derivative);
  m.def("sobolev_norm", &sobolev_norm);
  m.def("pointwise_product", &pointwise_product);
  m.def("mean", &mean);
  m.def("bona_smith", &bona_smith);
  m.def("field_to_json", [](const Field& f) { return to_json(f); });
  m.def("field_from_json", &field_from_json);

  py::class_<Nonlinearity>(m, "Nonlinearity")
      .def_static("parse",
                  [](const std::string& s) { return parse_nonlinearity(s); })
      .def("classify",
           [](const Nonlinearity& n) {
             return classify(n) == ResonanceType::NonParabolic
                        ? "non-parabolic"
                        : "parabolic";
           })
      .def("conserves_mean", [](const Nonlinearity& n) {
        return conserves_mean(n);
      })
      .def("p_density", [](const Nonlinearity& n) { return p_density(n).str(); })
      .def("p_functional",
           [](const Nonlinearity& n, const Field& f) {
             return p_functional(n, f);
           })
      .def("evaluate",
           [](const Nonlinearity& n, const Field& f) { return evaluate(n, f); })
      .def_property_readonly("p_max", &Nonlinearity::p_max)
      .def("to_json", [](const Nonlinearity& n) { return to_json(n); });

  m.def("parse_nonlinearity", &parse_nonlinearity);

  py::class_<DispersionSymbol>(m, "DispersionSymbol")
      .def(py::init(&symbol_from_doubles), py::arg("j"), py::arg("gammas"))
      .def_static("pure_power", &DispersionSymbol::pure_power)
      .def_readonly("j", &DispersionSymbol::j);

  m.def("phi", [](const DispersionSymbol& s, long long k) {
    return phi_symbol(s, k);
  });
  m.def("resonance_fn",
        [](const DispersionSymbol& s, const std::vector<int>& kt) {
          return resonance_fn(s, kt);
        });
  m.def("resonance_search",
        [](const DispersionSymbol& s, int p, int K, double budget) {
          return resonance_search(s, p, K, budget);
        },
        py::arg("sym"), py::arg("p"), py::arg("K"), py::arg("budget") = 1e9);
  m.def("verify_oscillation",
        [](const DispersionSymbol& s, int p, double C, int K, double budget) {
          OscillationReport r = verify_oscillation(s, p, C, K, budget);
          py::dict d;
          d["min_ratio"] = r.min_ratio;
          d["argmin"] = r.argmin;
          d["support_count"] = r.support_count;
          d["min_ratio_sym"] = r.min_ratio_sym;
          d["max_ratio_sym"] = r.max_ratio_sym;
          d["max_cprime"] = r.max_cprime;
          return d;
        },
        py::arg("sym"), py::arg("p"), py::arg("C"), py::arg("K"),
        py::arg("budget") = 1e9);

  py::class_<Preset>(m, "Preset")
      .def_readonly("name", &Preset::name)
      .def_readonly("provenance", &Preset::provenance)
      .def_property_readonly("nonlinearity",
                             [](const Preset& p) { return p.n; })
      .def_property_readonly("symbol", [](const Preset& p) { return p.sym; })
      .def_property_readonly("type", [](const Preset& p) {
        return p.type == ResonanceType::NonParabolic ? "non-parabolic"
                                                     : "parabolic";
      });
  m.def("preset", &preset);
  m.def("preset_names", [] { return preset_names(); });

  m.def(
      "evolve",
      [](const std::string& preset_name, double eps, const Field& phi0,
         double t_end, double dt, int stride, bool backward) {
        Preset p = preset(preset_name);
        Equation eq{p.sym, p.n, eps};
        if (backward) eq = transformed(eq);
        EvolveOptions opt;
        opt.stride = stride;
        return traj_dict(evolve(eq, phi0, t_end, dt, opt));
      },
      py::arg("preset"), py::arg("eps"), py::arg("phi0"), py::arg("t_end"),
      py::arg("dt"), py::arg("stride") = 10, py::arg("backward") = false);

  m.def("j1_functional",
        [](const Nonlinearity& n, const Field& phi, const DispersionSymbol& s,
           double eps) { return j1_functional(n, phi, s, eps); });
}
