#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <vector>

#include "thinfilm/continuation.hpp"
#include "thinfilm/errors.hpp"
#include "thinfilm/evolution.hpp"
#include "thinfilm/model.hpp"
#include "thinfilm/phase.hpp"
#include "thinfilm/solver.hpp"
#include "thinfilm/stability.hpp"

namespace py = pybind11;

namespace {

using namespace thinfilm;

py::dict point_dict(const BranchPoint& bp) {
  py::dict d;
  d["s"] = bp.s;
  d["M"] = bp.M;
  d["K"] = bp.K;
  d["min_h"] = bp.min_h;
  d["max_h"] = bp.max_h;
  d["l2_norm"] = bp.l2_norm;
  d["h2_norm"] = bp.h2_norm;
  d["flux_residual"] = bp.flux_residual;
  d["coeffs"] = bp.profile.coeffs();
  d["k0"] = bp.profile.k0();
  return d;
}

py::dict solve_profile(double g, double k0, double M, double amplitude,
                       int n_modes) {
  auto [guess, M_pred] = local_predictor(k0, g, amplitude);
  CollocationSystem sys(g, k0, n_modes);
  Eigen::VectorXd a = sys.newton_solve(sys.coeffs_of(guess), M);
  PeriodicProfile prof = sys.profile(a);
  auto vals = prof.sample(4 * n_modes);
  py::dict d;
  d["coeffs"] = prof.coeffs();
  d["k0"] = k0;
  d["M"] = M;
  d["K"] = mass_constant_K(prof);
  d["min_h"] = 1.0 + *std::min_element(vals.begin(), vals.end());
  d["x"] = PeriodicProfile::grid(k0, 4 * n_modes);
  d["v"] = vals;
  return d;
}

py::dict continue_branch(double g, double k0, double ds, int max_steps,
                         double rupture_threshold, int n_modes) {
  ContinuationSettings st;
  st.g = g;
  st.k0 = k0;
  st.ds0 = ds;
  st.max_steps = max_steps;
  st.rupture_threshold = rupture_threshold;
  st.N = n_modes;
  auto rec = Continuation(st).run();
  py::list pts;
  for (const auto& bp : rec.points) pts.append(point_dict(bp));
  py::dict d;
  d["points"] = pts;
  d["termination"] = std::string(to_string(rec.termination));
  return d;
}

py::dict fixed_points(double g, double M, double K) {
  auto fp = find_fixed_points(HamiltonianParams{g, M, K});
  py::dict d;
  d["v_l"] = fp.v_l;
  d["v_u"] = fp.v_u;
  d["kind_l"] = std::string(to_string(fp.kind_l));
  d["kind_u"] = std::string(to_string(fp.kind_u));
  return d;
}

py::dict energy_interval_py(double g, double M, double K) {
  auto ei = energy_interval(HamiltonianParams{g, M, K});
  py::dict d;
  d["E_min"] = ei.E_min;
  d["E_max"] = ei.E_max;
  d["has_homoclinic"] = ei.has_homoclinic;
  return d;
}

py::dict orbit_py(double E, double g, double M, double K) {
  auto oq = orbit_quadrature(E, HamiltonianParams{g, M, K});
  py::dict d;
  d["period"] = oq.period;
  d["mean_v"] = oq.mean_v;
  d["q0"] = oq.tp.q0;
  d["q1"] = oq.tp.q1;
  return d;
}

double mass_constant(const std::vector<double>& coeffs, double k0) {
  return mass_constant_K(PeriodicProfile(k0, coeffs));
}

py::dict amplitude_py(double eps, double g) {
  auto rep = amplitude_correspondence(eps, g);
  py::dict d;
  d["eps"] = rep.eps;
  d["discrepancy"] = rep.discrepancy;
  d["t_end"] = rep.t_end;
  d["V_film"] = rep.V_film;
  d["V_amp"] = rep.V_amp;
  return d;
}

py::dict spectrum_py(const std::vector<double>& coeffs, double k0, double M,
                     double g, int n_eigs) {
  CollocationSystem sys(g, k0, static_cast<int>(coeffs.size()));
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(
      coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
  BranchPoint bp;
  bp.M = M;
  bp.profile = sys.profile(a);
  auto vals = bp.profile.sample(4 * bp.profile.modes());
  bp.min_h = 1.0 + *std::min_element(vals.begin(), vals.end());
  auto rep = periodic_state_spectrum(bp, g, n_eigs);
  py::dict d;
  d["leading"] = rep.leading;
  d["eigenvalues"] = rep.eigenvalues;
  return d;
}

}  // namespace

PYBIND11_MODULE(thinfilm, m) {
  m.doc() = "stationary periodic solutions and evolution of a thermocapillary "
            "thin film";
  m.attr("K0") = K0;

  py::register_exception<domain_error>(m, "DomainError", PyExc_ValueError);
  py::register_exception<numerical_error>(m, "NumericalError",
                                          PyExc_RuntimeError);

  m.def("omega", &omega, py::arg("v"));
  m.def("omega_prime", &omega_prime, py::arg("v"));
  m.def("critical_marangoni", &critical_marangoni, py::arg("g"),
        py::arg("k0"));
  m.def(
      "constant_state_symbol",
      [](double ell, double g, double M, double k0) {
        return constant_state_symbol(ell, ModelParams{g, M, k0});
      },
      py::arg("ell"), py::arg("g"), py::arg("M") = 8.0, py::arg("k0") = 1.0);
  m.def("v_max_infinity", &v_max_infinity, py::arg("K"));
  m.def("fixed_points", &fixed_points, py::arg("g"), py::arg("M"),
        py::arg("K"));
  m.def("energy_interval", &energy_interval_py, py::arg("g"), py::arg("M"),
        py::arg("K"));
  m.def("orbit", &orbit_py, py::arg("E"), py::arg("g"), py::arg("M"),
        py::arg("K"));
  m.def(
      "local_predictor",
      [](double k0, double g, double s) {
        auto [prof, M] = local_predictor(k0, g, s);
        return py::make_tuple(prof.coeffs(), M);
      },
      py::arg("k0"), py::arg("g"), py::arg("s"));
  m.def("mass_constant", &mass_constant, py::arg("coeffs"),
        py::arg("k0") = 1.0);
  m.def("solve_profile", &solve_profile, py::arg("g"), py::arg("k0"),
        py::arg("M"), py::arg("amplitude"), py::arg("n_modes") = 64);
  m.def("continue_branch", &continue_branch, py::arg("g") = 1.0,
        py::arg("k0") = 1.0, py::arg("ds") = 0.05, py::arg("max_steps") = 400,
        py::arg("rupture_threshold") = 1e-2, py::arg("n_modes") = 64);
  m.def("spectrum", &spectrum_py, py::arg("coeffs"), py::arg("k0"),
        py::arg("M"), py::arg("g") = 1.0, py::arg("n_eigs") = 8);
  m.def(
      "measure_growth_rate",
      [](int ell, double M, double g, double k0) {
        return measure_growth_rate(ell, M, ModelParams{g, M, k0});
      },
      py::arg("ell"), py::arg("M"), py::arg("g") = 1.0, py::arg("k0") = 1.0);
  m.def("amplitude_correspondence", &amplitude_py, py::arg("eps"),
        py::arg("g") = 1.0);
}
