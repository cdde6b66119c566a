#include "cavity_packets/analysis.hpp"
#include "cavity_packets/cli_io.hpp"
#include "cavity_packets/core_model.hpp"
#include "cavity_packets/dressed_analytics.hpp"
#include "cavity_packets/dynamics.hpp"
#include "cavity_packets/errors.hpp"
#include "cavity_packets/observables.hpp"
#include "cavity_packets/wkb_chain.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace cavity_packets;

namespace {

SystemParams make_params(double f_drive, double delta, double dxl, double kappa, double gamma_rd,
                         double gamma_pd, int n_max, double coupling) {
  SystemParams p{f_drive, delta, dxl, kappa, gamma_rd, gamma_pd, n_max, coupling};
  p.validate();
  return p;
}

TimeGrid make_grid(double t_final, double dt, int output_stride) {
  TimeGrid g{t_final, dt, output_stride};
  g.validate();
  return g;
}

py::dict trajectory_dict(const Trajectory& t) {
  py::dict d;
  d["times"] = t.times;
  d["mean_n"] = t.mean_n;
  d["norm"] = t.norm;
  d["pop_excited"] = t.pop_excited;
  d["energy"] = t.energy;
  d["distributions"] = t.distributions;
  return d;
}

Branch to_branch(const std::string& s) {
  if (s == "plus" || s == "+") return Branch::Plus;
  if (s == "minus" || s == "-") return Branch::Minus;
  throw ConfigError("branch: expected 'plus' or 'minus', got '" + s + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Strongly driven Jaynes-Cummings simulator (units hbar = g = 1)";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<TruncationError>(m, "TruncationError", base.ptr());
  py::register_exception<TruncationOverflow>(m, "TruncationOverflow", base.ptr());
  py::register_exception<StepUnstable>(m, "StepUnstable", base.ptr());
  py::register_exception<NoConvergence>(m, "NoConvergence", base.ptr());
  py::register_exception<GridTooSmall>(m, "GridTooSmall", base.ptr());
  py::register_exception<NonuniformGrid>(m, "NonuniformGrid", base.ptr());
  py::register_exception<PoleAtTwoF>(m, "PoleAtTwoF", base.ptr());
  py::register_exception<UnstableBranch>(m, "UnstableBranch", base.ptr());
  py::register_exception<PositivityViolation>(m, "PositivityViolation", base.ptr());

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init(&make_params), py::arg("f_drive") = 0.0, py::arg("delta") = 0.0, py::arg("dxl") = 0.0,
           py::arg("kappa") = 0.0, py::arg("gamma_rd") = 0.0, py::arg("gamma_pd") = 0.0, py::arg("n_max") = 160, py::arg("coupling") = 1.0)
      .def_readwrite("f_drive", &SystemParams::f_drive)
      .def_readwrite("delta", &SystemParams::delta)
      .def_readwrite("dxl", &SystemParams::dxl)
      .def_readwrite("kappa", &SystemParams::kappa)
      .def_readwrite("gamma_rd", &SystemParams::gamma_rd)
      .def_readwrite("gamma_pd", &SystemParams::gamma_pd)
      .def_readwrite("n_max", &SystemParams::n_max)
      .def_readwrite("coupling", &SystemParams::coupling)
      .def_property_readonly("dim", &SystemParams::dim)
      .def("validate", &SystemParams::validate);

  py::class_<TimeGrid>(m, "TimeGrid")
      .def(py::init(&make_grid), py::arg("t_final") = 300.0, py::arg("dt") = 1e-3, py::arg("output_stride") = 100)
      .def_readwrite("t_final", &TimeGrid::t_final)
      .def_readwrite("dt", &TimeGrid::dt)
      .def_readwrite("output_stride", &TimeGrid::output_stride)
      .def_property_readonly("steps", &TimeGrid::steps);

  m.def("hamiltonian", [](const SystemParams& p) { return build_operators(p).hamiltonian; });
  m.def(
      "prepare_state",
      [](const std::string& kind, int n_max) { return prepare_state(InitialState::parse(kind), n_max).amplitudes; },
      py::arg("kind"), py::arg("n_max"),
      "Amplitudes in flat order 2n + (X ? 1 : 0); kind is ground, plus, minus, fock:N or excited_fock:N.");
  m.def(
      "coherent_state", [](std::complex<double> alpha, int n_max) { return coherent_state(alpha, n_max).amplitudes; },
      py::arg("alpha"), py::arg("n_max"));

  m.def(
      "evolve_schrodinger",
      [](const SystemParams& p, const Eigen::VectorXcd& psi0, const TimeGrid& g) {
        py::gil_scoped_release release;
        Trajectory t = evolve_schrodinger(p, PureState{psi0}, g);
        py::gil_scoped_acquire acquire;
        return trajectory_dict(t);
      },
      py::arg("params"), py::arg("psi0"), py::arg("grid"));
  m.def(
      "evolve_lindblad",
      [](const SystemParams& p, const Eigen::MatrixXcd& rho0, const TimeGrid& g) {
        py::gil_scoped_release release;
        Trajectory t = evolve_lindblad(p, DensityMatrix{rho0}, g);
        py::gil_scoped_acquire acquire;
        return trajectory_dict(t);
      },
      py::arg("params"), py::arg("rho0"), py::arg("grid"));
  m.def(
      "find_stationary",
      [](const SystemParams& p, const Eigen::MatrixXcd& rho0, double dt, double tolerance, bool seed) {
        StationaryOptions o;
        o.tolerance = tolerance;
        o.seed_with_null_vector = seed;
        py::gil_scoped_release release;
        return find_stationary(p, DensityMatrix{rho0}, dt, o).rho.elements;
      },
      py::arg("params"), py::arg("rho0"), py::arg("dt"), py::arg("tolerance") = 1e-7, py::arg("seed") = true);
  m.def("lindblad_rhs", [](const SystemParams& p, const Eigen::MatrixXcd& rho) { return lindblad_rhs(p, rho); });

  m.def("photon_distribution", [](const Eigen::VectorXcd& psi) { return photon_distribution(PureState{psi}).probs; });
  m.def("photon_distribution_rho",
        [](const Eigen::MatrixXcd& rho) { return photon_distribution(DensityMatrix{rho}).probs; });
  m.def("reduce_photonic", [](const Eigen::MatrixXcd& rho) { return reduce_photonic(DensityMatrix{rho}); });
  m.def(
      "wigner",
      [](const Eigen::MatrixXcd& rho_phot, double extent, int points) {
        GridSpec g{-extent, extent, -extent, extent, points, points};
        const WignerGrid w = wigner(rho_phot, g);
        return py::make_tuple(w.re_axis, w.im_axis, w.values);
      },
      py::arg("rho_phot"), py::arg("extent") = 12.0, py::arg("points") = 201,
      "Returns (re_axis, im_axis, W) with W[i, j] at re_axis[i] + 1j * im_axis[j].");

  m.def(
      "spectrum",
      [](const std::vector<double>& t, const std::vector<double>& v) {
        const Spectrum s = spectrum(t, v);
        std::vector<std::pair<double, double>> peaks;
        for (const SpectralPeak& p : s.peaks) peaks.emplace_back(p.freq, p.height);
        return py::make_tuple(s.freqs, s.magnitudes, peaks);
      },
      py::arg("times"), py::arg("values"));
  m.def(
      "detect_packets",
      [](const std::vector<double>& probs) {
        py::list out;
        for (const Packet& p : detect_packets(make_distribution(probs)).packets) {
          py::dict d;
          d["n_lo"] = p.n_lo;
          d["n_hi"] = p.n_hi;
          d["norm"] = p.norm;
          d["mean"] = p.mean;
          d["peak"] = p.peak;
          out.append(d);
        }
        return out;
      },
      py::arg("probs"));

  py::class_<BranchFrequency>(m, "BranchFrequency")
      .def_readonly("value", &BranchFrequency::value)
      .def_readonly("imaginary", &BranchFrequency::imaginary);
  py::class_<LdsReport>(m, "LdsReport")
      .def_readonly("theta", &LdsReport::theta)
      .def_readonly("omega_plus", &LdsReport::omega_plus)
      .def_readonly("omega_minus", &LdsReport::omega_minus)
      .def_readonly("chi_plus", &LdsReport::chi_plus)
      .def_readonly("chi_minus", &LdsReport::chi_minus)
      .def_readonly("zeta_plus", &LdsReport::zeta_plus)
      .def_readonly("zeta_minus", &LdsReport::zeta_minus)
      .def_readonly("p1", &LdsReport::p1)
      .def_readonly("q1", &LdsReport::q1)
      .def_readonly("p2", &LdsReport::p2)
      .def_readonly("q2", &LdsReport::q2)
      .def_readonly("r2", &LdsReport::r2)
      .def_readonly("amplitude", &LdsReport::amplitude)
      .def_readonly("validity_lds", &LdsReport::validity_lds)
      .def_readonly("stable_plus", &LdsReport::stable_plus)
      .def_readonly("stable_minus", &LdsReport::stable_minus);
  py::class_<CdsReport>(m, "CdsReport")
      .def_readonly("n_plus_up", &CdsReport::n_plus_up)
      .def_readonly("n_minus_up", &CdsReport::n_minus_up)
      .def_readonly("n_tilde_lo", &CdsReport::n_tilde_lo)
      .def_readonly("n_tilde_hi", &CdsReport::n_tilde_hi)
      .def_readonly("split_flag", &CdsReport::split_flag)
      .def_readonly("in_bimodal_window", &CdsReport::in_bimodal_window)
      .def_readonly("stationary_low", &CdsReport::stationary_low)
      .def_readonly("stationary_high", &CdsReport::stationary_high)
      .def_property_readonly("regime", [](const CdsReport& r) { return std::string(to_string(r.regime)); });

  m.def("lds_report", [](double f, double delta) { return lds_report(f, delta); }, py::arg("f"), py::arg("delta"));
  m.def("cds_report", [](double f, double delta) { return cds_report(f, delta); }, py::arg("f"), py::arg("delta"));
  m.def(
      "lds_mean_photon",
      [](double f, double delta, const std::string& branch, double t) {
        return lds_mean_photon(f, delta, to_branch(branch), t);
      },
      py::arg("f"), py::arg("delta"), py::arg("branch"), py::arg("t"));
  m.def("lds_trajectory", &lds_trajectory, py::arg("f"), py::arg("delta"), py::arg("t"));

  m.def(
      "chain_eigensolve",
      [](double f, double delta, const std::string& branch, int m_sites) {
        const ChainModes modes = chain_eigensolve(ChainSpec::cavity_dressed(f, delta, to_branch(branch), m_sites));
        return py::make_tuple(modes.eigenvalues, modes.eigenvectors);
      },
      py::arg("f"), py::arg("delta"), py::arg("branch"), py::arg("m"));
  m.def(
      "classify_region",
      [](const std::vector<double>& omegas, double xi, double lambda) {
        const RegionMap map = classify_region(ChainSpec{omegas, xi}, lambda);
        std::vector<bool> osc;
        for (SiteKind k : map.sites) osc.push_back(k == SiteKind::Oscillatory);
        return py::make_tuple(osc, map.turning_points);
      },
      py::arg("omegas"), py::arg("xi"), py::arg("lambda_"));

  m.def(
      "run",
      [](const std::map<std::string, std::string>& entries, int threads) {
        RunConfig config;
        for (const auto& [k, v] : entries) set_key(config, k, v);
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(config, threads);
        }
        return r.files;
      },
      py::arg("config"), py::arg("threads") = 1, "Runs a configuration given as flat key/value strings.");
}
