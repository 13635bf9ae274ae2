#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <stdexcept>

#include "casimir/force.hpp"
#include "casimir/sampler.hpp"
#include "casimir/special_functions.hpp"
#include "casimir/spectrum.hpp"

namespace py = pybind11;
using namespace casimir;

namespace {

CrossSection make_cross_section(std::optional<double> radius, std::optional<std::pair<double, double>> rect) {
    if (radius && rect) throw std::invalid_argument("give either radius or rect, not both");
    if (rect) return Rectangle{rect->first, rect->second};
    return Circle{radius.value_or(1.0)};
}

py::dict force_dict(const ForceResult& r) {
    py::dict d;
    d["force"] = r.force;
    d["n_modes"] = r.n_modes_used;
    d["cutoff"] = r.cutoff;
    d["tail_estimate"] = r.tail_estimate;
    d["spectral_tail"] = r.spectral_tail;
    d["converged"] = r.converged;
    d["regime"] = std::string(to_string(r.regime));
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Casimir piston forces on a cylindrical cross section";

    py::enum_<BoundaryCondition>(m, "BoundaryCondition")
        .value("Dirichlet", BoundaryCondition::Dirichlet)
        .value("Neumann", BoundaryCondition::Neumann);

    py::class_<TransverseMode>(m, "TransverseMode")
        .def_readonly("lam", &TransverseMode::lambda)
        .def_readonly("lam_sq", &TransverseMode::lambda_sq)
        .def_readonly("degeneracy", &TransverseMode::degeneracy)
        .def_readonly("bc", &TransverseMode::bc)
        .def_readonly("error_estimate", &TransverseMode::error_estimate)
        .def("__repr__", [](const TransverseMode& t) {
            return "TransverseMode(lam=" + std::to_string(t.lambda) + ", degeneracy=" + std::to_string(t.degeneracy) +
                   ", bc=" + std::string(to_string(t.bc)) + ")";
        });

    py::class_<Spectrum>(m, "Spectrum")
        .def_readonly("modes", &Spectrum::modes)
        .def_readonly("area", &Spectrum::area)
        .def_readonly("n_requested", &Spectrum::n_requested)
        .def("total_count", &Spectrum::total_count)
        .def("__len__", [](const Spectrum& s) { return s.modes.size(); });

    m.def(
        "spectrum",
        [](int n, std::optional<double> radius, std::optional<std::pair<double, double>> rect, std::string bc) {
            const auto cs = make_cross_section(radius, rect);
            if (bc == "both") return combined_spectrum(cs, n);
            return single_spectrum(cs, n, parse_boundary_condition(bc));
        },
        py::arg("n"), py::arg("radius") = py::none(), py::arg("rect") = py::none(), py::arg("bc") = "both",
        "Transverse modes of a circle (radius) or rectangle (rect=(a, b)), n per boundary-condition set.");

    m.def("weyl_deviation", &weyl_deviation, py::arg("spectrum"));

    m.def(
        "force",
        [](const Spectrum& s, double L, std::optional<double> beta, bool classical, double tol, double spectral_tol,
           unsigned threads, double hbar, double c) {
            ForceOptions opt{tol, spectral_tol, threads};
            if (classical) {
                if (!beta) throw std::invalid_argument("classical force needs beta");
                return force_dict(force_classical(s, L, *beta, opt));
            }
            if (!beta) return force_dict(force_zero_T(s, L, opt, hbar * c));
            return force_dict(force_finite_T(s, L, ThermalState::from_beta(*beta, hbar, c), opt));
        },
        py::arg("spectrum"), py::arg("L"), py::arg("beta") = py::none(), py::arg("classical") = false,
        py::arg("tol") = 1e-10, py::arg("spectral_tol") = 1e-3, py::arg("threads") = 1u, py::arg("hbar") = 1.0,
        py::arg("c") = 1.0, "Piston force; zero temperature when beta is None.");

    m.def("asymptote_near_T0", &asymptote_near_T0, py::arg("area"), py::arg("L"), py::arg("hbar_c") = 1.0);
    m.def("asymptote_far_T0", &asymptote_far_T0, py::arg("g1"), py::arg("lam1"), py::arg("L"),
          py::arg("hbar_c") = 1.0);
    m.def("asymptote_near_classical", &asymptote_near_classical, py::arg("area"), py::arg("L"), py::arg("beta"));
    m.def("asymptote_far_classical", &asymptote_far_classical, py::arg("g1"), py::arg("lam1"), py::arg("L"),
          py::arg("beta"));
    m.def("fluctuation_variance", &fluctuation_variance, py::arg("force"));

    m.def(
        "matsubara_mode_sum",
        [](double lam, double beta, std::optional<long> m_max) {
            const auto th = ThermalState::from_beta(beta);
            return m_max ? matsubara_mode_sum(lam, th, *m_max) : matsubara_mode_sum(lam, th);
        },
        py::arg("lam"), py::arg("beta"), py::arg("m_max") = py::none());
    m.def(
        "matsubara_closed_form",
        [](double lam, double beta) { return matsubara_closed_form(lam, ThermalState::from_beta(beta)); },
        py::arg("lam"), py::arg("beta"));

    m.def("regularized_axial_kernel", &regularized_axial_kernel, py::arg("Q"), py::arg("L"), py::arg("n_x"),
          py::arg("ratio") = 10);

    m.def("bessel_j", &special::bessel_j, py::arg("nu"), py::arg("x"));
    m.def("bessel_k", &special::bessel_k, py::arg("alpha"), py::arg("x"));
    m.def(
        "bessel_j_zeros", [](int nu, int count) { return special::bessel_j_zeros(nu, count).values; }, py::arg("nu"),
        py::arg("count"));
    m.def(
        "bessel_j_prime_zeros", [](int nu, int count) { return special::bessel_j_prime_zeros(nu, count).values; },
        py::arg("nu"), py::arg("count"));

    m.def(
        "calibrate",
        [](std::uint64_t seed, long steps, int chains, unsigned threads) {
            langevin::SamplerConfig cfg;
            cfg.seed = seed;
            cfg.n_steps = steps;
            cfg.n_chains = chains;
            cfg.threads = threads;
            py::list out;
            for (const auto& c : langevin::run_calibration(cfg).checks) {
                py::dict d;
                d["name"] = c.name;
                d["estimate"] = c.estimate;
                d["expected"] = c.expected;
                d["std_error"] = c.error;
                d["z"] = c.z;
                d["pass"] = c.pass;
                out.append(d);
            }
            return out;
        },
        py::arg("seed") = 42, py::arg("steps") = 50000, py::arg("chains") = 4, py::arg("threads") = 1u,
        "Sampler calibration checks against exact Gaussian moments.");

    m.def(
        "mode_sum_estimate",
        [](const Spectrum& s, double L, double beta, std::uint64_t seed, long steps, long m_max) {
            langevin::SamplerConfig cfg;
            cfg.seed = seed;
            cfg.n_steps = steps;
            cfg.m_max = m_max;
            const auto th = ThermalState::from_beta(beta);
            const auto w = langevin::piston_weights(langevin::build_channels(s, th, m_max), L);
            const auto e = langevin::estimate_mode_sum(s, th, w, cfg);
            return std::make_pair(e.value, e.error);
        },
        py::arg("spectrum"), py::arg("L"), py::arg("beta"), py::arg("seed") = 42, py::arg("steps") = 50000,
        py::arg("m_max") = 4, "Sampled piston force restricted to |m| <= m_max, as (value, std_error).");
}
