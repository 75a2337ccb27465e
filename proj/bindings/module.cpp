#include <memory>
#include <utility>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mpps/pipeline.hpp"

namespace py = pybind11;

namespace {

// Shared handle so Python-held signals stay valid independently of the
// builder that produced them.
struct ThetaHandle {
    std::shared_ptr<mpps::ThetaSignal> sig;
    double operator()(double t) const { return sig->eval(t); }
};

mpps::LogisticOrbit orbit_from_values(std::vector<double> values) {
    mpps::LogisticOrbit o;
    o.values = std::move(values);
    return o;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bounded-solution and recurrence toolkit for periodically forced "
              "quasilinear systems";

    m.def(
        "logistic_orbit",
        [](double mu, double seed, std::size_t n, std::size_t discard) {
            mpps::LogisticOrbit o = mpps::iterate_logistic(mu, seed, n);
            return mpps::discard_transient(o, discard).values;
        },
        py::arg("mu"), py::arg("seed"), py::arg("n"), py::arg("discard") = 0,
        "Iterate the logistic map; returns the orbit values after the transient.");

    m.def(
        "detect_sequence",
        [](std::vector<double> values, int window, std::vector<double> deltas, double step) {
            mpps::PoissonSequence s =
                mpps::detect_poisson_sequence(orbit_from_values(std::move(values)), window, deltas);
            s = mpps::scale_times(s, step);
            return std::make_pair(s.times, s.precisions);
        },
        py::arg("values"), py::arg("window"), py::arg("deltas"), py::arg("step") = 1.0,
        "Near-return times of an orbit at each precision level; returns (times, deltas).");

    py::class_<ThetaHandle>(m, "Theta", "Relaxation signal driven by a step signal")
        .def("__call__", &ThetaHandle::operator(), py::arg("t"))
        .def(
            "eval_many",
            [](const ThetaHandle& h, const std::vector<double>& ts) {
                std::vector<double> out;
                out.reserve(ts.size());
                for (double t : ts) out.push_back(h.sig->eval(t));
                return out;
            },
            py::arg("ts"))
        .def_property_readonly("t_begin", [](const ThetaHandle& h) { return h.sig->t_begin(); })
        .def_property_readonly("t_end", [](const ThetaHandle& h) { return h.sig->t_end(); });

    m.def(
        "build_theta",
        [](std::vector<double> values, double q, double decay, double origin) {
            mpps::StepSignal step =
                mpps::build_step_signal(orbit_from_values(std::move(values)), q, origin);
            ThetaHandle h;
            h.sig = std::make_shared<mpps::ThetaSignal>(mpps::build_theta(step, decay));
            return h;
        },
        py::arg("values"), py::arg("q"), py::arg("decay"), py::arg("origin") = 0.0);

    m.def(
        "multipliers",
        [](const std::string& config_text) {
            mpps::SystemConfig cfg = mpps::parse_config(config_text);
            mpps::BuiltSystem built = mpps::make_system(cfg);
            const mpps::PeriodicMatrixFn& lin =
                built.sys.has_split ? built.sys.B : built.sys.A;
            mpps::FloquetData fd = mpps::multipliers(lin, cfg.solver.rtol);
            std::vector<std::complex<double>> out(fd.multipliers.data(),
                                                  fd.multipliers.data() + fd.multipliers.size());
            return out;
        },
        py::arg("config_text"),
        "Floquet multipliers of the configured system's (periodic) linear part.");

    m.def(
        "bundled_config",
        [](int n) { return std::string(mpps::bundled_config(n)); },
        py::arg("n"), "The bundled example configuration document (n in 1..3).");

    m.def(
        "run",
        [](const std::string& config_text, const std::string& out_dir, bool force, bool plots) {
            mpps::SystemConfig cfg = mpps::parse_config(config_text);
            mpps::PipelineOptions opt;
            opt.out_dir = out_dir;
            opt.force = force;
            opt.plots = plots;
            mpps::PipelineResult res = mpps::run_pipeline(cfg, opt);
            return res.summary.dump(2);
        },
        py::arg("config_text"), py::arg("out_dir"), py::arg("force") = false,
        py::arg("plots") = true,
        "Full pipeline run; artifacts land in out_dir, the summary JSON is returned.");
}
