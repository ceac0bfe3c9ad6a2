#include "qrep/analytic.hpp"
#include "qrep/bogoliubov.hpp"
#include "qrep/errors.hpp"
#include "qrep/fock.hpp"
#include "qrep/memories.hpp"
#include "qrep/repeater.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qrep;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quantum repeater chains with Gaussian atomic-ensemble memories";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<ValidityError>(m, "ValidityError", PyExc_RuntimeError);

    py::enum_<DetectorKind>(m, "DetectorKind")
        .value("Counting", DetectorKind::Counting)
        .value("NonCounting", DetectorKind::NonCounting);

    py::enum_<DarkCountPath>(m, "DarkCountPath")
        .value("Reduced", DarkCountPath::Reduced)
        .value("ExplicitCircuit", DarkCountPath::ExplicitCircuit);

    py::enum_<DistanceLimit>(m, "DistanceLimit")
        .value("Squeezing", DistanceLimit::Squeezing)
        .value("GenDarkCount", DistanceLimit::GenDarkCount)
        .value("TwoPassXi", DistanceLimit::TwoPassXi)
        .value("OnePassS", DistanceLimit::OnePassS);

    // ------------------------------------------------------------- states

    py::class_<FockDensityMatrix>(m, "FockDensityMatrix")
        .def_property_readonly("mode_count", &FockDensityMatrix::mode_count)
        .def_property_readonly("cutoff", &FockDensityMatrix::cutoff)
        .def_property_readonly("dim", &FockDensityMatrix::dim)
        .def_property_readonly(
            "elements",
            [](const FockDensityMatrix& s) -> Eigen::MatrixXcd { return s.elements(); },
            "Dense matrix in the row-major product basis, as a copy.")
        .def("at",
             [](const FockDensityMatrix& s, const std::vector<int>& ket,
                const std::vector<int>& bra) { return s.at(ket, bra); },
             py::arg("ket"), py::arg("bra"))
        .def("trace", &FockDensityMatrix::trace)
        .def("__repr__", [](const FockDensityMatrix& s) {
            return "FockDensityMatrix(modes=" + std::to_string(s.mode_count()) +
                   ", cutoff=" + std::to_string(s.cutoff()) + ")";
        });

    m.def("partial_trace", &partial_trace, py::arg("state"), py::arg("traced_modes"));
    m.def("crop_to_cutoff", &crop_to_cutoff, py::arg("state"), py::arg("new_cutoff"));

    // ----------------------------------------------------------- memories

    py::class_<ReducedMemory>(m, "ReducedMemory")
        .def(py::init<>())
        .def_readwrite("b1", &ReducedMemory::b1)
        .def_readwrite("b2", &ReducedMemory::b2)
        .def_readwrite("c1", &ReducedMemory::c1)
        .def_readwrite("c2", &ReducedMemory::c2)
        .def_readwrite("c3", &ReducedMemory::c3)
        .def("constraint_residual", &ReducedMemory::constraint_residual)
        .def("validate", &ReducedMemory::validate, py::arg("tol") = 1e-8)
        .def("__repr__", [](const ReducedMemory& r) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "ReducedMemory(b1=%g, b2=%g, c1=%g, c2=%g%+gj, c3=%g)", r.b1,
                          r.b2, r.c1, r.c2.real(), r.c2.imag(), r.c3);
            return std::string(buf);
        });

    py::class_<TwoPassParams>(m, "TwoPassParams")
        .def(py::init<>())
        .def(py::init([](double kappa, double xi) {
                 return TwoPassParams{kappa, xi};
             }),
             py::arg("kappa") = 2.0, py::arg("xi") = 0.0)
        .def_readwrite("kappa", &TwoPassParams::kappa)
        .def_readwrite("xi", &TwoPassParams::xi);

    py::class_<OnePassParams>(m, "OnePassParams")
        .def(py::init<>())
        .def(py::init([](double kappa, double g, double s) {
                 return OnePassParams{kappa, g, s};
             }),
             py::arg("kappa") = 1.0, py::arg("g") = 1.0, py::arg("s") = 1.0)
        .def_readwrite("kappa", &OnePassParams::kappa)
        .def_readwrite("g", &OnePassParams::g)
        .def_readwrite("s", &OnePassParams::s);

    m.def("ideal_memory", &ideal_memory);
    m.def("generic_memory", &generic_memory, py::arg("b1"), py::arg("b2"), py::arg("c1"),
          py::arg("c2"), py::arg("c3"));
    m.def("memory_with_c1", &memory_with_c1, py::arg("c1"));
    m.def("two_pass", &two_pass, py::arg("params"));
    m.def("one_pass", &one_pass, py::arg("params"));
    m.def("augment_dark_counts", &augment_dark_counts, py::arg("memory"), py::arg("n_dc"),
          "Fold detector dark counts into the memory row in closed form.");
    m.def("augment_dark_counts_virtual", &augment_dark_counts_virtual, py::arg("memory"),
          py::arg("p"), py::arg("s"),
          "Dark counts as a virtual squeezed source behind a transmission-p port.");

    // ----------------------------------------------------------- repeater

    py::class_<RepeaterParams>(m, "RepeaterParams")
        .def(py::init<>())
        .def_readwrite("r", &RepeaterParams::r)
        .def_readwrite("p_gen", &RepeaterParams::p_gen)
        .def_readwrite("p_con", &RepeaterParams::p_con)
        .def_readwrite("n_dc_gen", &RepeaterParams::n_dc_gen)
        .def_readwrite("n_dc_con", &RepeaterParams::n_dc_con)
        .def_readwrite("detector", &RepeaterParams::detector)
        .def_readwrite("n", &RepeaterParams::n)
        .def_readwrite("memory", &RepeaterParams::memory)
        .def_readwrite("tau", &RepeaterParams::tau)
        .def_readwrite("dark_path", &RepeaterParams::dark_path)
        .def("validate", &RepeaterParams::validate);

    py::class_<ConditionalState>(m, "ConditionalState")
        .def_readonly("rho", &ConditionalState::rho)
        .def_readonly("q", &ConditionalState::q);

    py::class_<ChainResult>(m, "ChainResult")
        .def_readonly("rho", &ChainResult::rho)
        .def_readonly("q", &ChainResult::q)
        .def_readonly("raw_weights", &ChainResult::raw_weights);

    m.def("generate", &generate, py::arg("params"), py::arg("cutoff"),
          "Heralded entanglement generation across one segment.");
    m.def("connect",
          py::overload_cast<const FockDensityMatrix&, const FockDensityMatrix&,
                            const RepeaterParams&>(&connect),
          py::arg("left"), py::arg("right"), py::arg("params"));
    m.def("run_chain", &run_chain, py::arg("params"), py::arg("cutoff"),
          "Generate and connect 2^n segments, returning the final state and "
          "the per-level success probabilities.");

    py::class_<BellOptions>(m, "BellOptions")
        .def(py::init<>())
        .def_readwrite("detector", &BellOptions::detector)
        .def_readwrite("memory", &BellOptions::memory)
        .def_readwrite("loss", &BellOptions::loss)
        .def_readwrite("n_dc", &BellOptions::n_dc)
        .def_readwrite("left_angles", &BellOptions::left_angles)
        .def_readwrite("right_angles", &BellOptions::right_angles);

    py::class_<BellResult>(m, "BellResult")
        .def_readonly("S", &BellResult::S)
        .def_readonly("E", &BellResult::E)
        .def_readonly("p_same", &BellResult::p_same)
        .def_readonly("p_diff", &BellResult::p_diff)
        .def_readonly("q_ps", &BellResult::q_ps);

    m.def("bell", &bell, py::arg("rho"), py::arg("params"),
          py::arg("options") = BellOptions{},
          "Postselected CHSH analysis of a chain state.");

    // --------------------------------------------------------------- rates

    m.def("two_success_tries", &two_success_tries, py::arg("q"));

    py::class_<RateResult>(m, "RateResult")
        .def_readonly("exact", &RateResult::exact)
        .def_readonly("simplified", &RateResult::simplified)
        .def_readonly("log_exact", &RateResult::log_exact)
        .def_readonly("log_simplified", &RateResult::log_simplified);

    m.def("rate", &rate, py::arg("tau"), py::arg("q_list"), py::arg("q_ps"));

    py::class_<MonteCarloResult>(m, "MonteCarloResult")
        .def_readonly("mean_time", &MonteCarloResult::mean_time)
        .def_readonly("std_error", &MonteCarloResult::std_error)
        .def_readonly("rate", &MonteCarloResult::rate);

    m.def("rate_monte_carlo", &rate_monte_carlo, py::arg("tau"), py::arg("q_list"),
          py::arg("q_ps"), py::arg("trials"), py::arg("seed"));

    // ------------------------------------------------------------ analytic

    py::class_<PerturbativeInputs>(m, "PerturbativeInputs")
        .def(py::init<>())
        .def_readwrite("L_over_L0", &PerturbativeInputs::L_over_L0)
        .def_readwrite("p_gen", &PerturbativeInputs::p_gen)
        .def_readwrite("p_con", &PerturbativeInputs::p_con)
        .def_readwrite("c1", &PerturbativeInputs::c1)
        .def_readwrite("c2_mag", &PerturbativeInputs::c2_mag)
        .def_readwrite("c3", &PerturbativeInputs::c3)
        .def_readwrite("n_dc", &PerturbativeInputs::n_dc)
        .def_readwrite("r", &PerturbativeInputs::r)
        .def_readwrite("detector", &PerturbativeInputs::detector)
        .def("validate", &PerturbativeInputs::validate);

    py::class_<PerturbativeS>(m, "PerturbativeS")
        .def_readonly("S", &PerturbativeS::S)
        .def_readonly("deficit", &PerturbativeS::deficit)
        .def_readonly("valid", &PerturbativeS::valid);

    m.def("s_memory_darkcount", &s_memory_darkcount, py::arg("inputs"));
    m.def("s_finite_squeezing", &s_finite_squeezing, py::arg("inputs"));
    m.def("s_generation_darkcount", &s_generation_darkcount, py::arg("inputs"));

    py::class_<FGPair>(m, "FGPair")
        .def(py::init<>())
        .def_readwrite("f", &FGPair::f)
        .def_readwrite("g", &FGPair::g);

    m.def("f_g_solution", &f_g_solution, py::arg("n"));
    m.def("f_g_recurrence", &f_g_recurrence, py::arg("fg"));
    m.def("s_exact_c1", &s_exact_c1, py::arg("f"), py::arg("g"), py::arg("c1"));

    m.def("max_distance", &max_distance, py::arg("which"), py::arg("inputs"));

    py::class_<CrossTermReport>(m, "CrossTermReport")
        .def_readonly("dominant", &CrossTermReport::dominant)
        .def_readonly("ratio", &CrossTermReport::ratio);

    m.def("cross_term_dominance", &cross_term_dominance, py::arg("n_dc"), py::arg("r"));

    m.def("dilog", &dilog, py::arg("x"));
    m.def("eta_solution", &eta_solution, py::arg("n"), py::arg("p_con"));
    m.def("connection_success", &connection_success, py::arg("eta"), py::arg("p_con"));
    m.def("log_eta_product", &log_eta_product, py::arg("n"), py::arg("p_con"));
    m.def("log_eta_product_estimate", &log_eta_product_estimate, py::arg("n"),
          py::arg("p_con"));
    m.def("rate_closed_form", &rate_closed_form, py::arg("r"), py::arg("p_gen"),
          py::arg("p_con"), py::arg("L_over_L0"), py::arg("detector"));
    m.def("log_rate_closed_form", &log_rate_closed_form, py::arg("r"), py::arg("p_gen"),
          py::arg("p_con"), py::arg("L_over_L0"), py::arg("detector"));
}
