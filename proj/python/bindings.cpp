#include "fceq/averaged.hpp"
#include "fceq/ceq.hpp"
#include "fceq/cli.hpp"
#include "fceq/contact.hpp"
#include "fceq/diff.hpp"
#include "fceq/linalg.hpp"
#include "fceq/metrics.hpp"
#include "fceq/version.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>

namespace py = pybind11;
using namespace fceq;

namespace {

std::shared_ptr<FinslerMetric> build_from_json(const std::string& spec_json) {
    return build(metric_spec_from_json(json::parse(spec_json)));
}

std::string run_job(const std::string& command, const std::string& config_json) {
    JobConfig::Command cmd;
    if (command == "solve")
        cmd = JobConfig::Command::solve;
    else if (command == "analyze")
        cmd = JobConfig::Command::analyze;
    else if (command == "check")
        cmd = JobConfig::Command::check;
    else if (command == "synth")
        cmd = JobConfig::Command::synth;
    else
        throw Error(ErrorCode::CONFIG_INVALID, "unknown command '" + command + "'");
    return run(parse_job_config(config_json, cmd)).to_text();
}

}  // namespace

PYBIND11_MODULE(finsler_ceq, m) {
    m.doc() = "Pointwise solver for semi-symmetric compatible linear connections on "
              "Finsler manifolds";
    m.attr("__version__") = FCEQ_VERSION;

    py::register_exception<Error>(m, "FceqError");

    py::class_<TolerancePolicy>(m, "TolerancePolicy")
        .def(py::init<>())
        .def_readwrite("rank_rel_tol", &TolerancePolicy::rank_rel_tol)
        .def_readwrite("residual_tol", &TolerancePolicy::residual_tol)
        .def_readwrite("contact_tol", &TolerancePolicy::contact_tol);

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("n_sphere_samples", &SolverConfig::n_sphere_samples)
        .def_readwrite("seed", &SolverConfig::seed)
        .def_readwrite("tol", &SolverConfig::tol)
        .def_readwrite("eps_fraction", &SolverConfig::eps_fraction)
        .def_readwrite("max_eps_retries", &SolverConfig::max_eps_retries)
        .def_readwrite("threads", &SolverConfig::threads);

    py::class_<QuadratureSpec> quad(m, "QuadratureSpec");
    py::enum_<QuadratureSpec::Scheme>(quad, "Scheme")
        .value("angular", QuadratureSpec::Scheme::angular)
        .value("product_sphere", QuadratureSpec::Scheme::product_sphere)
        .value("monte_carlo", QuadratureSpec::Scheme::monte_carlo);
    quad.def(py::init<>())
        .def_readwrite("scheme", &QuadratureSpec::scheme)
        .def_readwrite("n_nodes", &QuadratureSpec::n_nodes)
        .def_readwrite("seed", &QuadratureSpec::seed)
        .def_readwrite("threads", &QuadratureSpec::threads);

    py::class_<FinslerMetric, std::shared_ptr<FinslerMetric>>(m, "Metric")
        .def_property_readonly("dim", &FinslerMetric::dim)
        .def_property_readonly("description", &FinslerMetric::description)
        .def("__call__",
             [](const FinslerMetric& self, const Vec& x, const Vec& y) {
                 return self.eval(x, y);
             })
        .def("__repr__", [](const FinslerMetric& self) {
            return "<Metric " + self.description() + ">";
        });

    py::class_<PointJet>(m, "PointJet")
        .def_readonly("x", &PointJet::x)
        .def_readonly("y", &PointJet::y)
        .def_readonly("f_value", &PointJet::f_value)
        .def_readonly("g_vec", &PointJet::g_vec)
        .def_readonly("h_vec", &PointJet::h_vec)
        .def_readonly("hess", &PointJet::hess);

    py::class_<FMatrix>(m, "FMatrix")
        .def_readonly("f", &FMatrix::f)
        .def_readonly("y", &FMatrix::y)
        .def_readonly("vert_scale", &FMatrix::vert_scale);

    py::class_<ContactClass>(m, "ContactClass")
        .def_readonly("vertical", &ContactClass::vertical)
        .def_readonly("horizontal", &ContactClass::horizontal);

    py::class_<PivotChoice>(m, "PivotChoice")
        .def_readonly("i", &PivotChoice::i)
        .def_readonly("j", &PivotChoice::j)
        .def_readonly("magnitude", &PivotChoice::magnitude);

    py::class_<VCeqSystem>(m, "VCeqSystem")
        .def_readonly("a", &VCeqSystem::a)
        .def_readonly("b", &VCeqSystem::b)
        .def_readonly("v", &VCeqSystem::v)
        .def_readonly("x", &VCeqSystem::x)
        .def_readonly("g", &VCeqSystem::g);

    py::class_<IntrinsicReport>(m, "IntrinsicReport")
        .def_readonly("pivot", &IntrinsicReport::pivot)
        .def_readonly("worst_triple", &IntrinsicReport::worst_triple)
        .def_readonly("worst_residual", &IntrinsicReport::worst_residual)
        .def_readonly("n_checked", &IntrinsicReport::n_checked);

    py::enum_<SolveStatus>(m, "SolveStatus")
        .value("UNIQUE", SolveStatus::UNIQUE)
        .value("RIEMANNIAN_INDETERMINATE", SolveStatus::RIEMANNIAN_INDETERMINATE)
        .value("INSOLVABLE", SolveStatus::INSOLVABLE)
        .value("DEGENERATE_SAMPLING", SolveStatus::DEGENERATE_SAMPLING);

    py::class_<SolveOutcome>(m, "SolveOutcome")
        .def_readonly("status", &SolveOutcome::status)
        .def_readonly("rho", &SolveOutcome::rho)
        .def_readonly("max_ceq_residual", &SolveOutcome::max_ceq_residual)
        .def_readonly("intrinsic", &SolveOutcome::intrinsic)
        .def_readonly("nullspace_dim", &SolveOutcome::nullspace_dim)
        .def_readonly("samples_used", &SolveOutcome::samples_used)
        .def_readonly("epsilon_used", &SolveOutcome::epsilon_used)
        .def_readonly("base_v", &SolveOutcome::base_v)
        .def_readonly("pivot", &SolveOutcome::pivot);

    py::class_<AveragedMetric>(m, "AveragedMetric")
        .def_readonly("gamma", &AveragedMetric::gamma)
        .def_readonly("error_estimate", &AveragedMetric::error_estimate);

    // metrics
    m.def("build_metric", &build_from_json, py::arg("spec_json"),
          "Build a metric from a JSON MetricSpec document");
    m.def("make_germ", &make_germ, py::arg("base_norm"), py::arg("rho_star"), py::arg("p"),
          py::arg("incompatibility") = 0.0);
    m.def("make_lobed_norm", &make_lobed_norm, py::arg("amplitude") = 0.5);
    m.def("strong_convexity_probe", &strong_convexity_probe, py::arg("metric"), py::arg("x"),
          py::arg("n_samples"), py::arg("seed"));

    // derivatives
    m.def("jet_at", &jet_at, py::arg("metric"), py::arg("x"), py::arg("y"),
          py::arg("want_hessian") = false);
    m.def("fd_crosscheck", &fd_crosscheck, py::arg("metric"), py::arg("x"), py::arg("y"),
          py::arg("step") = 1e-5);

    // contact structure
    m.def("f_matrix", &f_matrix, py::arg("jet"));
    m.def("f_vector", &f_vector, py::arg("fm"), py::arg("i"));
    m.def("classify", &classify, py::arg("jet"), py::arg("tol") = TolerancePolicy{});
    m.def("pick_pivot", &pick_pivot, py::arg("fm"), py::arg("tol") = TolerancePolicy{});
    m.def("reconstruct_check", &reconstruct_check, py::arg("fm"), py::arg("pivot"));
    m.def("span_rank", &span_rank, py::arg("fm"), py::arg("tol") = TolerancePolicy{});

    // linear algebra
    m.def("rank", &rank, py::arg("m"), py::arg("tol") = TolerancePolicy{});
    m.def("solve_least_squares", &solve_least_squares, py::arg("a"), py::arg("b"),
          py::arg("tol") = TolerancePolicy{});
    m.def("is_shift_regular", &is_shift_regular, py::arg("v"), py::arg("eps"),
          py::arg("tol") = TolerancePolicy{});
    m.def("shift_inverse", &shift_inverse, py::arg("v"), py::arg("eps"),
          py::arg("tol") = TolerancePolicy{});

    // compatibility system
    m.def("assemble", &assemble, py::arg("metric"), py::arg("x"), py::arg("v"));
    m.def("ceq_residual", &ceq_residual, py::arg("system"), py::arg("rho"));
    m.def("intrinsic_check",
          py::overload_cast<const FinslerMetric&, const Vec&, const Vec&,
                            const TolerancePolicy&>(&intrinsic_check),
          py::arg("metric"), py::arg("x"), py::arg("v"), py::arg("tol") = TolerancePolicy{});
    m.def("eliminated_solve", &eliminated_solve, py::arg("system"), py::arg("pivot"),
          py::arg("tol") = TolerancePolicy{});
    m.def("closed_form_rho", &closed_form_rho, py::arg("metric"), py::arg("x"), py::arg("v"),
          py::arg("pivot"), py::arg("eps"), py::arg("tol") = TolerancePolicy{});
    m.def("closed_form_rho_summation", &closed_form_rho_summation, py::arg("metric"),
          py::arg("x"), py::arg("v"), py::arg("pivot"), py::arg("eps"),
          py::arg("tol") = TolerancePolicy{});
    m.def("ls_oracle", &ls_oracle, py::arg("metric"), py::arg("x"), py::arg("config"));
    m.def("homogeneous_nullspace_dim", &homogeneous_nullspace_dim, py::arg("metric"),
          py::arg("x"), py::arg("config"));
    m.def("solve_at_point", &solve_at_point, py::arg("metric"), py::arg("p"),
          py::arg("config") = SolverConfig{});

    // averaged-metric diagnostic
    m.def("averaged_metric_at", &averaged_metric_at, py::arg("metric"), py::arg("p"),
          py::arg("quad"));
    m.def("normal_deviation", &normal_deviation, py::arg("gamma"));

    // batch jobs (same surface as the CLI)
    m.def("run_job", &run_job, py::arg("command"), py::arg("config_json"),
          "Run a solve/analyze/check/synth job; returns the JSON report");
}
