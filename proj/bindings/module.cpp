#include "fbflow/solver.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

namespace py = pybind11;
using namespace fbflow;

namespace {

Matrix stack_states(const std::vector<Vector>& states) {
    if (states.empty()) return Matrix(0, 0);
    Matrix out(static_cast<Eigen::Index>(states.size()), states.front().size());
    for (std::size_t k = 0; k < states.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = states[k];
    return out;
}

Scheme parse_scheme(const std::string& name) {
    if (name == "euler") return Scheme::Euler;
    if (name == "rk4") return Scheme::Rk4;
    throw std::invalid_argument("unknown scheme '" + name + "' (euler|rk4)");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Forward-backward-forward dynamical-system toolkit for mixed variational inequalities";

    py::register_exception<OracleError>(m, "OracleError");
    py::register_exception<SamplingError>(m, "SamplingError");

    py::class_<QuadraticOnInterval>(m, "QuadraticOnInterval")
        .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
        .def_readonly("lo", &QuadraticOnInterval::lo)
        .def_readonly("hi", &QuadraticOnInterval::hi);
    py::class_<IndicatorBoxHyperplane>(m, "IndicatorBoxHyperplane")
        .def(py::init<double, double, double>(), py::arg("lo"), py::arg("hi"),
             py::arg("target_sum"))
        .def_readonly("lo", &IndicatorBoxHyperplane::lo)
        .def_readonly("hi", &IndicatorBoxHyperplane::hi)
        .def_readonly("target_sum", &IndicatorBoxHyperplane::target_sum);
    py::class_<ScaledL1>(m, "ScaledL1")
        .def(py::init<double>(), py::arg("eta"))
        .def_readonly("eta", &ScaledL1::eta);
    py::class_<IndicatorInterval>(m, "IndicatorInterval")
        .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
        .def_readonly("lo", &IndicatorInterval::lo)
        .def_readonly("hi", &IndicatorInterval::hi);
    py::class_<ZeroProx>(m, "ZeroProx").def(py::init<>());

    py::class_<MviProblem>(m, "MviProblem")
        .def_readonly("dim", &MviProblem::dim)
        .def_readonly("id", &MviProblem::id)
        .def_readonly("known_solution", &MviProblem::known_solution)
        .def_readonly("lipschitz_beta", &MviProblem::lipschitz_beta)
        .def_readonly("strong_pseudo_mu", &MviProblem::strong_pseudo_mu)
        .def_readonly("default_x0", &MviProblem::default_x0)
        .def("__repr__",
             [](const MviProblem& p) { return "<MviProblem '" + p.id + "' dim=" + std::to_string(p.dim) + ">"; });

    py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
        .def_property_readonly("times",
                               [](const TrajectoryRecord& r) { return r.times; })
        .def_property_readonly("xs", [](const TrajectoryRecord& r) { return stack_states(r.xs); })
        .def_property_readonly("ys", [](const TrajectoryRecord& r) { return stack_states(r.ys); })
        .def_property_readonly("residuals",
                               [](const TrajectoryRecord& r) { return r.residuals; })
        .def_readonly("lyapunov", &TrajectoryRecord::lyapunov)
        .def_readonly("loss", &TrajectoryRecord::loss)
        .def_readonly("dt", &TrajectoryRecord::dt)
        .def_readonly("steps", &TrajectoryRecord::steps)
        .def_property_readonly(
            "stop_reason",
            [](const TrajectoryRecord& r) { return std::string(to_string(r.stop_reason)); })
        .def("__len__", &TrajectoryRecord::size);

    py::class_<StabilityCertificate>(m, "StabilityCertificate")
        .def_readonly("beta", &StabilityCertificate::beta)
        .def_readonly("mu", &StabilityCertificate::mu)
        .def_readonly("lambda_", &StabilityCertificate::lambda)
        .def_readonly("alpha", &StabilityCertificate::alpha)
        .def_readonly("lambda_valid", &StabilityCertificate::lambda_valid);

    py::class_<MonotonicityWitness>(m, "MonotonicityWitness")
        .def_readonly("definition", &MonotonicityWitness::definition)
        .def_readonly("u", &MonotonicityWitness::u)
        .def_readonly("v", &MonotonicityWitness::v)
        .def_readonly("antecedent", &MonotonicityWitness::antecedent)
        .def_readonly("value", &MonotonicityWitness::value);

    py::class_<MonotonicityVerdict>(m, "MonotonicityVerdict")
        .def_readonly("monotone", &MonotonicityVerdict::monotone)
        .def_readonly("pseudomonotone", &MonotonicityVerdict::pseudomonotone)
        .def_readonly("h_pseudomonotone", &MonotonicityVerdict::h_pseudomonotone)
        .def_readonly("h_strongly_pseudomonotone", &MonotonicityVerdict::h_strongly_pseudomonotone)
        .def_readonly("witnesses", &MonotonicityVerdict::witnesses)
        .def_readonly("mu_estimate", &MonotonicityVerdict::mu_estimate)
        .def_readonly("samples_used", &MonotonicityVerdict::samples_used);

    py::class_<MonitorVerdict>(m, "MonitorVerdict")
        .def_readonly("pass_", &MonitorVerdict::pass)
        .def_readonly("margin", &MonitorVerdict::margin);

    py::class_<DecayVerdict>(m, "DecayVerdict")
        .def_readonly("holds", &DecayVerdict::holds)
        .def_readonly("violated_step", &DecayVerdict::violated_step)
        .def_readonly("margin", &DecayVerdict::margin)
        .def_readonly("fitted_rate", &DecayVerdict::fitted_rate);

    py::class_<RunReport>(m, "RunReport")
        .def_readonly("problem_id", &RunReport::problem_id)
        .def_readonly("method", &RunReport::method)
        .def_readonly("lambda_", &RunReport::lambda)
        .def_readonly("tol", &RunReport::tol)
        .def_readonly("final_residual", &RunReport::final_residual)
        .def_readonly("iterations_or_steps", &RunReport::iterations_or_steps)
        .def_property_readonly(
            "stop_reason", [](const RunReport& r) { return std::string(to_string(r.stop_reason)); })
        .def_readonly("wall_time_ms", &RunReport::wall_time_ms);

    py::class_<IterationRun>(m, "IterationRun")
        .def_readonly("record", &IterationRun::record)
        .def_readonly("report", &IterationRun::report);

    m.def(
        "build_example",
        [](const std::string& which, std::uint64_t seed) {
            return build_example(parse_example(which), seed);
        },
        py::arg("which"), py::arg("seed") = 0, "Built-in problems: ex1, ex2, ex3.");

    m.def("eval_operator",
          [](const MviProblem& p, const Vector& x) { return eval_operator(p.op, x); },
          py::arg("problem"), py::arg("x"));

    m.def(
        "fbf_residual",
        [](const MviProblem& p, const Vector& x, double lam) {
            return fbf_residual(p, x, lam).natural_residual;
        },
        py::arg("problem"), py::arg("x"), py::arg("lam"),
        "Natural residual ||x - prox(x - lam T x)||.");

    m.def("prox", &prox, py::arg("spec"), py::arg("z"), py::arg("lam"));
    m.def("prox_oracle", &prox_oracle, py::arg("spec"), py::arg("z"), py::arg("lam"),
          py::arg("resolution") = 1e-6);
    m.def("h_value", &h_value, py::arg("spec"), py::arg("x"));

    m.def(
        "integrate",
        [](const MviProblem& p, double lam, double dt, double t_end, const Vector& x0,
           const std::string& scheme, double stop_tol, int stride, bool proxgrad_flow, double delta,
           bool allow_invalid_lambda) {
            FlowSpec flow;
            flow.system = proxgrad_flow ? FlowSystem::ProxGradFlow : FlowSystem::Fbf;
            flow.lambda = lam;
            flow.dt = dt;
            flow.t_end = t_end;
            flow.x0 = x0;
            flow.scheme = parse_scheme(scheme);
            flow.record_stride = stride;
            flow.delta = delta;
            flow.allow_invalid_lambda = allow_invalid_lambda;
            return integrate(p, flow, stop_tol);
        },
        py::arg("problem"), py::arg("lam"), py::arg("dt"), py::arg("t_end"), py::arg("x0"),
        py::arg("scheme") = "euler", py::arg("stop_tol") = 1e-8, py::arg("stride") = 1,
        py::arg("proxgrad_flow") = false, py::arg("delta") = 1.0,
        py::arg("allow_invalid_lambda") = false);

    m.def(
        "iterate",
        [](const MviProblem& p, double lam, const Vector& x0, const std::string& method,
           double relaxation, long max_iters, double tol) {
            IterSpec spec;
            if (method == "tseng") {
                spec.method = IterMethod::TsengFbf;
            } else if (method == "proxgrad") {
                spec.method = IterMethod::ProxGrad;
            } else {
                throw std::invalid_argument("unknown method '" + method + "' (tseng|proxgrad)");
            }
            spec.lambda = lam;
            spec.x0 = x0;
            spec.relaxation = relaxation;
            spec.max_iters = max_iters;
            spec.tol = tol;
            return iterate(p, spec);
        },
        py::arg("problem"), py::arg("lam"), py::arg("x0"), py::arg("method") = "tseng",
        py::arg("relaxation") = 1.0, py::arg("max_iters") = 500, py::arg("tol") = 1e-8);

    m.def("loss_l1_logistic", &loss_l1_logistic, py::arg("problem"), py::arg("x"));

    m.def("euler_equiv_check", &euler_equiv_check, py::arg("problem"), py::arg("lam"),
          py::arg("steps"), py::arg("x0"));

    m.def(
        "estimate_lipschitz",
        [](const MviProblem& p, double lo, double hi, long samples, std::uint64_t seed) {
            return estimate_lipschitz(p.op, p.dim, SamplingBox{lo, hi}, samples, seed);
        },
        py::arg("problem"), py::arg("lo"), py::arg("hi"), py::arg("samples") = 20000,
        py::arg("seed") = 0);

    m.def("lipschitz_upper_bound",
          [](const MviProblem& p) { return lipschitz_upper_bound(p.op); }, py::arg("problem"));

    m.def(
        "classify_monotonicity",
        [](const MviProblem& p, double lo, double hi, long samples, std::uint64_t seed) {
            return classify_monotonicity(p, SamplingBox{lo, hi}, samples, seed);
        },
        py::arg("problem"), py::arg("lo"), py::arg("hi"), py::arg("samples") = 20000,
        py::arg("seed") = 0);

    m.def("make_certificate", &make_certificate, py::arg("beta"), py::arg("mu"), py::arg("lam"));
    m.def("verify_decay", &verify_decay, py::arg("record"), py::arg("certificate"));
    m.def(
        "verify_trajectory_inequalities",
        [](const MviProblem& p, const TrajectoryRecord& rec, double lam, double beta) {
            std::map<std::string, std::pair<bool, double>> out;
            for (const auto& [name, v] : verify_trajectory_inequalities(p, rec, lam, beta)) {
                out[name] = {v.pass, v.margin};
            }
            return out;
        },
        py::arg("problem"), py::arg("record"), py::arg("lam"), py::arg("beta"),
        "Maps inequality name to (pass, margin).");
    m.def("effective_beta", &effective_beta, py::arg("problem"), py::arg("seed") = 0);
}
