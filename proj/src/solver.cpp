#include "fbflow/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <variant>

namespace fbflow {

namespace {

/// log(1 + exp(-m)) without overflow on either tail.
double logistic_term(double margin) {
    if (margin >= 0.0) return std::log1p(std::exp(-margin));
    return -margin + std::log1p(std::exp(margin));
}

}  // namespace

double loss_l1_logistic(const MviProblem& p, const Vector& x) {
    const auto* op = std::get_if<LogisticGradientOperator>(&p.op);
    const auto* reg = std::get_if<ScaledL1>(&p.prox_spec);
    if (op == nullptr || reg == nullptr) {
        throw std::invalid_argument(
            "loss_l1_logistic: problem must pair a logistic gradient with a scaled-l1 prox");
    }
    if (x.size() != p.dim) throw std::invalid_argument("loss_l1_logistic: dimension mismatch");
    const Vector margins = op->labels.cwiseProduct(op->features * x);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < margins.size(); ++i) loss += logistic_term(margins[i]);
    return loss + reg->eta * x.lpNorm<1>();
}

IterationRun iterate(const MviProblem& p, const IterSpec& spec) {
    if (!(spec.lambda > 0.0)) throw std::invalid_argument("iterate: lambda must be positive");
    if (!(spec.relaxation > 0.0 && spec.relaxation <= 1.0)) {
        throw std::invalid_argument("iterate: relaxation must lie in (0, 1]");
    }
    if (spec.max_iters < 1) throw std::invalid_argument("iterate: max_iters must be >= 1");
    if (spec.tol < 0.0) throw std::invalid_argument("iterate: tol must be nonnegative");
    if (spec.x0.size() != p.dim) throw std::invalid_argument("iterate: x0 has wrong dimension");

    const auto t_start = std::chrono::steady_clock::now();
    const bool track_lyapunov = p.known_solution.has_value();
    const bool track_loss = std::holds_alternative<LogisticGradientOperator>(p.op) &&
                            std::holds_alternative<ScaledL1>(p.prox_spec);

    TrajectoryRecord rec;
    rec.dt = 1.0;
    if (track_lyapunov) rec.lyapunov.emplace();
    if (track_loss) rec.loss.emplace();

    const auto record_state = [&](long n, const Vector& x, const Vector& y, double residual) {
        rec.times.push_back(static_cast<double>(n));
        rec.xs.push_back(x);
        rec.ys.push_back(y);
        rec.residuals.push_back(residual);
        if (track_lyapunov) rec.lyapunov->push_back((x - *p.known_solution).squaredNorm());
        if (track_loss) rec.loss->push_back(loss_l1_logistic(p, x));
    };

    Vector x = spec.x0;
    double final_residual = 0.0;
    for (long n = 0;; ++n) {
        if (!x.allFinite()) {
            rec.stop_reason = StopReason::Divergence;
            rec.steps = n;
            break;
        }
        Vector y;
        Vector dx;
        if (spec.method == IterMethod::TsengFbf) {
            auto dir = rhs_fbf(p, x, spec.lambda);
            dx = std::move(dir.dx);
            y = std::move(dir.y);
        } else {
            y = prox(p.prox_spec, x - spec.lambda * eval_operator(p.op, x), spec.lambda);
        }
        if (!y.allFinite() || (dx.size() != 0 && !dx.allFinite())) {
            rec.stop_reason = StopReason::Divergence;
            rec.steps = n;
            break;
        }
        // Both methods stop on the same quantity: for the prox-gradient
        // iteration ||x_{n+1} - x_n|| is exactly ||x_n - y_n||.
        const double residual = (x - y).norm();
        record_state(n, x, y, residual);
        final_residual = residual;
        if (residual <= spec.tol) {
            rec.stop_reason = StopReason::Tolerance;
            rec.steps = n;
            break;
        }
        if (n == spec.max_iters) {
            rec.stop_reason = StopReason::Horizon;
            rec.steps = spec.max_iters;
            break;
        }
        if (spec.method == IterMethod::TsengFbf) {
            x = x + spec.relaxation * dx;
        } else {
            x = y;
        }
    }
    const auto t_end = std::chrono::steady_clock::now();

    IterationRun run;
    run.report.problem_id = p.id;
    run.report.method = spec.method == IterMethod::TsengFbf ? "tseng-fbf" : "prox-grad";
    run.report.lambda = spec.lambda;
    run.report.dt = 1.0;
    run.report.t_end = static_cast<double>(spec.max_iters);
    run.report.tol = spec.tol;
    run.report.final_residual = final_residual;
    run.report.iterations_or_steps = rec.steps;
    run.report.stop_reason = rec.stop_reason;
    run.report.wall_time_ms =
        std::chrono::duration<double, std::milli>(t_end - t_start).count();
    run.record = std::move(rec);
    return run;
}

}  // namespace fbflow
