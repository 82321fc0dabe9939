#pragma once

#include "fbflow/report.hpp"

namespace fbflow {

enum class IterMethod { TsengFbf, ProxGrad };

struct IterSpec {
    IterMethod method = IterMethod::TsengFbf;
    /// Relaxation weight in (0, 1]; 1 recovers the classical FBF step.
    double relaxation = 1.0;
    double lambda = 0.0;
    long max_iters = 500;
    double tol = 1e-8;
    Vector x0;
};

struct IterationRun {
    /// Iterate history; times hold the iteration index.
    TrajectoryRecord record;
    RunReport report;
};

/// Discrete solvers.
///   TsengFbf: y_n = prox_{lambda h}(x_n - lambda T x_n),
///             x_{n+1} = x_n + relaxation * (y_n - x_n + lambda (T x_n - T y_n)),
///             stops when ||x_n - y_n|| <= tol.
///   ProxGrad: x_{n+1} = prox_{lambda h}(x_n - lambda T x_n),
///             stops when ||x_{n+1} - x_n|| <= tol.
IterationRun iterate(const MviProblem& p, const IterSpec& spec);

/// sum_i log(1 + exp(-a_i <b_i, x>)) + eta ||x||_1, evaluated stably.
/// Throws std::invalid_argument unless the problem pairs a logistic-gradient
/// operator with a scaled-l1 prox.
double loss_l1_logistic(const MviProblem& p, const Vector& x);

}  // namespace fbflow
