#pragma once

#include "fbflow/problem.hpp"

#include <optional>
#include <vector>

namespace fbflow {

enum class FlowSystem { Fbf, ProxGradFlow };
enum class Scheme { Euler, Rk4 };

struct FlowSpec {
    FlowSystem system = FlowSystem::Fbf;
    double lambda = 0.0;
    double t_end = 0.0;
    double dt = 0.0;
    Vector x0;
    int record_stride = 1;
    Scheme scheme = Scheme::Euler;
    /// Speed factor of the prox-gradient flow (ignored by the FBF system).
    double delta = 1.0;
    /// Skip the lambda * (1 + beta^2) < 1 admissibility check.
    bool allow_invalid_lambda = false;
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<Vector> xs;
    std::vector<Vector> ys;
    std::vector<double> residuals;  // ||x - y|| per recorded state
    /// ||x - solution||^2 per recorded state, when the solution is known.
    std::optional<std::vector<double>> lyapunov;
    /// Objective value per recorded state (l1-logistic problems only).
    std::optional<std::vector<double>> loss;
    double dt = 0.0;
    StopReason stop_reason = StopReason::Horizon;
    /// Steps actually taken. On divergence this is the index of the first
    /// non-finite state.
    long steps = 0;

    [[nodiscard]] std::size_t size() const { return times.size(); }
};

struct FbfDirection {
    Vector dx;
    Vector y;
};

/// Right-hand side of the FBF system:
///   y = prox_{lambda h}(x - lambda T x),  dx = y - x + lambda (T x - T y).
FbfDirection rhs_fbf(const MviProblem& p, const Vector& x, double lambda);

/// Right-hand side of the prox-gradient flow: -delta (x - prox_{lambda h}(x - lambda T x)).
Vector rhs_proxgrad(const MviProblem& p, const Vector& x, double lambda, double delta);

/// Throws std::invalid_argument on malformed flows, including an
/// inadmissible FBF step size unless allow_invalid_lambda is set. When the
/// problem carries no Lipschitz modulus the check uses a sampled estimate
/// inflated by 5%.
void validate_flow(const MviProblem& p, const FlowSpec& flow);

/// Fixed-step integration (explicit Euler or classical RK4). Records every
/// record_stride-th state plus the final one; stops early once the natural
/// residual drops to stop_tol. Divergence (non-finite state) is reported via
/// stop_reason with the offending step index in `steps`.
TrajectoryRecord integrate(const MviProblem& p, const FlowSpec& flow, double stop_tol);

/// True when explicit Euler with dt = 1 on the FBF system reproduces the
/// discrete Tseng iteration with unit relaxation bit-for-bit.
bool euler_equiv_check(const MviProblem& p, double lambda, long steps, const Vector& x0);

}  // namespace fbflow
