#include "fbflow/dynamics.hpp"

#include "fbflow/analysis.hpp"
#include "fbflow/solver.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace fbflow {

namespace {

bool is_l1_logistic(const MviProblem& p) {
    return std::holds_alternative<LogisticGradientOperator>(p.op) &&
           std::holds_alternative<ScaledL1>(p.prox_spec);
}

Vector flow_rhs(const MviProblem& p, const FlowSpec& flow, const Vector& x) {
    if (flow.system == FlowSystem::Fbf) {
        return rhs_fbf(p, x, flow.lambda).dx;
    }
    return rhs_proxgrad(p, x, flow.lambda, flow.delta);
}

}  // namespace

FbfDirection rhs_fbf(const MviProblem& p, const Vector& x, double lambda) {
    const Vector tx = eval_operator(p.op, x);
    Vector y = prox(p.prox_spec, x - lambda * tx, lambda);
    Vector dx = y - x + lambda * (tx - eval_operator(p.op, y));
    return {std::move(dx), std::move(y)};
}

Vector rhs_proxgrad(const MviProblem& p, const Vector& x, double lambda, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("rhs_proxgrad: delta must be positive");
    const Vector y = prox(p.prox_spec, x - lambda * eval_operator(p.op, x), lambda);
    return -delta * (x - y);
}

void validate_flow(const MviProblem& p, const FlowSpec& flow) {
    if (!(flow.lambda > 0.0)) throw std::invalid_argument("flow: lambda must be positive");
    if (!(flow.dt > 0.0)) throw std::invalid_argument("flow: dt must be positive");
    if (!(flow.dt <= flow.t_end)) throw std::invalid_argument("flow: requires dt <= t_end");
    if (flow.record_stride < 1) throw std::invalid_argument("flow: record_stride must be >= 1");
    if (flow.x0.size() != p.dim) throw std::invalid_argument("flow: x0 has wrong dimension");
    if (flow.system == FlowSystem::ProxGradFlow && !(flow.delta > 0.0)) {
        throw std::invalid_argument("flow: delta must be positive");
    }
    if (flow.system == FlowSystem::Fbf && !flow.allow_invalid_lambda) {
        const double beta = effective_beta(p);
        if (!(flow.lambda * (1.0 + beta * beta) < 1.0)) {
            throw std::invalid_argument(
                "flow: lambda * (1 + beta^2) must be below 1 for the FBF system "
                "(set allow_invalid_lambda to override)");
        }
    }
}

TrajectoryRecord integrate(const MviProblem& p, const FlowSpec& flow, double stop_tol) {
    validate_flow(p, flow);
    if (stop_tol < 0.0) throw std::invalid_argument("integrate: stop_tol must be nonnegative");

    const long total_steps = std::max<long>(1, std::lround(std::ceil(flow.t_end / flow.dt - 1e-9)));
    const bool track_lyapunov = p.known_solution.has_value();
    const bool track_loss = is_l1_logistic(p);

    TrajectoryRecord rec;
    rec.dt = flow.dt;
    if (track_lyapunov) rec.lyapunov.emplace();
    if (track_loss) rec.loss.emplace();

    const auto record_state = [&](long k, const Vector& x, const Vector& y, double residual) {
        rec.times.push_back(static_cast<double>(k) * flow.dt);
        rec.xs.push_back(x);
        rec.ys.push_back(y);
        rec.residuals.push_back(residual);
        if (track_lyapunov) rec.lyapunov->push_back((x - *p.known_solution).squaredNorm());
        if (track_loss) rec.loss->push_back(loss_l1_logistic(p, x));
    };

    Vector x = flow.x0;
    for (long k = 0;; ++k) {
        if (!x.allFinite()) {
            rec.stop_reason = StopReason::Divergence;
            rec.steps = k;
            break;
        }
        Vector y;
        Vector dx;
        if (flow.system == FlowSystem::Fbf) {
            auto dir = rhs_fbf(p, x, flow.lambda);
            dx = std::move(dir.dx);
            y = std::move(dir.y);
        } else {
            y = prox(p.prox_spec, x - flow.lambda * eval_operator(p.op, x), flow.lambda);
            dx = -flow.delta * (x - y);
        }
        if (!y.allFinite() || !dx.allFinite()) {
            rec.stop_reason = StopReason::Divergence;
            rec.steps = k;
            break;
        }
        const double residual = (x - y).norm();
        const bool stopping = residual <= stop_tol || k == total_steps;
        if (k % flow.record_stride == 0 || stopping) record_state(k, x, y, residual);
        if (residual <= stop_tol) {
            rec.stop_reason = StopReason::Tolerance;
            rec.steps = k;
            break;
        }
        if (k == total_steps) {
            rec.stop_reason = StopReason::Horizon;
            rec.steps = total_steps;
            break;
        }
        if (flow.scheme == Scheme::Euler) {
            x = x + flow.dt * dx;
        } else {
            const Vector k1 = dx;
            const Vector k2 = flow_rhs(p, flow, x + (0.5 * flow.dt) * k1);
            const Vector k3 = flow_rhs(p, flow, x + (0.5 * flow.dt) * k2);
            const Vector k4 = flow_rhs(p, flow, x + flow.dt * k3);
            x = x + (flow.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    return rec;
}

bool euler_equiv_check(const MviProblem& p, double lambda, long steps, const Vector& x0) {
    if (steps < 1) throw std::invalid_argument("euler_equiv_check: steps must be >= 1");
    FlowSpec flow;
    flow.system = FlowSystem::Fbf;
    flow.lambda = lambda;
    flow.dt = 1.0;
    flow.t_end = static_cast<double>(steps);
    flow.x0 = x0;
    flow.record_stride = 1;
    flow.scheme = Scheme::Euler;
    flow.allow_invalid_lambda = true;
    const TrajectoryRecord euler = integrate(p, flow, 0.0);

    IterSpec spec;
    spec.method = IterMethod::TsengFbf;
    spec.relaxation = 1.0;
    spec.lambda = lambda;
    spec.max_iters = steps;
    spec.tol = 0.0;
    spec.x0 = x0;
    const TrajectoryRecord tseng = iterate(p, spec).record;

    if (euler.size() != tseng.size()) return false;
    for (std::size_t k = 0; k < euler.size(); ++k) {
        const Vector& a = euler.xs[k];
        const Vector& b = tseng.xs[k];
        if (a.size() != b.size()) return false;
        if (std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) != 0) return false;
    }
    return true;
}

}  // namespace fbflow
