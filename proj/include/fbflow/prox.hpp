#pragma once

#include "fbflow/types.hpp"

#include <optional>
#include <utility>
#include <variant>

namespace fbflow {

/// h(u) = sum_i u_i^2 on [lo,hi]^n, +inf outside.
struct QuadraticOnInterval {
    double lo;
    double hi;
};

/// h = indicator of C = [lo,hi]^n intersected with {sum(x) = target_sum}.
struct IndicatorBoxHyperplane {
    double lo;
    double hi;
    double target_sum;
};

/// h(x) = eta * ||x||_1.
struct ScaledL1 {
    double eta;
};

/// h = indicator of [lo,hi]^n.
struct IndicatorInterval {
    double lo;
    double hi;
};

/// h = 0 everywhere; the prox is the identity.
struct ZeroProx {};

using ProxSpec =
    std::variant<QuadraticOnInterval, IndicatorBoxHyperplane, ScaledL1, IndicatorInterval, ZeroProx>;

/// Throws std::invalid_argument on inconsistent parameters (lo >= hi,
/// infeasible target_sum for the given dimension, eta <= 0).
void validate_prox(const ProxSpec& spec, Eigen::Index dim);

/// Unique minimizer of lambda*h(v) + 0.5*||z - v||^2, in closed form.
Vector prox(const ProxSpec& spec, const Vector& z, double lambda);

/// Independent approximation of the same minimizer, used to verify prox().
/// Separable variants are solved by per-coordinate refined grid search down
/// to `resolution`; the box/hyperplane intersection uses Dykstra's
/// alternating projections to 1e-8. Throws OracleError when the requested
/// accuracy cannot be reached.
Vector prox_oracle(const ProxSpec& spec, const Vector& z, double lambda, double resolution);

/// Value of h at x; +infinity outside dom h (membership tested to 1e-9).
double h_value(const ProxSpec& spec, const Vector& x);

/// True when x lies in dom h up to `tol`.
bool domain_contains(const ProxSpec& spec, const Vector& x, double tol = 1e-9);

/// Per-coordinate bounding interval of dom h, when dom h is bounded.
std::optional<std::pair<double, double>> domain_box(const ProxSpec& spec);

/// Draws a point of dom h inside [lo,hi]^n by rejection (with an exact
/// parametrization for the hyperplane case). `attempts`, when given,
/// accumulates the number of candidate draws so callers can enforce a
/// minimum hit rate. Throws SamplingError after 64 consecutive rejections.
Vector sample_domain(const ProxSpec& spec, Eigen::Index dim, double lo, double hi, Rng& rng,
                     long* attempts = nullptr);

}  // namespace fbflow
