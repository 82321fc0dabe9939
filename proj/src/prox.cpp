#include "fbflow/prox.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fbflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_inputs(const Vector& z, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("prox: lambda must be positive");
    if (!z.allFinite()) throw std::invalid_argument("prox: input must be finite");
}

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

/// Scalar multiplier tau with sum(clamp(z - tau, lo, hi)) = target. The map
/// is continuous and nonincreasing in tau, so bisection over
/// [min(z) - hi, max(z) - lo] always brackets a root.
double solve_shift(const Vector& z, double lo, double hi, double target) {
    double a = z.minCoeff() - hi;
    double b = z.maxCoeff() - lo;
    const auto shifted_sum = [&](double tau) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < z.size(); ++i) s += clamp(z[i] - tau, lo, hi);
        return s;
    };
    double tau = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        tau = 0.5 * (a + b);
        const double s = shifted_sum(tau);
        if (std::abs(s - target) < 1e-12) return tau;
        if (s > target) {
            a = tau;
        } else {
            b = tau;
        }
    }
    assert(std::abs(shifted_sum(tau) - target) < 1e-12 && "shift bisection failed to converge");
    if (!(std::abs(shifted_sum(tau) - target) < 1e-9)) {
        throw std::logic_error("prox: hyperplane shift bisection did not converge");
    }
    return tau;
}

double soft_threshold(double z, double t) {
    const double m = std::abs(z) - t;
    return m > 0.0 ? (z < 0.0 ? -m : m) : 0.0;
}

/// Minimizes phi over [a, b] by repeated grid refinement. Valid for
/// unimodal phi: the continuous minimizer always lies within one grid cell
/// of the sampled one.
template <typename Phi>
double refine_grid_min(Phi&& phi, double a, double b, double resolution) {
    constexpr int kPoints = 1001;
    double best = a;
    for (int pass = 0; pass < 24; ++pass) {
        const double step = (b - a) / (kPoints - 1);
        double best_val = kInf;
        for (int i = 0; i < kPoints; ++i) {
            const double v = a + step * i;
            const double f = phi(v);
            if (f < best_val) {
                best_val = f;
                best = v;
            }
        }
        if (step <= 0.5 * resolution) return best;
        a = best - step;
        b = best + step;
    }
    return best;
}

Vector dykstra_box_hyperplane(const IndicatorBoxHyperplane& s, const Vector& z, double tol) {
    const auto n = z.size();
    Vector x = z;
    Vector p = Vector::Zero(n);
    Vector q = Vector::Zero(n);
    for (int it = 0; it < 100000; ++it) {
        const Vector x_prev = x;
        Vector y = (x + p).cwiseMax(s.lo).cwiseMin(s.hi);
        p = x + p - y;
        const Vector w = y + q;
        x = w - Vector::Constant(n, (w.sum() - s.target_sum) / static_cast<double>(n));
        q = w - x;
        if ((x - x_prev).norm() <= tol && std::abs(x.sum() - s.target_sum) <= 1e-9) {
            return x;
        }
    }
    throw OracleError("prox_oracle: Dykstra projection did not converge");
}

}  // namespace

void validate_prox(const ProxSpec& spec, Eigen::Index dim) {
    if (dim <= 0) throw std::invalid_argument("prox spec: dimension must be positive");
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, QuadraticOnInterval> ||
                          std::is_same_v<S, IndicatorInterval>) {
                if (!(s.lo < s.hi)) throw std::invalid_argument("prox spec: requires lo < hi");
            } else if constexpr (std::is_same_v<S, IndicatorBoxHyperplane>) {
                if (!(s.lo < s.hi)) throw std::invalid_argument("prox spec: requires lo < hi");
                const double n = static_cast<double>(dim);
                if (!(n * s.lo <= s.target_sum && s.target_sum <= n * s.hi)) {
                    throw std::invalid_argument("prox spec: target_sum outside feasible range");
                }
            } else if constexpr (std::is_same_v<S, ScaledL1>) {
                if (!(s.eta > 0.0)) throw std::invalid_argument("prox spec: eta must be positive");
            }
        },
        spec);
}

Vector prox(const ProxSpec& spec, const Vector& z, double lambda) {
    check_inputs(z, lambda);
    return std::visit(
        [&](const auto& s) -> Vector {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, QuadraticOnInterval>) {
                return (z / (1.0 + 2.0 * lambda)).cwiseMax(s.lo).cwiseMin(s.hi);
            } else if constexpr (std::is_same_v<S, IndicatorBoxHyperplane>) {
                validate_prox(spec, z.size());
                const double tau = solve_shift(z, s.lo, s.hi, s.target_sum);
                return (z.array() - tau).cwiseMax(s.lo).cwiseMin(s.hi).matrix();
            } else if constexpr (std::is_same_v<S, ScaledL1>) {
                Vector out(z.size());
                const double t = lambda * s.eta;
                for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = soft_threshold(z[i], t);
                return out;
            } else if constexpr (std::is_same_v<S, IndicatorInterval>) {
                return z.cwiseMax(s.lo).cwiseMin(s.hi);
            } else {
                return z;
            }
        },
        spec);
}

Vector prox_oracle(const ProxSpec& spec, const Vector& z, double lambda, double resolution) {
    check_inputs(z, lambda);
    if (!(resolution > 0.0)) throw std::invalid_argument("prox_oracle: resolution must be positive");
    return std::visit(
        [&](const auto& s) -> Vector {
            using S = std::decay_t<decltype(s)>;
            Vector out(z.size());
            if constexpr (std::is_same_v<S, QuadraticOnInterval>) {
                for (Eigen::Index i = 0; i < z.size(); ++i) {
                    const double zi = z[i];
                    out[i] = refine_grid_min(
                        [&](double v) { return lambda * v * v + 0.5 * (zi - v) * (zi - v); }, s.lo,
                        s.hi, resolution);
                }
            } else if constexpr (std::is_same_v<S, IndicatorBoxHyperplane>) {
                out = dykstra_box_hyperplane(s, z, std::min(1e-10, resolution * 1e-2));
            } else if constexpr (std::is_same_v<S, ScaledL1>) {
                for (Eigen::Index i = 0; i < z.size(); ++i) {
                    const double zi = z[i];
                    const double a = std::min(zi, 0.0) - 0.5;
                    const double b = std::max(zi, 0.0) + 0.5;
                    out[i] = refine_grid_min(
                        [&](double v) {
                            return lambda * s.eta * std::abs(v) + 0.5 * (zi - v) * (zi - v);
                        },
                        a, b, resolution);
                }
            } else if constexpr (std::is_same_v<S, IndicatorInterval>) {
                for (Eigen::Index i = 0; i < z.size(); ++i) {
                    const double zi = z[i];
                    out[i] = refine_grid_min([&](double v) { return 0.5 * (zi - v) * (zi - v); },
                                             s.lo, s.hi, resolution);
                }
            } else {
                for (Eigen::Index i = 0; i < z.size(); ++i) {
                    const double zi = z[i];
                    out[i] = refine_grid_min([&](double v) { return 0.5 * (zi - v) * (zi - v); },
                                             zi - 0.5, zi + 0.5, resolution);
                }
            }
            return out;
        },
        spec);
}

double h_value(const ProxSpec& spec, const Vector& x) {
    if (!domain_contains(spec, x)) return kInf;
    return std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, QuadraticOnInterval>) {
                return x.squaredNorm();
            } else if constexpr (std::is_same_v<S, ScaledL1>) {
                return s.eta * x.lpNorm<1>();
            } else {
                return 0.0;
            }
        },
        spec);
}

bool domain_contains(const ProxSpec& spec, const Vector& x, double tol) {
    return std::visit(
        [&](const auto& s) -> bool {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, QuadraticOnInterval> ||
                          std::is_same_v<S, IndicatorInterval>) {
                return (x.array() >= s.lo - tol).all() && (x.array() <= s.hi + tol).all();
            } else if constexpr (std::is_same_v<S, IndicatorBoxHyperplane>) {
                return (x.array() >= s.lo - tol).all() && (x.array() <= s.hi + tol).all() &&
                       std::abs(x.sum() - s.target_sum) <= tol;
            } else {
                return true;
            }
        },
        spec);
}

std::optional<std::pair<double, double>> domain_box(const ProxSpec& spec) {
    return std::visit(
        [&](const auto& s) -> std::optional<std::pair<double, double>> {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, QuadraticOnInterval> ||
                          std::is_same_v<S, IndicatorInterval> ||
                          std::is_same_v<S, IndicatorBoxHyperplane>) {
                return std::pair{s.lo, s.hi};
            } else {
                return std::nullopt;
            }
        },
        spec);
}

Vector sample_domain(const ProxSpec& spec, Eigen::Index dim, double lo, double hi, Rng& rng,
                     long* attempts) {
    const auto bounds = domain_box(spec);
    const double a = bounds ? std::max(lo, bounds->first) : lo;
    const double b = bounds ? std::min(hi, bounds->second) : hi;
    if (!(a < b)) throw SamplingError("sample_domain: empty sampling range");

    if (const auto* bh = std::get_if<IndicatorBoxHyperplane>(&spec)) {
        // Draw the first n-1 coordinates and solve the last one from the
        // hyperplane; reject when it leaves the box.
        for (int tries = 0; tries < 64; ++tries) {
            if (attempts) ++*attempts;
            Vector v(dim);
            double partial = 0.0;
            for (Eigen::Index i = 0; i + 1 < dim; ++i) {
                v[i] = rng.uniform(a, b);
                partial += v[i];
            }
            v[dim - 1] = bh->target_sum - partial;
            if (v[dim - 1] >= bh->lo && v[dim - 1] <= bh->hi) return v;
        }
        throw SamplingError("sample_domain: rejection sampling failed for box/hyperplane");
    }
    if (attempts) ++*attempts;
    return rng.uniform_vector(dim, a, b);
}

}  // namespace fbflow
