#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace fbflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A verification oracle could not reach its requested accuracy.
struct OracleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rejection sampling found too few feasible points (hit rate below 10%).
struct SamplingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class StopReason { Tolerance, Horizon, Divergence };

[[nodiscard]] constexpr const char* to_string(StopReason r) noexcept {
    switch (r) {
        case StopReason::Tolerance: return "tolerance";
        case StopReason::Horizon: return "horizon";
        case StopReason::Divergence: return "divergence";
    }
    return "unknown";
}

/// Seeded uniform generator. mt19937_64 with a fixed 53-bit mapping so that
/// generated data sets are identical across platforms and standard-library
/// versions (std::uniform_real_distribution makes no such promise).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1).
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    /// -1.0 or +1.0 with equal probability.
    double sign() { return (eng_() & 1u) ? 1.0 : -1.0; }

    Vector uniform_vector(Eigen::Index n, double lo, double hi) {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
        return v;
    }

    /// Uniformly random direction (Gaussian components, normalized).
    Vector unit_vector(Eigen::Index n) {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            // Box-Muller on the fixed-mapping uniforms keeps this reproducible.
            double u1 = unit();
            while (u1 <= 0.0) u1 = unit();
            const double u2 = unit();
            v[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        }
        const double nrm = v.norm();
        return nrm > 0 ? Vector(v / nrm) : unit_vector(n);
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace fbflow
