#pragma once

#include "fbflow/dynamics.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fbflow {

/// Exponential decay certificate for the FBF system:
///   alpha = 2 [1 - lambda (1 + beta^2)] (lambda mu / (1 + lambda (mu + beta)))^2.
struct StabilityCertificate {
    double beta = 0.0;
    double mu = 0.0;
    double lambda = 0.0;
    double alpha = 0.0;
    bool lambda_valid = false;  // lambda (1 + beta^2) < 1
};

/// Throws std::invalid_argument on nonpositive inputs.
StabilityCertificate make_certificate(double beta, double mu, double lambda);

/// Hyper-cube [lo, hi]^n used as a sampling domain.
struct SamplingBox {
    double lo;
    double hi;
};

/// Largest ratio ||T u - T v|| / ||u - v|| over sampled pairs -- a lower
/// bound on the Lipschitz modulus. Half the pairs are drawn box-to-box, half
/// as small local perturbations so steep regions are not missed. For affine
/// operators returns the exact spectral norm (power iteration, seed-free).
double estimate_lipschitz(const OperatorSpec& op, Eigen::Index dim, SamplingBox box, long samples,
                          std::uint64_t seed);

/// Closed-form global Lipschitz upper bound, when the variant admits one:
/// ||A|| for affine, ||M|| (1 + shift + 2/e) for the Gaussian-scaled matrix,
/// max eigenvalue of (1/4) B^T B for the logistic gradient.
double lipschitz_upper_bound(const OperatorSpec& op);

struct MonotonicityWitness {
    std::string definition;  // which class the pair violates
    Vector u;
    Vector v;
    /// Left-hand side of the implication, when the class has one.
    std::optional<double> antecedent;
    /// The violated quantity (negative beyond tolerance).
    double value = 0.0;
};

struct MonotonicityVerdict {
    bool monotone = false;
    bool pseudomonotone = false;
    bool h_pseudomonotone = false;
    bool h_strongly_pseudomonotone = false;
    std::vector<MonotonicityWitness> witnesses;
    /// Infimum of [<T v, v-u> + h(v) - h(u)] / ||u-v||^2 over sampled pairs
    /// whose antecedent holds; present only when strictly positive.
    std::optional<double> mu_estimate;
    long samples_used = 0;
};

/// Empirical falsification of the monotonicity definitions on sampled pairs.
/// The problem's probe pairs and the box corners are always checked first,
/// so canonical witnesses are found deterministically. h-classes draw their
/// pairs from dom h; throws SamplingError when the feasible hit rate falls
/// below 10%.
MonotonicityVerdict classify_monotonicity(const MviProblem& p, SamplingBox box, long samples,
                                          std::uint64_t seed);

/// Smallest eigenvalue of a symmetric 3x3 matrix via the characteristic
/// polynomial (closed form).
double lambda_min_symmetric3(const Matrix& m);

struct MonitorVerdict {
    bool pass = false;
    /// Worst violation margin (<= tolerance when passing).
    double margin = 0.0;
};

/// Re-checks the trajectory inequalities on a stored record:
///  - "velocity_bound":           ||dx|| <= (1 + lambda beta) ||x - y||
///  - "lyapunov_nonincrease":     ||x - xbar||^2 nonincreasing up to
///                                10 dt^2 (1 + lambda beta)^2 per step
///  - "residual_square_integral": trapezoid of ||x - y||^2 bounded by
///                                ||x0 - xbar||^2 / (2 [1 - lambda (1 + beta^2)])
/// The last two need a known solution; the integral bound also needs an
/// admissible lambda and is omitted otherwise.
std::map<std::string, MonitorVerdict> verify_trajectory_inequalities(const MviProblem& p,
                                                                     const TrajectoryRecord& rec,
                                                                     double lambda, double beta);

struct DecayVerdict {
    bool holds = false;
    long violated_step = -1;
    double margin = 0.0;
    /// Least-squares slope of -log(lyapunov) over time (NaN when the
    /// trajectory sits at the solution). Values below 1e-20 are excluded.
    double fitted_rate = 0.0;
};

/// Checks ||x(t_k) - xbar||^2 <= ||x0 - xbar||^2 exp(-alpha t_k) (1 + 1e-2)
/// at every recorded time. Requires lyapunov data and a valid certificate.
DecayVerdict verify_decay(const TrajectoryRecord& rec, const StabilityCertificate& cert);

/// The problem's stored Lipschitz modulus, or a sampled estimate inflated
/// by 5% when none is stored.
double effective_beta(const MviProblem& p, std::uint64_t seed = 0);

}  // namespace fbflow
