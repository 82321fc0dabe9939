#include "fbflow/analysis.hpp"

#include "fbflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fbflow {

namespace {

constexpr double kViolationTol = 1e-9;

std::vector<Vector> box_corners(Eigen::Index dim, double lo, double hi) {
    std::vector<Vector> corners;
    if (dim > 10) return corners;
    const long count = 1L << dim;
    corners.reserve(static_cast<std::size_t>(count));
    for (long mask = 0; mask < count; ++mask) {
        Vector c(dim);
        for (Eigen::Index i = 0; i < dim; ++i) c[i] = (mask >> i) & 1 ? hi : lo;
        corners.push_back(std::move(c));
    }
    return corners;
}

}  // namespace

StabilityCertificate make_certificate(double beta, double mu, double lambda) {
    if (!(beta > 0.0) || !(mu > 0.0) || !(lambda > 0.0)) {
        throw std::invalid_argument("make_certificate: beta, mu, lambda must be positive");
    }
    StabilityCertificate cert;
    cert.beta = beta;
    cert.mu = mu;
    cert.lambda = lambda;
    const double ratio = lambda * mu / (1.0 + lambda * (mu + beta));
    cert.alpha = 2.0 * (1.0 - lambda * (1.0 + beta * beta)) * ratio * ratio;
    cert.lambda_valid = lambda * (1.0 + beta * beta) < 1.0;
    return cert;
}

double estimate_lipschitz(const OperatorSpec& op, Eigen::Index dim, SamplingBox box, long samples,
                          std::uint64_t seed) {
    if (!(box.lo < box.hi)) throw std::invalid_argument("estimate_lipschitz: degenerate domain");
    if (samples < 2) throw std::invalid_argument("estimate_lipschitz: needs at least 2 samples");
    if (const auto* affine = std::get_if<AffineOperator>(&op)) {
        return spectral_norm(affine->A, 1e-12);
    }
    Rng rng(seed);
    const double local_step = 1e-4 * (box.hi - box.lo);
    double best = 0.0;
    for (long i = 0; i < samples; ++i) {
        const Vector u = rng.uniform_vector(dim, box.lo, box.hi);
        // Alternate box-to-box pairs with short local steps; the latter
        // resolve regions where the differential is steep.
        const Vector v = (i % 2 == 0) ? rng.uniform_vector(dim, box.lo, box.hi)
                                      : Vector(u + local_step * rng.unit_vector(dim));
        const double dist = (u - v).norm();
        if (dist < 1e-12) continue;
        const double ratio = (eval_operator(op, u) - eval_operator(op, v)).norm() / dist;
        best = std::max(best, ratio);
    }
    return best;
}

double lipschitz_upper_bound(const OperatorSpec& op) {
    return std::visit(
        [](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, AffineOperator>) {
                return spectral_norm(s.A, 1e-12);
            } else if constexpr (std::is_same_v<S, GaussianScaledOperator>) {
                // sup_x ||J|| <= ||M|| (e^{-s} + shift + 2 s e^{-s})
                //            <= ||M|| (1 + shift + 2/e).
                return spectral_norm(s.M, 1e-12) * (1.0 + s.shift + 2.0 / std::exp(1.0));
            } else {
                // Hessian of the logistic loss is bounded by (1/4) B^T B.
                const double top = spectral_norm(s.features, 1e-12);
                return 0.25 * top * top;
            }
        },
        op);
}

double lambda_min_symmetric3(const Matrix& m) {
    if (((m - m.transpose()).cwiseAbs().maxCoeff()) > 1e-12) {
        throw std::invalid_argument("lambda_min_symmetric3: matrix must be symmetric");
    }
    return symmetric_eigenvalues_3x3(m)[0];
}

MonotonicityVerdict classify_monotonicity(const MviProblem& p, SamplingBox box, long samples,
                                          std::uint64_t seed) {
    if (!(box.lo < box.hi)) throw std::invalid_argument("classify_monotonicity: degenerate box");
    if (samples < 1) throw std::invalid_argument("classify_monotonicity: samples must be >= 1");

    MonotonicityVerdict verdict;
    verdict.monotone = true;
    verdict.pseudomonotone = true;
    verdict.h_pseudomonotone = true;
    verdict.h_strongly_pseudomonotone = true;
    verdict.samples_used = samples;

    const auto record_witness = [&](const char* definition, const Vector& u, const Vector& v,
                                    std::optional<double> antecedent, double value) {
        verdict.witnesses.push_back({definition, u, v, antecedent, value});
    };

    // Plain classes over the box.
    const auto check_plain = [&](const Vector& u, const Vector& v) {
        if ((u - v).norm() < 1e-12) return;
        const Vector tu = eval_operator(p.op, u);
        const Vector tv = eval_operator(p.op, v);
        if (verdict.monotone) {
            const double value = (tu - tv).dot(u - v);
            if (value < -kViolationTol) {
                verdict.monotone = false;
                record_witness("monotone", u, v, std::nullopt, value);
            }
        }
        if (verdict.pseudomonotone) {
            const double ante = tu.dot(v - u);
            if (ante >= 0.0) {
                const double cons = tv.dot(v - u);
                if (cons < -kViolationTol) {
                    verdict.pseudomonotone = false;
                    record_witness("pseudomonotone", u, v, ante, cons);
                }
            }
        }
    };

    // h-classes over dom h; both h values must be finite.
    double mu_inf = std::numeric_limits<double>::infinity();
    bool mu_seen = false;
    const auto check_h = [&](const Vector& u, const Vector& v) {
        const double dist2 = (u - v).squaredNorm();
        if (dist2 < 1e-16) return;
        const double hu = h_value(p.prox_spec, u);
        const double hv = h_value(p.prox_spec, v);
        if (!std::isfinite(hu) || !std::isfinite(hv)) return;
        const Vector tu = eval_operator(p.op, u);
        const double ante = tu.dot(v - u) + hv - hu;
        if (ante < 0.0) return;
        const Vector tv = eval_operator(p.op, v);
        const double cons = tv.dot(v - u) + hv - hu;
        if (cons < -kViolationTol) {
            if (verdict.h_pseudomonotone) {
                verdict.h_pseudomonotone = false;
                record_witness("h_pseudomonotone", u, v, ante, cons);
            }
            if (verdict.h_strongly_pseudomonotone) {
                verdict.h_strongly_pseudomonotone = false;
                record_witness("h_strongly_pseudomonotone", u, v, ante, cons);
            }
        }
        mu_inf = std::min(mu_inf, cons / dist2);
        mu_seen = true;
    };

    const auto check_both_orders = [&](const Vector& u, const Vector& v) {
        check_plain(u, v);
        check_plain(v, u);
        check_h(u, v);
        check_h(v, u);
    };

    // Deterministic candidates first: the problem's probes, then box corners.
    for (const auto& [u, v] : p.probe_pairs) check_both_orders(u, v);
    const auto corners = box_corners(p.dim, box.lo, box.hi);
    for (std::size_t i = 0; i < corners.size(); ++i) {
        for (std::size_t j = i + 1; j < corners.size(); ++j) {
            check_both_orders(corners[i], corners[j]);
        }
    }

    // Random pairs. Separate streams keep the plain-class draws independent
    // of the feasible-sampling rejections, so verdicts are stable prefixes
    // as `samples` grows.
    Rng plain_rng(seed);
    Rng domain_rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (long i = 0; i < samples; ++i) {
        const Vector u = plain_rng.uniform_vector(p.dim, box.lo, box.hi);
        const Vector v = plain_rng.uniform_vector(p.dim, box.lo, box.hi);
        check_plain(u, v);
        check_plain(v, u);
    }
    long attempts = 0;
    long accepted = 0;
    for (long i = 0; i < samples; ++i) {
        const Vector u = sample_domain(p.prox_spec, p.dim, box.lo, box.hi, domain_rng, &attempts);
        const Vector v = sample_domain(p.prox_spec, p.dim, box.lo, box.hi, domain_rng, &attempts);
        accepted += 2;
        check_h(u, v);
        check_h(v, u);
    }
    if (attempts > 0 && static_cast<double>(accepted) / static_cast<double>(attempts) < 0.1) {
        throw SamplingError("classify_monotonicity: feasible hit rate below 10%");
    }

    if (mu_seen && mu_inf > 1e-12 && std::isfinite(mu_inf)) verdict.mu_estimate = mu_inf;
    return verdict;
}

std::map<std::string, MonitorVerdict> verify_trajectory_inequalities(const MviProblem& p,
                                                                     const TrajectoryRecord& rec,
                                                                     double lambda, double beta) {
    if (rec.size() == 0) throw std::invalid_argument("verify_trajectory_inequalities: empty record");
    std::map<std::string, MonitorVerdict> out;
    const double one_plus = 1.0 + lambda * beta;

    double worst_velocity = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rec.size(); ++k) {
        const auto dir = rhs_fbf(p, rec.xs[k], lambda);
        worst_velocity = std::max(worst_velocity, dir.dx.norm() - one_plus * rec.residuals[k]);
    }
    out["velocity_bound"] = {worst_velocity <= 1e-12, worst_velocity};

    if (rec.lyapunov) {
        const auto& lyap = *rec.lyapunov;
        double worst_increase = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k + 1 < rec.size(); ++k) {
            const double span = rec.times[k + 1] - rec.times[k];
            const double allowed = 10.0 * rec.dt * span * one_plus * one_plus;
            worst_increase = std::max(worst_increase, lyap[k + 1] - lyap[k] - allowed);
        }
        if (rec.size() > 1) {
            out["lyapunov_nonincrease"] = {worst_increase <= 0.0, worst_increase};
        }

        const double contraction = 1.0 - lambda * (1.0 + beta * beta);
        if (contraction > 0.0 && rec.size() > 1) {
            double integral = 0.0;
            for (std::size_t k = 0; k + 1 < rec.size(); ++k) {
                const double a = rec.residuals[k] * rec.residuals[k];
                const double b = rec.residuals[k + 1] * rec.residuals[k + 1];
                integral += 0.5 * (a + b) * (rec.times[k + 1] - rec.times[k]);
            }
            const double bound = lyap.front() / (2.0 * contraction) + 1e-6;
            out["residual_square_integral"] = {integral <= bound, integral - bound};
        }
    }
    return out;
}

DecayVerdict verify_decay(const TrajectoryRecord& rec, const StabilityCertificate& cert) {
    if (!rec.lyapunov) throw std::invalid_argument("verify_decay: record has no lyapunov values");
    if (!cert.lambda_valid) throw std::invalid_argument("verify_decay: certificate lambda invalid");
    const auto& lyap = *rec.lyapunov;
    if (lyap.empty()) throw std::invalid_argument("verify_decay: empty record");

    constexpr double kRelSlack = 1e-2;
    DecayVerdict verdict;
    verdict.holds = true;
    const double l0 = lyap.front();
    for (std::size_t k = 0; k < lyap.size(); ++k) {
        const double bound = l0 * std::exp(-cert.alpha * rec.times[k]) * (1.0 + kRelSlack);
        if (lyap[k] > bound) {
            verdict.holds = false;
            verdict.violated_step = static_cast<long>(k);
            verdict.margin = lyap[k] - bound;
            break;
        }
    }

    // Fitted rate: least-squares slope of log-lyapunov over time, ignoring
    // values at numerical zero.
    double sum_t = 0.0, sum_l = 0.0, sum_tt = 0.0, sum_tl = 0.0;
    long count = 0;
    for (std::size_t k = 0; k < lyap.size(); ++k) {
        if (lyap[k] <= 1e-20) continue;
        const double t = rec.times[k];
        const double l = std::log(lyap[k]);
        sum_t += t;
        sum_l += l;
        sum_tt += t * t;
        sum_tl += t * l;
        ++count;
    }
    const double denom = static_cast<double>(count) * sum_tt - sum_t * sum_t;
    if (count >= 2 && std::abs(denom) > 0.0) {
        verdict.fitted_rate = -((static_cast<double>(count) * sum_tl - sum_t * sum_l) / denom);
    } else {
        verdict.fitted_rate = std::numeric_limits<double>::quiet_NaN();
    }
    return verdict;
}

double effective_beta(const MviProblem& p, std::uint64_t seed) {
    if (p.lipschitz_beta) return *p.lipschitz_beta;
    const auto bounds = domain_box(p.prox_spec);
    const SamplingBox box = bounds ? SamplingBox{bounds->first, bounds->second}
                                   : SamplingBox{-5.0, 5.0};
    return 1.05 * estimate_lipschitz(p.op, p.dim, box, 20000, seed);
}

}  // namespace fbflow
