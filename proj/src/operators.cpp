#include "fbflow/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace fbflow {

namespace {

/// sigma(t) = 1 / (1 + exp(-t)), overflow-safe on both tails.
double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

}  // namespace

Eigen::Index operator_dim(const OperatorSpec& op) {
    return std::visit(
        [](const auto& s) -> Eigen::Index {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, AffineOperator>) {
                return s.A.cols();
            } else if constexpr (std::is_same_v<S, GaussianScaledOperator>) {
                return s.M.cols();
            } else {
                return s.features.cols();
            }
        },
        op);
}

void validate_operator(const OperatorSpec& op, Eigen::Index dim) {
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, AffineOperator>) {
                if (s.A.rows() != dim || s.A.cols() != dim || s.b.size() != dim) {
                    throw std::invalid_argument("affine operator: inconsistent shapes");
                }
            } else if constexpr (std::is_same_v<S, GaussianScaledOperator>) {
                if (s.M.rows() != dim || s.M.cols() != dim) {
                    throw std::invalid_argument("gaussian-scaled operator: matrix must be n x n");
                }
                if (!(s.shift > 0.0)) {
                    throw std::invalid_argument("gaussian-scaled operator: shift must be positive");
                }
            } else {
                if (s.features.cols() != dim || s.features.rows() != s.labels.size()) {
                    throw std::invalid_argument("logistic gradient: inconsistent shapes");
                }
                for (Eigen::Index i = 0; i < s.labels.size(); ++i) {
                    if (s.labels[i] != 1.0 && s.labels[i] != -1.0) {
                        throw std::invalid_argument("logistic gradient: labels must be +-1");
                    }
                }
            }
        },
        op);
}

Vector eval_operator(const OperatorSpec& op, const Vector& x) {
    if (x.size() != operator_dim(op)) {
        throw std::invalid_argument("eval_operator: dimension mismatch");
    }
    return std::visit(
        [&](const auto& s) -> Vector {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, AffineOperator>) {
                return s.A * x + s.b;
            } else if constexpr (std::is_same_v<S, GaussianScaledOperator>) {
                const double scale = std::exp(-x.squaredNorm()) + s.shift;
                return scale * (s.M * x);
            } else {
                const Vector margins = s.labels.cwiseProduct(s.features * x);
                Vector weights(margins.size());
                for (Eigen::Index i = 0; i < margins.size(); ++i) {
                    weights[i] = -s.labels[i] * sigmoid(-margins[i]);
                }
                return s.features.transpose() * weights;
            }
        },
        op);
}

}  // namespace fbflow
