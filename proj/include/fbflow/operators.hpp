#pragma once

#include "fbflow/types.hpp"

#include <variant>

namespace fbflow {

/// T(x) = A x + b.
struct AffineOperator {
    Matrix A;
    Vector b;
};

/// T(x) = (exp(-||x||^2) + shift) * M x, shift > 0.
struct GaussianScaledOperator {
    Matrix M;
    double shift;
};

/// Gradient of the logistic loss sum_i log(1 + exp(-a_i <b_i, x>)):
/// T(x) = sum_i -a_i b_i sigma(-a_i <b_i, x>). Rows of `features` are the
/// sample vectors b_i; `labels` holds the a_i in {-1, +1}.
struct LogisticGradientOperator {
    Vector labels;
    Matrix features;
};

using OperatorSpec = std::variant<AffineOperator, GaussianScaledOperator, LogisticGradientOperator>;

/// Ambient dimension the operator acts on.
Eigen::Index operator_dim(const OperatorSpec& op);

/// Throws std::invalid_argument on shape mismatches, shift <= 0, or labels
/// outside {-1, +1}.
void validate_operator(const OperatorSpec& op, Eigen::Index dim);

/// Evaluates T(x). Pure; throws std::invalid_argument on dimension mismatch.
Vector eval_operator(const OperatorSpec& op, const Vector& x);

}  // namespace fbflow
