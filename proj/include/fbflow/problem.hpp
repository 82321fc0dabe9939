#pragma once

#include "fbflow/operators.hpp"
#include "fbflow/prox.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fbflow {

/// A mixed variational inequality: find x in dom h with
///   <T(x), u - x> + h(u) - h(x) >= 0 for every u in dom h.
struct MviProblem {
    Eigen::Index dim = 0;
    OperatorSpec op;
    ProxSpec prox_spec;
    std::optional<Vector> known_solution;
    std::optional<double> lipschitz_beta;
    std::optional<double> strong_pseudo_mu;
    /// Natural starting point for solvers (problem-specific).
    std::optional<Vector> default_x0;
    /// Deterministic point pairs worth probing when classifying the
    /// operator's monotonicity (checked before any random sampling).
    std::vector<std::pair<Vector, Vector>> probe_pairs;
    std::string id = "custom";
};

/// Norm of the natural (fixed-point) residual x - prox_{lambda h}(x - lambda T x).
struct SolutionResidual {
    double natural_residual;
    double lambda_used;
};

/// Consistency checks over all fields, including that a declared known
/// solution really is an equilibrium. Throws std::invalid_argument.
void validate_problem(const MviProblem& p);

SolutionResidual fbf_residual(const MviProblem& p, const Vector& x, double lambda);

enum class Example { Ex1, Ex2, Ex3 };

/// Accepts "ex1", "ex2", "ex3"; throws std::invalid_argument otherwise.
Example parse_example(std::string_view name);

/// Built-in problems:
///  - ex1: scalar affine operator 4 - u with h(u) = u^2 on [3, 5];
///    solution 3, Lipschitz modulus 1.
///  - ex2: T(x) = (exp(-||x||^2) + 0.2) M x over the sum-zero slice of
///    [-5,5]^3; solution 0, with closed-form Lipschitz bound and strong
///    pseudomonotonicity modulus 0.2 * lambda_min(M).
///  - ex3: l1-regularized logistic regression gradient (eta = 2.5) on 100
///    seeded samples: labels uniform in {-1,+1}, features uniform in
///    [-1,1]^3, drawn in that order per sample; the default starting point
///    is drawn from the same stream afterwards.
MviProblem build_example(Example which, std::uint64_t seed = 0);

}  // namespace fbflow
