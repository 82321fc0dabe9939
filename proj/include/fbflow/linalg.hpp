#pragma once

#include "fbflow/types.hpp"

#include <array>

namespace fbflow {

/// Eigenvalues of a symmetric 3x3 matrix, ascending, via the trigonometric
/// solution of the characteristic polynomial. Accurate to machine precision
/// for well-scaled inputs.
std::array<double, 3> symmetric_eigenvalues_3x3(const Matrix& a);

/// Spectral norm ||A||_2 by power iteration on A^T A. Deterministic start
/// vector; converges to relative tolerance `tol`.
double spectral_norm(const Matrix& a, double tol = 1e-12, int max_iters = 50000);

}  // namespace fbflow
