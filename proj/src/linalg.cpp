#include "fbflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fbflow {

std::array<double, 3> symmetric_eigenvalues_3x3(const Matrix& a) {
    if (a.rows() != 3 || a.cols() != 3) {
        throw std::invalid_argument("symmetric_eigenvalues_3x3: matrix must be 3x3");
    }
    const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    std::array<double, 3> eig{};
    if (p1 == 0.0) {
        eig = {a(0, 0), a(1, 1), a(2, 2)};
        std::sort(eig.begin(), eig.end());
        return eig;
    }
    const double q = a.trace() / 3.0;
    const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                      (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    Matrix b = (a - q * Matrix::Identity(3, 3)) / p;
    const double detb = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                        b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                        b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    const double r = std::clamp(detb / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double two_pi_3 = 2.0943951023931953;
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * two_pi_3);
    const double e2 = 3.0 * q - e1 - e3;
    eig = {e3, e2, e1};
    std::sort(eig.begin(), eig.end());
    return eig;
}

double spectral_norm(const Matrix& a, double tol, int max_iters) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    Vector v = Vector::Ones(a.cols());
    // Mild asymmetry so the start vector is never orthogonal to the
    // dominant singular direction of matrices with symmetric structure.
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += 1e-3 * static_cast<double>(i);
    v.normalize();
    double sigma2 = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        Vector w = a.transpose() * (a * v);
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        w /= nw;
        const double next = w.dot(a.transpose() * (a * w));
        if (it > 0 && std::abs(next - sigma2) <= tol * std::max(1.0, std::abs(next))) {
            return std::sqrt(std::max(0.0, next));
        }
        sigma2 = next;
        v = std::move(w);
    }
    return std::sqrt(std::max(0.0, sigma2));
}

}  // namespace fbflow
