#include "fbflow/problem.hpp"

#include "fbflow/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace fbflow {

void validate_problem(const MviProblem& p) {
    if (p.dim <= 0) throw std::invalid_argument("problem: dimension must be positive");
    validate_operator(p.op, p.dim);
    validate_prox(p.prox_spec, p.dim);
    if (p.lipschitz_beta && !(*p.lipschitz_beta > 0.0)) {
        throw std::invalid_argument("problem: lipschitz_beta must be positive");
    }
    if (p.strong_pseudo_mu && !(*p.strong_pseudo_mu > 0.0)) {
        throw std::invalid_argument("problem: strong_pseudo_mu must be positive");
    }
    if (p.known_solution) {
        if (p.known_solution->size() != p.dim) {
            throw std::invalid_argument("problem: known_solution has wrong dimension");
        }
        // An equilibrium must have (near-)zero natural residual at any step size.
        for (const double lambda : {0.1, 0.01}) {
            if (fbf_residual(p, *p.known_solution, lambda).natural_residual > 1e-8) {
                throw std::invalid_argument("problem: known_solution is not an equilibrium");
            }
        }
    }
}

SolutionResidual fbf_residual(const MviProblem& p, const Vector& x, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("fbf_residual: lambda must be positive");
    const Vector y = prox(p.prox_spec, x - lambda * eval_operator(p.op, x), lambda);
    return {(x - y).norm(), lambda};
}

Example parse_example(std::string_view name) {
    if (name == "ex1") return Example::Ex1;
    if (name == "ex2") return Example::Ex2;
    if (name == "ex3") return Example::Ex3;
    throw std::invalid_argument("unknown example id: " + std::string(name));
}

MviProblem build_example(Example which, std::uint64_t seed) {
    MviProblem p;
    switch (which) {
        case Example::Ex1: {
            p.dim = 1;
            Matrix a(1, 1);
            a << -1.0;
            Vector b(1);
            b << 4.0;
            p.op = AffineOperator{a, b};
            p.prox_spec = QuadraticOnInterval{3.0, 5.0};
            p.known_solution = Vector::Constant(1, 3.0);
            p.lipschitz_beta = 1.0;
            p.default_x0 = Vector::Constant(1, 0.1);
            p.probe_pairs.push_back({Vector::Constant(1, 3.0), Vector::Constant(1, 5.0)});
            p.id = "ex1";
            break;
        }
        case Example::Ex2: {
            p.dim = 3;
            Matrix m(3, 3);
            m << 1.0, 0.0, -1.0,  //
                0.0, 1.5, 0.0,    //
                -1.0, 0.0, 2.0;
            const double shift = 0.2;
            p.op = GaussianScaledOperator{m, shift};
            p.prox_spec = IndicatorBoxHyperplane{-5.0, 5.0, 0.0};
            p.known_solution = Vector::Zero(3);
            const auto eig = symmetric_eigenvalues_3x3(m);
            // Global modulus bound: sup ||J|| <= ||M|| (e^{-s} + shift + 2 s e^{-s})
            // <= ||M|| (1 + shift + 2/e).
            p.lipschitz_beta = eig[2] * (1.0 + shift + 2.0 / std::exp(1.0));
            p.strong_pseudo_mu = shift * eig[0];
            p.default_x0 = Vector(3);
            *p.default_x0 << -4.0, 3.0, 5.0;
            Vector u(3), v(3);
            u << -1.0, 0.0, 0.0;
            v << -2.0, 0.0, 0.0;
            p.probe_pairs.push_back({u, v});
            p.id = "ex2";
            break;
        }
        case Example::Ex3: {
            p.dim = 3;
            constexpr int kSamples = 100;
            Rng rng(seed);
            Vector labels(kSamples);
            Matrix features(kSamples, 3);
            for (int i = 0; i < kSamples; ++i) {
                labels[i] = rng.sign();
                for (int j = 0; j < 3; ++j) features(i, j) = rng.uniform(-1.0, 1.0);
            }
            p.op = LogisticGradientOperator{labels, features};
            p.prox_spec = ScaledL1{2.5};
            p.default_x0 = rng.uniform_vector(3, -1.0, 1.0);
            p.id = "ex3";
            break;
        }
    }
    validate_problem(p);
    return p;
}

}  // namespace fbflow
