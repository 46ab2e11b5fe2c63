#include "bdk/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "bdk/errors.hpp"

namespace bdk {

QuadratureRule gauss_jacobi(int n, double p, double q) {
    if (n < 1) throw RangeError("quadrature needs at least one node");
    if (!(p > 0.0 && q > 0.0)) throw RangeError("Jacobi exponents must exceed -1");
    // On [-1,1] the weight is (1-x)^alpha (1+x)^beta with y = (1+x)/2.
    const double alpha = q - 1.0, beta = p - 1.0, ab = alpha + beta;
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
    diag(0) = (beta - alpha) / (ab + 2.0);
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + ab;
        diag(k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + ab;
        double b2;
        if (k == 1) // the general form is 0/0 when alpha + beta = -1
            b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        else
            b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
        sub(k - 1) = std::sqrt(b2);
    }
    QuadratureRule rule;
    if (n == 1) {
        rule.nodes = {0.5 * (1.0 + diag(0))};
        rule.weights = {1.0};
        return rule;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw QuadratureNoConvergence("tridiagonal eigensolver failed");
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        rule.nodes[static_cast<std::size_t>(k)] = 0.5 * (1.0 + es.eigenvalues()(k));
        const double v = es.eigenvectors()(0, k);
        rule.weights[static_cast<std::size_t>(k)] = v * v;
    }
    return rule;
}

} // namespace bdk
