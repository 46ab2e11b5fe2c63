#pragma once

#include <vector>

namespace bdk {

/// Nodes in (0,1) and weights for the weight y^(p-1) (1-y)^(q-1), p, q > 0.
/// Weights are normalised to sum to 1.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Jacobi rule via Golub-Welsch.
QuadratureRule gauss_jacobi(int n, double p, double q);

} // namespace bdk
