#pragma once

#include <functional>

#include <Eigen/Core>

namespace spdeflow {

/// Gauss-Hermite rule adapted to Hermite *functions*: nodes are the roots of H_q and the
/// weights are w_i = classical_i * exp(t_i^2), computed overflow-free as
/// w_i = 1 / sum_{j<q} h_j(t_i)^2. With these weights
///   int f(t) dt  ~=  sum_i w_i f(t_i)
/// is exact whenever f = (polynomial of degree <= 2q-1) * exp(-t^2), i.e. for products of
/// two Hermite functions of total degree <= 2q-1.
struct GaussHermiteRule {
    Eigen::VectorXd nodes;    // ascending, symmetric about 0
    Eigen::VectorXd weights;  // function-space weights, all positive
    int size() const { return static_cast<int>(nodes.size()); }
};

GaussHermiteRule gauss_hermite(int q);

/// Tanh-sinh (double-exponential) quadrature on a finite interval. Handles integrable
/// endpoint singularities such as x^{beta-1}, beta > 0. Points near the left endpoint are
/// generated as a + (b-a)*sigmoid(-2s) so the distance to the endpoint keeps full relative
/// accuracy for singular integrands.
double integrate_tanh_sinh(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, int max_level = 14);

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

GaussLegendreRule gauss_legendre(int n);

}  // namespace spdeflow
