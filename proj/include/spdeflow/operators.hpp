#pragma once

#include <functional>

#include "spdeflow/series.hpp"

namespace spdeflow {

using ScalarField = std::function<double(const Eigen::VectorXd&)>;

/// Projection c_k = int f h_k dx by Gauss-Hermite quadrature (exact when f*h_k lies in the
/// polynomial-times-Gaussian class of the rule). Throws on non-finite samples.
HermiteSeries transform(const ScalarField& f, BasisPtr basis);

/// Coefficients of the derivative-of-delta distribution:
///   <d^gamma delta_x, h_k> = (-1)^{|gamma|} (d^gamma h_k)(x), |k| <= n_max.
HermiteSeries delta_coeffs(const Eigen::VectorXd& x, const MultiIndex& gamma, BasisPtr basis);
HermiteSeries delta_coeffs(const Eigen::VectorXd& x, BasisPtr basis);

/// d_i on coefficients via the ladder h_n' = sqrt(n/2) h_{n-1} - sqrt((n+1)/2) h_{n+1}.
/// Components pushed above n_max are dropped (compression to the truncated basis).
HermiteSeries apply_derivative(const HermiteSeries& f, int axis);

/// Multiplication by the coordinate x_i via t h_n = sqrt(n/2) h_{n-1} + sqrt((n+1)/2) h_{n+1}.
HermiteSeries multiply_by_coordinate(const HermiteSeries& f, int axis);

/// Galerkin multiplication by a smooth function: result = M f, M_kj = int sigma h_j h_k dx
/// by quadrature. Throws on non-finite sigma values at the nodes.
HermiteSeries multiply_by_function(const HermiteSeries& f, const ScalarField& sigma);

/// Coefficients of f(. - shift), by quadrature transform of the shifted reconstruction.
HermiteSeries translate(const HermiteSeries& f, const Eigen::VectorXd& shift);

// Matrix forms, for assembling operators once and reusing them.
Eigen::MatrixXd derivative_matrix(const Basis& basis, int axis);
Eigen::MatrixXd coordinate_matrix(const Basis& basis, int axis);
Eigen::MatrixXd multiply_matrix(const Basis& basis, const ScalarField& sigma);
Eigen::MatrixXd translate_matrix(const Basis& basis, const Eigen::VectorXd& shift);

}  // namespace spdeflow
