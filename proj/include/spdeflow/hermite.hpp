#pragma once

#include <vector>

#include <Eigen/Core>

#include "spdeflow/multi_index.hpp"

namespace spdeflow {

/// One-dimensional Hermite functions h_n(t) = (2^n n! sqrt(pi))^{-1/2} e^{-t^2/2} H_n(t),
/// orthonormal in L^2(R). All evaluation goes through the function-form three-term
/// recurrence h_{n+1} = t sqrt(2/(n+1)) h_n - sqrt(n/(n+1)) h_{n-1}, which keeps the
/// Gaussian factor inside and stays bounded for n in the thousands.

/// Values h_0(t), ..., h_{n_max}(t).
std::vector<double> hermite_values(int n_max, double t);

/// Derivative table: row j holds (d/dt)^j h_n(t) for n = 0..n_max, j = 0..max_deriv.
/// Row 0 equals hermite_values. Built by differentiating the recurrence (Leibniz on t*h_n).
Eigen::MatrixXd hermite_jet(int n_max, double t, int max_deriv);

/// (d^gamma h_k)(x) for a single multi-index, product of per-axis derivatives.
double hermite_eval(const MultiIndex& k, const Eigen::VectorXd& x, const MultiIndex& gamma);

/// Plain evaluation h_k(x).
double hermite_eval(const MultiIndex& k, const Eigen::VectorXd& x);

/// Squared Sobolev norm of delta_x by truncated series:
///   ||delta_x||_{-p}^2 = sum_{n<=n_max} (2n+d)^{-2p} sum_{|k|=n} h_k(x)^2.
/// Returns the partial sums indexed by n = 0..n_max (entry n includes all grades <= n).
/// Callers probing divergence below the p > d/4 threshold want the whole history.
std::vector<double> delta_norm_sq_partial_sums(const Eigen::VectorXd& x, double p, int n_max);

/// Final partial sum of the series above.
double delta_norm_sq_series(const Eigen::VectorXd& x, double p, int n_max);

/// Squared Sobolev norm of delta_x by the Mehler-formula integral
///   ||delta_x||_{-p}^2 = 1/Gamma(2p) * int_0^inf t^{2p-1} g(t,x) dt,
///   g(t,x) = e^{-dt} pi^{-d/2} (1-e^{-4t})^{-d/2} e^{-(tanh t)|x|^2}.
/// The head (0,1] is integrated directly (integrand ~ t^{2p-1-d/2} at 0); the tail uses
/// the substitution u = e^{-2t}. Throws std::invalid_argument when p <= d/4 (divergent).
double delta_norm_sq_mehler(const Eigen::VectorXd& x, double p, double abs_tol = 1e-10);

}  // namespace spdeflow
