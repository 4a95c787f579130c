#pragma once

#include "spdeflow/distribution.hpp"
#include "spdeflow/driver.hpp"
#include "spdeflow/model.hpp"
#include "spdeflow/series.hpp"

namespace spdeflow {

/// Matrices of the adjoint operators on the truncated basis:
///   A_i* psi = -sum_k d_k(sigma^k_i psi),          i = 1..r
///   L*  psi  = 1/2 sum_ij d^2_ij((sigma sigma^T)^i_j psi) - sum_i d_i(b^i psi),
/// assembled from the derivative ladder and quadrature multiplication matrices. Assembled
/// once, then shared immutably.
class AdjointGalerkin {
public:
    AdjointGalerkin(BasisPtr basis, const CoefficientModel& model);

    const BasisPtr& basis() const { return basis_; }
    int r() const { return static_cast<int>(a_star_.size()); }

    const Eigen::MatrixXd& a_star(int i) const { return a_star_[static_cast<std::size_t>(i)]; }
    const Eigen::MatrixXd& l_star() const { return l_star_; }

    /// Galerkin matrices of the forward operators A_i phi = sum_k sigma^k_i d_k phi and
    /// L phi = 1/2 sum (sigma sigma^T)^i_j d^2_ij phi + sum b^i d_i phi, for duality tests.
    Eigen::MatrixXd a_forward(int i) const;
    Eigen::MatrixXd l_forward() const;

    HermiteSeries apply_a_star(int i, const HermiteSeries& psi) const;
    HermiteSeries apply_l_star(const HermiteSeries& psi) const;

    /// ||A* psi||^2_{HS(-q)} = sum_i ||A_i* psi||^2_{-q}.
    double hs_norm_sq_a(const HermiteSeries& psi, double q) const;

private:
    BasisPtr basis_;
    const CoefficientModel* model_;
    std::vector<Eigen::MatrixXd> mult_sigma_;   // M[sigma^k_i], k*r + i
    std::vector<Eigen::MatrixXd> mult_a_;       // M[(sigma sigma^T)^i_j], i*d + j
    std::vector<Eigen::MatrixXd> mult_b_;       // M[b^i]
    std::vector<Eigen::MatrixXd> deriv_;        // ladder D_i
    std::vector<Eigen::MatrixXd> a_star_;
    Eigen::MatrixXd l_star_;
};

/// Pathwise residual of the SPDE satisfied by Y_t(psi):
///   R_n = || Y_{t_n} - psi - sum_{m<n} A*(Y_{t_m}) dB_m - sum_{m<n} L*(Y_{t_m}) dt ||_{-q},
/// with left-point (Ito) sums on the same grid and increments as the flow.
struct SpdeResidualReport {
    std::vector<double> times;
    std::vector<double> residual;
    double max_residual = 0.0;
    Eigen::VectorXd stochastic_integral;  // coefficients of sum A*(Y) dB at final time
    bool blew_up = false;
};

SpdeResidualReport spde_residual(const CompactDistribution& psi, const CoefficientModel& model,
                                 const AdjointGalerkin& adj, const BrownianDriver& driver,
                                 std::uint64_t path, double T, double q);

}  // namespace spdeflow
