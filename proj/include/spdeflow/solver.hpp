#pragma once

#include "spdeflow/adjoint.hpp"
#include "spdeflow/pushforward.hpp"

namespace spdeflow {

/// Monte Carlo realization of psi_t = E Y_t(psi) at one time point.
struct SolveReport {
    double t = 0.0;
    double dt = 0.0;
    long paths = 0;
    std::uint64_t seed = 0;
    double p = 0.0;

    HermiteSeries mean;            // coefficientwise MC mean
    Eigen::VectorXd std_error;     // sample std / sqrt(paths) per coefficient
    double second_moment = 0.0;    // empirical E ||Y_t(psi)||^2_{-p}
    long blowups = 0;
    double truncation_sensitivity = 0.0;  // rel. change of ||mean||_{-p} vs n_max/2 prefix

    nlohmann::ordered_json to_json() const;
};

/// One report per requested time (ascending, on the driver grid). All times share the same
/// paths. Throws when more than 0.1% of paths blow up.
std::vector<SolveReport> solve_forward_mc(const CompactDistribution& psi,
                                          const CoefficientModel& model,
                                          const std::vector<double>& times, long paths, double dt,
                                          double p, BasisPtr basis, std::uint64_t seed);

SolveReport solve_forward_mc_at(const CompactDistribution& psi, const CoefficientModel& model,
                                double T, long paths, double dt, double p, BasisPtr basis,
                                std::uint64_t seed);

/// Deterministic Galerkin integration of dc/dt = L* c by the classic 4th-order one-step
/// method, for cross-validation of the stochastic representation.
struct GalerkinReport {
    std::vector<double> times;             // checkpoint times, starting at 0
    std::vector<HermiteSeries> states;
    std::vector<double> integral_residual;  // ||c(t) - c(0) - int L* c ds||_{-q} at checkpoints
    double truncation_drift = 0.0;          // vs a run at n_max/2, common-prefix sup difference
    bool aborted_stiff = false;

    const HermiteSeries& final_state() const { return states.back(); }
};

GalerkinReport solve_forward_galerkin(const CompactDistribution& psi, const CoefficientModel& model,
                                      double T, double dt, BasisPtr basis, int checkpoints,
                                      double q);

/// Transition kernel P(t,x,.) = E delta_{X(t,x)} as a Hermite series, with a mass probe
/// <P, window> for a smooth window covering the bulk of the law.
struct KernelEstimate {
    Eigen::VectorXd x;
    double t = 0.0;
    long paths = 0;
    std::uint64_t seed = 0;
    HermiteSeries series;
    Eigen::VectorXd std_error;
    double mass = 0.0;
    double mass_std_error = 0.0;
    long blowups = 0;
};

KernelEstimate estimate_kernel(const CoefficientModel& model, const Eigen::VectorXd& x, double t,
                               long paths, double dt, BasisPtr basis, std::uint64_t seed);

}  // namespace spdeflow
