#pragma once

#include "spdeflow/solver.hpp"

namespace spdeflow {

/// Smallest constant in 2<phi, L* phi>_{-q} + ||A* phi||^2_{HS(-q)} <= C ||phi||^2_{-q}
/// over the truncated basis: the largest eigenvalue of the symmetric pencil
/// (G L + L^T G + sum_i A_i^T G A_i, G) with G = diag((2|k|+d)^{-2q}). Truncation can
/// only underestimate the constant, so the basis-doubling drift is reported alongside.
struct MonotonicityReport {
    double q = 0.0;
    int n_max = 0;
    double c_star = 0.0;
    double c_star_coarse = 0.0;  // same pencil at n_max/2
    double drift = 0.0;          // |c_star - c_star_coarse| / max(|c_star|, eps)
    nlohmann::ordered_json to_json() const;
};

MonotonicityReport check_monotonicity(const CoefficientModel& model, double q, BasisPtr basis);

/// Kernel symmetry p(t,x,y) = p(t,y,x) for self-adjoint models, Gaussian-KDE estimates on
/// a grid against a 4-standard-error band. A deliberately asymmetric model must fail.
struct SymmetryReport {
    double t = 0.0;
    long paths = 0;
    Eigen::MatrixXd p_hat;       // (i,j): density of X(t, g_i) at g_j
    Eigen::MatrixXd std_error;
    double max_violation_sigmas = 0.0;  // max |p_ij - p_ji| / joint SE over i != j
    bool pass = false;
    nlohmann::ordered_json to_json() const;
};

SymmetryReport check_symmetry(const CoefficientModel& model, double t,
                              const std::vector<Eigen::VectorXd>& grid, long paths, double dt,
                              std::uint64_t seed);

/// Translation invariance of constant-coefficient kernels: P(t,x,.) vs the translate of
/// P(t,0,.), in the -p norm, plus the pathwise reduction Y_t(psi) = tau_{X_t}(psi).
struct TranslationReport {
    Eigen::VectorXd shift;
    double t = 0.0;
    double norm_diff = 0.0;
    double band = 0.0;            // 4 * joint-SE norm + truncation allowance
    double trunc_allowance = 0.0;
    double pathwise_max_diff = 0.0;  // over tested paths, bump density
    double pathwise_tol = 0.0;
    bool pass = false;
    nlohmann::ordered_json to_json() const;
};

TranslationReport check_translation(const CoefficientModel& model, double t,
                                    const Eigen::VectorXd& shift, long paths, double dt,
                                    double p, BasisPtr basis, std::uint64_t seed);

/// Uniform-in-time bound on ||S_t psi||_{-q} / ||psi||_{-p} over a probe family, with a
/// first-quarter / last-quarter trend test at 2 combined standard errors.
struct SemigroupReport {
    double p = 0.0, q = 0.0, T = 0.0;
    long paths = 0;
    std::vector<double> times;
    Eigen::MatrixXd ratios;      // (time, probe)
    Eigen::MatrixXd ratio_se;
    std::vector<double> sup_ratio;  // per time, over probes
    double running_sup = 0.0;
    double first_quarter_mean = 0.0, last_quarter_mean = 0.0, trend_se = 0.0;
    bool pass = false;
    nlohmann::ordered_json to_json() const;
};

SemigroupReport semigroup_bound(const CoefficientModel& model, double p, double q,
                                const std::vector<CompactDistribution>& probes, double T,
                                int n_times, long paths, double dt, BasisPtr basis,
                                std::uint64_t seed);

/// Theorem-4.5b superposition: quadrature of kernel estimates against a direct solve of the
/// density, coefficientwise within 4 joint standard errors (independent seeds).
struct SuperpositionReport {
    double t = 0.0;
    long paths = 0;
    double max_discrepancy_sigmas = 0.0;
    bool pass = false;
    nlohmann::ordered_json to_json() const;
};

SuperpositionReport superposition_check(const CoefficientModel& model,
                                        const CompactDistribution& density, double t, long paths,
                                        double dt, BasisPtr basis, std::uint64_t seed_kernel,
                                        std::uint64_t seed_solve);

/// Pathwise duality <Y_t(psi), phi> = <psi, phi o X_t> for psi = d^g delta_x along one
/// axis (g <= 2), against a finite-difference oracle over perturbed starts sharing the
/// same noise. phi runs over a panel of degree-<=4 polynomial-times-Gaussian functions.
struct DualityReport {
    long paths = 0;
    double fd_step = 0.0;
    double max_error = 0.0;
    double tol = 0.0;
    bool pass = false;
    nlohmann::ordered_json to_json() const;
};

DualityReport duality_check(const CoefficientModel& model, const Eigen::VectorXd& x, int max_order,
                            double T, long paths, double dt, BasisPtr basis, std::uint64_t seed,
                            double fd_step = 1e-4, double tol = 1e-4);

/// E int A*(Y_s) dB_s = 0: the MC mean of the stochastic-integral component of the SPDE,
/// coefficientwise within 4 standard errors of zero.
struct MartingaleReport {
    long paths = 0;
    double max_mean_sigmas = 0.0;
    double max_residual = 0.0;  // largest pathwise SPDE residual seen (diagnostic)
    bool pass = false;
    nlohmann::ordered_json to_json() const;
};

MartingaleReport martingale_zero_check(const CompactDistribution& psi, const CoefficientModel& model,
                                       double T, double q, BasisPtr basis, long paths, double dt,
                                       std::uint64_t seed);

}  // namespace spdeflow
