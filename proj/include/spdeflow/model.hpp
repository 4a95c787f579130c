#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spdeflow/polynomial.hpp"

namespace spdeflow {

/// SDE coefficient data: sigma (d x r matrix field) and b (d vector field), with exact
/// partial-derivative oracles. Entries are polynomials, which covers every builtin
/// (brownian, ou, constant, polynomial stress models) and makes all derivative oracles
/// exact to machine precision.
///
/// Note: polynomial entries of degree >= 2 violate the bounded-derivative hypothesis the
/// flow theory assumes; they are accepted for stress tests and moment probes may diverge.
class CoefficientModel {
public:
    static constexpr int kMaxDerivOrder = 8;

    CoefficientModel(int d, int r, std::vector<Polynomial> sigma_row_major,
                     std::vector<Polynomial> b);

    static CoefficientModel brownian(int d);
    static CoefficientModel ou(int d);  // sigma = I, b(x) = -x
    static CoefficientModel constant(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& b);
    /// d = r = 1 model with scalar polynomial coefficients.
    static CoefficientModel scalar(const Polynomial& sigma, const Polynomial& b);

    int d() const { return d_; }
    int r() const { return r_; }
    bool is_constant() const { return is_constant_; }
    bool is_linear() const { return is_linear_; }
    int max_deriv_order() const { return kMaxDerivOrder; }

    const Polynomial& sigma(int i, int alpha) const { return sigma_[idx(i, alpha)]; }
    const Polynomial& b(int i) const { return b_[static_cast<std::size_t>(i)]; }
    /// (sigma sigma^T)^i_j as a polynomial.
    const Polynomial& sigma_sigma_t(int i, int j) const { return a_[static_cast<std::size_t>(i * d_ + j)]; }

    void sigma_at(const Eigen::VectorXd& x, Eigen::MatrixXd& out) const;
    void b_at(const Eigen::VectorXd& x, Eigen::VectorXd& out) const;

    /// d^beta sigma^i_alpha as a polynomial; throws when |beta| > kMaxDerivOrder.
    const Polynomial& sigma_deriv(int i, int alpha, const MultiIndex& beta) const;
    const Polynomial& b_deriv(int i, const MultiIndex& beta) const;

    void sigma_deriv_at(const MultiIndex& beta, const Eigen::VectorXd& x, Eigen::MatrixXd& out) const;
    void b_deriv_at(const MultiIndex& beta, const Eigen::VectorXd& x, Eigen::VectorXd& out) const;

    /// Largest (||sigma(x)|| + ||b(x)||)/(1+|x|) over a grid; spot check of linear growth.
    double linear_growth_constant(const std::vector<Eigen::VectorXd>& grid) const;

private:
    std::size_t idx(int i, int alpha) const { return static_cast<std::size_t>(i * r_ + alpha); }

    int d_, r_;
    std::vector<Polynomial> sigma_;  // d*r, row-major
    std::vector<Polynomial> b_;     // d
    std::vector<Polynomial> a_;     // d*d, sigma sigma^T
    bool is_constant_ = false, is_linear_ = false;

    // Derivative polynomials for all |beta| <= kMaxDerivOrder, keyed by graded-lex position.
    std::vector<MultiIndex> deriv_indices_;
    std::map<std::vector<int>, int> deriv_pos_;
    std::vector<std::vector<Polynomial>> sigma_derivs_;  // [deriv_pos][i*r+alpha]
    std::vector<std::vector<Polynomial>> b_derivs_;      // [deriv_pos][i]
};

}  // namespace spdeflow
