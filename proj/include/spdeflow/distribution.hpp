#pragma once

#include <cmath>
#include <functional>

#include <nlohmann/json.hpp>

#include "spdeflow/series.hpp"

namespace spdeflow {

/// One weighted derivative-of-delta: weight * d^gamma delta_location. Pairing convention:
/// <d^gamma delta_x, phi> = (-1)^{|gamma|} (d^gamma phi)(x).
struct DistributionAtom {
    double weight;
    MultiIndex gamma;
    Eigen::VectorXd location;
};

/// Compactly supported distribution as a finite sum of derivative-of-delta atoms. Density
/// terms int_V g(x) d^alpha delta_x dx enter through tensor Gauss-Legendre discretization
/// of V, which appends one atom per quadrature node with weight w_j * g(x_j).
class CompactDistribution {
public:
    explicit CompactDistribution(int d);

    void add_atom(double weight, const MultiIndex& gamma, const Eigen::VectorXd& x);
    void add_density(const MultiIndex& alpha, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                     int nodes_per_axis, const std::function<double(const Eigen::VectorXd&)>& g);

    static CompactDistribution delta(const Eigen::VectorXd& x);
    static CompactDistribution delta_derivative(const Eigen::VectorXd& x, const MultiIndex& gamma);
    static CompactDistribution uniform_density(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                               int nodes_per_axis);
    /// Smooth bump exp(1 - 1/(1-u^2)) per axis on [center - halfwidth, center + halfwidth].
    static CompactDistribution bump_density(const Eigen::VectorXd& center, double halfwidth,
                                            int nodes_per_axis);

    int dim() const { return d_; }
    /// N = max |gamma| over atoms (0 for an empty distribution).
    int order() const { return order_; }
    const std::vector<DistributionAtom>& atoms() const { return atoms_; }
    bool empty() const { return atoms_.empty(); }

    /// Declared support box: envelope of all atom locations.
    Eigen::VectorXd box_lo() const { return box_lo_; }
    Eigen::VectorXd box_hi() const { return box_hi_; }

    /// p > d/4 + N/2 rule with margin 0.25.
    double default_p() const { return 0.25 * d_ + 0.5 * order_ + 0.25; }
    /// q > [p] + 2 rule realized as [p] + 3.
    double default_q() const { return std::floor(default_p()) + 3.0; }

    /// <psi, phi> from a derivative oracle phi_deriv(gamma, x) = (d^gamma phi)(x).
    double pair(const std::function<double(const MultiIndex&, const Eigen::VectorXd&)>& phi_deriv) const;

    /// Coefficient vector sum_atoms w * delta_coeffs(x, gamma).
    HermiteSeries to_series(BasisPtr basis) const;

    /// Distinct atom locations (flow start points) and the atom -> start map.
    std::vector<Eigen::VectorXd> start_points() const;
    std::vector<int> atom_start_map() const;

    nlohmann::ordered_json to_json() const;
    static CompactDistribution from_json(const nlohmann::json& j, int d);

private:
    int d_;
    int order_ = 0;
    std::vector<DistributionAtom> atoms_;
    Eigen::VectorXd box_lo_, box_hi_;
};

}  // namespace spdeflow
