#include "spdeflow/distribution.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "spdeflow/operators.hpp"
#include "spdeflow/quadrature.hpp"

namespace spdeflow {

CompactDistribution::CompactDistribution(int d) : d_(d) {
    if (d < 1) throw std::invalid_argument("CompactDistribution: d must be >= 1");
    box_lo_ = Eigen::VectorXd::Zero(d);
    box_hi_ = Eigen::VectorXd::Zero(d);
}

void CompactDistribution::add_atom(double weight, const MultiIndex& gamma, const Eigen::VectorXd& x) {
    if (gamma.dim() != d_ || x.size() != d_)
        throw std::invalid_argument("CompactDistribution::add_atom: dimension mismatch");
    if (atoms_.empty()) {
        box_lo_ = x;
        box_hi_ = x;
    } else {
        box_lo_ = box_lo_.cwiseMin(x);
        box_hi_ = box_hi_.cwiseMax(x);
    }
    atoms_.push_back(DistributionAtom{weight, gamma, x});
    order_ = std::max(order_, gamma.order());
}

void CompactDistribution::add_density(const MultiIndex& alpha, const Eigen::VectorXd& lo,
                                      const Eigen::VectorXd& hi, int nodes_per_axis,
                                      const std::function<double(const Eigen::VectorXd&)>& g) {
    if (lo.size() != d_ || hi.size() != d_)
        throw std::invalid_argument("CompactDistribution::add_density: box dimension mismatch");
    if (nodes_per_axis < 1) throw std::invalid_argument("CompactDistribution::add_density: n >= 1");
    const GaussLegendreRule rule = gauss_legendre(nodes_per_axis);

    long total = 1;
    for (int i = 0; i < d_; ++i) total *= nodes_per_axis;
    Eigen::VectorXd x(d_);
    for (long flat = 0; flat < total; ++flat) {
        long rem = flat;
        double w = 1.0;
        for (int i = 0; i < d_; ++i) {
            const int qi = static_cast<int>(rem % nodes_per_axis);
            rem /= nodes_per_axis;
            const double half = 0.5 * (hi[i] - lo[i]);
            x[i] = 0.5 * (lo[i] + hi[i]) + half * rule.nodes[qi];
            w *= half * rule.weights[qi];
        }
        const double gw = w * g(x);
        if (!std::isfinite(gw)) throw std::runtime_error("CompactDistribution: non-finite density value");
        if (gw != 0.0) add_atom(gw, alpha, x);
    }
}

CompactDistribution CompactDistribution::delta(const Eigen::VectorXd& x) {
    CompactDistribution psi(static_cast<int>(x.size()));
    psi.add_atom(1.0, MultiIndex(static_cast<int>(x.size())), x);
    return psi;
}

CompactDistribution CompactDistribution::delta_derivative(const Eigen::VectorXd& x,
                                                          const MultiIndex& gamma) {
    CompactDistribution psi(static_cast<int>(x.size()));
    psi.add_atom(1.0, gamma, x);
    return psi;
}

CompactDistribution CompactDistribution::uniform_density(const Eigen::VectorXd& lo,
                                                         const Eigen::VectorXd& hi, int nodes_per_axis) {
    CompactDistribution psi(static_cast<int>(lo.size()));
    psi.add_density(MultiIndex(psi.dim()), lo, hi, nodes_per_axis,
                    [](const Eigen::VectorXd&) { return 1.0; });
    return psi;
}

CompactDistribution CompactDistribution::bump_density(const Eigen::VectorXd& center, double halfwidth,
                                                      int nodes_per_axis) {
    const int d = static_cast<int>(center.size());
    CompactDistribution psi(d);
    const Eigen::VectorXd lo = center.array() - halfwidth;
    const Eigen::VectorXd hi = center.array() + halfwidth;
    psi.add_density(MultiIndex(d), lo, hi, nodes_per_axis, [&](const Eigen::VectorXd& x) {
        double v = 1.0;
        for (int i = 0; i < d; ++i) {
            const double u = (x[i] - center[i]) / halfwidth;
            const double s = 1.0 - u * u;
            if (s <= 0.0) return 0.0;
            v *= std::exp(1.0 - 1.0 / s);
        }
        return v;
    });
    return psi;
}

double CompactDistribution::pair(
    const std::function<double(const MultiIndex&, const Eigen::VectorXd&)>& phi_deriv) const {
    double acc = 0.0;
    for (const DistributionAtom& a : atoms_) {
        const double sign = (a.gamma.order() % 2 == 0) ? 1.0 : -1.0;
        acc += a.weight * sign * phi_deriv(a.gamma, a.location);
    }
    return acc;
}

HermiteSeries CompactDistribution::to_series(BasisPtr basis) const {
    HermiteSeries s(basis);
    for (const DistributionAtom& a : atoms_) {
        HermiteSeries term = delta_coeffs(a.location, a.gamma, basis);
        s.coeffs() += a.weight * term.coeffs();
    }
    return s;
}

std::vector<Eigen::VectorXd> CompactDistribution::start_points() const {
    std::vector<Eigen::VectorXd> pts;
    for (const DistributionAtom& a : atoms_) {
        bool seen = false;
        for (const auto& p : pts)
            if (p == a.location) {
                seen = true;
                break;
            }
        if (!seen) pts.push_back(a.location);
    }
    return pts;
}

std::vector<int> CompactDistribution::atom_start_map() const {
    const std::vector<Eigen::VectorXd> pts = start_points();
    std::vector<int> map_(atoms_.size(), -1);
    for (std::size_t i = 0; i < atoms_.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j)
            if (pts[j] == atoms_[i].location) {
                map_[i] = static_cast<int>(j);
                break;
            }
    return map_;
}

nlohmann::ordered_json CompactDistribution::to_json() const {
    nlohmann::ordered_json j;
    j["d"] = d_;
    nlohmann::ordered_json atoms = nlohmann::ordered_json::array();
    for (const DistributionAtom& a : atoms_) {
        std::vector<double> x(a.location.data(), a.location.data() + a.location.size());
        atoms.push_back({a.weight, a.gamma.entries(), x});
    }
    j["atoms"] = atoms;
    return j;
}

CompactDistribution CompactDistribution::from_json(const nlohmann::json& j, int d) {
    CompactDistribution psi(d);
    if (j.contains("atoms")) {
        for (const auto& a : j.at("atoms")) {
            const double c = a.at(0).get<double>();
            MultiIndex gamma(a.at(1).get<std::vector<int>>());
            const auto xv = a.at(2).get<std::vector<double>>();
            Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xv.data(), static_cast<long>(xv.size()));
            psi.add_atom(c, gamma, x);
        }
    }
    if (j.contains("density")) {
        const auto& dj = j.at("density");
        MultiIndex alpha(d);
        if (dj.contains("alpha")) alpha = MultiIndex(dj.at("alpha").get<std::vector<int>>());
        const auto& grid = dj.at("grid");
        const auto lov = grid.at("lo").get<std::vector<double>>();
        const auto hiv = grid.at("hi").get<std::vector<double>>();
        const int n = grid.at("n").get<int>();
        Eigen::VectorXd lo = Eigen::Map<const Eigen::VectorXd>(lov.data(), static_cast<long>(lov.size()));
        Eigen::VectorXd hi = Eigen::Map<const Eigen::VectorXd>(hiv.data(), static_cast<long>(hiv.size()));
        const auto& g = dj.at("g");
        if (g.is_string()) {
            const std::string name = g.get<std::string>();
            if (name == "uniform") {
                psi.add_density(alpha, lo, hi, n, [](const Eigen::VectorXd&) { return 1.0; });
            } else if (name == "bump") {
                const Eigen::VectorXd center = 0.5 * (lo + hi);
                const double halfwidth = 0.5 * (hi[0] - lo[0]);
                CompactDistribution b = bump_density(center, halfwidth, n);
                for (const auto& a : b.atoms()) psi.add_atom(a.weight, alpha, a.location);
            } else {
                throw std::invalid_argument("CompactDistribution: unknown density function '" + name + "'");
            }
        } else if (g.is_array()) {
            // samples at the quadrature nodes, flattened in node order
            const auto samples = g.get<std::vector<double>>();
            std::size_t idx = 0;
            psi.add_density(alpha, lo, hi, n, [&](const Eigen::VectorXd&) {
                if (idx >= samples.size())
                    throw std::invalid_argument("CompactDistribution: too few density samples");
                return samples[idx++];
            });
        } else {
            throw std::invalid_argument("CompactDistribution: density g must be a name or samples");
        }
    }
    if (psi.empty()) throw std::invalid_argument("CompactDistribution: empty distribution spec");
    return psi;
}

}  // namespace spdeflow
