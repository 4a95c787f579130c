#include "spdeflow/basis.hpp"

#include <cmath>
#include <stdexcept>

#include "spdeflow/hermite.hpp"

namespace spdeflow {

Basis::Basis(BasisSpec spec) : spec_(spec) {
    if (spec_.d < 1) throw std::invalid_argument("Basis: d must be >= 1");
    if (spec_.n_max < 0) throw std::invalid_argument("Basis: n_max must be >= 0");
    indices_ = enumerate_multi_indices(spec_.d, spec_.n_max);
    lookup_.reserve(indices_.size());
    for (int i = 0; i < static_cast<int>(indices_.size()); ++i) lookup_.emplace(indices_[i], i);

    quad_ = gauss_hermite(spec_.effective_quad_nodes());
    const int q = quad_.size();
    node_values_.resize(q, spec_.n_max + 1);
    for (int i = 0; i < q; ++i) {
        std::vector<double> h = hermite_values(spec_.n_max, quad_.nodes[i]);
        for (int n = 0; n <= spec_.n_max; ++n) node_values_(i, n) = h[n];
    }
}

double Basis::sobolev_weight(int pos, double p) const {
    return std::pow(2.0 * indices_[static_cast<std::size_t>(pos)].order() + spec_.d, 2.0 * p);
}

Eigen::VectorXd Basis::sobolev_weights(double p) const {
    Eigen::VectorXd w(size());
    for (int i = 0; i < size(); ++i) w[i] = sobolev_weight(i, p);
    return w;
}

long Basis::node_count() const {
    long n = 1;
    for (int i = 0; i < spec_.d; ++i) n *= quad_.size();
    return n;
}

void Basis::node_point(long flat, Eigen::VectorXd& x) const {
    const int q = quad_.size();
    x.resize(spec_.d);
    for (int i = 0; i < spec_.d; ++i) {
        x[i] = quad_.nodes[flat % q];
        flat /= q;
    }
}

double Basis::node_weight(long flat) const {
    const int q = quad_.size();
    double w = 1.0;
    for (int i = 0; i < spec_.d; ++i) {
        w *= quad_.weights[flat % q];
        flat /= q;
    }
    return w;
}

double Basis::basis_value_at_node(long flat, int pos) const {
    const int q = quad_.size();
    const MultiIndex& k = indices_[static_cast<std::size_t>(pos)];
    double v = 1.0;
    for (int i = 0; i < spec_.d; ++i) {
        v *= node_values_(static_cast<int>(flat % q), k[i]);
        flat /= q;
    }
    return v;
}

}  // namespace spdeflow
