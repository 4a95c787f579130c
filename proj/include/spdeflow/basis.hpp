#pragma once

#include <memory>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "spdeflow/multi_index.hpp"
#include "spdeflow/quadrature.hpp"

namespace spdeflow {

/// Truncation parameters of a Hermite-function basis.
struct BasisSpec {
    int d = 1;           // spatial dimension
    int n_max = 0;       // max total degree |k|
    int quad_nodes = 0;  // Gauss-Hermite nodes per axis; 0 means the default below

    /// Effective per-axis node count: max(quad_nodes, 2*n_max + 1), so products of two
    /// basis functions are integrated exactly.
    int effective_quad_nodes() const {
        const int need = 2 * n_max + 1;
        return quad_nodes > need ? quad_nodes : need;
    }
};

/// Immutable truncated basis {h_k : |k| <= n_max} in graded lexicographic order, with the
/// per-axis quadrature rule and cached basis values at quadrature nodes. Shared by value
/// through shared_ptr; all methods are const and safe for concurrent use.
class Basis {
public:
    explicit Basis(BasisSpec spec);

    static std::shared_ptr<const Basis> make(int d, int n_max, int quad_nodes = 0) {
        return std::make_shared<const Basis>(BasisSpec{d, n_max, quad_nodes});
    }

    const BasisSpec& spec() const { return spec_; }
    int d() const { return spec_.d; }
    int n_max() const { return spec_.n_max; }
    int size() const { return static_cast<int>(indices_.size()); }

    const std::vector<MultiIndex>& indices() const { return indices_; }
    const MultiIndex& index(int pos) const { return indices_[static_cast<std::size_t>(pos)]; }

    /// Position of k in the graded lex enumeration, or -1 when |k| > n_max.
    int position(const MultiIndex& k) const {
        auto it = lookup_.find(k);
        return it == lookup_.end() ? -1 : it->second;
    }

    /// Sobolev weight (2|k|+d)^{2p} of the basis element at `pos`.
    double sobolev_weight(int pos, double p) const;

    /// Weight vector for all positions.
    Eigen::VectorXd sobolev_weights(double p) const;

    bool same_as(const Basis& other) const {
        return spec_.d == other.spec_.d && spec_.n_max == other.spec_.n_max;
    }

    // --- quadrature ---
    const GaussHermiteRule& quad() const { return quad_; }

    /// Per-axis basis values at quadrature nodes: entry (q, n) = h_n(t_q).
    const Eigen::MatrixXd& node_values() const { return node_values_; }

    /// Tensor-product node iteration (practical limit d <= 3).
    long node_count() const;
    void node_point(long flat, Eigen::VectorXd& x) const;
    double node_weight(long flat) const;
    /// h_k(node) for the basis element at `pos`.
    double basis_value_at_node(long flat, int pos) const;

private:
    BasisSpec spec_;
    std::vector<MultiIndex> indices_;
    std::unordered_map<MultiIndex, int, MultiIndexHash> lookup_;
    GaussHermiteRule quad_;
    Eigen::MatrixXd node_values_;
};

using BasisPtr = std::shared_ptr<const Basis>;

}  // namespace spdeflow
