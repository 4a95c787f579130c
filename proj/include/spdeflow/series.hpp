#pragma once

#include <nlohmann/json.hpp>

#include "spdeflow/basis.hpp"

namespace spdeflow {

/// Truncated Hermite expansion: coefficients c_k = <f, h_k> for |k| <= n_max, stored densely
/// in the basis enumeration order. Represents functions and (restrictions of) tempered
/// distributions alike; the sign of the Sobolev index chosen at pairing time decides which.
class HermiteSeries {
public:
    HermiteSeries() = default;
    explicit HermiteSeries(BasisPtr basis)
        : basis_(std::move(basis)), c_(Eigen::VectorXd::Zero(basis_->size())) {}
    HermiteSeries(BasisPtr basis, Eigen::VectorXd coeffs)
        : basis_(std::move(basis)), c_(std::move(coeffs)) {
        if (c_.size() != basis_->size())
            throw std::invalid_argument("HermiteSeries: coefficient count does not match basis");
    }

    const BasisPtr& basis() const { return basis_; }
    const Eigen::VectorXd& coeffs() const { return c_; }
    Eigen::VectorXd& coeffs() { return c_; }

    double coeff(const MultiIndex& k) const {
        const int pos = basis_->position(k);
        return pos < 0 ? 0.0 : c_[pos];
    }
    void set_coeff(const MultiIndex& k, double v) {
        const int pos = basis_->position(k);
        if (pos < 0) throw std::invalid_argument("HermiteSeries: index beyond n_max");
        c_[pos] = v;
    }

    /// Pointwise reconstruction sum_k c_k h_k(x).
    double evaluate(const Eigen::VectorXd& x) const;

    HermiteSeries& operator+=(const HermiteSeries& o);
    HermiteSeries& operator-=(const HermiteSeries& o);
    HermiteSeries& operator*=(double a) {
        c_ *= a;
        return *this;
    }
    friend HermiteSeries operator+(HermiteSeries a, const HermiteSeries& b) { return a += b; }
    friend HermiteSeries operator-(HermiteSeries a, const HermiteSeries& b) { return a -= b; }
    friend HermiteSeries operator*(double a, HermiteSeries s) { return s *= a; }

    nlohmann::ordered_json to_json() const;
    static HermiteSeries from_json(const nlohmann::json& j);

private:
    BasisPtr basis_;
    Eigen::VectorXd c_;
};

/// <f,g>_p = sum_k (2|k|+d)^{2p} f_k g_k. Throws on basis mismatch.
double sobolev_inner(const HermiteSeries& f, const HermiteSeries& g, double p);

double sobolev_norm(const HermiteSeries& f, double p);

}  // namespace spdeflow
