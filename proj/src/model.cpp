#include "spdeflow/model.hpp"

#include <cmath>
#include <stdexcept>

namespace spdeflow {

CoefficientModel::CoefficientModel(int d, int r, std::vector<Polynomial> sigma_row_major,
                                   std::vector<Polynomial> b)
    : d_(d), r_(r), sigma_(std::move(sigma_row_major)), b_(std::move(b)) {
    if (d < 1 || r < 1) throw std::invalid_argument("CoefficientModel: d, r must be >= 1");
    if (sigma_.size() != static_cast<std::size_t>(d * r) || b_.size() != static_cast<std::size_t>(d))
        throw std::invalid_argument("CoefficientModel: sigma/b entry count mismatch");

    is_constant_ = true;
    is_linear_ = true;
    for (const Polynomial& p : sigma_) {
        if (!p.is_constant()) is_constant_ = false;
        if (p.degree() > 1) is_linear_ = false;
    }
    for (const Polynomial& p : b_) {
        if (!p.is_constant()) is_constant_ = false;
        if (p.degree() > 1) is_linear_ = false;
    }

    a_.reserve(static_cast<std::size_t>(d * d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Polynomial acc(d);
            for (int al = 0; al < r; ++al) acc = acc + sigma_[idx(i, al)] * sigma_[idx(j, al)];
            a_.push_back(acc);
        }

    deriv_indices_ = enumerate_multi_indices(d, kMaxDerivOrder);
    sigma_derivs_.resize(deriv_indices_.size());
    b_derivs_.resize(deriv_indices_.size());
    for (std::size_t pos = 0; pos < deriv_indices_.size(); ++pos) {
        deriv_pos_[deriv_indices_[pos].entries()] = static_cast<int>(pos);
        const MultiIndex& beta = deriv_indices_[pos];
        sigma_derivs_[pos].reserve(sigma_.size());
        for (const Polynomial& p : sigma_) sigma_derivs_[pos].push_back(p.derivative(beta));
        b_derivs_[pos].reserve(b_.size());
        for (const Polynomial& p : b_) b_derivs_[pos].push_back(p.derivative(beta));
    }
}

CoefficientModel CoefficientModel::brownian(int d) {
    std::vector<Polynomial> sigma;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) sigma.push_back(Polynomial::constant(d, i == j ? 1.0 : 0.0));
    std::vector<Polynomial> b(static_cast<std::size_t>(d), Polynomial(d));
    return CoefficientModel(d, d, std::move(sigma), std::move(b));
}

CoefficientModel CoefficientModel::ou(int d) {
    std::vector<Polynomial> sigma;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) sigma.push_back(Polynomial::constant(d, i == j ? 1.0 : 0.0));
    std::vector<Polynomial> b;
    for (int i = 0; i < d; ++i) b.push_back(Polynomial::coordinate(d, i) * (-1.0));
    return CoefficientModel(d, d, std::move(sigma), std::move(b));
}

CoefficientModel CoefficientModel::constant(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& b) {
    const int d = static_cast<int>(sigma.rows());
    const int r = static_cast<int>(sigma.cols());
    if (b.size() != d) throw std::invalid_argument("CoefficientModel::constant: b size mismatch");
    std::vector<Polynomial> sp, bp;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < r; ++j) sp.push_back(Polynomial::constant(d, sigma(i, j)));
    for (int i = 0; i < d; ++i) bp.push_back(Polynomial::constant(d, b[i]));
    return CoefficientModel(d, r, std::move(sp), std::move(bp));
}

CoefficientModel CoefficientModel::scalar(const Polynomial& sigma, const Polynomial& b) {
    return CoefficientModel(1, 1, {sigma}, {b});
}

void CoefficientModel::sigma_at(const Eigen::VectorXd& x, Eigen::MatrixXd& out) const {
    out.resize(d_, r_);
    for (int i = 0; i < d_; ++i)
        for (int al = 0; al < r_; ++al) out(i, al) = sigma_[idx(i, al)].eval(x);
}

void CoefficientModel::b_at(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
    out.resize(d_);
    for (int i = 0; i < d_; ++i) out[i] = b_[static_cast<std::size_t>(i)].eval(x);
}

const Polynomial& CoefficientModel::sigma_deriv(int i, int alpha, const MultiIndex& beta) const {
    auto it = deriv_pos_.find(beta.entries());
    if (it == deriv_pos_.end())
        throw std::invalid_argument("CoefficientModel: derivative order exceeds oracle");
    return sigma_derivs_[static_cast<std::size_t>(it->second)][idx(i, alpha)];
}

const Polynomial& CoefficientModel::b_deriv(int i, const MultiIndex& beta) const {
    auto it = deriv_pos_.find(beta.entries());
    if (it == deriv_pos_.end())
        throw std::invalid_argument("CoefficientModel: derivative order exceeds oracle");
    return b_derivs_[static_cast<std::size_t>(it->second)][static_cast<std::size_t>(i)];
}

void CoefficientModel::sigma_deriv_at(const MultiIndex& beta, const Eigen::VectorXd& x,
                                      Eigen::MatrixXd& out) const {
    out.resize(d_, r_);
    for (int i = 0; i < d_; ++i)
        for (int al = 0; al < r_; ++al) out(i, al) = sigma_deriv(i, al, beta).eval(x);
}

void CoefficientModel::b_deriv_at(const MultiIndex& beta, const Eigen::VectorXd& x,
                                  Eigen::VectorXd& out) const {
    out.resize(d_);
    for (int i = 0; i < d_; ++i) out[i] = b_deriv(i, beta).eval(x);
}

double CoefficientModel::linear_growth_constant(const std::vector<Eigen::VectorXd>& grid) const {
    double worst = 0.0;
    Eigen::MatrixXd s;
    Eigen::VectorXd bv;
    for (const auto& x : grid) {
        sigma_at(x, s);
        b_at(x, bv);
        const double v = (s.norm() + bv.norm()) / (1.0 + x.norm());
        worst = std::max(worst, v);
    }
    return worst;
}

}  // namespace spdeflow
