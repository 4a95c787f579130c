#include "spdeflow/series.hpp"

#include <cmath>

#include "spdeflow/hermite.hpp"

namespace spdeflow {

double HermiteSeries::evaluate(const Eigen::VectorXd& x) const {
    const Basis& b = *basis_;
    const int d = b.d();
    if (x.size() != d) throw std::invalid_argument("HermiteSeries::evaluate: dimension mismatch");
    // Per-axis value tables, then graded products.
    std::vector<std::vector<double>> tables(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) tables[static_cast<std::size_t>(i)] = hermite_values(b.n_max(), x[i]);
    double acc = 0.0;
    for (int pos = 0; pos < b.size(); ++pos) {
        const MultiIndex& k = b.index(pos);
        double v = c_[pos];
        if (v == 0.0) continue;
        for (int i = 0; i < d; ++i) v *= tables[static_cast<std::size_t>(i)][static_cast<std::size_t>(k[i])];
        acc += v;
    }
    return acc;
}

HermiteSeries& HermiteSeries::operator+=(const HermiteSeries& o) {
    if (!basis_->same_as(*o.basis_)) throw std::invalid_argument("HermiteSeries: basis mismatch");
    c_ += o.c_;
    return *this;
}

HermiteSeries& HermiteSeries::operator-=(const HermiteSeries& o) {
    if (!basis_->same_as(*o.basis_)) throw std::invalid_argument("HermiteSeries: basis mismatch");
    c_ -= o.c_;
    return *this;
}

nlohmann::ordered_json HermiteSeries::to_json() const {
    nlohmann::ordered_json j;
    j["d"] = basis_->d();
    j["n_max"] = basis_->n_max();
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (int pos = 0; pos < basis_->size(); ++pos) {
        entries.push_back({basis_->index(pos).entries(), c_[pos]});
    }
    j["entries"] = entries;
    return j;
}

HermiteSeries HermiteSeries::from_json(const nlohmann::json& j) {
    const int d = j.at("d").get<int>();
    const int n_max = j.at("n_max").get<int>();
    auto basis = Basis::make(d, n_max);
    HermiteSeries s(basis);
    for (const auto& e : j.at("entries")) {
        MultiIndex k(e.at(0).get<std::vector<int>>());
        s.set_coeff(k, e.at(1).get<double>());
    }
    return s;
}

double sobolev_inner(const HermiteSeries& f, const HermiteSeries& g, double p) {
    if (!f.basis()->same_as(*g.basis()))
        throw std::invalid_argument("sobolev_inner: basis mismatch");
    const Basis& b = *f.basis();
    double acc = 0.0;
    for (int pos = 0; pos < b.size(); ++pos)
        acc += b.sobolev_weight(pos, p) * f.coeffs()[pos] * g.coeffs()[pos];
    return acc;
}

double sobolev_norm(const HermiteSeries& f, double p) {
    return std::sqrt(sobolev_inner(f, f, p));
}

}  // namespace spdeflow
