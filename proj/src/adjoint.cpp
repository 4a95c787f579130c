#include "spdeflow/adjoint.hpp"

#include <cmath>

#include "spdeflow/operators.hpp"
#include "spdeflow/pushforward.hpp"

namespace spdeflow {

AdjointGalerkin::AdjointGalerkin(BasisPtr basis, const CoefficientModel& model)
    : basis_(std::move(basis)), model_(&model) {
    const Basis& b = *basis_;
    if (b.d() != model.d()) throw std::invalid_argument("AdjointGalerkin: dimension mismatch");
    const int d = model.d();
    const int r = model.r();

    deriv_.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) deriv_.push_back(derivative_matrix(b, i));

    auto mult_of = [&](const Polynomial& p) {
        if (p.is_zero()) return Eigen::MatrixXd(Eigen::MatrixXd::Zero(b.size(), b.size()));
        return multiply_matrix(b, [&p](const Eigen::VectorXd& x) { return p.eval(x); });
    };

    mult_sigma_.resize(static_cast<std::size_t>(d * r));
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < r; ++i) mult_sigma_[static_cast<std::size_t>(k * r + i)] = mult_of(model.sigma(k, i));
    mult_a_.resize(static_cast<std::size_t>(d * d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) mult_a_[static_cast<std::size_t>(i * d + j)] = mult_of(model.sigma_sigma_t(i, j));
    mult_b_.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) mult_b_[static_cast<std::size_t>(i)] = mult_of(model.b(i));

    a_star_.assign(static_cast<std::size_t>(r), Eigen::MatrixXd::Zero(b.size(), b.size()));
    for (int i = 0; i < r; ++i)
        for (int k = 0; k < d; ++k)
            a_star_[static_cast<std::size_t>(i)].noalias() -=
                deriv_[static_cast<std::size_t>(k)] * mult_sigma_[static_cast<std::size_t>(k * r + i)];

    l_star_ = Eigen::MatrixXd::Zero(b.size(), b.size());
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            l_star_.noalias() += 0.5 * deriv_[static_cast<std::size_t>(i)] *
                                 deriv_[static_cast<std::size_t>(j)] *
                                 mult_a_[static_cast<std::size_t>(i * d + j)];
    for (int i = 0; i < d; ++i)
        l_star_.noalias() -= deriv_[static_cast<std::size_t>(i)] * mult_b_[static_cast<std::size_t>(i)];
}

Eigen::MatrixXd AdjointGalerkin::a_forward(int i) const {
    const int d = model_->d();
    const int r = model_->r();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(basis_->size(), basis_->size());
    for (int k = 0; k < d; ++k)
        m.noalias() += mult_sigma_[static_cast<std::size_t>(k * r + i)] * deriv_[static_cast<std::size_t>(k)];
    return m;
}

Eigen::MatrixXd AdjointGalerkin::l_forward() const {
    const int d = model_->d();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(basis_->size(), basis_->size());
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            m.noalias() += 0.5 * mult_a_[static_cast<std::size_t>(i * d + j)] *
                           deriv_[static_cast<std::size_t>(j)] * deriv_[static_cast<std::size_t>(i)];
    for (int i = 0; i < d; ++i)
        m.noalias() += mult_b_[static_cast<std::size_t>(i)] * deriv_[static_cast<std::size_t>(i)];
    return m;
}

HermiteSeries AdjointGalerkin::apply_a_star(int i, const HermiteSeries& psi) const {
    return HermiteSeries(basis_, a_star_[static_cast<std::size_t>(i)] * psi.coeffs());
}

HermiteSeries AdjointGalerkin::apply_l_star(const HermiteSeries& psi) const {
    return HermiteSeries(basis_, l_star_ * psi.coeffs());
}

double AdjointGalerkin::hs_norm_sq_a(const HermiteSeries& psi, double q) const {
    const Eigen::VectorXd w = basis_->sobolev_weights(-q);
    double acc = 0.0;
    for (const Eigen::MatrixXd& a : a_star_) {
        const Eigen::VectorXd v = a * psi.coeffs();
        acc += (w.array() * v.array() * v.array()).sum();
    }
    return acc;
}

SpdeResidualReport spde_residual(const CompactDistribution& psi, const CoefficientModel& model,
                                 const AdjointGalerkin& adj, const BrownianDriver& driver,
                                 std::uint64_t path, double T, double q) {
    const BasisPtr& basis = adj.basis();
    const int r = model.r();
    const long n_steps = driver.steps_for(T);
    const double dt = driver.dt();

    FlowSimulator sim(model, psi.order());
    const std::vector<Eigen::VectorXd> starts = psi.start_points();
    const std::vector<int> atom_start = psi.atom_start_map();

    std::vector<long> record_steps(static_cast<std::size_t>(n_steps) + 1);
    for (long n = 0; n <= n_steps; ++n) record_steps[static_cast<std::size_t>(n)] = n;

    const Eigen::VectorXd psi0 = psi.to_series(basis).coeffs();
    const Eigen::VectorXd weights = basis->sobolev_weights(-q);

    SpdeResidualReport rep;
    rep.times.reserve(record_steps.size());
    rep.residual.reserve(record_steps.size());

    Eigen::VectorXd y(basis->size());
    Eigen::VectorXd stoch = Eigen::VectorXd::Zero(basis->size());
    Eigen::VectorXd drift = Eigen::VectorXd::Zero(basis->size());
    Eigen::VectorXd db(r);

    const long blow = sim.run(
        driver, path, starts, n_steps, record_steps,
        [&](int, long step, const std::vector<FlowPointState>& states) {
            y.setZero();
            for (std::size_t ai = 0; ai < psi.atoms().size(); ++ai)
                accumulate_pushforward_atom(psi.atoms()[ai],
                                            states[static_cast<std::size_t>(atom_start[ai])],
                                            sim.deriv_indices(), *basis, y);

            const Eigen::VectorXd defect = y - psi0 - stoch - drift;
            const double res = std::sqrt((weights.array() * defect.array() * defect.array()).sum());
            rep.times.push_back(step * dt);
            rep.residual.push_back(res);
            rep.max_residual = std::max(rep.max_residual, res);

            if (step < n_steps) {
                // Left-point Ito sums with the same increments as the flow.
                driver.increments(path, step, db.data());
                for (int i = 0; i < r; ++i) stoch.noalias() += (adj.a_star(i) * y) * db[i];
                drift.noalias() += (adj.l_star() * y) * dt;
            }
        });
    rep.blew_up = blow >= 0;
    rep.stochastic_integral = stoch;
    return rep;
}

}  // namespace spdeflow
