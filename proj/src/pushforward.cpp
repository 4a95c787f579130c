#include "spdeflow/pushforward.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "spdeflow/hermite.hpp"

namespace spdeflow {

void accumulate_pushforward_atom(const DistributionAtom& atom, const FlowPointState& state,
                                 const std::vector<MultiIndex>& deriv_indices, const Basis& basis,
                                 Eigen::VectorXd& coeffs) {
    const int d = basis.d();
    const int g_order = atom.gamma.order();

    if (g_order == 0) {
        // Pure measure atom: Y contribution is w * delta_{X}.
        std::vector<std::vector<double>> vals(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i)
            vals[static_cast<std::size_t>(i)] = hermite_values(basis.n_max(), state.x[i]);
        for (int pos = 0; pos < basis.size(); ++pos) {
            const MultiIndex& k = basis.index(pos);
            double v = atom.weight;
            for (int i = 0; i < d; ++i)
                v *= vals[static_cast<std::size_t>(i)][static_cast<std::size_t>(k[i])];
            coeffs[pos] += v;
        }
        return;
    }

    // Chain-rule coefficients P_{gamma'} evaluated on the flow tensors.
    std::map<std::vector<int>, int> dpos;
    for (std::size_t i = 0; i < deriv_indices.size(); ++i)
        dpos[deriv_indices[i].entries()] = static_cast<int>(i);

    const std::vector<ChainRuleTerm>& terms = chain_rule_expansion(atom.gamma, d);
    std::map<std::vector<int>, double> p_gamma;
    for (const ChainRuleTerm& t : terms) {
        double v = t.coef;
        for (const auto& f : t.factors) {
            auto it = dpos.find(f.second.entries());
            if (it == dpos.end())
                throw std::invalid_argument("pushforward: flow derivative order below atom order");
            v *= state.derivs[static_cast<std::size_t>(it->second)][f.first];
        }
        p_gamma[t.outer.entries()] += v;
    }

    std::vector<Eigen::MatrixXd> jets(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
        jets[static_cast<std::size_t>(i)] = hermite_jet(basis.n_max(), state.x[i], g_order);

    const double sign = (g_order % 2 == 0) ? 1.0 : -1.0;
    for (const auto& kv : p_gamma) {
        if (kv.second == 0.0) continue;
        const MultiIndex gp(kv.first);
        const double w = atom.weight * sign * kv.second;
        for (int pos = 0; pos < basis.size(); ++pos) {
            const MultiIndex& k = basis.index(pos);
            double v = w;
            for (int i = 0; i < d; ++i) v *= jets[static_cast<std::size_t>(i)](gp[i], k[i]);
            coeffs[pos] += v;
        }
    }
}

HermiteSeries pushforward(const CompactDistribution& psi, const FlowEnsemble& ens, double t,
                          BasisPtr basis) {
    if (psi.dim() != basis->d()) throw std::invalid_argument("pushforward: dimension mismatch");
    if (ens.K < psi.order())
        throw std::invalid_argument("pushforward: ensemble derivative order below order(psi)");

    // Locate the recorded time.
    int time_idx = -1;
    for (std::size_t i = 0; i < ens.times.size(); ++i)
        if (std::abs(ens.times[i] - t) <= 1e-12 * (1.0 + std::abs(t))) {
            time_idx = static_cast<int>(i);
            break;
        }
    if (time_idx < 0) throw std::invalid_argument("pushforward: time not recorded in ensemble");

    HermiteSeries out(basis);
    const std::vector<FlowPointState>& states = ens.states[static_cast<std::size_t>(time_idx)];
    for (const DistributionAtom& a : psi.atoms()) {
        const int start = ens.start_index(a.location);
        if (start < 0) throw std::invalid_argument("pushforward: missing flow data for an atom location");
        accumulate_pushforward_atom(a, states[static_cast<std::size_t>(start)], ens.deriv_indices,
                                    *basis, out.coeffs());
    }
    return out;
}

}  // namespace spdeflow
