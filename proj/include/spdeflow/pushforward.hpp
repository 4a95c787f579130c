#pragma once

#include "spdeflow/distribution.hpp"
#include "spdeflow/flow.hpp"

namespace spdeflow {

/// Adds the contribution of one atom w * d^gamma delta_x to the coefficient vector of the
/// adjoint-flow image Y_t(psi), given the flow state at the atom's start point:
///   coeffs_k += w * (-1)^{|gamma|} * sum_{gamma'} P_{gamma'}(dX tensors) (d^{gamma'} h_k)(X).
/// P_{gamma'} is the chain-rule polynomial in the flow derivative tensors.
void accumulate_pushforward_atom(const DistributionAtom& atom, const FlowPointState& state,
                                 const std::vector<MultiIndex>& deriv_indices, const Basis& basis,
                                 Eigen::VectorXd& coeffs);

/// Y_t(psi) for one realization, from a fully recorded ensemble. The ensemble must hold
/// every atom location among its start points with derivative order >= order(psi); `t`
/// must be one of the recorded times.
HermiteSeries pushforward(const CompactDistribution& psi, const FlowEnsemble& ens, double t,
                          BasisPtr basis);

}  // namespace spdeflow
