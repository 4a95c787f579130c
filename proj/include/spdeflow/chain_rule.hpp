#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "spdeflow/multi_index.hpp"

namespace spdeflow {

/// One term of the higher-order chain rule for a composite F(X(u)):
///   d^beta (F o X)(u) = sum_T coef_T * (d^{outer_T} F)(X(u)) * prod_l d^{gamma_l} X^{a_l}(u).
/// `outer` is the multi-index of the outer derivative over the intermediate coordinates;
/// it always equals the sum of e_{a_l} over the factors. All gamma_l have |gamma_l| >= 1
/// and sum to beta. Built by repeated formal differentiation, so the polynomial
/// dependence on the inner derivatives is constructed rather than assumed.
struct ChainRuleTerm {
    double coef = 1.0;
    MultiIndex outer;
    std::vector<std::pair<int, MultiIndex>> factors;  // (component a_l, inner index gamma_l)
};

/// Expansion for d^beta with intermediate dimension d_mid. Cached; the returned reference
/// stays valid for the process lifetime. beta may be zero (single term, empty factors).
const std::vector<ChainRuleTerm>& chain_rule_expansion(const MultiIndex& beta, int d_mid);

/// Oracle for inner derivative values: (component a, multi-index gamma) -> d^gamma X^a.
using InnerDerivFn = std::function<double(int, const MultiIndex&)>;

/// Chain-rule coefficients grouped by the outer index gamma, in the delta-pairing sign
/// convention: d^alpha (phi o f)(x) = sum_gamma e_gamma <phi, d^gamma delta_{f(x)}>
///           = sum_gamma e_gamma (-1)^{|gamma|} (d^gamma phi)(f(x)).
/// The plain chain-rule coefficient of (d^gamma phi)(f(x)) is (-1)^{|gamma|} e_gamma.
std::vector<std::pair<MultiIndex, double>> faa_di_bruno(const MultiIndex& alpha, int d_mid,
                                                        const InnerDerivFn& inner);

}  // namespace spdeflow
