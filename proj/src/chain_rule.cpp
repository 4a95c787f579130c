#include "spdeflow/chain_rule.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace spdeflow {

namespace {

using FactorList = std::vector<std::pair<int, MultiIndex>>;

bool factor_less(const std::pair<int, MultiIndex>& a, const std::pair<int, MultiIndex>& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second.entries() < b.second.entries();
}

void canonicalize(ChainRuleTerm& t, int d_mid) {
    std::sort(t.factors.begin(), t.factors.end(), factor_less);
    MultiIndex outer(d_mid);
    for (const auto& f : t.factors) outer[f.first] += 1;
    t.outer = outer;
}

std::vector<ChainRuleTerm> merge(std::vector<ChainRuleTerm> terms, int d_mid) {
    for (ChainRuleTerm& t : terms) canonicalize(t, d_mid);
    std::map<std::vector<std::pair<int, std::vector<int>>>, ChainRuleTerm> merged;
    for (ChainRuleTerm& t : terms) {
        std::vector<std::pair<int, std::vector<int>>> key;
        key.reserve(t.factors.size());
        for (const auto& f : t.factors) key.emplace_back(f.first, f.second.entries());
        auto it = merged.find(key);
        if (it == merged.end())
            merged.emplace(std::move(key), std::move(t));
        else
            it->second.coef += t.coef;
    }
    std::vector<ChainRuleTerm> out;
    out.reserve(merged.size());
    for (auto& kv : merged) out.push_back(std::move(kv.second));
    return out;
}

std::vector<ChainRuleTerm> build(const MultiIndex& beta, int d_mid) {
    const int d_in = beta.dim();
    if (beta.order() == 0) {
        ChainRuleTerm t;
        t.outer = MultiIndex(d_mid);
        return {t};
    }
    // Differentiate the expansion of beta - e_axis along `axis`.
    int axis = d_in - 1;
    while (!beta.can_lower(axis)) --axis;
    const std::vector<ChainRuleTerm>& prev = chain_rule_expansion(beta.lowered(axis), d_mid);

    std::vector<ChainRuleTerm> next;
    const MultiIndex unit = MultiIndex::unit(d_in, axis);
    for (const ChainRuleTerm& t : prev) {
        if (t.factors.empty()) {
            // d_axis of F(X): sum_a (d_a F)(X) * d_axis X^a
            for (int a = 0; a < d_mid; ++a) {
                ChainRuleTerm nt;
                nt.coef = t.coef;
                nt.factors = {{a, unit}};
                next.push_back(std::move(nt));
            }
            continue;
        }
        // Product rule: hit the outer derivative, then each inner factor.
        for (int a = 0; a < d_mid; ++a) {
            ChainRuleTerm nt = t;
            nt.factors.emplace_back(a, unit);
            next.push_back(std::move(nt));
        }
        for (std::size_t l = 0; l < t.factors.size(); ++l) {
            ChainRuleTerm nt = t;
            nt.factors[l].second = nt.factors[l].second.raised(axis);
            next.push_back(std::move(nt));
        }
    }
    return merge(std::move(next), d_mid);
}

}  // namespace

const std::vector<ChainRuleTerm>& chain_rule_expansion(const MultiIndex& beta, int d_mid) {
    static std::map<std::pair<std::vector<int>, int>, std::vector<ChainRuleTerm>> cache;
    static std::mutex mtx;
    const auto key = std::make_pair(beta.entries(), d_mid);
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    std::vector<ChainRuleTerm> terms = build(beta, d_mid);
    std::lock_guard<std::mutex> lock(mtx);
    auto [it, inserted] = cache.emplace(key, std::move(terms));
    return it->second;
}

std::vector<std::pair<MultiIndex, double>> faa_di_bruno(const MultiIndex& alpha, int d_mid,
                                                        const InnerDerivFn& inner) {
    const std::vector<ChainRuleTerm>& terms = chain_rule_expansion(alpha, d_mid);
    std::map<std::vector<int>, double> grouped;
    for (const ChainRuleTerm& t : terms) {
        double v = t.coef;
        for (const auto& f : t.factors) v *= inner(f.first, f.second);
        grouped[t.outer.entries()] += v;
    }
    std::vector<std::pair<MultiIndex, double>> out;
    out.reserve(grouped.size());
    for (const auto& kv : grouped) {
        MultiIndex gamma(kv.first);
        const double sign = (gamma.order() % 2 == 0) ? 1.0 : -1.0;
        out.emplace_back(std::move(gamma), sign * kv.second);
    }
    return out;
}

}  // namespace spdeflow
