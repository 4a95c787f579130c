#pragma once

// Exact multivariate polynomial arithmetic over plain exponent maps. Test-only oracle for
// chain-rule identities: deliberately independent of the library's expansion machinery.

#include <functional>
#include <map>
#include <vector>

#include <Eigen/Core>

#include "spdeflow/rng.hpp"

namespace poly_oracle {

using Poly = std::map<std::vector<int>, double>;  // exponents -> coefficient

inline Poly constant(int d, double c) {
    Poly p;
    if (c != 0.0) p[std::vector<int>(static_cast<std::size_t>(d), 0)] = c;
    return p;
}

inline Poly add(const Poly& a, const Poly& b) {
    Poly out = a;
    for (const auto& kv : b) {
        out[kv.first] += kv.second;
        if (out[kv.first] == 0.0) out.erase(kv.first);
    }
    return out;
}

inline Poly mul(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& ka : a)
        for (const auto& kb : b) {
            std::vector<int> e = ka.first;
            for (std::size_t i = 0; i < e.size(); ++i) e[i] += kb.first[i];
            out[e] += ka.second * kb.second;
        }
    return out;
}

inline Poly diff(const Poly& a, int axis) {
    Poly out;
    for (const auto& kv : a) {
        const int e = kv.first[static_cast<std::size_t>(axis)];
        if (e == 0) continue;
        std::vector<int> ex = kv.first;
        ex[static_cast<std::size_t>(axis)] -= 1;
        out[ex] += kv.second * e;
    }
    return out;
}

inline double eval(const Poly& a, const Eigen::VectorXd& x) {
    double acc = 0.0;
    for (const auto& kv : a) {
        double v = kv.second;
        for (std::size_t i = 0; i < kv.first.size(); ++i)
            for (int j = 0; j < kv.first[i]; ++j) v *= x[static_cast<long>(i)];
        acc += v;
    }
    return acc;
}

/// phi(f_1(x), ..., f_m(x)) expanded exactly as a polynomial in x.
inline Poly compose(const Poly& phi, const std::vector<Poly>& f, int d_in) {
    Poly out = constant(d_in, 0.0);
    for (const auto& kv : phi) {
        Poly term = constant(d_in, kv.second);
        for (std::size_t i = 0; i < kv.first.size(); ++i)
            for (int j = 0; j < kv.first[i]; ++j) term = mul(term, f[i]);
        out = add(out, term);
    }
    return out;
}

inline Poly random_poly(int d, int degree, std::uint64_t seed) {
    Poly p;
    int counter = 0;
    std::vector<int> e(static_cast<std::size_t>(d), 0);
    std::function<void(int, int)> rec = [&](int axis, int remaining) {
        if (axis == d - 1) {
            e[static_cast<std::size_t>(axis)] = remaining;
            const spdeflow::Philox2x64 r =
                spdeflow::philox2x64(seed, 99, static_cast<std::uint64_t>(counter++));
            p[e] = 2.0 * spdeflow::uniform_open01(r.v0) - 1.0;
            e[static_cast<std::size_t>(axis)] = 0;
            return;
        }
        for (int v = 0; v <= remaining; ++v) {
            e[static_cast<std::size_t>(axis)] = v;
            rec(axis + 1, remaining - v);
        }
        e[static_cast<std::size_t>(axis)] = 0;
    };
    for (int n = 0; n <= degree; ++n) rec(0, n);
    return p;
}

}  // namespace poly_oracle
