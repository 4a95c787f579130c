#include "spdeflow/hermite.hpp"

#include <cmath>
#include <stdexcept>

#include "spdeflow/quadrature.hpp"

namespace spdeflow {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kPiQuarterInv = 0.7511255444649425;  // pi^{-1/4}
}

std::vector<double> hermite_values(int n_max, double t) {
    if (n_max < 0) throw std::invalid_argument("hermite_values: n_max must be >= 0");
    std::vector<double> h(static_cast<std::size_t>(n_max) + 1);
    h[0] = kPiQuarterInv * std::exp(-0.5 * t * t);
    if (n_max == 0) return h;
    h[1] = std::sqrt(2.0) * t * h[0];
    for (int n = 1; n < n_max; ++n)
        h[n + 1] = t * std::sqrt(2.0 / (n + 1)) * h[n] - std::sqrt(double(n) / (n + 1)) * h[n - 1];
    return h;
}

Eigen::MatrixXd hermite_jet(int n_max, double t, int max_deriv) {
    if (n_max < 0 || max_deriv < 0) throw std::invalid_argument("hermite_jet: bad arguments");
    const int J = max_deriv;
    Eigen::MatrixXd v(J + 1, n_max + 1);

    // Column n = 0: h_0 = pi^{-1/4} e^{-t^2/2} satisfies h_0' = -t h_0, so
    // h_0^{(j)} = -(t h_0^{(j-1)} + (j-1) h_0^{(j-2)}).
    v(0, 0) = kPiQuarterInv * std::exp(-0.5 * t * t);
    for (int j = 1; j <= J; ++j)
        v(j, 0) = -(t * v(j - 1, 0) + (j >= 2 ? (j - 1) * v(j - 2, 0) : 0.0));

    if (n_max >= 1) {
        // h_1 = sqrt(2) t h_0, Leibniz: h_1^{(j)} = sqrt(2)(t h_0^{(j)} + j h_0^{(j-1)}).
        const double r2 = std::sqrt(2.0);
        v(0, 1) = r2 * t * v(0, 0);
        for (int j = 1; j <= J; ++j) v(j, 1) = r2 * (t * v(j, 0) + j * v(j - 1, 0));
    }

    for (int n = 1; n < n_max; ++n) {
        const double c1 = std::sqrt(2.0 / (n + 1));
        const double c2 = std::sqrt(double(n) / (n + 1));
        v(0, n + 1) = c1 * t * v(0, n) - c2 * v(0, n - 1);
        for (int j = 1; j <= J; ++j)
            v(j, n + 1) = c1 * (t * v(j, n) + j * v(j - 1, n)) - c2 * v(j, n - 1);
    }
    return v;
}

double hermite_eval(const MultiIndex& k, const Eigen::VectorXd& x, const MultiIndex& gamma) {
    const int d = k.dim();
    if (x.size() != d || gamma.dim() != d)
        throw std::invalid_argument("hermite_eval: dimension mismatch");
    double prod = 1.0;
    for (int i = 0; i < d; ++i) {
        Eigen::MatrixXd jet = hermite_jet(k[i], x[i], gamma[i]);
        prod *= jet(gamma[i], k[i]);
    }
    return prod;
}

double hermite_eval(const MultiIndex& k, const Eigen::VectorXd& x) {
    return hermite_eval(k, x, MultiIndex(k.dim()));
}

std::vector<double> delta_norm_sq_partial_sums(const Eigen::VectorXd& x, double p, int n_max) {
    const int d = static_cast<int>(x.size());
    if (d < 1) throw std::invalid_argument("delta_norm_sq_partial_sums: empty point");
    if (n_max < 0) throw std::invalid_argument("delta_norm_sq_partial_sums: n_max must be >= 0");

    // Per-grade mass s_n = sum_{|k|=n} h_k(x)^2: convolution of the per-axis squares.
    const std::size_t len = static_cast<std::size_t>(n_max) + 1;
    std::vector<double> s(len, 0.0);
    {
        std::vector<double> h = hermite_values(n_max, x[0]);
        for (std::size_t n = 0; n < len; ++n) s[n] = h[n] * h[n];
    }
    for (int axis = 1; axis < d; ++axis) {
        std::vector<double> h = hermite_values(n_max, x[axis]);
        std::vector<double> sq(len);
        for (std::size_t n = 0; n < len; ++n) sq[n] = h[n] * h[n];
        std::vector<double> conv(len, 0.0);
        for (std::size_t a = 0; a < len; ++a) {
            if (s[a] == 0.0) continue;
            for (std::size_t b = 0; a + b < len; ++b) conv[a + b] += s[a] * sq[b];
        }
        s.swap(conv);
    }

    std::vector<double> partial(len);
    double acc = 0.0;
    for (std::size_t n = 0; n < len; ++n) {
        acc += std::pow(2.0 * static_cast<double>(n) + d, -2.0 * p) * s[n];
        partial[n] = acc;
    }
    return partial;
}

double delta_norm_sq_series(const Eigen::VectorXd& x, double p, int n_max) {
    return delta_norm_sq_partial_sums(x, p, n_max).back();
}

double delta_norm_sq_mehler(const Eigen::VectorXd& x, double p, double abs_tol) {
    const int d = static_cast<int>(x.size());
    if (d < 1) throw std::invalid_argument("delta_norm_sq_mehler: empty point");
    if (!(p > 0.25 * d))
        throw std::invalid_argument("delta_norm_sq_mehler: integral diverges for p <= d/4");

    const double xsq = x.squaredNorm();
    const double pref = std::pow(kPi, -0.5 * d);
    auto g = [&](double t) -> double {
        const double e4 = -std::expm1(-4.0 * t);  // 1 - e^{-4t}, accurate near 0
        return std::exp(-d * t - std::tanh(t) * xsq) * pref * std::pow(e4, -0.5 * d);
    };

    // Head: integrand ~ t^{2p-1} (4t)^{-d/2} near 0; tanh-sinh resolves the power law.
    const double head = integrate_tanh_sinh([&](double t) { return std::pow(t, 2.0 * p - 1.0) * g(t); },
                                            0.0, 1.0, abs_tol);

    // Tail via u = e^{-2t}: dt = -du/(2u), t = -ln(u)/2.
    const double u1 = std::exp(-2.0);
    const double tail = integrate_tanh_sinh(
        [&](double u) {
            const double t = -0.5 * std::log(u);
            return std::pow(t, 2.0 * p - 1.0) * g(t) / (2.0 * u);
        },
        0.0, u1, abs_tol);

    return (head + tail) / std::tgamma(2.0 * p);
}

}  // namespace spdeflow
