#include "spdeflow/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "spdeflow/hermite.hpp"

namespace spdeflow {

GaussHermiteRule gauss_hermite(int q) {
    if (q < 1) throw std::invalid_argument("gauss_hermite: need at least one node");

    // Golub-Welsch: roots of H_q are the eigenvalues of the symmetric tridiagonal Jacobi
    // matrix with zero diagonal and off-diagonal sqrt(j/2).
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(q);
    Eigen::VectorXd sub(q > 1 ? q - 1 : 0);
    for (int j = 1; j < q; ++j) sub[j - 1] = std::sqrt(0.5 * j);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    Eigen::VectorXd t = es.eigenvalues();  // ascending

    // Newton polish on h_q, using h_q'(t) = sqrt(2q) h_{q-1}(t) - t h_q(t).
    for (int i = 0; i < q; ++i) {
        for (int it = 0; it < 3; ++it) {
            std::vector<double> h = hermite_values(q, t[i]);
            const double dq = std::sqrt(2.0 * q) * h[q - 1] - t[i] * h[q];
            if (dq == 0.0) break;
            const double step = h[q] / dq;
            t[i] -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(t[i]))) break;
        }
    }

    // Enforce exact symmetry t_i = -t_{q-1-i}.
    for (int i = 0; i < q / 2; ++i) {
        const double m = 0.5 * (t[i] - t[q - 1 - i]);
        t[i] = m;
        t[q - 1 - i] = -m;
    }
    if (q % 2 == 1) t[q / 2] = 0.0;

    GaussHermiteRule rule;
    rule.nodes = t;
    rule.weights.resize(q);
    for (int i = 0; i < q; ++i) {
        std::vector<double> h = hermite_values(q - 1, t[i]);
        double s = 0.0;
        for (int j = 0; j < q; ++j) s += h[j] * h[j];
        rule.weights[i] = 1.0 / s;
    }
    return rule;
}

GaussLegendreRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
    for (int j = 1; j < n; ++j) sub[j - 1] = j / std::sqrt(4.0 * j * j - 1.0);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    GaussLegendreRule rule;
    rule.nodes = es.eigenvalues();
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = 2.0 * v0 * v0;
    }
    return rule;
}

double integrate_tanh_sinh(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, int max_level) {
    if (!(b > a)) throw std::invalid_argument("integrate_tanh_sinh: need b > a");

    const double half = 0.5 * (b - a);
    const double pi_half = 1.5707963267948966;

    // Abscissa for parameter u: distances from both endpoints kept in full precision.
    auto eval_at = [&](double u) -> double {
        const double s = pi_half * std::sinh(u);
        // weight dx/du = half * (pi/2) cosh(u) / cosh(s)^2
        const double ch = std::cosh(s);
        if (!std::isfinite(ch)) return 0.0;
        const double w = half * pi_half * std::cosh(u) / (ch * ch);
        if (w == 0.0) return 0.0;
        // x = midpoint + half*tanh(s); near endpoints use the logistic form for accuracy
        double x;
        if (s >= 0.0) {
            const double dist_b = (b - a) / (1.0 + std::exp(2.0 * s));  // b - x
            x = b - dist_b;
        } else {
            const double dist_a = (b - a) / (1.0 + std::exp(-2.0 * s));  // x - a
            x = a + dist_a;
        }
        if (x <= a || x >= b) return 0.0;
        const double v = f(x);
        return std::isfinite(v) ? w * v : 0.0;
    };

    const double u_max = 4.0;  // cosh(pi/2*sinh(4)) overflows any double-range integrand
    double h = 1.0;
    double sum = eval_at(0.0);
    for (double u = h; u <= u_max; u += h) sum += eval_at(u) + eval_at(-u);
    double integral = h * sum;

    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (double u = h; u <= u_max; u += 2.0 * h) add += eval_at(u) + eval_at(-u);
        const double refined = 0.5 * integral + h * add;
        const double change = std::abs(refined - integral);
        integral = refined;
        if (level >= 3 && change <= abs_tol) break;
    }
    return integral;
}

}  // namespace spdeflow
