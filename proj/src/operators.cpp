#include "spdeflow/operators.hpp"

#include <cmath>
#include <stdexcept>

#include "spdeflow/hermite.hpp"

namespace spdeflow {

namespace {

// Node-value matrix B(q_flat, pos) = h_k(node), optionally with shifted per-axis tables.
Eigen::MatrixXd node_basis_matrix(const Basis& b, const Eigen::VectorXd* shift) {
    const int q = b.quad().size();
    const int d = b.d();
    const long nn = b.node_count();

    std::vector<Eigen::MatrixXd> axis_tables(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        if (!shift) {
            axis_tables[static_cast<std::size_t>(i)] = b.node_values();
        } else {
            Eigen::MatrixXd t(q, b.n_max() + 1);
            for (int qi = 0; qi < q; ++qi) {
                std::vector<double> h = hermite_values(b.n_max(), b.quad().nodes[qi] - (*shift)[i]);
                for (int n = 0; n <= b.n_max(); ++n) t(qi, n) = h[n];
            }
            axis_tables[static_cast<std::size_t>(i)] = std::move(t);
        }
    }

    Eigen::MatrixXd B(nn, b.size());
    for (long flat = 0; flat < nn; ++flat) {
        long rem = flat;
        std::array<int, 8> qidx{};
        for (int i = 0; i < d; ++i) {
            qidx[static_cast<std::size_t>(i)] = static_cast<int>(rem % q);
            rem /= q;
        }
        for (int pos = 0; pos < b.size(); ++pos) {
            const MultiIndex& k = b.index(pos);
            double v = 1.0;
            for (int i = 0; i < d; ++i)
                v *= axis_tables[static_cast<std::size_t>(i)](qidx[static_cast<std::size_t>(i)], k[i]);
            B(flat, pos) = v;
        }
    }
    return B;
}

Eigen::VectorXd node_weights_vector(const Basis& b) {
    const long nn = b.node_count();
    Eigen::VectorXd w(nn);
    for (long flat = 0; flat < nn; ++flat) w[flat] = b.node_weight(flat);
    return w;
}

}  // namespace

HermiteSeries transform(const ScalarField& f, BasisPtr basis) {
    const Basis& b = *basis;
    const long nn = b.node_count();
    Eigen::VectorXd fw(nn);
    Eigen::VectorXd x(b.d());
    for (long flat = 0; flat < nn; ++flat) {
        b.node_point(flat, x);
        const double v = f(x);
        if (!std::isfinite(v)) throw std::runtime_error("transform: non-finite sample");
        fw[flat] = v * b.node_weight(flat);
    }
    const Eigen::MatrixXd B = node_basis_matrix(b, nullptr);
    return HermiteSeries(basis, B.transpose() * fw);
}

HermiteSeries delta_coeffs(const Eigen::VectorXd& x, const MultiIndex& gamma, BasisPtr basis) {
    const Basis& b = *basis;
    const int d = b.d();
    if (x.size() != d || gamma.dim() != d)
        throw std::invalid_argument("delta_coeffs: dimension mismatch");
    std::vector<Eigen::MatrixXd> jets(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
        jets[static_cast<std::size_t>(i)] = hermite_jet(b.n_max(), x[i], gamma[i]);
    const double sign = (gamma.order() % 2 == 0) ? 1.0 : -1.0;
    HermiteSeries s(basis);
    for (int pos = 0; pos < b.size(); ++pos) {
        const MultiIndex& k = b.index(pos);
        double v = sign;
        for (int i = 0; i < d; ++i) v *= jets[static_cast<std::size_t>(i)](gamma[i], k[i]);
        s.coeffs()[pos] = v;
    }
    return s;
}

HermiteSeries delta_coeffs(const Eigen::VectorXd& x, BasisPtr basis) {
    const MultiIndex zero(basis->d());
    return delta_coeffs(x, zero, std::move(basis));
}

HermiteSeries apply_derivative(const HermiteSeries& f, int axis) {
    const Basis& b = *f.basis();
    HermiteSeries out(f.basis());
    for (int pos = 0; pos < b.size(); ++pos) {
        const MultiIndex& m = b.index(pos);
        double v = 0.0;
        const int up = b.position(m.raised(axis));
        if (up >= 0) v += std::sqrt(0.5 * (m[axis] + 1)) * f.coeffs()[up];
        if (m.can_lower(axis)) {
            const int down = b.position(m.lowered(axis));
            v -= std::sqrt(0.5 * m[axis]) * f.coeffs()[down];
        }
        out.coeffs()[pos] = v;
    }
    return out;
}

HermiteSeries multiply_by_coordinate(const HermiteSeries& f, int axis) {
    const Basis& b = *f.basis();
    HermiteSeries out(f.basis());
    for (int pos = 0; pos < b.size(); ++pos) {
        const MultiIndex& m = b.index(pos);
        double v = 0.0;
        const int up = b.position(m.raised(axis));
        if (up >= 0) v += std::sqrt(0.5 * (m[axis] + 1)) * f.coeffs()[up];
        if (m.can_lower(axis)) {
            const int down = b.position(m.lowered(axis));
            v += std::sqrt(0.5 * m[axis]) * f.coeffs()[down];
        }
        out.coeffs()[pos] = v;
    }
    return out;
}

HermiteSeries multiply_by_function(const HermiteSeries& f, const ScalarField& sigma) {
    return HermiteSeries(f.basis(), multiply_matrix(*f.basis(), sigma) * f.coeffs());
}

HermiteSeries translate(const HermiteSeries& f, const Eigen::VectorXd& shift) {
    if (shift.isZero(0.0)) return f;
    return HermiteSeries(f.basis(), translate_matrix(*f.basis(), shift) * f.coeffs());
}

Eigen::MatrixXd derivative_matrix(const Basis& basis, int axis) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(basis.size(), basis.size());
    for (int pos = 0; pos < basis.size(); ++pos) {
        const MultiIndex& k = basis.index(pos);
        const int up = basis.position(k.raised(axis));
        if (up >= 0) m(pos, up) = std::sqrt(0.5 * (k[axis] + 1));
        if (k.can_lower(axis)) m(pos, basis.position(k.lowered(axis))) = -std::sqrt(0.5 * k[axis]);
    }
    return m;
}

Eigen::MatrixXd coordinate_matrix(const Basis& basis, int axis) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(basis.size(), basis.size());
    for (int pos = 0; pos < basis.size(); ++pos) {
        const MultiIndex& k = basis.index(pos);
        const int up = basis.position(k.raised(axis));
        if (up >= 0) m(pos, up) = std::sqrt(0.5 * (k[axis] + 1));
        if (k.can_lower(axis)) m(pos, basis.position(k.lowered(axis))) = std::sqrt(0.5 * k[axis]);
    }
    return m;
}

Eigen::MatrixXd multiply_matrix(const Basis& basis, const ScalarField& sigma) {
    const long nn = basis.node_count();
    Eigen::VectorXd sw(nn);
    Eigen::VectorXd x(basis.d());
    for (long flat = 0; flat < nn; ++flat) {
        basis.node_point(flat, x);
        const double v = sigma(x);
        if (!std::isfinite(v)) throw std::runtime_error("multiply_matrix: non-finite sigma value");
        sw[flat] = v * basis.node_weight(flat);
    }
    const Eigen::MatrixXd B = node_basis_matrix(basis, nullptr);
    return B.transpose() * sw.asDiagonal() * B;
}

Eigen::MatrixXd translate_matrix(const Basis& basis, const Eigen::VectorXd& shift) {
    if (shift.size() != basis.d()) throw std::invalid_argument("translate_matrix: dimension mismatch");
    const Eigen::MatrixXd B = node_basis_matrix(basis, nullptr);
    const Eigen::MatrixXd Bs = node_basis_matrix(basis, &shift);
    const Eigen::VectorXd w = node_weights_vector(basis);
    return B.transpose() * w.asDiagonal() * Bs;
}

}  // namespace spdeflow
