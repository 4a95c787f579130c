#include "spdeflow/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spdeflow {

namespace {

bool term_less(const Polynomial::Term& a, const Polynomial::Term& b) {
    const int da = a.e[0] + a.e[1] + a.e[2] + a.e[3];
    const int db = b.e[0] + b.e[1] + b.e[2] + b.e[3];
    if (da != db) return da < db;
    return a.e < b.e;
}

}  // namespace

Polynomial Polynomial::constant(int d, double c) {
    Polynomial p(d);
    if (c != 0.0) p.terms_.push_back(Term{{0, 0, 0, 0}, c});
    return p;
}

Polynomial Polynomial::coordinate(int d, int axis) {
    if (axis < 0 || axis >= d) throw std::invalid_argument("Polynomial::coordinate: bad axis");
    Polynomial p(d);
    Term t;
    t.e[static_cast<std::size_t>(axis)] = 1;
    t.c = 1.0;
    p.terms_.push_back(t);
    return p;
}

int Polynomial::degree() const {
    int deg = 0;
    for (const Term& t : terms_) deg = std::max(deg, term_degree(t));
    return deg;
}

void Polynomial::add_term(const MultiIndex& exponents, double coeff) {
    if (exponents.dim() != d_) throw std::invalid_argument("Polynomial::add_term: dimension mismatch");
    Term t;
    for (int i = 0; i < d_; ++i) t.e[static_cast<std::size_t>(i)] = exponents[i];
    t.c = coeff;
    terms_.push_back(t);
    normalize();
}

double Polynomial::eval(const Eigen::VectorXd& x) const {
    double acc = 0.0;
    for (const Term& t : terms_) {
        double v = t.c;
        for (int i = 0; i < d_; ++i) {
            const int e = t.e[static_cast<std::size_t>(i)];
            for (int j = 0; j < e; ++j) v *= x[i];
        }
        acc += v;
    }
    return acc;
}

Polynomial Polynomial::derivative(int axis) const {
    Polynomial out(d_);
    for (const Term& t : terms_) {
        const int e = t.e[static_cast<std::size_t>(axis)];
        if (e == 0) continue;
        Term dt = t;
        dt.e[static_cast<std::size_t>(axis)] = e - 1;
        dt.c = t.c * e;
        out.terms_.push_back(dt);
    }
    out.normalize();
    return out;
}

Polynomial Polynomial::derivative(const MultiIndex& beta) const {
    Polynomial out = *this;
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < beta[i]; ++j) out = out.derivative(i);
    return out;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    if (d_ != o.d_) throw std::invalid_argument("Polynomial: dimension mismatch");
    Polynomial out(d_);
    out.terms_ = terms_;
    out.terms_.insert(out.terms_.end(), o.terms_.begin(), o.terms_.end());
    out.normalize();
    return out;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    if (d_ != o.d_) throw std::invalid_argument("Polynomial: dimension mismatch");
    Polynomial out(d_);
    for (const Term& a : terms_)
        for (const Term& b : o.terms_) {
            Term t;
            for (std::size_t i = 0; i < 4; ++i) t.e[i] = a.e[i] + b.e[i];
            t.c = a.c * b.c;
            out.terms_.push_back(t);
        }
    out.normalize();
    return out;
}

Polynomial Polynomial::operator*(double a) const {
    Polynomial out(d_);
    if (a == 0.0) return out;
    out.terms_ = terms_;
    for (Term& t : out.terms_) t.c *= a;
    return out;
}

void Polynomial::normalize() {
    std::sort(terms_.begin(), terms_.end(), term_less);
    std::vector<Term> merged;
    for (const Term& t : terms_) {
        if (!merged.empty() && merged.back().e == t.e)
            merged.back().c += t.c;
        else
            merged.push_back(t);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const Term& t) { return t.c == 0.0; }),
                 merged.end());
    terms_ = std::move(merged);
}

}  // namespace spdeflow
