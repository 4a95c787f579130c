#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "spdeflow/multi_index.hpp"

namespace spdeflow {

/// Multivariate polynomial with real coefficients, d <= 4. Backs the SDE coefficient
/// models, so derivatives of any order are exact. Terms are kept sorted by exponent
/// (graded lex) so evaluation and serialization are deterministic.
class Polynomial {
public:
    struct Term {
        std::array<int, 4> e{0, 0, 0, 0};
        double c = 0.0;
    };

    explicit Polynomial(int d = 1) : d_(d) {
        if (d < 1 || d > 4) throw std::invalid_argument("Polynomial: d must be in [1,4]");
    }

    static Polynomial constant(int d, double c);
    static Polynomial coordinate(int d, int axis);

    int dim() const { return d_; }
    bool is_zero() const { return terms_.empty(); }
    int degree() const;
    const std::vector<Term>& terms() const { return terms_; }

    void add_term(const MultiIndex& exponents, double coeff);

    double eval(const Eigen::VectorXd& x) const;

    Polynomial derivative(int axis) const;
    Polynomial derivative(const MultiIndex& beta) const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(double a) const;

    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && term_degree(terms_[0]) == 0); }
    bool is_affine() const { return degree() <= 1; }

private:
    static int term_degree(const Term& t) { return t.e[0] + t.e[1] + t.e[2] + t.e[3]; }
    void normalize();

    int d_;
    std::vector<Term> terms_;
};

}  // namespace spdeflow
