#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spdeflow/checks.hpp"
#include "spdeflow/operators.hpp"
#include "spdeflow/quadrature.hpp"

#include "support/law_oracles.hpp"

using namespace spdeflow;

namespace {

Eigen::VectorXd pt(double x) {
    Eigen::VectorXd v(1);
    v[0] = x;
    return v;
}

using law_oracle::ou_euler_chain_law;

Eigen::VectorXd gaussian_law_coeffs(const Basis& basis, double mu, double var) {
    return law_oracle::gaussian_law_coeffs(basis, mu, var, 0);
}

}  // namespace

TEST_CASE("MC solve, brownian delta_0: odd symmetry and Gaussian law oracle") {
    const CoefficientModel model = CoefficientModel::brownian(1);
    auto basis = Basis::make(1, 12);
    const CompactDistribution psi = CompactDistribution::delta(pt(0.0));

    const SolveReport rep = solve_forward_mc_at(psi, model, 1.0, 20000, 1e-2, 0.5, basis, 1234);
    CHECK(rep.blowups == 0);

    // c_1 = 0 within 3 SE (symmetric law)
    CHECK(std::abs(rep.mean.coeff(MultiIndex{1})) <= 3.0 * rep.std_error[1]);

    // the brownian Euler scheme is exact in law: N(0, 1)
    const Eigen::VectorXd oracle = gaussian_law_coeffs(*basis, 0.0, 1.0);
    for (int pos = 0; pos < basis->size(); ++pos) {
        const double se = std::max(rep.std_error[pos], 1e-12);
        CHECK(std::abs(rep.mean.coeffs()[pos] - oracle[pos]) <= 4.0 * se);
    }
    CHECK(rep.second_moment > 0.0);
}

TEST_CASE("MC solve, OU delta_0 at t = 1 matches the closed-form law within bands") {
    const CoefficientModel model = CoefficientModel::ou(1);
    auto basis = Basis::make(1, 12);
    const CompactDistribution psi = CompactDistribution::delta(pt(0.0));
    const double dt = 1e-3;
    const SolveReport rep = solve_forward_mc_at(psi, model, 1.0, 20000, dt, 0.5, basis, 999);

    // compare against the Euler-chain law (removes the O(dt) bias from the band check)
    double m, v;
    ou_euler_chain_law(dt, 1000, m, v);
    CHECK(std::abs(v - 0.5 * (1.0 - std::exp(-2.0))) <= 2e-3);
    const Eigen::VectorXd oracle = gaussian_law_coeffs(*basis, m, v);
    for (int pos = 0; pos < basis->size(); ++pos) {
        const double se = std::max(rep.std_error[pos], 1e-12);
        CHECK(std::abs(rep.mean.coeffs()[pos] - oracle[pos]) <= 4.0 * se);
    }
}

TEST_CASE("weak order one via the exact Euler-chain law (OU)") {
    auto basis = Basis::make(1, 8);
    const Eigen::VectorXd exact = gaussian_law_coeffs(*basis, 0.0, 0.5 * (1.0 - std::exp(-2.0)));

    double m1, v1, m2, v2;
    ou_euler_chain_law(4e-2, 25, m1, v1);
    ou_euler_chain_law(2e-2, 50, m2, v2);
    const Eigen::VectorXd c1 = gaussian_law_coeffs(*basis, m1, v1);
    const Eigen::VectorXd c2 = gaussian_law_coeffs(*basis, m2, v2);

    const double e1 = (c1 - exact).cwiseAbs().maxCoeff();
    const double e2 = (c2 - exact).cwiseAbs().maxCoeff();
    const double ratio = e1 / e2;
    CHECK(ratio >= 1.6);
    CHECK(ratio <= 2.6);

    // and the MC solver reproduces the chain law within 4 SE at the coarse step
    const CoefficientModel model = CoefficientModel::ou(1);
    const CompactDistribution psi = CompactDistribution::delta(pt(0.0));
    const SolveReport rep = solve_forward_mc_at(psi, model, 1.0, 20000, 4e-2, 0.5, basis, 4321);
    for (int pos = 0; pos < basis->size(); ++pos) {
        const double se = std::max(rep.std_error[pos], 1e-12);
        CHECK(std::abs(rep.mean.coeffs()[pos] - c1[pos]) <= 4.0 * se);
    }
}

TEST_CASE("MC solve rejects p below the Prop-4.2 rule and explosive models") {
    const CoefficientModel model = CoefficientModel::brownian(1);
    auto basis = Basis::make(1, 8);
    const CompactDistribution psi = CompactDistribution::delta_derivative(pt(0.0), MultiIndex{1});
    CHECK_THROWS_AS(
        (void)solve_forward_mc_at(psi, model, 0.1, 10, 1e-2, 0.5, basis, 1),  // needs p > 0.75
        std::invalid_argument);

    Polynomial x5 = Polynomial::coordinate(1, 0) * Polynomial::coordinate(1, 0) *
                    Polynomial::coordinate(1, 0) * Polynomial::coordinate(1, 0) *
                    Polynomial::coordinate(1, 0);
    const CoefficientModel bad = CoefficientModel::scalar(Polynomial::constant(1, 0.0), x5);
    const CompactDistribution far = CompactDistribution::delta(pt(3.0));
    CHECK_THROWS_AS((void)solve_forward_mc_at(far, bad, 50.0, 64, 0.5, 0.5, basis, 2),
                    std::runtime_error);
}

TEST_CASE("galerkin: zero generator keeps the state constant") {
    const CoefficientModel zero =
        CoefficientModel::constant(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1));
    auto basis = Basis::make(1, 16);
    CompactDistribution psi(1);
    psi.add_atom(1.0, MultiIndex{1}, pt(0.3));
    const GalerkinReport rep = solve_forward_galerkin(psi, zero, 1.0, 1e-2, basis, 4, 3.0);
    const Eigen::VectorXd c0 = psi.to_series(basis).coeffs();
    CHECK((rep.final_state().coeffs() - c0).cwiseAbs().maxCoeff() == 0.0);
    for (double r : rep.integral_residual) CHECK(r == 0.0);
}

TEST_CASE("galerkin heat flow: second moment grows like t") {
    const CoefficientModel model = CoefficientModel::brownian(1);
    auto basis = Basis::make(1, 64);
    const CompactDistribution psi = CompactDistribution::delta(pt(0.0));
    const double t = 0.5;
    const GalerkinReport rep = solve_forward_galerkin(psi, model, t, 5e-4, basis, 2, 3.0);
    REQUIRE(!rep.aborted_stiff);

    // <psi_t, phi> -> int phi dN(0,t) for quadratic phi(x) = x^2 e^{-x^2/2}... use plain
    // polynomial-times-Gaussian test functions, which lie in the truncated span.
    auto phi = [](const Eigen::VectorXd& x) {
        return x[0] * x[0] * std::exp(-0.5 * x[0] * x[0]);
    };
    const HermiteSeries phis = transform(phi, basis);
    const double got = rep.final_state().coeffs().dot(phis.coeffs());

    // oracle: E phi(Z), Z ~ N(0, t), by quadrature
    const GaussHermiteRule rule = gauss_hermite(96);
    double expect = 0.0;
    for (int i = 0; i < rule.size(); ++i) {
        const double y = std::sqrt(2.0 * t) * rule.nodes[i];
        const double w = rule.weights[i] * std::exp(-rule.nodes[i] * rule.nodes[i]) /
                         std::sqrt(3.14159265358979323846);
        expect += w * phi(pt(y));
    }
    CHECK(std::abs(got - expect) <= 1e-4);
}

TEST_CASE("galerkin OU flows toward the stationary density") {
    const CoefficientModel model = CoefficientModel::ou(1);
    auto basis = Basis::make(1, 48);
    const CompactDistribution psi = CompactDistribution::delta(pt(0.5));
    const GalerkinReport rep = solve_forward_galerkin(psi, model, 3.0, 1e-3, basis, 6, 3.0);
    REQUIRE(!rep.aborted_stiff);

    const HermiteSeries stat = transform(
        [](const Eigen::VectorXd& x) {
            return std::exp(-x[0] * x[0]) / std::sqrt(3.14159265358979323846);
        },
        basis);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < rep.states.size(); ++i) {
        const double dist = sobolev_norm(rep.states[i] - stat, -1.0);
        CHECK(dist < prev);
        prev = dist;
    }
}

TEST_CASE("uniqueness consequence: Galerkin runs contract as the step shrinks") {
    const CoefficientModel model = CoefficientModel::ou(1);
    auto basis = Basis::make(1, 32);
    const CompactDistribution psi = CompactDistribution::delta(pt(0.0));
    const GalerkinReport a = solve_forward_galerkin(psi, model, 1.0, 4e-3, basis, 1, 3.0);
    const GalerkinReport b = solve_forward_galerkin(psi, model, 1.0, 2e-3, basis, 1, 3.0);
    const GalerkinReport c = solve_forward_galerkin(psi, model, 1.0, 1e-3, basis, 1, 3.0);
    const double gap_ab = (a.final_state() - b.final_state()).coeffs().cwiseAbs().maxCoeff();
    const double gap_bc = (b.final_state() - c.final_state()).coeffs().cwiseAbs().maxCoeff();
    CHECK(gap_bc < gap_ab);
    CHECK(gap_ab / gap_bc >= 8.0);  // 4th-order one-step method
}

TEST_CASE("kernel estimate: heat kernel and t -> 0 limit") {
    const CoefficientModel model = CoefficientModel::brownian(1);
    auto basis = Basis::make(1, 16);

    const KernelEstimate est = estimate_kernel(model, pt(0.5), 1.0, 20000, 1e-2, basis, 77);
    const Eigen::VectorXd oracle = gaussian_law_coeffs(*basis, 0.5, 1.0);
    for (int pos = 0; pos < basis->size(); ++pos) {
        const double se = std::max(est.std_error[pos], 1e-12);
        CHECK(std::abs(est.series.coeffs()[pos] - oracle[pos]) <= 4.0 * se);
    }
    CHECK(std::abs(est.mass - 1.0) <= 4.0 * est.mass_std_error + 1e-3);

    // t -> 0: correlation with delta_coeffs(x) above 0.999
    const KernelEstimate tiny = estimate_kernel(model, pt(0.5), 1e-4, 2000, 1e-5, basis, 78);
    const Eigen::VectorXd d = delta_coeffs(pt(0.5), basis).coeffs();
    const double corr = tiny.series.coeffs().dot(d) /
                        (tiny.series.coeffs().norm() * d.norm());
    CHECK(corr > 0.999);
}

TEST_CASE("monotonicity constant") {
    SUBCASE("zero model gives exactly zero") {
        const CoefficientModel zero =
            CoefficientModel::constant(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1));
        const MonotonicityReport rep = check_monotonicity(zero, 3.0, Basis::make(1, 16));
        CHECK(rep.c_star == 0.0);
    }
    SUBCASE("brownian: finite with small refinement drift") {
        const MonotonicityReport rep = check_monotonicity(CoefficientModel::brownian(1), 3.0,
                                                          Basis::make(1, 64));
        CHECK(std::isfinite(rep.c_star));
        CHECK(rep.c_star > 0.0);
        CHECK(rep.drift < 0.10);
    }
    SUBCASE("unstable drift reports growth (negative control)") {
        std::vector<Polynomial> sigma{Polynomial::constant(1, 1.0)};
        std::vector<Polynomial> b_up{Polynomial::coordinate(1, 0)};
        const CoefficientModel unstable(1, 1, sigma, b_up);
        const MonotonicityReport up = check_monotonicity(unstable, 3.0, Basis::make(1, 32));
        const MonotonicityReport down = check_monotonicity(CoefficientModel::ou(1), 3.0,
                                                           Basis::make(1, 32));
        CHECK(up.c_star > down.c_star);
        CHECK(up.c_star > 1.0);
    }
}

TEST_CASE("symmetry checker: brownian passes, OU is flagged") {
    std::vector<Eigen::VectorXd> grid;
    for (double v : {-1.0, 0.0, 1.0}) grid.push_back(pt(v));

    const SymmetryReport ok = check_symmetry(CoefficientModel::brownian(1), 1.0, grid, 20000,
                                             5e-3, 91);
    CHECK(ok.pass);
    // diagonal entries are compared against themselves
    for (int i = 0; i < 3; ++i) CHECK(ok.p_hat(i, i) == ok.p_hat(i, i));

    const SymmetryReport bad = check_symmetry(CoefficientModel::ou(1), 1.0, grid, 20000, 5e-3, 92);
    CHECK(!bad.pass);
}

TEST_CASE("translation checker on the constant model") {
    const CoefficientModel model =
        CoefficientModel::constant(Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Ones(1));
    auto basis = Basis::make(1, 32);
    const TranslationReport rep =
        check_translation(model, 0.5, pt(1.0), 20000, 1e-3, 1.0, basis, 93);
    CHECK(rep.pass);
    CHECK(rep.norm_diff <= rep.band);
    CHECK(rep.pathwise_max_diff <= rep.pathwise_tol);

    CHECK_THROWS_AS((void)check_translation(CoefficientModel::ou(1), 0.5, pt(1.0), 100, 1e-2, 1.0,
                                            basis, 94),
                    std::invalid_argument);
}

TEST_CASE("superposition: kernels integrate the density forward") {
    const CoefficientModel model = CoefficientModel::brownian(1);
    auto basis = Basis::make(1, 12);
    const CompactDistribution uni =
        CompactDistribution::uniform_density(pt(-0.5), pt(0.5), 9);
    const SuperpositionReport rep =
        superposition_check(model, uni, 0.5, 8000, 5e-3, basis, 95, 96);
    CHECK(rep.pass);
}

TEST_CASE("martingale term has zero mean") {
    const CoefficientModel model = CoefficientModel::brownian(1);
    auto basis = Basis::make(1, 16);
    const CompactDistribution psi = CompactDistribution::delta(pt(0.0));
    const MartingaleReport rep = martingale_zero_check(psi, model, 0.5, 3.0, basis, 400, 4e-3, 97);
    CHECK(rep.pass);
}

TEST_CASE("semigroup bound: ratios bounded, t = 0 ratio below one") {
    const CoefficientModel model = CoefficientModel::brownian(1);
    auto basis = Basis::make(1, 24);
    std::vector<CompactDistribution> probes;
    for (double v : {-1.0, 0.0, 1.0}) {
        probes.push_back(CompactDistribution::delta(pt(v)));
        probes.push_back(CompactDistribution::delta_derivative(pt(v), MultiIndex{1}));
    }
    const SemigroupReport rep =
        semigroup_bound(model, 1.0, 3.75, probes, 1.0, 8, 4000, 5e-3, basis, 98);
    CHECK(rep.pass);
    // at t = 0 the ratio is ||psi||_{-q}/||psi||_{-p} <= 1 for q > p
    for (int pi = 0; pi < rep.ratios.cols(); ++pi) CHECK(rep.ratios(0, pi) <= 1.0 + 1e-12);

    CHECK_THROWS_AS((void)semigroup_bound(model, 1.0, 2.0, probes, 1.0, 4, 100, 1e-2, basis, 99),
                    std::invalid_argument);
}

TEST_CASE("MC report serialization is deterministic") {
    const CoefficientModel model = CoefficientModel::brownian(1);
    auto basis = Basis::make(1, 8);
    const CompactDistribution psi = CompactDistribution::delta(pt(0.0));
    const SolveReport a = solve_forward_mc_at(psi, model, 0.5, 500, 1e-2, 0.5, basis, 31415);
    const SolveReport b = solve_forward_mc_at(psi, model, 0.5, 500, 1e-2, 0.5, basis, 31415);
    CHECK(a.to_json().dump() == b.to_json().dump());
}
