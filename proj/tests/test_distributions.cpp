#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spdeflow/adjoint.hpp"
#include "spdeflow/checks.hpp"
#include "spdeflow/hermite.hpp"
#include "spdeflow/operators.hpp"
#include "spdeflow/pushforward.hpp"
#include "spdeflow/rng.hpp"

using namespace spdeflow;

namespace {

Eigen::VectorXd pt(double x) {
    Eigen::VectorXd v(1);
    v[0] = x;
    return v;
}

HermiteSeries random_series(const BasisPtr& basis, std::uint64_t seed) {
    HermiteSeries s(basis);
    for (int i = 0; i < basis->size(); ++i) {
        const Philox2x64 r = philox2x64(seed, 29, static_cast<std::uint64_t>(i));
        s.coeffs()[i] = 2.0 * uniform_open01(r.v0) - 1.0;
    }
    return s;
}

}  // namespace

TEST_CASE("pushforward of a delta is the delta at the flow image") {
    const CoefficientModel model = CoefficientModel::ou(1);
    auto basis = Basis::make(1, 24);
    BrownianDriver driver(1, 51, 1e-3, 700);
    const CompactDistribution psi = CompactDistribution::delta(pt(0.4));
    FlowEnsemble ens = simulate_flow(model, psi.start_points(), driver, 4, 0, 0.7);
    REQUIRE(ens.ok());

    const HermiteSeries y = pushforward(psi, ens, 0.7, basis);
    const HermiteSeries expected = delta_coeffs(ens.states.back()[0].x, basis);
    CHECK((y.coeffs() - expected.coeffs()).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("pushforward at t = 0 returns psi") {
    const CoefficientModel model = CoefficientModel::ou(1);
    auto basis = Basis::make(1, 16);
    BrownianDriver driver(1, 52, 1e-3, 10);

    CompactDistribution psi(1);
    psi.add_atom(0.7, MultiIndex{2}, pt(0.3));
    psi.add_atom(-1.3, MultiIndex{1}, pt(-0.2));
    FlowEnsemble ens = simulate_flow(model, psi.start_points(), driver, 0, 2, 0.0);

    const HermiteSeries y = pushforward(psi, ens, 0.0, basis);
    const HermiteSeries direct = psi.to_series(basis);
    CHECK((y.coeffs() - direct.coeffs()).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("pushforward linearity in psi (same noise)") {
    const CoefficientModel model = CoefficientModel::ou(1);
    auto basis = Basis::make(1, 20);
    BrownianDriver driver(1, 53, 1e-3, 500);

    CompactDistribution a(1), b(1), combo(1);
    a.add_atom(1.0, MultiIndex{1}, pt(0.2));
    b.add_atom(1.0, MultiIndex{0}, pt(-0.5));
    combo.add_atom(2.0, MultiIndex{1}, pt(0.2));
    combo.add_atom(-3.0, MultiIndex{0}, pt(-0.5));

    std::vector<Eigen::VectorXd> starts = combo.start_points();
    FlowEnsemble ens = simulate_flow(model, starts, driver, 9, 1, 0.5);
    REQUIRE(ens.ok());
    const HermiteSeries ya = pushforward(a, ens, 0.5, basis);
    const HermiteSeries yb = pushforward(b, ens, 0.5, basis);
    const HermiteSeries yc = pushforward(combo, ens, 0.5, basis);
    CHECK((yc.coeffs() - (2.0 * ya.coeffs() - 3.0 * yb.coeffs())).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("measure case: Y_t coefficients are sums of h_k at flow images") {
    const CoefficientModel model = CoefficientModel::brownian(1);
    auto basis = Basis::make(1, 12);
    BrownianDriver driver(1, 54, 1e-2, 60);

    CompactDistribution psi(1);
    psi.add_atom(0.25, MultiIndex{0}, pt(-0.5));
    psi.add_atom(0.75, MultiIndex{0}, pt(0.5));
    FlowEnsemble ens = simulate_flow(model, psi.start_points(), driver, 2, 0, 0.6);
    REQUIRE(ens.ok());

    const HermiteSeries y = pushforward(psi, ens, 0.6, basis);
    for (int pos = 0; pos < basis->size(); ++pos) {
        const int k = basis->index(pos)[0];
        const double expect = 0.25 * hermite_values(k, ens.states.back()[0].x[0])[k] +
                              0.75 * hermite_values(k, ens.states.back()[1].x[0])[k];
        CHECK(y.coeffs()[pos] == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("pathwise duality against the FD oracle (criterion-5 machinery)") {
    const CoefficientModel model = CoefficientModel::ou(1);
    auto basis = Basis::make(1, 32);
    const DualityReport rep = duality_check(model, pt(0.3), 2, 0.5, 20, 1e-3, basis, 61);
    CHECK(rep.max_error <= 1e-4);
    CHECK(rep.pass);
}

TEST_CASE("adjoint of the Laplacian model: L* delta_0 = 1/2 delta_0''") {
    const CoefficientModel model = CoefficientModel::brownian(1);
    auto basis = Basis::make(1, 24);
    AdjointGalerkin adj(basis, model);

    const HermiteSeries d0 = delta_coeffs(pt(0.0), basis);
    const HermiteSeries lhs = adj.apply_l_star(d0);
    const HermiteSeries rhs = delta_coeffs(pt(0.0), MultiIndex{2}, basis);
    // agreement on all coefficients reachable without truncation of the ladder
    for (int pos = 0; pos < basis->size(); ++pos) {
        if (basis->index(pos)[0] > basis->n_max() - 2) continue;
        CHECK(lhs.coeffs()[pos] == doctest::Approx(0.5 * rhs.coeffs()[pos]).epsilon(1e-10));
    }
}

TEST_CASE("OU stationary density is annihilated by L*") {
    const CoefficientModel model = CoefficientModel::ou(1);
    auto basis = Basis::make(1, 48);
    AdjointGalerkin adj(basis, model);

    // rho = N(0, 1/2): pi^{-1/2} e^{-x^2}
    const HermiteSeries rho = transform(
        [](const Eigen::VectorXd& x) {
            return std::exp(-x[0] * x[0]) / std::sqrt(3.14159265358979323846);
        },
        basis);
    const HermiteSeries lrho = adj.apply_l_star(rho);
    // interior coefficients vanish; the top two grades feel the ladder truncation
    for (int pos = 0; pos < basis->size(); ++pos)
        if (basis->index(pos)[0] <= basis->n_max() - 2)
            CHECK(std::abs(lrho.coeffs()[pos]) <= 1e-8);
}

TEST_CASE("operator duality: adjoint matrices are transposes of forward matrices") {
    for (int d : {1, 2}) {
        const int n_max = d == 1 ? 16 : 8;
        auto basis = Basis::make(d, n_max);
        // a non-trivial polynomial model
        std::vector<Polynomial> sigma, b;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Polynomial p = Polynomial::constant(d, i == j ? 1.0 : 0.1);
                if (i == j) p = p + Polynomial::coordinate(d, i) * 0.2;
                sigma.push_back(p);
            }
        for (int i = 0; i < d; ++i) b.push_back(Polynomial::coordinate(d, i) * (-0.7));
        const CoefficientModel model(d, d, std::move(sigma), std::move(b));

        AdjointGalerkin adj(basis, model);
        for (int i = 0; i < d; ++i) {
            const Eigen::MatrixXd diff = adj.a_star(i) - adj.a_forward(i).transpose();
            CHECK(diff.cwiseAbs().maxCoeff() <= 1e-10);
        }
        const Eigen::MatrixXd diff = adj.l_star() - adj.l_forward().transpose();
        CHECK(diff.cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("duality pairing <L* psi, phi> = <psi, L phi> under the mollified support") {
    const CoefficientModel model = CoefficientModel::ou(1);
    auto basis = Basis::make(1, 32);
    AdjointGalerkin adj(basis, model);
    for (std::uint64_t s = 0; s < 5; ++s) {
        HermiteSeries psi = random_series(basis, 70 + s);
        HermiteSeries phi = random_series(basis, 90 + s);
        const double lhs = sobolev_inner(adj.apply_l_star(psi), phi, 0.0);
        const double rhs = sobolev_inner(psi, HermiteSeries(basis, adj.l_forward() * phi.coeffs()), 0.0);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("hs norm of A*") {
    auto basis = Basis::make(1, 24);

    // sigma = 0 gives 0
    const CoefficientModel zero =
        CoefficientModel::constant(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1));
    AdjointGalerkin adj0(basis, zero);
    HermiteSeries f = random_series(basis, 5);
    CHECK(adj0.hs_norm_sq_a(f, 3.0) == 0.0);

    // r = 1, sigma = 1: equals ||psi'||^2_{-q}
    const CoefficientModel brown = CoefficientModel::brownian(1);
    AdjointGalerkin adj1(basis, brown);
    const HermiteSeries df = apply_derivative(f, 0);
    CHECK(adj1.hs_norm_sq_a(f, 3.0) ==
          doctest::Approx(sobolev_inner(df, df, -3.0)).epsilon(1e-10));
}

TEST_CASE("Prop 3.2-style boundedness: ||L* psi||_{-q} <= C ||psi||_{-p} on truncated spans") {
    const CoefficientModel model = CoefficientModel::ou(1);
    const double p = 1.0, q = 4.0;  // q = [p] + 3
    double c16 = 0.0, c32 = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        auto b16 = Basis::make(1, 16);
        AdjointGalerkin a16(b16, model);
        HermiteSeries f = random_series(b16, 200 + s);
        c16 = std::max(c16, sobolev_norm(a16.apply_l_star(f), -q) / sobolev_norm(f, -p));
    }
    for (std::uint64_t s = 0; s < 100; ++s) {
        auto b32 = Basis::make(1, 32);
        AdjointGalerkin a32(b32, model);
        HermiteSeries f = random_series(b32, 200 + s);
        c32 = std::max(c32, sobolev_norm(a32.apply_l_star(f), -q) / sobolev_norm(f, -p));
    }
    CHECK(c32 <= c16 * 1.2 + 0.2);  // stable under basis doubling
}

TEST_CASE("spde residual: T = 0 and step-size decay") {
    const CoefficientModel model = CoefficientModel::brownian(1);
    auto basis = Basis::make(1, 32);
    AdjointGalerkin adj(basis, model);
    const CompactDistribution psi = CompactDistribution::delta(pt(0.0));

    BrownianDriver driver(1, 77, 1e-3, 501);
    const SpdeResidualReport at0 = spde_residual(psi, model, adj, driver, 0, 0.0, 3.0);
    CHECK(at0.max_residual == 0.0);

    const SpdeResidualReport fine = spde_residual(psi, model, adj, driver, 0, 0.5, 3.0);
    const SpdeResidualReport coarse =
        spde_residual(psi, model, adj, driver.coarsened(4), 0, 0.5, 3.0);
    CHECK(fine.max_residual < coarse.max_residual);
    const double order = std::log(coarse.max_residual / fine.max_residual) / std::log(4.0);
    CHECK(order >= 0.4);

    // weakening the norm does not inflate the residual
    const SpdeResidualReport weaker = spde_residual(psi, model, adj, driver, 0, 0.5, 4.0);
    CHECK(weaker.max_residual <= 2.0 * fine.max_residual);
}

TEST_CASE("distribution config round trip and defaults") {
    CompactDistribution psi(1);
    psi.add_atom(1.0, MultiIndex{1}, pt(0.25));
    CHECK(psi.order() == 1);
    CHECK(psi.default_p() == doctest::Approx(1.0));
    CHECK(psi.default_q() == doctest::Approx(4.0));

    const auto j = nlohmann::json{
        {"atoms", {{1.0, {1}, {0.25}}}},
        {"density",
         {{"alpha", {0}}, {"grid", {{"lo", {-0.5}}, {"hi", {0.5}}, {"n", 5}}}, {"g", "uniform"}}}};
    const CompactDistribution parsed = CompactDistribution::from_json(j, 1);
    CHECK(parsed.atoms().size() == 6);  // 1 atom + 5 quadrature nodes
    CHECK(parsed.order() == 1);

    // uniform density integrates to the box volume
    double mass = 0.0;
    for (const auto& a : parsed.atoms())
        if (a.gamma.order() == 0) mass += a.weight;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pairing of a discretized density against a smooth function") {
    // int_{-1}^{1} cos(x) phi(x) dx with phi = Gaussian, via the atom pairing
    CompactDistribution psi(1);
    psi.add_density(MultiIndex{0}, pt(-1.0), pt(1.0), 17,
                    [](const Eigen::VectorXd& x) { return std::cos(x[0]); });
    const double got = psi.pair([](const MultiIndex& g, const Eigen::VectorXd& x) {
        REQUIRE(g.order() == 0);
        return std::exp(-0.5 * x[0] * x[0]);
    });
    // oracle: dense Simpson quadrature
    double oracle = 0.0;
    const int n = 20001;
    const double h = 2.0 / (n - 1);
    for (int i = 0; i < n; ++i) {
        const double x = -1.0 + i * h;
        const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        oracle += w * std::cos(x) * std::exp(-0.5 * x * x);
    }
    oracle *= h / 3.0;
    CHECK(got == doctest::Approx(oracle).epsilon(1e-10));
}
