#include "spdeflow/checks.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "spdeflow/operators.hpp"

namespace spdeflow {

namespace {

constexpr double kRoot2Pi = 2.5066282746310005;

double pencil_max_eigenvalue(const CoefficientModel& model, double q, const BasisPtr& basis) {
    AdjointGalerkin adj(basis, model);
    const int S = basis->size();
    const Eigen::VectorXd g = basis->sobolev_weights(-q);
    Eigen::MatrixXd sym = g.asDiagonal() * adj.l_star();
    sym += sym.transpose().eval();
    for (int i = 0; i < adj.r(); ++i) {
        const Eigen::MatrixXd& a = adj.a_star(i);
        sym.noalias() += a.transpose() * g.asDiagonal() * a;
    }
    if (sym.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    // Symmetric scaling by G^{-1/2} (diagonal, exact), then a plain symmetric eigensolve.
    const Eigen::VectorXd gi = g.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd t(S, S);
    for (int i = 0; i < S; ++i)
        for (int j = 0; j < S; ++j) t(i, j) = gi[i] * sym(i, j) * gi[j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("check_monotonicity: eigensolver failed");
    return es.eigenvalues().maxCoeff();
}

struct KdeSamples {
    Eigen::MatrixXd x;           // paths x d
    Eigen::VectorXd bandwidth;   // per axis, Silverman
};

KdeSamples simulate_terminal(const CoefficientModel& model, const Eigen::VectorXd& start, double t,
                             long paths, double dt, std::uint64_t seed, std::uint64_t path_offset) {
    BrownianDriver driver(model.r(), seed, dt, static_cast<long>(std::llround(t / dt)) + 1);
    const long n_steps = driver.steps_for(t);
    FlowSimulator sim(model, 0);
    const std::vector<Eigen::VectorXd> starts{start};
    const std::vector<long> record{n_steps};

    KdeSamples out;
    out.x.resize(paths, model.d());
    for (long m = 0; m < paths; ++m) {
        const long blow = sim.run(driver, path_offset + static_cast<std::uint64_t>(m), starts,
                                  n_steps, record, [&](int, long, const std::vector<FlowPointState>& st) {
                                      out.x.row(m) = st[0].x.transpose();
                                  });
        if (blow >= 0) throw std::runtime_error("check: path blow-up in KDE sampling");
    }
    const int d = model.d();
    out.bandwidth.resize(d);
    const double mexp = std::pow(static_cast<double>(paths), -1.0 / (d + 4));
    for (int i = 0; i < d; ++i) {
        const double mean = out.x.col(i).mean();
        const double var = (out.x.col(i).array() - mean).square().sum() / static_cast<double>(paths - 1);
        out.bandwidth[i] = 1.06 * std::sqrt(var) * mexp;  // Silverman's rule
    }
    return out;
}

void kde_at(const KdeSamples& s, const Eigen::VectorXd& y, double& value, double& se) {
    const long m = s.x.rows();
    const int d = static_cast<int>(s.x.cols());
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < m; ++i) {
        double k = 1.0;
        for (int a = 0; a < d; ++a) {
            const double u = (y[a] - s.x(i, a)) / s.bandwidth[a];
            k *= std::exp(-0.5 * u * u) / (s.bandwidth[a] * kRoot2Pi);
        }
        sum += k;
        sumsq += k * k;
    }
    value = sum / static_cast<double>(m);
    const double var = std::max(0.0, sumsq / static_cast<double>(m) - value * value);
    se = std::sqrt(var / static_cast<double>(m));
}

double weighted_norm(const Eigen::VectorXd& w, const Eigen::VectorXd& v) {
    return std::sqrt((w.array() * v.array() * v.array()).sum());
}

}  // namespace

nlohmann::ordered_json MonotonicityReport::to_json() const {
    return nlohmann::ordered_json{
        {"q", q}, {"n_max", n_max}, {"c_star", c_star},
        {"c_star_coarse", c_star_coarse}, {"drift", drift}};
}

MonotonicityReport check_monotonicity(const CoefficientModel& model, double q, BasisPtr basis) {
    MonotonicityReport rep;
    rep.q = q;
    rep.n_max = basis->n_max();
    rep.c_star = pencil_max_eigenvalue(model, q, basis);
    if (basis->n_max() >= 2) {
        BasisPtr coarse = Basis::make(basis->d(), basis->n_max() / 2, basis->spec().quad_nodes);
        rep.c_star_coarse = pencil_max_eigenvalue(model, q, coarse);
        rep.drift = std::abs(rep.c_star - rep.c_star_coarse) /
                    std::max(std::abs(rep.c_star), 1e-12);
    }
    return rep;
}

nlohmann::ordered_json SymmetryReport::to_json() const {
    nlohmann::ordered_json j;
    j["t"] = t;
    j["paths"] = paths;
    j["max_violation_sigmas"] = max_violation_sigmas;
    j["pass"] = pass;
    return j;
}

SymmetryReport check_symmetry(const CoefficientModel& model, double t,
                              const std::vector<Eigen::VectorXd>& grid, long paths, double dt,
                              std::uint64_t seed) {
    const int n = static_cast<int>(grid.size());
    SymmetryReport rep;
    rep.t = t;
    rep.paths = paths;
    rep.p_hat.resize(n, n);
    rep.std_error.resize(n, n);

    std::vector<KdeSamples> samples;
    samples.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        samples.push_back(simulate_terminal(model, grid[static_cast<std::size_t>(i)], t, paths, dt,
                                            seed, static_cast<std::uint64_t>(i) * paths));

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double v, se;
            kde_at(samples[static_cast<std::size_t>(i)], grid[static_cast<std::size_t>(j)], v, se);
            rep.p_hat(i, j) = v;
            rep.std_error(i, j) = se;
        }

    rep.max_violation_sigmas = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double diff = std::abs(rep.p_hat(i, j) - rep.p_hat(j, i));
            const double band = std::sqrt(rep.std_error(i, j) * rep.std_error(i, j) +
                                          rep.std_error(j, i) * rep.std_error(j, i));
            if (band > 0.0)
                rep.max_violation_sigmas = std::max(rep.max_violation_sigmas, diff / band);
        }
    rep.pass = rep.max_violation_sigmas <= 4.0;
    return rep;
}

nlohmann::ordered_json TranslationReport::to_json() const {
    nlohmann::ordered_json j;
    j["t"] = t;
    j["norm_diff"] = norm_diff;
    j["band"] = band;
    j["pathwise_max_diff"] = pathwise_max_diff;
    j["pathwise_tol"] = pathwise_tol;
    j["pass"] = pass;
    return j;
}

TranslationReport check_translation(const CoefficientModel& model, double t,
                                    const Eigen::VectorXd& shift, long paths, double dt,
                                    double p, BasisPtr basis, std::uint64_t seed) {
    if (!model.is_constant())
        throw std::invalid_argument("check_translation: model must have constant coefficients");
    const int d = model.d();

    TranslationReport rep;
    rep.shift = shift;
    rep.t = t;
    rep.trunc_allowance = 1e-3;

    const KernelEstimate at_shift = estimate_kernel(model, shift, t, paths, dt, basis, seed);
    const KernelEstimate at_zero =
        estimate_kernel(model, Eigen::VectorXd::Zero(d), t, paths, dt, basis, seed + 1);

    const Eigen::MatrixXd tr = translate_matrix(*basis, shift);
    const Eigen::VectorXd translated = tr * at_zero.series.coeffs();
    const Eigen::VectorXd diff = at_shift.series.coeffs() - translated;
    const Eigen::VectorXd w = basis->sobolev_weights(-p);
    rep.norm_diff = weighted_norm(w, diff);

    // Joint SE: translation mixes coefficients, Var(T b)_k = sum_j T_kj^2 Var(b_j).
    Eigen::VectorXd var_join = at_shift.std_error.cwiseProduct(at_shift.std_error);
    const Eigen::VectorXd var_zero = at_zero.std_error.cwiseProduct(at_zero.std_error);
    var_join += (tr.cwiseProduct(tr)) * var_zero;
    rep.band = 4.0 * std::sqrt((w.array() * var_join.array()).sum()) + rep.trunc_allowance;

    // Pathwise reduction Y_t(psi) = tau_{X_t}(psi) for a smooth density, a few paths.
    const CompactDistribution bump =
        CompactDistribution::bump_density(Eigen::VectorXd::Zero(d), 1.0, 17);
    const HermiteSeries bump_series = bump.to_series(basis);
    std::vector<Eigen::VectorXd> flow_starts = bump.start_points();
    flow_starts.push_back(Eigen::VectorXd::Zero(d));  // tracks X_t(0) itself
    const int zero_idx = static_cast<int>(flow_starts.size()) - 1;

    BrownianDriver driver(model.r(), seed + 2, dt, static_cast<long>(std::llround(t / dt)) + 1);
    rep.pathwise_tol = 1e-3;
    rep.pathwise_max_diff = 0.0;
    for (std::uint64_t path = 0; path < 4; ++path) {
        FlowEnsemble ens = simulate_flow(model, flow_starts, driver, path, 0, t);
        const HermiteSeries y = pushforward(bump, ens, t, basis);
        const Eigen::VectorXd xt = ens.states.back()[static_cast<std::size_t>(zero_idx)].x;
        const HermiteSeries shifted(basis, translate_matrix(*basis, xt) * bump_series.coeffs());
        rep.pathwise_max_diff = std::max(
            rep.pathwise_max_diff, weighted_norm(w, y.coeffs() - shifted.coeffs()));
    }

    rep.pass = rep.norm_diff <= rep.band && rep.pathwise_max_diff <= rep.pathwise_tol;
    return rep;
}

nlohmann::ordered_json SemigroupReport::to_json() const {
    nlohmann::ordered_json j;
    j["p"] = p;
    j["q"] = q;
    j["T"] = T;
    j["paths"] = paths;
    j["times"] = times;
    j["sup_ratio"] = sup_ratio;
    j["running_sup"] = running_sup;
    j["first_quarter_mean"] = first_quarter_mean;
    j["last_quarter_mean"] = last_quarter_mean;
    j["trend_se"] = trend_se;
    j["pass"] = pass;
    return j;
}

SemigroupReport semigroup_bound(const CoefficientModel& model, double p, double q,
                                const std::vector<CompactDistribution>& probes, double T,
                                int n_times, long paths, double dt, BasisPtr basis,
                                std::uint64_t seed) {
    if (!(q > 1.25 * model.d() + std::floor(p) + 1.0))
        throw std::invalid_argument("semigroup_bound: requires q > (5/4)d + [p] + 1");
    if (probes.empty()) throw std::invalid_argument("semigroup_bound: no probes");

    const int NP = static_cast<int>(probes.size());
    const int S = basis->size();
    int K = 0;
    for (const auto& psi : probes) K = std::max(K, psi.order());

    // Union of probe start points, one shared flow.
    std::vector<Eigen::VectorXd> starts;
    std::vector<std::vector<int>> probe_atom_start(static_cast<std::size_t>(NP));
    for (int pi = 0; pi < NP; ++pi) {
        for (const auto& atom : probes[static_cast<std::size_t>(pi)].atoms()) {
            int idx = -1;
            for (std::size_t s = 0; s < starts.size(); ++s)
                if (starts[s] == atom.location) {
                    idx = static_cast<int>(s);
                    break;
                }
            if (idx < 0) {
                starts.push_back(atom.location);
                idx = static_cast<int>(starts.size()) - 1;
            }
            probe_atom_start[static_cast<std::size_t>(pi)].push_back(idx);
        }
    }

    BrownianDriver driver(model.r(), seed, dt, static_cast<long>(std::llround(T / dt)) + 1);
    FlowSimulator sim(model, K);
    std::vector<long> record_steps;
    std::vector<double> times;
    for (int j = 0; j <= n_times; ++j) {
        const long step = std::llround(static_cast<double>(j) / n_times * T / dt);
        record_steps.push_back(step);
        times.push_back(step * dt);
    }
    const int NT = static_cast<int>(record_steps.size());

    std::vector<Eigen::MatrixXd> sum(static_cast<std::size_t>(NP), Eigen::MatrixXd::Zero(NT, S));
    std::vector<Eigen::MatrixXd> sumsq(static_cast<std::size_t>(NP), Eigen::MatrixXd::Zero(NT, S));

    Eigen::VectorXd row(S);
    for (long m = 0; m < paths; ++m) {
        const long blow = sim.run(
            driver, static_cast<std::uint64_t>(m), starts, record_steps.back(), record_steps,
            [&](int rec, long, const std::vector<FlowPointState>& states) {
                for (int pi = 0; pi < NP; ++pi) {
                    row.setZero();
                    const auto& atoms = probes[static_cast<std::size_t>(pi)].atoms();
                    for (std::size_t ai = 0; ai < atoms.size(); ++ai) {
                        const int sidx = probe_atom_start[static_cast<std::size_t>(pi)][ai];
                        accumulate_pushforward_atom(atoms[ai], states[static_cast<std::size_t>(sidx)],
                                                    sim.deriv_indices(), *basis, row);
                    }
                    sum[static_cast<std::size_t>(pi)].row(rec) += row.transpose();
                    sumsq[static_cast<std::size_t>(pi)].row(rec) +=
                        row.cwiseProduct(row).transpose();
                }
            });
        if (blow >= 0) throw std::runtime_error("semigroup_bound: path blow-up");
    }

    SemigroupReport rep;
    rep.p = p;
    rep.q = q;
    rep.T = T;
    rep.paths = paths;
    rep.times = times;
    rep.ratios.resize(NT, NP);
    rep.ratio_se.resize(NT, NP);
    const Eigen::VectorXd wq = basis->sobolev_weights(-q);

    for (int pi = 0; pi < NP; ++pi) {
        const double probe_norm = sobolev_norm(probes[static_cast<std::size_t>(pi)].to_series(basis), -p);
        for (int ti = 0; ti < NT; ++ti) {
            const Eigen::VectorXd mean =
                sum[static_cast<std::size_t>(pi)].row(ti).transpose() / static_cast<double>(paths);
            const Eigen::VectorXd var =
                (sumsq[static_cast<std::size_t>(pi)].row(ti).transpose() / static_cast<double>(paths) -
                 mean.cwiseProduct(mean))
                    .cwiseMax(0.0) /
                static_cast<double>(paths);
            const double nrm = weighted_norm(wq, mean);
            rep.ratios(ti, pi) = nrm / probe_norm;
            // Delta method: d||m||/dm_k = w_k m_k / ||m||.
            double se2 = 0.0;
            if (nrm > 0.0)
                se2 = ((wq.array() * mean.array() / nrm).square() * var.array()).sum();
            rep.ratio_se(ti, pi) = std::sqrt(se2) / probe_norm;
        }
    }

    rep.sup_ratio.resize(static_cast<std::size_t>(NT));
    std::vector<double> sup_se(static_cast<std::size_t>(NT), 0.0);
    for (int ti = 0; ti < NT; ++ti) {
        int arg = 0;
        for (int pi = 1; pi < NP; ++pi)
            if (rep.ratios(ti, pi) > rep.ratios(ti, arg)) arg = pi;
        rep.sup_ratio[static_cast<std::size_t>(ti)] = rep.ratios(ti, arg);
        sup_se[static_cast<std::size_t>(ti)] = rep.ratio_se(ti, arg);
        rep.running_sup = std::max(rep.running_sup, rep.ratios(ti, arg));
    }

    // Quarter means of the per-time sup; combined SE treats times as independent, which
    // overstates the variance of the difference (paths are shared across times).
    const int nq = std::max(1, NT / 4);
    double fsum = 0.0, lsum = 0.0, fse2 = 0.0, lse2 = 0.0;
    for (int i = 0; i < nq; ++i) {
        fsum += rep.sup_ratio[static_cast<std::size_t>(i)];
        fse2 += sup_se[static_cast<std::size_t>(i)] * sup_se[static_cast<std::size_t>(i)];
        lsum += rep.sup_ratio[static_cast<std::size_t>(NT - 1 - i)];
        lse2 += sup_se[static_cast<std::size_t>(NT - 1 - i)] * sup_se[static_cast<std::size_t>(NT - 1 - i)];
    }
    rep.first_quarter_mean = fsum / nq;
    rep.last_quarter_mean = lsum / nq;
    rep.trend_se = std::sqrt(fse2 + lse2) / nq;
    rep.pass = rep.last_quarter_mean <= rep.first_quarter_mean + 2.0 * rep.trend_se;
    return rep;
}

nlohmann::ordered_json SuperpositionReport::to_json() const {
    return nlohmann::ordered_json{{"t", t},
                                  {"paths", paths},
                                  {"max_discrepancy_sigmas", max_discrepancy_sigmas},
                                  {"pass", pass}};
}

SuperpositionReport superposition_check(const CoefficientModel& model,
                                        const CompactDistribution& density, double t, long paths,
                                        double dt, BasisPtr basis, std::uint64_t seed_kernel,
                                        std::uint64_t seed_solve) {
    if (density.order() != 0)
        throw std::invalid_argument("superposition_check: density must be order 0");
    const int S = basis->size();

    // LHS: quadrature of kernel estimates over the density nodes, independent streams.
    Eigen::VectorXd lhs = Eigen::VectorXd::Zero(S);
    Eigen::VectorXd lhs_var = Eigen::VectorXd::Zero(S);
    const auto& atoms = density.atoms();
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        const KernelEstimate est = estimate_kernel(model, atoms[j].location, t, paths, dt, basis,
                                                   seed_kernel + static_cast<std::uint64_t>(j));
        lhs += atoms[j].weight * est.series.coeffs();
        lhs_var += (atoms[j].weight * atoms[j].weight) *
                   est.std_error.cwiseProduct(est.std_error);
    }

    // RHS: direct MC solve of the density with its own seed.
    const SolveReport direct =
        solve_forward_mc_at(density, model, t, paths, dt, density.default_p(), basis, seed_solve);

    SuperpositionReport rep;
    rep.t = t;
    rep.paths = paths;
    for (int k = 0; k < S; ++k) {
        const double joint =
            std::sqrt(lhs_var[k] + direct.std_error[k] * direct.std_error[k]);
        if (joint > 0.0) {
            const double sig = std::abs(lhs[k] - direct.mean.coeffs()[k]) / joint;
            rep.max_discrepancy_sigmas = std::max(rep.max_discrepancy_sigmas, sig);
        }
    }
    rep.pass = rep.max_discrepancy_sigmas <= 4.0;
    return rep;
}

nlohmann::ordered_json DualityReport::to_json() const {
    return nlohmann::ordered_json{{"paths", paths},
                                  {"fd_step", fd_step},
                                  {"max_error", max_error},
                                  {"tol", tol},
                                  {"pass", pass}};
}

DualityReport duality_check(const CoefficientModel& model, const Eigen::VectorXd& x, int max_order,
                            double T, long paths, double dt, BasisPtr basis, std::uint64_t seed,
                            double fd_step, double tol) {
    if (max_order > 2) throw std::invalid_argument("duality_check: FD stencils cover order <= 2");
    const int d = model.d();
    const double h = fd_step;

    // Test panel: degree-<=4 polynomials (in the first coordinate) times the Gaussian;
    // these lie exactly in the truncated span, so the series pairing is exact.
    std::vector<std::function<double(const Eigen::VectorXd&)>> panel = {
        [](const Eigen::VectorXd& y) { return std::exp(-0.5 * y.squaredNorm()); },
        [](const Eigen::VectorXd& y) { return y[0] * std::exp(-0.5 * y.squaredNorm()); },
        [](const Eigen::VectorXd& y) { return y[0] * y[0] * std::exp(-0.5 * y.squaredNorm()); },
        [](const Eigen::VectorXd& y) {
            return (y[0] * y[0] * y[0] - y[0]) * std::exp(-0.5 * y.squaredNorm());
        },
        [](const Eigen::VectorXd& y) {
            return (0.5 * y[0] * y[0] * y[0] * y[0] - y[0] * y[0] + 0.25) *
                   std::exp(-0.5 * y.squaredNorm());
        }};
    std::vector<Eigen::VectorXd> phi_coeffs;
    for (const auto& phi : panel) phi_coeffs.push_back(transform(phi, basis).coeffs());

    // Stencil starts x, x +- h e_0 share one noise realization per path.
    std::vector<Eigen::VectorXd> starts{x};
    if (max_order >= 1) {
        Eigen::VectorXd xp = x, xm = x;
        xp[0] += h;
        xm[0] -= h;
        starts.push_back(xp);
        starts.push_back(xm);
    }

    BrownianDriver driver(model.r(), seed, dt, static_cast<long>(std::llround(T / dt)) + 1);
    const long n_steps = driver.steps_for(T);
    FlowSimulator sim(model, max_order);
    const std::vector<long> record{n_steps};

    DualityReport rep;
    rep.paths = paths;
    rep.fd_step = h;
    rep.tol = tol;
    Eigen::VectorXd y(basis->size());
    for (long m = 0; m < paths; ++m) {
        std::vector<FlowPointState> terminal;
        const long blow = sim.run(driver, static_cast<std::uint64_t>(m), starts, n_steps, record,
                                  [&](int, long, const std::vector<FlowPointState>& st) {
                                      terminal = st;
                                  });
        if (blow >= 0) throw std::runtime_error("duality_check: path blow-up");

        for (int g = 0; g <= max_order; ++g) {
            MultiIndex gamma(d);
            gamma[0] = g;
            DistributionAtom atom{1.0, gamma, x};
            y.setZero();
            accumulate_pushforward_atom(atom, terminal[0], sim.deriv_indices(), *basis, y);

            for (std::size_t pj = 0; pj < panel.size(); ++pj) {
                const double lhs = phi_coeffs[pj].dot(y);
                const double v0 = panel[pj](terminal[0].x);
                double fd = v0;
                if (g == 1)
                    fd = (panel[pj](terminal[1].x) - panel[pj](terminal[2].x)) / (2.0 * h);
                else if (g == 2)
                    fd = (panel[pj](terminal[1].x) - 2.0 * v0 + panel[pj](terminal[2].x)) / (h * h);
                const double rhs = (g % 2 == 0 ? 1.0 : -1.0) * fd;
                rep.max_error = std::max(rep.max_error, std::abs(lhs - rhs));
            }
        }
    }
    rep.pass = rep.max_error <= tol;
    return rep;
}

nlohmann::ordered_json MartingaleReport::to_json() const {
    return nlohmann::ordered_json{{"paths", paths},
                                  {"max_mean_sigmas", max_mean_sigmas},
                                  {"max_residual", max_residual},
                                  {"pass", pass}};
}

MartingaleReport martingale_zero_check(const CompactDistribution& psi, const CoefficientModel& model,
                                       double T, double q, BasisPtr basis, long paths, double dt,
                                       std::uint64_t seed) {
    AdjointGalerkin adj(basis, model);
    BrownianDriver driver(model.r(), seed, dt, static_cast<long>(std::llround(T / dt)) + 1);
    const int S = basis->size();

    Eigen::VectorXd sum = Eigen::VectorXd::Zero(S), sumsq = Eigen::VectorXd::Zero(S);
    MartingaleReport rep;
    rep.paths = paths;
    for (long m = 0; m < paths; ++m) {
        const SpdeResidualReport res =
            spde_residual(psi, model, adj, driver, static_cast<std::uint64_t>(m), T, q);
        if (res.blew_up) throw std::runtime_error("martingale_zero_check: path blow-up");
        sum += res.stochastic_integral;
        sumsq += res.stochastic_integral.cwiseProduct(res.stochastic_integral);
        rep.max_residual = std::max(rep.max_residual, res.max_residual);
    }
    for (int k = 0; k < S; ++k) {
        const double mean = sum[k] / static_cast<double>(paths);
        const double var =
            std::max(0.0, sumsq[k] / static_cast<double>(paths) - mean * mean);
        const double se = std::sqrt(var / static_cast<double>(paths));
        if (se > 0.0) rep.max_mean_sigmas = std::max(rep.max_mean_sigmas, std::abs(mean) / se);
    }
    rep.pass = rep.max_mean_sigmas <= 4.0;
    return rep;
}

}  // namespace spdeflow
