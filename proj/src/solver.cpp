#include "spdeflow/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "spdeflow/hermite.hpp"
#include "spdeflow/operators.hpp"
#include "spdeflow/window.hpp"

namespace spdeflow {

namespace {

constexpr long kChunk = 4096;

/// Static chunking with per-chunk state combined in chunk order: results are bit-identical
/// for any thread count.
void run_chunks(long total, const std::function<void(int chunk_idx, long lo, long hi)>& body) {
    const long n_chunks = (total + kChunk - 1) / kChunk;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw <= 1 || n_chunks <= 1) {
        for (long c = 0; c < n_chunks; ++c) body(static_cast<int>(c), c * kChunk, std::min(total, (c + 1) * kChunk));
        return;
    }
    const unsigned n_threads = std::min<unsigned>(hw, static_cast<unsigned>(n_chunks));
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t]() {
            for (long c = t; c < n_chunks; c += n_threads)
                body(static_cast<int>(c), c * kChunk, std::min(total, (c + 1) * kChunk));
        });
    }
    for (auto& th : pool) th.join();
}

double prefix_truncation_sensitivity(const Basis& basis, const Eigen::VectorXd& coeffs, double p) {
    const int half = basis.n_max() / 2;
    double full = 0.0, prefix = 0.0;
    for (int pos = 0; pos < basis.size(); ++pos) {
        const double term = basis.sobolev_weight(pos, p) * coeffs[pos] * coeffs[pos];
        full += term;
        if (basis.index(pos).order() <= half) prefix += term;
    }
    full = std::sqrt(full);
    prefix = std::sqrt(prefix);
    return full > 0.0 ? std::abs(full - prefix) / full : 0.0;
}

}  // namespace

nlohmann::ordered_json SolveReport::to_json() const {
    nlohmann::ordered_json j;
    j["t"] = t;
    j["dt"] = dt;
    j["paths"] = paths;
    j["seed"] = seed;
    j["p"] = p;
    j["blowups"] = blowups;
    j["second_moment"] = second_moment;
    j["truncation_sensitivity"] = truncation_sensitivity;
    j["mean"] = mean.to_json();
    std::vector<double> se(std_error.data(), std_error.data() + std_error.size());
    j["std_error"] = se;
    return j;
}

std::vector<SolveReport> solve_forward_mc(const CompactDistribution& psi,
                                          const CoefficientModel& model,
                                          const std::vector<double>& times, long paths, double dt,
                                          double p, BasisPtr basis, std::uint64_t seed) {
    if (psi.dim() != model.d() || psi.dim() != basis->d())
        throw std::invalid_argument("solve_forward_mc: dimension mismatch");
    const double p_min = 0.25 * model.d() + 0.5 * psi.order();
    if (!(p > p_min))
        throw std::invalid_argument("solve_forward_mc: p must exceed d/4 + N/2");
    if (times.empty()) throw std::invalid_argument("solve_forward_mc: no output times");
    if (paths < 1) throw std::invalid_argument("solve_forward_mc: need at least one path");

    const double T = times.back();
    BrownianDriver driver(model.r(), seed, dt, static_cast<long>(std::llround(T / dt)) + 1);
    FlowSimulator sim(model, psi.order());
    const std::vector<Eigen::VectorXd> starts = psi.start_points();
    const std::vector<int> atom_start = psi.atom_start_map();

    std::vector<long> record_steps;
    record_steps.reserve(times.size());
    for (double t : times) record_steps.push_back(driver.steps_for(t));
    for (std::size_t i = 1; i < record_steps.size(); ++i)
        if (record_steps[i] < record_steps[i - 1])
            throw std::invalid_argument("solve_forward_mc: times must be ascending");
    const long n_steps = record_steps.back();

    const int S = basis->size();
    const int NT = static_cast<int>(times.size());
    const Eigen::VectorXd wp = basis->sobolev_weights(-p);

    struct ChunkAccum {
        Eigen::MatrixXd sum, sumsq;      // NT x S
        Eigen::VectorXd norm2;           // NT
        long blowups = 0;
        long ok = 0;
    };
    const long n_chunks = (paths + kChunk - 1) / kChunk;
    std::vector<ChunkAccum> acc(static_cast<std::size_t>(n_chunks));
    for (auto& a : acc) {
        a.sum = Eigen::MatrixXd::Zero(NT, S);
        a.sumsq = Eigen::MatrixXd::Zero(NT, S);
        a.norm2 = Eigen::VectorXd::Zero(NT);
    }

    run_chunks(paths, [&](int chunk, long lo, long hi) {
        ChunkAccum& a = acc[static_cast<std::size_t>(chunk)];
        Eigen::MatrixXd y(NT, S);
        for (long m = lo; m < hi; ++m) {
            y.setZero();
            const long blow = sim.run(
                driver, static_cast<std::uint64_t>(m), starts, n_steps, record_steps,
                [&](int rec, long, const std::vector<FlowPointState>& states) {
                    Eigen::VectorXd row = Eigen::VectorXd::Zero(S);
                    for (std::size_t ai = 0; ai < psi.atoms().size(); ++ai)
                        accumulate_pushforward_atom(psi.atoms()[ai],
                                                    states[static_cast<std::size_t>(atom_start[ai])],
                                                    sim.deriv_indices(), *basis, row);
                    y.row(rec) = row;
                });
            if (blow >= 0) {
                a.blowups += 1;
                continue;
            }
            a.ok += 1;
            a.sum += y;
            a.sumsq += y.cwiseProduct(y);
            for (int ti = 0; ti < NT; ++ti)
                a.norm2[ti] += (wp.array() * y.row(ti).transpose().array().square()).sum();
        }
    });

    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(NT, S), sumsq = Eigen::MatrixXd::Zero(NT, S);
    Eigen::VectorXd norm2 = Eigen::VectorXd::Zero(NT);
    long blowups = 0, ok = 0;
    for (const auto& a : acc) {
        sum += a.sum;
        sumsq += a.sumsq;
        norm2 += a.norm2;
        blowups += a.blowups;
        ok += a.ok;
    }
    if (ok == 0) throw std::runtime_error("solve_forward_mc: all paths blew up");
    if (static_cast<double>(blowups) > 1e-3 * static_cast<double>(paths))
        throw std::runtime_error("solve_forward_mc: blow-up fraction exceeds 0.1%");

    std::vector<SolveReport> reports;
    reports.reserve(static_cast<std::size_t>(NT));
    for (int ti = 0; ti < NT; ++ti) {
        SolveReport rep;
        rep.t = times[static_cast<std::size_t>(ti)];
        rep.dt = dt;
        rep.paths = paths;
        rep.seed = seed;
        rep.p = p;
        rep.blowups = blowups;
        Eigen::VectorXd mean = sum.row(ti).transpose() / static_cast<double>(ok);
        Eigen::VectorXd var =
            (sumsq.row(ti).transpose() / static_cast<double>(ok) - mean.cwiseProduct(mean))
                .cwiseMax(0.0);
        rep.mean = HermiteSeries(basis, mean);
        rep.std_error = (var / static_cast<double>(ok)).cwiseSqrt();
        rep.second_moment = norm2[ti] / static_cast<double>(ok);
        rep.truncation_sensitivity = prefix_truncation_sensitivity(*basis, mean, -p);
        reports.push_back(std::move(rep));
    }
    return reports;
}

SolveReport solve_forward_mc_at(const CompactDistribution& psi, const CoefficientModel& model,
                                double T, long paths, double dt, double p, BasisPtr basis,
                                std::uint64_t seed) {
    return solve_forward_mc(psi, model, {T}, paths, dt, p, std::move(basis), seed).front();
}

namespace {

GalerkinReport galerkin_impl(const CompactDistribution& psi, const CoefficientModel& model,
                             double T, double dt, BasisPtr basis, int checkpoints, double q,
                             bool with_drift) {
    AdjointGalerkin adj(basis, model);
    const Eigen::MatrixXd& L = adj.l_star();
    Eigen::VectorXd c = psi.to_series(basis).coeffs();
    const Eigen::VectorXd c0 = c;
    const Eigen::VectorXd wq = basis->sobolev_weights(-q);

    const long n_steps = std::max<long>(1, std::llround(T / dt));
    const double h = T / static_cast<double>(n_steps);
    if (checkpoints < 1) checkpoints = 1;

    std::vector<long> check_steps;
    for (int j = 0; j <= checkpoints; ++j)
        check_steps.push_back(std::llround(static_cast<double>(j) * n_steps / checkpoints));

    GalerkinReport rep;
    Eigen::VectorXd integral = Eigen::VectorXd::Zero(c.size());
    Eigen::VectorXd lc = L * c;

    auto record = [&](long step) {
        rep.times.push_back(step * h);
        rep.states.emplace_back(basis, c);
        const Eigen::VectorXd defect = c - c0 - integral;
        rep.integral_residual.push_back(
            std::sqrt((wq.array() * defect.array() * defect.array()).sum()));
    };

    std::size_t next_check = 0;
    const double guard = 1e6 * (1.0 + c0.cwiseAbs().maxCoeff());
    while (next_check < check_steps.size() && check_steps[next_check] == 0) {
        record(0);
        ++next_check;
    }
    for (long n = 0; n < n_steps; ++n) {
        const Eigen::VectorXd k1 = lc;
        const Eigen::VectorXd k2 = L * (c + 0.5 * h * k1);
        const Eigen::VectorXd k3 = L * (c + 0.5 * h * k2);
        const Eigen::VectorXd k4 = L * (c + h * k3);
        c += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const Eigen::VectorXd lc_next = L * c;
        integral += 0.5 * h * (lc + lc_next);  // trapezoid along the discrete path
        lc = lc_next;

        if (c.cwiseAbs().maxCoeff() > guard) {
            rep.aborted_stiff = true;
            break;
        }
        while (next_check < check_steps.size() && check_steps[next_check] == n + 1) {
            record(n + 1);
            ++next_check;
        }
    }
    if (rep.aborted_stiff && rep.states.empty()) record(0);

    if (with_drift && basis->n_max() >= 2 && !rep.aborted_stiff) {
        BasisPtr half = Basis::make(basis->d(), basis->n_max() / 2, basis->spec().quad_nodes);
        GalerkinReport hrep = galerkin_impl(psi, model, T, dt, half, 1, q, false);
        const Eigen::VectorXd& cf = rep.states.back().coeffs();
        const Eigen::VectorXd& ch = hrep.states.back().coeffs();
        double drift = 0.0;
        for (int pos = 0; pos < half->size(); ++pos) {
            const int full_pos = basis->position(half->index(pos));
            drift = std::max(drift, std::abs(cf[full_pos] - ch[pos]));
        }
        rep.truncation_drift = drift;
    }
    return rep;
}

}  // namespace

GalerkinReport solve_forward_galerkin(const CompactDistribution& psi, const CoefficientModel& model,
                                      double T, double dt, BasisPtr basis, int checkpoints,
                                      double q) {
    if (psi.dim() != model.d() || psi.dim() != basis->d())
        throw std::invalid_argument("solve_forward_galerkin: dimension mismatch");
    if (!(T >= 0.0)) throw std::invalid_argument("solve_forward_galerkin: negative horizon");
    if (T == 0.0) {
        GalerkinReport rep;
        rep.times = {0.0};
        rep.states = {psi.to_series(basis)};
        rep.integral_residual = {0.0};
        return rep;
    }
    return galerkin_impl(psi, model, T, dt, std::move(basis), checkpoints, q, true);
}

KernelEstimate estimate_kernel(const CoefficientModel& model, const Eigen::VectorXd& x, double t,
                               long paths, double dt, BasisPtr basis, std::uint64_t seed) {
    if (!(t > 0.0)) throw std::invalid_argument("estimate_kernel: t must be positive");
    if (x.size() != model.d() || basis->d() != model.d())
        throw std::invalid_argument("estimate_kernel: dimension mismatch");
    const int d = model.d();
    const int S = basis->size();

    BrownianDriver driver(model.r(), seed, dt, static_cast<long>(std::llround(t / dt)) + 1);
    const long n_steps = driver.steps_for(t);
    FlowSimulator sim(model, 0);

    // Pass 1: terminal states.
    Eigen::MatrixXd xt(paths, d);
    std::vector<char> alive(static_cast<std::size_t>(paths), 0);
    const std::vector<Eigen::VectorXd> starts{x};
    const std::vector<long> record{n_steps};
    run_chunks(paths, [&](int, long lo, long hi) {
        for (long m = lo; m < hi; ++m) {
            const long blow =
                sim.run(driver, static_cast<std::uint64_t>(m), starts, n_steps, record,
                        [&](int, long, const std::vector<FlowPointState>& st) {
                            xt.row(m) = st[0].x.transpose();
                        });
            alive[static_cast<std::size_t>(m)] = blow < 0 ? 1 : 0;
        }
    });

    long ok = 0;
    Eigen::VectorXd mean_x = Eigen::VectorXd::Zero(d), var_x = Eigen::VectorXd::Zero(d);
    for (long m = 0; m < paths; ++m)
        if (alive[static_cast<std::size_t>(m)]) {
            ++ok;
            mean_x += xt.row(m).transpose();
        }
    if (ok == 0) throw std::runtime_error("estimate_kernel: all paths blew up");
    mean_x /= static_cast<double>(ok);
    for (long m = 0; m < paths; ++m)
        if (alive[static_cast<std::size_t>(m)])
            var_x += (xt.row(m).transpose() - mean_x).array().square().matrix();
    var_x /= static_cast<double>(ok);

    // Mass probe: smooth window equal to 1 on mean +- 6 std, paired against the estimate.
    SmoothWindow window;
    window.lo = mean_x - 6.0 * var_x.cwiseSqrt();
    window.hi = mean_x + 6.0 * var_x.cwiseSqrt();
    window.eps = std::max(0.5, var_x.cwiseSqrt().maxCoeff());
    const Eigen::VectorXd window_coeffs = transform(window, basis).coeffs();

    // Pass 2: coefficient and mass accumulation.
    struct ChunkAccum {
        Eigen::VectorXd sum, sumsq;
        double mass = 0.0, mass_sq = 0.0;
    };
    const long n_chunks = (paths + kChunk - 1) / kChunk;
    std::vector<ChunkAccum> acc(static_cast<std::size_t>(n_chunks));
    for (auto& a : acc) {
        a.sum = Eigen::VectorXd::Zero(S);
        a.sumsq = Eigen::VectorXd::Zero(S);
    }
    run_chunks(paths, [&](int chunk, long lo, long hi) {
        ChunkAccum& a = acc[static_cast<std::size_t>(chunk)];
        Eigen::VectorXd y(S);
        std::vector<std::vector<double>> tables(static_cast<std::size_t>(d));
        for (long m = lo; m < hi; ++m) {
            if (!alive[static_cast<std::size_t>(m)]) continue;
            for (int i = 0; i < d; ++i)
                tables[static_cast<std::size_t>(i)] = hermite_values(basis->n_max(), xt(m, i));
            for (int pos = 0; pos < S; ++pos) {
                const MultiIndex& k = basis->index(pos);
                double v = 1.0;
                for (int i = 0; i < d; ++i)
                    v *= tables[static_cast<std::size_t>(i)][static_cast<std::size_t>(k[i])];
                y[pos] = v;
            }
            a.sum += y;
            a.sumsq += y.cwiseProduct(y);
            const double wmass = window_coeffs.dot(y);
            a.mass += wmass;
            a.mass_sq += wmass * wmass;
        }
    });

    Eigen::VectorXd sum = Eigen::VectorXd::Zero(S), sumsq = Eigen::VectorXd::Zero(S);
    double mass_sum = 0.0, mass_sq = 0.0;
    for (const auto& a : acc) {
        sum += a.sum;
        sumsq += a.sumsq;
        mass_sum += a.mass;
        mass_sq += a.mass_sq;
    }

    KernelEstimate est;
    est.x = x;
    est.t = t;
    est.paths = paths;
    est.seed = seed;
    est.blowups = paths - ok;
    Eigen::VectorXd mean = sum / static_cast<double>(ok);
    Eigen::VectorXd var = (sumsq / static_cast<double>(ok) - mean.cwiseProduct(mean)).cwiseMax(0.0);
    est.series = HermiteSeries(basis, mean);
    est.std_error = (var / static_cast<double>(ok)).cwiseSqrt();
    est.mass = mass_sum / static_cast<double>(ok);
    const double mv =
        std::max(0.0, mass_sq / static_cast<double>(ok) - est.mass * est.mass);
    est.mass_std_error = std::sqrt(mv / static_cast<double>(ok));
    return est;
}

}  // namespace spdeflow
