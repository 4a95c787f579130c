#include "spdeflow/flow.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace spdeflow {

Eigen::MatrixXd FlowPointState::jacobian(const std::vector<MultiIndex>& deriv_indices) const {
    const int d = static_cast<int>(x.size());
    Eigen::MatrixXd jac(d, d);
    for (std::size_t pos = 0; pos < deriv_indices.size(); ++pos) {
        const MultiIndex& beta = deriv_indices[pos];
        if (beta.order() != 1) continue;
        int axis = 0;
        while (beta[axis] == 0) ++axis;
        jac.col(axis) = derivs[pos];
    }
    return jac;
}

FlowSimulator::FlowSimulator(const CoefficientModel& model, int K) : model_(&model), K_(K) {
    if (K < 0) throw std::invalid_argument("FlowSimulator: K must be >= 0");
    if (K > model.max_deriv_order())
        throw std::invalid_argument("FlowSimulator: derivative order exceeds model oracles");
    const int d = model.d();
    for (const MultiIndex& m : enumerate_multi_indices(d, K))
        if (m.order() >= 1) deriv_indices_.push_back(m);

    std::map<std::vector<int>, int> pos;
    for (std::size_t i = 0; i < deriv_indices_.size(); ++i)
        pos[deriv_indices_[i].entries()] = static_cast<int>(i);

    compiled_.resize(deriv_indices_.size());
    for (std::size_t i = 0; i < deriv_indices_.size(); ++i) {
        const std::vector<ChainRuleTerm>& terms = chain_rule_expansion(deriv_indices_[i], d);
        for (const ChainRuleTerm& t : terms) {
            CompiledTerm ct;
            ct.coef = t.coef;
            ct.outer_pos = pos.at(t.outer.entries());
            ct.outer_axis = -1;
            if (t.outer.order() == 1) {
                int axis = 0;
                while (t.outer[axis] == 0) ++axis;
                ct.outer_axis = axis;
            }
            for (const auto& f : t.factors) ct.factors.emplace_back(f.first, pos.at(f.second.entries()));
            compiled_[i].push_back(std::move(ct));
        }
    }
}

int FlowSimulator::deriv_position(const MultiIndex& beta) const {
    for (std::size_t i = 0; i < deriv_indices_.size(); ++i)
        if (deriv_indices_[i] == beta) return static_cast<int>(i);
    return -1;
}

long FlowSimulator::run(const BrownianDriver& driver, std::uint64_t path,
                        const std::vector<Eigen::VectorXd>& starts, long n_steps,
                        const std::vector<long>& record_steps, const RecordSink& sink) const {
    const CoefficientModel& mdl = *model_;
    const int d = mdl.d();
    const int r = mdl.r();
    if (driver.r() != r) throw std::invalid_argument("FlowSimulator::run: driver r mismatch");
    if (n_steps > driver.n_steps()) throw std::invalid_argument("FlowSimulator::run: horizon beyond grid");
    const double dt = driver.dt();
    const std::size_t n_pts = starts.size();
    const std::size_t n_derivs = deriv_indices_.size();

    // State
    std::vector<FlowPointState> state(n_pts);
    for (std::size_t j = 0; j < n_pts; ++j) {
        if (starts[j].size() != d) throw std::invalid_argument("FlowSimulator::run: start dim mismatch");
        state[j].x = starts[j];
        state[j].jac_inv = Eigen::MatrixXd::Identity(d, d);
        state[j].derivs.assign(n_derivs, Eigen::VectorXd::Zero(d));
        for (std::size_t pos = 0; pos < n_derivs; ++pos) {
            const MultiIndex& beta = deriv_indices_[pos];
            if (beta.order() == 1) {
                int axis = 0;
                while (beta[axis] == 0) ++axis;
                state[j].derivs[pos] = Eigen::VectorXd::Unit(d, axis);  // dX/dx = I at t = 0
            }
        }
    }

    // Workspace
    Eigen::VectorXd db(r), bval(d), dx(d);
    Eigen::MatrixXd sval(d, r), dbmat(d, d), msig(d, d), sq(d, d), jnew(d, d);
    std::vector<Eigen::MatrixXd> dsig(static_cast<std::size_t>(d));  // dsig[j](i,alpha) = d_j sigma^i_alpha
    for (auto& m : dsig) m.resize(d, r);
    std::vector<Eigen::VectorXd> gtab(n_derivs, Eigen::VectorXd::Zero(d));
    std::vector<Eigen::VectorXd> new_derivs(n_derivs, Eigen::VectorXd::Zero(d));

    // Resolve derivative polynomials once; the step loop only evaluates.
    std::vector<std::vector<const Polynomial*>> sig_dm(n_derivs), b_dm(n_derivs);
    for (std::size_t pos = 0; pos < n_derivs; ++pos) {
        const MultiIndex& m = deriv_indices_[pos];
        sig_dm[pos].resize(static_cast<std::size_t>(d * r));
        for (int i = 0; i < d; ++i)
            for (int al = 0; al < r; ++al)
                sig_dm[pos][static_cast<std::size_t>(i * r + al)] = &mdl.sigma_deriv(i, al, m);
        b_dm[pos].resize(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) b_dm[pos][static_cast<std::size_t>(i)] = &mdl.b_deriv(i, m);
    }
    std::vector<int> axis_pos(static_cast<std::size_t>(d), -1);  // position of e_k in the table
    for (int k = 0; k < d && K_ >= 1; ++k) {
        for (std::size_t pos = 0; pos < n_derivs; ++pos)
            if (deriv_indices_[pos].order() == 1 && deriv_indices_[pos][k] == 1)
                axis_pos[static_cast<std::size_t>(k)] = static_cast<int>(pos);
    }

    std::size_t next_rec = 0;
    auto emit = [&](long step) {
        while (next_rec < record_steps.size() && record_steps[next_rec] == step) {
            sink(static_cast<int>(next_rec), step, state);
            ++next_rec;
        }
    };
    emit(0);

    const bool need_jets = K_ >= 1;
    for (long n = 0; n < n_steps; ++n) {
        driver.increments(path, n, db.data());

        for (std::size_t j = 0; j < n_pts; ++j) {
            FlowPointState& s = state[j];
            mdl.sigma_at(s.x, sval);
            mdl.b_at(s.x, bval);
            dx.noalias() = sval * db;
            dx += bval * dt;

            if (need_jets) {
                // dsig[k], db-matrix, and the contracted table G[m] = d^m sigma * dB + d^m b * dt
                for (int k = 0; k < d; ++k) {
                    const std::size_t pos = static_cast<std::size_t>(axis_pos[static_cast<std::size_t>(k)]);
                    for (int i = 0; i < d; ++i)
                        for (int al = 0; al < r; ++al)
                            dsig[static_cast<std::size_t>(k)](i, al) =
                                sig_dm[pos][static_cast<std::size_t>(i * r + al)]->eval(s.x);
                    for (int i = 0; i < d; ++i)
                        dbmat(i, k) = b_dm[pos][static_cast<std::size_t>(i)]->eval(s.x);
                }
                for (std::size_t pos = 0; pos < n_derivs; ++pos) {
                    const MultiIndex& m = deriv_indices_[pos];
                    Eigen::VectorXd& g = gtab[pos];
                    if (m.order() == 1) {
                        int axis = 0;
                        while (m[axis] == 0) ++axis;
                        g.noalias() = dsig[static_cast<std::size_t>(axis)] * db;
                        g += dbmat.col(axis) * dt;
                    } else {
                        for (int i = 0; i < d; ++i) {
                            double acc = 0.0;
                            for (int al = 0; al < r; ++al)
                                acc += sig_dm[pos][static_cast<std::size_t>(i * r + al)]->eval(s.x) * db[al];
                            acc += b_dm[pos][static_cast<std::size_t>(i)]->eval(s.x) * dt;
                            g[i] = acc;
                        }
                    }
                }

                // Tensor update: exact derivative of the one-step map.
                for (std::size_t pos = 0; pos < n_derivs; ++pos) {
                    Eigen::VectorXd& out = new_derivs[pos];
                    out.setZero();
                    for (const CompiledTerm& t : compiled_[pos]) {
                        double prod = t.coef;
                        for (const auto& f : t.factors)
                            prod *= s.derivs[static_cast<std::size_t>(f.second)][f.first];
                        if (prod == 0.0) continue;
                        out += prod * gtab[static_cast<std::size_t>(t.outer_pos)];
                        if (t.outer_axis >= 0) out[t.outer_axis] += prod;
                    }
                }

                // Inverse-Jacobian SDE, Euler step:
                // J_{n+1} = J - J * (sum_a dsigma_a dB^a) - J * (db - sum_a dsigma_a^2) dt
                for (int i = 0; i < d; ++i)
                    for (int k = 0; k < d; ++k) {
                        double acc = 0.0;
                        for (int al = 0; al < r; ++al) acc += dsig[static_cast<std::size_t>(k)](i, al) * db[al];
                        msig(i, k) = acc;
                    }
                sq.setZero();
                for (int al = 0; al < r; ++al)
                    for (int i = 0; i < d; ++i)
                        for (int k = 0; k < d; ++k) {
                            double acc = 0.0;
                            for (int m2 = 0; m2 < d; ++m2)
                                acc += dsig[static_cast<std::size_t>(m2)](i, al) *
                                       dsig[static_cast<std::size_t>(k)](m2, al);
                            sq(i, k) += acc;
                        }
                jnew.noalias() = s.jac_inv;
                jnew.noalias() -= s.jac_inv * msig;
                jnew.noalias() -= s.jac_inv * (dbmat - sq) * dt;

                for (std::size_t pos = 0; pos < n_derivs; ++pos) s.derivs[pos] = new_derivs[pos];
                s.jac_inv = jnew;
            }

            s.x += dx;
            if (!s.x.allFinite()) return n + 1;
        }
        emit(n + 1);
    }
    return -1;
}

FlowEnsemble simulate_flow(const CoefficientModel& model, const std::vector<Eigen::VectorXd>& starts,
                           const BrownianDriver& driver, std::uint64_t path, int K, double T) {
    FlowSimulator sim(model, K);
    const long n_steps = driver.steps_for(T);
    FlowEnsemble ens;
    ens.K = K;
    ens.dt = driver.dt();
    ens.starts = starts;
    ens.deriv_indices = sim.deriv_indices();
    ens.times.reserve(static_cast<std::size_t>(n_steps) + 1);
    for (long n = 0; n <= n_steps; ++n) ens.times.push_back(driver.time(n));
    ens.states.reserve(static_cast<std::size_t>(n_steps) + 1);

    std::vector<long> record_steps(static_cast<std::size_t>(n_steps) + 1);
    for (long n = 0; n <= n_steps; ++n) record_steps[static_cast<std::size_t>(n)] = n;

    ens.blowup_step = sim.run(driver, path, starts, n_steps, record_steps,
                              [&](int, long, const std::vector<FlowPointState>& st) {
                                  ens.states.push_back(st);
                              });
    return ens;
}

int FlowEnsemble::start_index(const Eigen::VectorXd& x) const {
    for (std::size_t j = 0; j < starts.size(); ++j)
        if (starts[j].size() == x.size() && starts[j] == x) return static_cast<int>(j);
    return -1;
}

CompositionCheck flow_composition_check(const CoefficientModel& model, const Eigen::VectorXd& x,
                                        double s, double t, const BrownianDriver& driver,
                                        std::uint64_t path) {
    FlowSimulator sim(model, 0);
    const long n_t = driver.steps_for(t);
    const long n_s = driver.steps_for(s);

    Eigen::VectorXd left, mid, right;
    sim.run(driver, path, {x}, n_t + n_s, {n_t, n_t + n_s},
            [&](int rec, long, const std::vector<FlowPointState>& st) {
                (rec == 0 ? mid : left) = st[0].x;
            });
    if (n_s == 0) {
        right = mid;
    } else {
        const BrownianDriver shifted = driver.shifted(n_t);
        sim.run(shifted, path, {mid}, n_s, {n_s},
                [&](int, long, const std::vector<FlowPointState>& st) { right = st[0].x; });
    }
    CompositionCheck chk;
    chk.left = left;
    chk.right = right;
    chk.discrepancy = (left - right).cwiseAbs().maxCoeff();
    return chk;
}

MomentProbe moment_probe(const CoefficientModel& model, const std::vector<Eigen::VectorXd>& grid,
                         const MultiIndex& alpha, double q, double T, long paths,
                         const BrownianDriver& driver) {
    if (!(q >= 1.0)) throw std::invalid_argument("moment_probe: q must be >= 1");
    const int K = alpha.order();
    FlowSimulator sim(model, K);
    const long n_steps = driver.steps_for(T);
    const int pos = K == 0 ? -2 : sim.deriv_position(alpha);
    if (K > 0 && pos < 0) throw std::invalid_argument("moment_probe: alpha not in table");

    MomentProbe probe;
    probe.paths = paths;
    double sum = 0.0, sumsq = 0.0;
    for (long m = 0; m < paths; ++m) {
        double sup = 0.0;
        const long blow = sim.run(driver, static_cast<std::uint64_t>(m), grid, n_steps, {n_steps},
                                  [&](int, long, const std::vector<FlowPointState>& st) {
                                      for (const FlowPointState& p : st) {
                                          const double norm =
                                              (K == 0) ? p.x.norm()
                                                       : p.derivs[static_cast<std::size_t>(pos)].norm();
                                          sup = std::max(sup, std::pow(norm, q));
                                      }
                                  });
        if (blow >= 0) {
            probe.blowups += 1;
            continue;
        }
        sum += sup;
        sumsq += sup * sup;
    }
    const double n_ok = static_cast<double>(paths - probe.blowups);
    if (n_ok > 0) {
        probe.estimate = sum / n_ok;
        const double var = std::max(0.0, sumsq / n_ok - probe.estimate * probe.estimate);
        probe.std_error = std::sqrt(var / n_ok);
    }
    return probe;
}

}  // namespace spdeflow
