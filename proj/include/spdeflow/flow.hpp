#pragma once

#include <functional>

#include "spdeflow/chain_rule.hpp"
#include "spdeflow/driver.hpp"
#include "spdeflow/model.hpp"

namespace spdeflow {

/// State of one start point at one time: position X(t,x), spatial derivative tensors
/// d^beta X for 1 <= |beta| <= K (indexed by the simulator's deriv-index table), and the
/// inverse Jacobian J propagated by its own SDE.
struct FlowPointState {
    Eigen::VectorXd x;
    std::vector<Eigen::VectorXd> derivs;
    Eigen::MatrixXd jac_inv;

    /// Jacobian (dX^i/dx^j) assembled from the first-order tensors.
    Eigen::MatrixXd jacobian(const std::vector<MultiIndex>& deriv_indices) const;
};

/// Euler-Maruyama simulator for the flow and its derivative tensors. The tensor update is
/// the exact derivative of the one-step map X_{n+1} = X_n + sigma(X_n) dB + b(X_n) dt in
/// the start point, so the discrete flow property and chain-rule identities hold exactly.
/// The inverse Jacobian runs its own Euler recursion; J * dX - I is a reported diagnostic,
/// not an enforced identity.
class FlowSimulator {
public:
    FlowSimulator(const CoefficientModel& model, int K);

    const CoefficientModel& model() const { return *model_; }
    int order() const { return K_; }
    /// Multi-indices 1 <= |beta| <= K in graded lex order.
    const std::vector<MultiIndex>& deriv_indices() const { return deriv_indices_; }
    int deriv_position(const MultiIndex& beta) const;

    using RecordSink =
        std::function<void(int record_idx, long step, const std::vector<FlowPointState>&)>;

    /// Simulate one path for all starts under the same noise. `record_steps` must be
    /// ascending, each in [0, n_steps]. Returns -1, or the step at which the state became
    /// non-finite (the path is abandoned there and no further records are emitted).
    long run(const BrownianDriver& driver, std::uint64_t path,
             const std::vector<Eigen::VectorXd>& starts, long n_steps,
             const std::vector<long>& record_steps, const RecordSink& sink) const;

private:
    struct CompiledTerm {
        double coef;
        int outer_pos;        // position of the outer index in deriv_indices_
        int outer_axis;       // axis a when |outer| == 1 (identity part of dF), else -1
        std::vector<std::pair<int, int>> factors;  // (component a, deriv position)
    };

    const CoefficientModel* model_;
    int K_;
    std::vector<MultiIndex> deriv_indices_;
    std::vector<std::vector<CompiledTerm>> compiled_;  // per deriv position
};

/// Whole-trajectory container (all steps recorded), the spec-level ensemble.
struct FlowEnsemble {
    int K = 0;
    double dt = 0.0;
    std::vector<Eigen::VectorXd> starts;
    std::vector<MultiIndex> deriv_indices;
    std::vector<double> times;                          // t_0 = 0 .. t_n
    std::vector<std::vector<FlowPointState>> states;    // [time][start]
    long blowup_step = -1;

    int start_index(const Eigen::VectorXd& x) const;
    bool ok() const { return blowup_step < 0; }
};

FlowEnsemble simulate_flow(const CoefficientModel& model, const std::vector<Eigen::VectorXd>& starts,
                           const BrownianDriver& driver, std::uint64_t path, int K, double T);

/// Theorem-style flow composition: X(t+s, x, w) vs X(s, X(t,x,w), theta_t w), same noise.
struct CompositionCheck {
    Eigen::VectorXd left, right;
    double discrepancy;  // max-norm difference; 0 to rounding for the shared-grid scheme
};
CompositionCheck flow_composition_check(const CoefficientModel& model, const Eigen::VectorXd& x,
                                        double s, double t, const BrownianDriver& driver,
                                        std::uint64_t path);

/// Monte Carlo estimate of E sup_{x in grid} |d^alpha X(T,x)|^q with standard error.
struct MomentProbe {
    double estimate = 0.0;
    double std_error = 0.0;
    long paths = 0;
    long blowups = 0;
};
MomentProbe moment_probe(const CoefficientModel& model, const std::vector<Eigen::VectorXd>& grid,
                         const MultiIndex& alpha, double q, double T, long paths,
                         const BrownianDriver& driver);

}  // namespace spdeflow
