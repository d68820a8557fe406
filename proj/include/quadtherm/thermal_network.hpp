#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace quadtherm {

enum class NodeKind { Motor, Computer, Environment };

[[nodiscard]] std::string to_string(NodeKind kind);
[[nodiscard]] NodeKind node_kind_from_string(const std::string& s);

/// One lumped thermal mass. Motors carry a winding resistance; every
/// non-environment node may emit a constant auxiliary heat (joint friction,
/// driver electronics).
struct ThermalNode {
    int id = 0;
    NodeKind kind = NodeKind::Motor;
    double capacitance = 0.0;         ///< J/degC
    double winding_resistance = 0.0;  ///< ohm, motors only
    double aux_heat = 0.0;            ///< W
};

/// Conductive link between nodes i < j.
struct ThermalEdge {
    int i = 0;
    int j = 0;
    double resistance = 0.0;  ///< degC/W
};

/// Whole-body thermal graph: capacitance nodes joined by thermal resistances,
/// with exactly one fixed-temperature environment node.
///
/// The default robot layout orders motors 0-11 as (FL, FR, RL, RR) x
/// (hip, thigh, knee), node 12 = onboard computer, node 13 = environment.
/// That ordering defines the column order of every trace file.
class ThermalNetwork {
public:
    /// Validates all structural invariants; throws std::invalid_argument
    /// naming the offending node or edge.
    ThermalNetwork(std::vector<ThermalNode> nodes, std::vector<ThermalEdge> edges, double ambient);

    [[nodiscard]] const std::vector<ThermalNode>& nodes() const { return nodes_; }
    [[nodiscard]] const std::vector<ThermalEdge>& edges() const { return edges_; }
    [[nodiscard]] double ambient() const { return ambient_; }
    [[nodiscard]] int node_count() const { return static_cast<int>(nodes_.size()); }
    [[nodiscard]] int environment_index() const { return env_index_; }
    [[nodiscard]] const std::vector<int>& motor_indices() const { return motor_indices_; }
    [[nodiscard]] int motor_count() const { return static_cast<int>(motor_indices_.size()); }

    /// Resistance of the (i, j) edge in either orientation, if present.
    [[nodiscard]] std::optional<double> edge_resistance(int i, int j) const;

    /// Per-node auxiliary heat vector (environment entry zero).
    [[nodiscard]] Eigen::VectorXd aux_heat_vector() const;

    /// State vector with every node at the ambient temperature.
    [[nodiscard]] Eigen::VectorXd uniform_ambient() const;

private:
    std::vector<ThermalNode> nodes_;
    std::vector<ThermalEdge> edges_;
    double ambient_ = 25.0;
    int env_index_ = -1;
    std::vector<int> motor_indices_;
};

/// Synthetic 14-node quadruped network (12 motors, computer, environment)
/// used by the shipped demo configs. Parameter values are placeholders
/// chosen for plausible desk-scale behavior, not identified hardware data.
[[nodiscard]] ThermalNetwork placeholder_network();

/// Node temperatures at a point in time (x in the discrete update).
struct ThermalState {
    Eigen::VectorXd temperatures;  ///< degC, one per node
    double time = 0.0;             ///< s
};

/// Continuous-time generator dT/dt = conduction * T + input_map * u.
///
/// `conduction` holds the capacitance-scaled graph Laplacian rows; the
/// environment row is zero so ambient stays fixed. `input_map` is
/// diag(1/C_i) with a zero environment entry.
struct ContinuousGenerator {
    Eigen::MatrixXd conduction;  ///< degC/s per degC
    Eigen::MatrixXd input_map;   ///< degC/s per W
    int env_index = -1;
};

enum class DiscretizeMethod { Exact, Euler };

[[nodiscard]] std::string to_string(DiscretizeMethod method);
[[nodiscard]] DiscretizeMethod discretize_method_from_string(const std::string& s);

/// Discrete update pair for step size h: x(k+1) = A x(k) + B u(k).
struct SystemMatrices {
    Eigen::MatrixXd A;  ///< dimensionless
    Eigen::MatrixXd B;  ///< degC per J
    double h = 0.0;     ///< s
    DiscretizeMethod method = DiscretizeMethod::Exact;
    /// Set when Euler is requested with h above the 2/max|diag| bound.
    bool stability_warning = false;
    /// A - I computed without the subtraction, so rate evaluations
    /// ((A - I) T / h) stay accurate even at very small h.
    Eigen::MatrixXd A_minus_identity;
    int env_index = -1;
};

/// Per-node generated heat u (W). Environment entry must be zero.
struct HeatInput {
    Eigen::VectorXd watts;
};

/// Builds the continuous generator of the node balance equations.
/// Row i: sum over neighbors j of (T_j - T_i) / (C_i R_ij), plus u_i / C_i.
[[nodiscard]] ContinuousGenerator build_generator(const ThermalNetwork& network);

/// Discretizes the generator at step h.
///
/// Exact mode evaluates the zero-order-hold pair through a single augmented
/// matrix exponential [[K, M], [0, 0]] * h, so the singular generator is
/// never inverted. Euler mode returns A = I + K h, B = M h and flags
/// h above the stability bound. Throws for h <= 0.
[[nodiscard]] SystemMatrices discretize(const ContinuousGenerator& gen, double h,
                                        DiscretizeMethod method = DiscretizeMethod::Exact);

/// One discrete update. Throws on dimension mismatch or a nonzero
/// environment input entry.
[[nodiscard]] ThermalState step(const SystemMatrices& mat, const ThermalState& state,
                                const HeatInput& input);

/// Heat received by node i from node j: -(T_i - T_j) / R_ij.
/// Throws if (i, j) is not an edge.
[[nodiscard]] double pairwise_flow(const ThermalState& state, const ThermalNetwork& network,
                                   int i, int j);

/// Closed-form single-motor temperature at time t:
/// T_E + I^2 R_d R (1 - e^{-t/(RC)}) + (T0 - T_E) e^{-t/(RC)}.
[[nodiscard]] double single_node_analytic(double capacitance, double resistance,
                                          double winding_resistance, double ambient,
                                          double initial_temp, double current, double t);

/// Unique equilibrium temperatures under a constant input: the reduced
/// Laplacian solve with the environment pinned at ambient.
[[nodiscard]] Eigen::VectorXd steady_state(const ThermalNetwork& network, const HeatInput& input);

/// Heat input as a function of time; sampled once per step and held.
using HeatSchedule = std::function<HeatInput(double)>;

/// Sorted (time, input) pairs; value_at(t) returns the entry in effect at t.
class PiecewiseConstantSchedule {
public:
    struct Entry {
        double t = 0.0;
        Eigen::VectorXd watts;
    };

    explicit PiecewiseConstantSchedule(std::vector<Entry> entries);

    [[nodiscard]] const HeatInput& value_at(double t) const;
    [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }

private:
    std::vector<Entry> entries_;
    mutable HeatInput scratch_;
};

/// Sampled trajectory. Row k holds the state at times[k] and the input that
/// was applied over [times[k], times[k] + h); the final row repeats the
/// schedule value at its own time.
struct SimulationTrace {
    std::vector<double> times;
    Eigen::MatrixXd temperatures;  ///< rows = samples, cols = nodes
    Eigen::MatrixXd inputs;        ///< rows = samples, cols = nodes

    [[nodiscard]] int sample_count() const { return static_cast<int>(times.size()); }
    [[nodiscard]] int node_count() const { return static_cast<int>(temperatures.cols()); }

    /// CSV with header t, T_0..T_{n-1}, Q_0..Q_{n-1}. Deterministic
    /// shortest round-trip float formatting.
    void write_csv(std::ostream& out) const;
};

/// Steps the network from T0 over [0, horizon] at fixed h, sampling the
/// schedule at each step start. The trace holds floor(horizon/h) + 1 states.
[[nodiscard]] SimulationTrace simulate(const ThermalNetwork& network, const HeatSchedule& schedule,
                                       const Eigen::VectorXd& initial_temps, double horizon,
                                       double h, DiscretizeMethod method = DiscretizeMethod::Exact);

/// Constant-input convenience.
[[nodiscard]] SimulationTrace simulate(const ThermalNetwork& network, const HeatInput& input,
                                       const Eigen::VectorXd& initial_temps, double horizon,
                                       double h, DiscretizeMethod method = DiscretizeMethod::Exact);

/// Piecewise-constant schedule convenience.
[[nodiscard]] SimulationTrace simulate(const ThermalNetwork& network,
                                       const PiecewiseConstantSchedule& schedule,
                                       const Eigen::VectorXd& initial_temps, double horizon,
                                       double h, DiscretizeMethod method = DiscretizeMethod::Exact);

}  // namespace quadtherm
