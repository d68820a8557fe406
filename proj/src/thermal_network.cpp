#include "quadtherm/thermal_network.hpp"

#include "quadtherm/matrix_exp.hpp"

#include <cmath>
#include <ostream>
#include <queue>
#include <set>
#include <stdexcept>
#include <utility>

#include "quadtherm/detail/format.hpp"

namespace quadtherm {

std::string to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Motor: return "motor";
        case NodeKind::Computer: return "computer";
        case NodeKind::Environment: return "environment";
    }
    return "unknown";
}

NodeKind node_kind_from_string(const std::string& s) {
    if (s == "motor") return NodeKind::Motor;
    if (s == "computer") return NodeKind::Computer;
    if (s == "environment") return NodeKind::Environment;
    throw std::invalid_argument("unknown node kind '" + s + "'");
}

std::string to_string(DiscretizeMethod method) {
    return method == DiscretizeMethod::Exact ? "exact" : "euler";
}

DiscretizeMethod discretize_method_from_string(const std::string& s) {
    if (s == "exact") return DiscretizeMethod::Exact;
    if (s == "euler") return DiscretizeMethod::Euler;
    throw std::invalid_argument("unknown discretization method '" + s + "'");
}

ThermalNetwork::ThermalNetwork(std::vector<ThermalNode> nodes, std::vector<ThermalEdge> edges,
                               double ambient)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), ambient_(ambient) {
    const int n = static_cast<int>(nodes_.size());
    if (n < 2) throw std::invalid_argument("network needs at least two nodes");
    if (!std::isfinite(ambient_)) throw std::invalid_argument("ambient temperature must be finite");

    env_index_ = -1;
    for (int idx = 0; idx < n; ++idx) {
        const ThermalNode& node = nodes_[idx];
        if (node.id != idx) {
            throw std::invalid_argument("node at position " + std::to_string(idx) +
                                        " has id " + std::to_string(node.id) +
                                        "; ids must equal list position");
        }
        if (node.kind == NodeKind::Environment) {
            if (env_index_ >= 0) {
                throw std::invalid_argument("node " + std::to_string(idx) +
                                            ": second environment node (first at " +
                                            std::to_string(env_index_) + ")");
            }
            env_index_ = idx;
            if (node.winding_resistance != 0.0 || node.aux_heat != 0.0) {
                throw std::invalid_argument("node " + std::to_string(idx) +
                                            ": environment node must have zero winding "
                                            "resistance and aux heat");
            }
        } else {
            if (!(node.capacitance > 0.0)) {
                throw std::invalid_argument("node " + std::to_string(idx) +
                                            ": capacitance must be > 0");
            }
            if (node.winding_resistance < 0.0) {
                throw std::invalid_argument("node " + std::to_string(idx) +
                                            ": winding resistance must be >= 0");
            }
            if (node.kind != NodeKind::Motor && node.winding_resistance != 0.0) {
                throw std::invalid_argument("node " + std::to_string(idx) +
                                            ": winding resistance only applies to motors");
            }
            if (node.kind == NodeKind::Motor) motor_indices_.push_back(idx);
        }
        if (!std::isfinite(node.capacitance) || !std::isfinite(node.aux_heat)) {
            throw std::invalid_argument("node " + std::to_string(idx) + ": non-finite parameter");
        }
    }
    if (env_index_ < 0) throw std::invalid_argument("network has no environment node");

    std::set<std::pair<int, int>> seen;
    std::vector<std::vector<int>> adjacency(n);
    for (const ThermalEdge& edge : edges_) {
        const std::string tag = "edge (" + std::to_string(edge.i) + "," + std::to_string(edge.j) + ")";
        if (edge.i < 0 || edge.i >= n || edge.j < 0 || edge.j >= n) {
            throw std::invalid_argument(tag + ": node index out of range");
        }
        if (edge.i == edge.j) throw std::invalid_argument(tag + ": self-edge not allowed");
        if (edge.i > edge.j) throw std::invalid_argument(tag + ": endpoints must satisfy i < j");
        if (!seen.insert({edge.i, edge.j}).second) {
            throw std::invalid_argument(tag + ": duplicate edge");
        }
        if (!(edge.resistance > 0.0) || !std::isfinite(edge.resistance)) {
            throw std::invalid_argument(tag + ": resistance must be > 0");
        }
        adjacency[edge.i].push_back(edge.j);
        adjacency[edge.j].push_back(edge.i);
    }

    // Every node must reach the environment node.
    std::vector<bool> reached(n, false);
    std::queue<int> frontier;
    frontier.push(env_index_);
    reached[env_index_] = true;
    while (!frontier.empty()) {
        const int v = frontier.front();
        frontier.pop();
        for (int w : adjacency[v]) {
            if (!reached[w]) {
                reached[w] = true;
                frontier.push(w);
            }
        }
    }
    for (int idx = 0; idx < n; ++idx) {
        if (!reached[idx]) {
            throw std::invalid_argument("node " + std::to_string(idx) +
                                        ": no path to the environment node");
        }
    }
}

std::optional<double> ThermalNetwork::edge_resistance(int i, int j) const {
    for (const ThermalEdge& edge : edges_) {
        if ((edge.i == i && edge.j == j) || (edge.i == j && edge.j == i)) {
            return edge.resistance;
        }
    }
    return std::nullopt;
}

Eigen::VectorXd ThermalNetwork::aux_heat_vector() const {
    Eigen::VectorXd aux = Eigen::VectorXd::Zero(node_count());
    for (int idx = 0; idx < node_count(); ++idx) {
        if (idx != env_index_) aux[idx] = nodes_[static_cast<size_t>(idx)].aux_heat;
    }
    return aux;
}

Eigen::VectorXd ThermalNetwork::uniform_ambient() const {
    return Eigen::VectorXd::Constant(node_count(), ambient_);
}

ThermalNetwork placeholder_network() {
    // 12 motors in (FL, FR, RL, RR) x (hip, thigh, knee) order, then the
    // onboard computer, then the environment. Values are synthetic.
    constexpr double kMotorC = 12.0;        // J/degC
    constexpr double kMotorRd = 0.12;       // ohm
    constexpr double kMotorAux = 0.5;       // W
    constexpr double kComputerC = 40.0;     // J/degC
    constexpr double kComputerAux = 6.0;    // W
    constexpr double kMotorEnvR = 1.0;      // degC/W
    constexpr double kLegLinkR = 3.0;       // degC/W, hip-thigh and thigh-knee
    constexpr double kHipBodyR = 2.5;       // degC/W, hip to computer via the body
    constexpr double kComputerEnvR = 1.2;   // degC/W
    constexpr double kAmbient = 25.0;       // degC

    std::vector<ThermalNode> nodes;
    for (int m = 0; m < 12; ++m) {
        nodes.push_back({m, NodeKind::Motor, kMotorC, kMotorRd, kMotorAux});
    }
    nodes.push_back({12, NodeKind::Computer, kComputerC, 0.0, kComputerAux});
    nodes.push_back({13, NodeKind::Environment, 0.0, 0.0, 0.0});

    std::vector<ThermalEdge> edges;
    for (int leg = 0; leg < 4; ++leg) {
        const int hip = 3 * leg;
        edges.push_back({hip, hip + 1, kLegLinkR});      // hip - thigh
        edges.push_back({hip + 1, hip + 2, kLegLinkR});  // thigh - knee
        edges.push_back({hip, 12, kHipBodyR});           // hip - computer
    }
    for (int m = 0; m < 12; ++m) {
        edges.push_back({m, 13, kMotorEnvR});
    }
    edges.push_back({12, 13, kComputerEnvR});
    return ThermalNetwork(std::move(nodes), std::move(edges), kAmbient);
}

ContinuousGenerator build_generator(const ThermalNetwork& network) {
    const int n = network.node_count();
    const int env = network.environment_index();

    ContinuousGenerator gen;
    gen.env_index = env;
    gen.conduction = Eigen::MatrixXd::Zero(n, n);
    gen.input_map = Eigen::MatrixXd::Zero(n, n);

    for (const ThermalEdge& edge : network.edges()) {
        for (auto [a, b] : {std::pair{edge.i, edge.j}, std::pair{edge.j, edge.i}}) {
            if (a == env) continue;
            const double coupling = 1.0 / (network.nodes()[static_cast<size_t>(a)].capacitance *
                                           edge.resistance);
            gen.conduction(a, b) += coupling;
        }
    }
    // Diagonal as the negated sum of the stored off-diagonals keeps row sums
    // exactly zero in floating point.
    for (int i = 0; i < n; ++i) {
        if (i == env) continue;
        double row_sum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j != i) row_sum += gen.conduction(i, j);
        }
        gen.conduction(i, i) = -row_sum;
        gen.input_map(i, i) = 1.0 / network.nodes()[static_cast<size_t>(i)].capacitance;
    }
    return gen;
}

SystemMatrices discretize(const ContinuousGenerator& gen, double h, DiscretizeMethod method) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw std::invalid_argument("discretize: step size h must be > 0, got " +
                                    detail::format_double(h));
    }
    const auto n = gen.conduction.rows();

    SystemMatrices mat;
    mat.h = h;
    mat.method = method;
    mat.env_index = gen.env_index;

    if (method == DiscretizeMethod::Euler) {
        mat.A_minus_identity = gen.conduction * h;
        mat.A = mat.A_minus_identity;
        mat.A.diagonal().array() += 1.0;
        mat.B = gen.input_map * h;
        const double max_diag = gen.conduction.diagonal().cwiseAbs().maxCoeff();
        mat.stability_warning = max_diag > 0.0 && h > 2.0 / max_diag;
        return mat;
    }

    // Augmented exponential: exp([[K, M], [0, 0]] h) = [[A, B], [0, I]].
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    aug.topLeftCorner(n, n) = gen.conduction * h;
    aug.topRightCorner(n, n) = gen.input_map * h;
    const Eigen::MatrixXd e = matrix_expm1(aug);

    mat.A_minus_identity = e.topLeftCorner(n, n);
    mat.A = mat.A_minus_identity;
    mat.A.diagonal().array() += 1.0;
    mat.B = e.topRightCorner(n, n);
    return mat;
}

ThermalState step(const SystemMatrices& mat, const ThermalState& state, const HeatInput& input) {
    const auto n = mat.A.rows();
    if (state.temperatures.size() != n) {
        throw std::invalid_argument("step: state has " + std::to_string(state.temperatures.size()) +
                                    " temperatures, matrices expect " + std::to_string(n));
    }
    if (input.watts.size() != n) {
        throw std::invalid_argument("step: input has " + std::to_string(input.watts.size()) +
                                    " entries, matrices expect " + std::to_string(n));
    }
    if (mat.env_index >= 0 && input.watts[mat.env_index] != 0.0) {
        throw std::invalid_argument("step: environment input entry must be zero");
    }
    if (!input.watts.allFinite()) {
        throw std::invalid_argument("step: heat input must be finite");
    }
    ThermalState next;
    next.temperatures = mat.A * state.temperatures + mat.B * input.watts;
    next.time = state.time + mat.h;
    return next;
}

double pairwise_flow(const ThermalState& state, const ThermalNetwork& network, int i, int j) {
    const auto resistance = network.edge_resistance(i, j);
    if (!resistance) {
        throw std::invalid_argument("pairwise_flow: (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") is not an edge");
    }
    return -(state.temperatures[i] - state.temperatures[j]) / *resistance;
}

double single_node_analytic(double capacitance, double resistance, double winding_resistance,
                            double ambient, double initial_temp, double current, double t) {
    if (!(capacitance > 0.0) || !(resistance > 0.0)) {
        throw std::invalid_argument("single_node_analytic: C and R must be > 0");
    }
    if (t < 0.0) {
        throw std::invalid_argument("single_node_analytic: t must be >= 0");
    }
    const double decay = std::exp(-t / (resistance * capacitance));
    const double joule = current * current * winding_resistance;
    return ambient + joule * resistance * (1.0 - decay) + (initial_temp - ambient) * decay;
}

Eigen::VectorXd steady_state(const ThermalNetwork& network, const HeatInput& input) {
    const int n = network.node_count();
    const int env = network.environment_index();
    if (input.watts.size() != n) {
        throw std::invalid_argument("steady_state: input has " +
                                    std::to_string(input.watts.size()) + " entries, network has " +
                                    std::to_string(n) + " nodes");
    }
    if (input.watts[env] != 0.0) {
        throw std::invalid_argument("steady_state: environment input entry must be zero");
    }

    // Weighted Laplacian node balance with the environment pinned at ambient:
    // L_rr T_r = u_r + (1/R_{i~env}) * ambient contributions.
    const int m = n - 1;
    std::vector<int> reduced(static_cast<size_t>(m));
    int pos = 0;
    for (int i = 0; i < n; ++i) {
        if (i != env) reduced[static_cast<size_t>(pos++)] = i;
    }
    std::vector<int> to_reduced(static_cast<size_t>(n), -1);
    for (int r = 0; r < m; ++r) to_reduced[static_cast<size_t>(reduced[static_cast<size_t>(r)])] = r;

    Eigen::MatrixXd laplacian = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd rhs(m);
    for (int r = 0; r < m; ++r) rhs[r] = input.watts[reduced[static_cast<size_t>(r)]];

    for (const ThermalEdge& edge : network.edges()) {
        const double w = 1.0 / edge.resistance;
        const int ri = to_reduced[static_cast<size_t>(edge.i)];
        const int rj = to_reduced[static_cast<size_t>(edge.j)];
        if (ri >= 0 && rj >= 0) {
            laplacian(ri, ri) += w;
            laplacian(rj, rj) += w;
            laplacian(ri, rj) -= w;
            laplacian(rj, ri) -= w;
        } else if (ri >= 0) {
            laplacian(ri, ri) += w;
            rhs[ri] += w * network.ambient();
        } else if (rj >= 0) {
            laplacian(rj, rj) += w;
            rhs[rj] += w * network.ambient();
        }
    }

    Eigen::LLT<Eigen::MatrixXd> llt(laplacian);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("steady_state: reduced system is singular (internal error)");
    }
    const Eigen::VectorXd solution = llt.solve(rhs);

    Eigen::VectorXd temps(n);
    temps[env] = network.ambient();
    for (int r = 0; r < m; ++r) temps[reduced[static_cast<size_t>(r)]] = solution[r];
    return temps;
}

PiecewiseConstantSchedule::PiecewiseConstantSchedule(std::vector<Entry> entries)
    : entries_(std::move(entries)) {
    if (entries_.empty()) {
        throw std::invalid_argument("schedule must contain at least one entry");
    }
    for (size_t k = 0; k < entries_.size(); ++k) {
        if (k > 0 && !(entries_[k].t > entries_[k - 1].t)) {
            throw std::invalid_argument("schedule entry " + std::to_string(k) +
                                        ": times must be strictly increasing");
        }
        if (entries_[k].watts.size() != entries_.front().watts.size()) {
            throw std::invalid_argument("schedule entry " + std::to_string(k) +
                                        ": inconsistent vector length");
        }
    }
}

const HeatInput& PiecewiseConstantSchedule::value_at(double t) const {
    size_t active = 0;
    for (size_t k = 0; k < entries_.size(); ++k) {
        if (entries_[k].t <= t) active = k;
        else break;
    }
    scratch_.watts = entries_[active].watts;
    return scratch_;
}

SimulationTrace simulate(const ThermalNetwork& network, const HeatSchedule& schedule,
                         const Eigen::VectorXd& initial_temps, double horizon, double h,
                         DiscretizeMethod method) {
    if (horizon < 0.0) throw std::invalid_argument("simulate: horizon must be >= 0");
    const int n = network.node_count();
    if (initial_temps.size() != n) {
        throw std::invalid_argument("simulate: initial temperatures have " +
                                    std::to_string(initial_temps.size()) + " entries, network has " +
                                    std::to_string(n) + " nodes");
    }

    const ContinuousGenerator gen = build_generator(network);
    const SystemMatrices mat = discretize(gen, h, method);

    const auto steps = static_cast<long>(std::floor(horizon / h + 1e-9));
    SimulationTrace trace;
    trace.times.resize(static_cast<size_t>(steps) + 1);
    trace.temperatures.resize(steps + 1, n);
    trace.inputs.resize(steps + 1, n);

    ThermalState state{initial_temps, 0.0};
    state.temperatures[network.environment_index()] = network.ambient();
    for (long k = 0; k <= steps; ++k) {
        const HeatInput input = schedule(state.time);
        trace.times[static_cast<size_t>(k)] = state.time;
        trace.temperatures.row(k) = state.temperatures.transpose();
        trace.inputs.row(k) = input.watts.transpose();
        if (k < steps) state = step(mat, state, input);
    }
    return trace;
}

SimulationTrace simulate(const ThermalNetwork& network, const HeatInput& input,
                         const Eigen::VectorXd& initial_temps, double horizon, double h,
                         DiscretizeMethod method) {
    return simulate(network, [&](double) { return input; }, initial_temps, horizon, h, method);
}

SimulationTrace simulate(const ThermalNetwork& network, const PiecewiseConstantSchedule& schedule,
                         const Eigen::VectorXd& initial_temps, double horizon, double h,
                         DiscretizeMethod method) {
    return simulate(network, [&](double t) { return schedule.value_at(t); }, initial_temps,
                    horizon, h, method);
}

void SimulationTrace::write_csv(std::ostream& out) const {
    const int n = node_count();
    out << 't';
    for (int j = 0; j < n; ++j) out << ",T_" << j;
    for (int j = 0; j < n; ++j) out << ",Q_" << j;
    out << '\n';
    for (int k = 0; k < sample_count(); ++k) {
        out << detail::format_double(times[static_cast<size_t>(k)]);
        for (int j = 0; j < n; ++j) out << ',' << detail::format_double(temperatures(k, j));
        for (int j = 0; j < n; ++j) out << ',' << detail::format_double(inputs(k, j));
        out << '\n';
    }
}

}  // namespace quadtherm
