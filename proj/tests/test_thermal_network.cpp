#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "quadtherm/matrix_exp.hpp"
#include "quadtherm/thermal_network.hpp"

using namespace quadtherm;

namespace {

ThermalNetwork single_motor_network(double capacitance = 0.5, double resistance = 2.0,
                                    double ambient = 0.0, double winding = 0.0,
                                    double aux = 0.0) {
    return ThermalNetwork({{0, NodeKind::Motor, capacitance, winding, aux},
                           {1, NodeKind::Environment, 0.0, 0.0, 0.0}},
                          {{0, 1, resistance}}, ambient);
}

ThermalNetwork chain3_network() {
    // motor(0) - motor(1) - env(2)
    return ThermalNetwork({{0, NodeKind::Motor, 0.5, 0.1, 0.0},
                           {1, NodeKind::Motor, 2.0, 0.1, 0.0},
                           {2, NodeKind::Environment, 0.0, 0.0, 0.0}},
                          {{0, 1, 4.0}, {1, 2, 2.5}}, 20.0);
}

}  // namespace

TEST_CASE("network validation names the offending node or edge") {
    CHECK_THROWS_WITH_AS(ThermalNetwork({{0, NodeKind::Motor, 0.0, 0.0, 0.0},
                                         {1, NodeKind::Environment, 0.0, 0.0, 0.0}},
                                        {{0, 1, 1.0}}, 25.0),
                         doctest::Contains("node 0"), std::invalid_argument);

    CHECK_THROWS_WITH_AS(ThermalNetwork({{0, NodeKind::Motor, 1.0, 0.0, 0.0},
                                         {1, NodeKind::Environment, 0.0, 0.0, 0.0}},
                                        {{0, 1, -2.0}}, 25.0),
                         doctest::Contains("edge (0,1)"), std::invalid_argument);

    // Disconnected node.
    CHECK_THROWS_WITH_AS(ThermalNetwork({{0, NodeKind::Motor, 1.0, 0.0, 0.0},
                                         {1, NodeKind::Motor, 1.0, 0.0, 0.0},
                                         {2, NodeKind::Environment, 0.0, 0.0, 0.0}},
                                        {{0, 2, 1.0}}, 25.0),
                         doctest::Contains("node 1"), std::invalid_argument);

    // Exactly one environment node.
    CHECK_THROWS_AS(ThermalNetwork({{0, NodeKind::Environment, 0.0, 0.0, 0.0},
                                    {1, NodeKind::Environment, 0.0, 0.0, 0.0}},
                                   {{0, 1, 1.0}}, 25.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(ThermalNetwork({{0, NodeKind::Motor, 1.0, 0.0, 0.0},
                                    {1, NodeKind::Motor, 1.0, 0.0, 0.0}},
                                   {{0, 1, 1.0}}, 25.0),
                    std::invalid_argument);
}

TEST_CASE("network edge bookkeeping") {
    const ThermalNetwork net = chain3_network();
    CHECK(net.edge_resistance(0, 1) == doctest::Approx(4.0));
    CHECK(net.edge_resistance(1, 0) == doctest::Approx(4.0));
    CHECK_FALSE(net.edge_resistance(0, 2).has_value());
    CHECK(net.environment_index() == 2);
    CHECK(net.motor_count() == 2);

    CHECK_THROWS_AS(ThermalNetwork({{0, NodeKind::Motor, 1.0, 0.0, 0.0},
                                    {1, NodeKind::Environment, 0.0, 0.0, 0.0}},
                                   {{0, 1, 1.0}, {0, 1, 2.0}}, 25.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(ThermalNetwork({{0, NodeKind::Motor, 1.0, 0.0, 0.0},
                                    {1, NodeKind::Environment, 0.0, 0.0, 0.0}},
                                   {{1, 1, 1.0}}, 25.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(ThermalNetwork({{0, NodeKind::Motor, 1.0, 0.0, 0.0},
                                    {1, NodeKind::Environment, 0.0, 0.0, 0.0}},
                                   {{0, 5, 1.0}}, 25.0),
                    std::invalid_argument);
}

TEST_CASE("generator of a single motor expands by hand") {
    const ThermalNetwork net = single_motor_network(0.5, 2.0);
    const ContinuousGenerator gen = build_generator(net);
    // 1/(C R) = 1/(0.5 * 2) = 1
    CHECK(gen.conduction(0, 0) == doctest::Approx(-1.0));
    CHECK(gen.conduction(0, 1) == doctest::Approx(1.0));
    CHECK(gen.conduction(1, 0) == 0.0);
    CHECK(gen.conduction(1, 1) == 0.0);
    CHECK(gen.input_map(0, 0) == doctest::Approx(2.0));
    CHECK(gen.input_map(1, 1) == 0.0);
}

TEST_CASE("generator of a 3-node chain matches the direct expansion") {
    const ThermalNetwork net = chain3_network();
    const ContinuousGenerator gen = build_generator(net);
    CHECK(gen.conduction(0, 1) == doctest::Approx(1.0 / (0.5 * 4.0)));
    CHECK(gen.conduction(0, 0) == doctest::Approx(-1.0 / (0.5 * 4.0)));
    CHECK(gen.conduction(1, 0) == doctest::Approx(1.0 / (2.0 * 4.0)));
    CHECK(gen.conduction(1, 2) == doctest::Approx(1.0 / (2.0 * 2.5)));
    CHECK(gen.conduction(1, 1) == doctest::Approx(-(1.0 / (2.0 * 4.0) + 1.0 / (2.0 * 2.5))));
    CHECK(gen.conduction.row(2).cwiseAbs().sum() == 0.0);
}

TEST_CASE("generator rows sum to zero and off-diagonals are nonnegative") {
    std::mt19937_64 rng(20240811);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 12);
        const ThermalNetwork net = quadtherm::testing::random_connected_network(rng, n);
        const ContinuousGenerator gen = build_generator(net);

        // Uniform temperature is an equilibrium.
        const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, 42.0);
        CHECK((gen.conduction * uniform).cwiseAbs().maxCoeff() < 1e-12);

        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(gen.conduction.row(i).sum()) < 1e-12);
            for (int j = 0; j < n; ++j) {
                if (i != j) CHECK(gen.conduction(i, j) >= 0.0);
            }
        }
        CHECK(gen.conduction.row(net.environment_index()).cwiseAbs().sum() == 0.0);
    }
}

TEST_CASE("pairwise_flow follows the temperature gradient") {
    const ThermalNetwork net = single_motor_network(0.5, 5.0, 35.0);
    ThermalState state{Eigen::Vector2d(60.0, 35.0), 0.0};

    CHECK(pairwise_flow(state, net, 0, 1) == doctest::Approx(-5.0));  // heat leaves node 0
    CHECK(pairwise_flow(state, net, 1, 0) == doctest::Approx(5.0));

    state.temperatures[0] = 35.0;
    CHECK(pairwise_flow(state, net, 0, 1) == 0.0);

    CHECK_THROWS_AS((void)pairwise_flow(state, net, 0, 0), std::invalid_argument);
}

TEST_CASE("pairwise_flow is antisymmetric on random networks") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const ThermalNetwork net = quadtherm::testing::random_connected_network(
            rng, 3 + static_cast<int>(rng() % 10));
        Eigen::VectorXd temps(net.node_count());
        for (int i = 0; i < net.node_count(); ++i) {
            temps[i] = 20.0 + 60.0 * static_cast<double>(rng() % 1000) / 1000.0;
        }
        const ThermalState state{temps, 0.0};
        for (const ThermalEdge& edge : net.edges()) {
            CHECK(pairwise_flow(state, net, edge.i, edge.j) ==
                  doctest::Approx(-pairwise_flow(state, net, edge.j, edge.i)));
        }
    }
}

TEST_CASE("single_node_analytic closed form") {
    // Steady state is ambient + Q R.
    CHECK(single_node_analytic(0.5, 2.0, 1.0, 10.0, 10.0, 1.0, 1e9) == doctest::Approx(12.0));

    // C=0.5, R=2, Q = 1 W, t = 1 s: 2 (1 - e^{-1}).
    const double expected = 2.0 * (1.0 - std::exp(-1.0));
    CHECK(single_node_analytic(0.5, 2.0, 1.0, 0.0, 0.0, 1.0, 1.0) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(1.264241).epsilon(1e-6));

    // Equilibrium stays put without current.
    for (double t : {0.0, 0.5, 3.0, 100.0}) {
        CHECK(single_node_analytic(0.5, 2.0, 0.12, 25.0, 25.0, 0.0, t) == doctest::Approx(25.0));
    }

    CHECK_THROWS_AS((void)single_node_analytic(0.0, 2.0, 0.1, 0.0, 0.0, 1.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)single_node_analytic(0.5, 2.0, 0.1, 0.0, 0.0, 1.0, -1.0),
                    std::invalid_argument);
}

TEST_CASE("steady_state: zero input relaxes to ambient") {
    const ThermalNetwork net = chain3_network();
    HeatInput zero{Eigen::VectorXd::Zero(3)};
    const Eigen::VectorXd ss = steady_state(net, zero);
    for (int i = 0; i < 3; ++i) CHECK(ss[i] == doctest::Approx(20.0));
}

TEST_CASE("steady_state: single motor offset is Q R") {
    const ThermalNetwork net = single_motor_network(0.5, 2.0, 35.0);
    HeatInput input{Eigen::Vector2d(1.0, 0.0)};
    const Eigen::VectorXd ss = steady_state(net, input);
    CHECK(ss[0] == doctest::Approx(37.0).epsilon(1e-12));
    CHECK(ss[1] == doctest::Approx(35.0));
}

TEST_CASE("steady_state agrees with a long simulation and dominates ambient") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 5; ++trial) {
        const ThermalNetwork net = quadtherm::testing::random_connected_network(
            rng, 3 + static_cast<int>(rng() % 12));
        const HeatInput input = quadtherm::testing::random_heat_input(rng, net);
        const Eigen::VectorXd ss = steady_state(net, input);

        CHECK((ss.array() >= net.ambient() - 1e-12).all());

        // Long-horizon simulation endpoint converges to it. The horizon
        // must cover the slowest mode of the reduced generator, not just
        // the fastest local rate, so read it off the spectrum.
        const ContinuousGenerator gen = build_generator(net);
        const int n = net.node_count();
        const int env = net.environment_index();
        Eigen::MatrixXd reduced(n - 1, n - 1);
        for (int i = 0, ri = 0; i < n; ++i) {
            if (i == env) continue;
            for (int j = 0, rj = 0; j < n; ++j) {
                if (j == env) continue;
                reduced(ri, rj++) = gen.conduction(i, j);
            }
            ++ri;
        }
        const Eigen::VectorXcd eigenvalues = Eigen::EigenSolver<Eigen::MatrixXd>(reduced,
                                                                                 false)
                                                 .eigenvalues();
        const double slowest_rate = eigenvalues.real().cwiseAbs().minCoeff();
        const double horizon = 40.0 / slowest_rate;
        const SimulationTrace trace =
            simulate(net, [&](double) { return input; }, net.uniform_ambient(), horizon,
                     horizon / 256.0, DiscretizeMethod::Exact);
        const Eigen::VectorXd endpoint =
            trace.temperatures.row(trace.sample_count() - 1).transpose();
        CHECK((endpoint - ss).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("placeholder network has the documented shape") {
    const ThermalNetwork net = placeholder_network();
    CHECK(net.node_count() == 14);
    CHECK(net.motor_count() == 12);
    CHECK(net.environment_index() == 13);
    CHECK(net.nodes()[12].kind == NodeKind::Computer);
    // every motor cools directly to the environment
    for (int m = 0; m < 12; ++m) CHECK(net.edge_resistance(m, 13).has_value());
}
