#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include <admix/admix.hpp>

#include "dense_oracle.hpp"
#include "generators.hpp"

using namespace admix;

namespace {

constexpr double kPi = std::numbers::pi;
const Graph kK1(1, {});
const Graph kK2(2, {{0, 1}});

std::vector<std::size_t> mixer_vertices(const Circuit &c, std::size_t layer) {
    return std::get<MixerLayer>(c.layers().at(layer)).vertices;
}

std::vector<std::vector<std::size_t>> all_mixer_layers(const Circuit &c) {
    std::vector<std::vector<std::size_t>> out;
    for (const auto &layer : c.layers()) {
        if (const auto *m = std::get_if<MixerLayer>(&layer)) {
            out.push_back(m->vertices);
        }
    }
    return out;
}

} // namespace

TEST(Circuit, LayersOwnConsecutiveParameters) {
    Circuit c(3);
    c.add_phase_layer();
    c.add_mixer_layer({2, 0});
    c.add_phase_layer();
    ASSERT_EQ(c.param_count(), 3U);
    for (std::size_t i = 0; i < c.layers().size(); ++i) {
        const auto idx = std::visit([](const auto &l) { return l.param_index; }, c.layers()[i]);
        EXPECT_EQ(idx, i);
    }
    EXPECT_THROW(c.add_mixer_layer({}), InputError);
    EXPECT_THROW(c.add_mixer_layer({1, 1}), InputError);
    EXPECT_THROW(c.add_mixer_layer({3}), InputError);
}

TEST(BuildQaoaPlus, Structure) {
    const auto k2 = build_qaoa_plus(kK2, 1);
    ASSERT_EQ(k2.layers().size(), 2U);
    EXPECT_TRUE(std::holds_alternative<PhaseLayer>(k2.layers()[0]));
    EXPECT_EQ(mixer_vertices(k2, 1), (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(k2.param_count(), 2U);

    const auto g8 = generate_er(8, 0.5, 1);
    const auto c8 = build_qaoa_plus(g8, 4);
    EXPECT_EQ(c8.param_count(), 8U);
    for (const auto &layer : all_mixer_layers(c8)) {
        EXPECT_EQ(layer.size(), 8U);
    }
    EXPECT_EQ(build_qaoa_plus(test::cycle_graph(5), 3).param_count(), 6U);
    EXPECT_THROW(build_qaoa_plus(kK2, 0), InputError);
}

TEST(BuildPu, SameSubsetEveryLayer) {
    const auto g = generate_er(8, 0.5, 3);
    const auto c = build_pu(g, 4, 5, 99);
    const auto layers = all_mixer_layers(c);
    ASSERT_EQ(layers.size(), 4U);
    EXPECT_EQ(layers[0].size(), 5U);
    for (const auto &l : layers) {
        EXPECT_EQ(l, layers[0]);
    }
    EXPECT_EQ(build_pu(g, 4, 5, 99), c);
    EXPECT_EQ(build_pu(kK2, 2, 2, 7), build_qaoa_plus(kK2, 2));
    EXPECT_THROW(build_pu(g, 4, 9, 1), InputError);
    EXPECT_THROW(build_pu(g, 4, 0, 1), InputError);
}

TEST(BuildPnu, IndependentSubsets) {
    const auto g = generate_er(10, 0.5, 4);
    const auto c = build_pnu(g, 5, 6, 12);
    const auto layers = all_mixer_layers(c);
    ASSERT_EQ(layers.size(), 5U);
    for (const auto &l : layers) {
        EXPECT_EQ(l.size(), 6U);
        EXPECT_EQ(std::set<std::size_t>(l.begin(), l.end()).size(), 6U);
    }
    EXPECT_EQ(build_pnu(g, 5, 6, 12), c);
    for (const auto &l : all_mixer_layers(build_pnu(kK2, 3, 2, 5))) {
        EXPECT_EQ(l, (std::vector<std::size_t>{0, 1}));
    }
}

TEST(BuildPnu, LayersUsuallyDiffer) {
    // Two independent 6-of-10 subsets coincide with probability 1/210.
    const auto g = generate_er(10, 0.5, 8);
    int differ = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto layers = all_mixer_layers(build_pnu(g, 2, 6, seed));
        differ += layers[0] != layers[1] ? 1 : 0;
    }
    EXPECT_GT(differ, 190);
}

TEST(AppendMixerLayer, KeepsOrderAndGrowsParameters) {
    Circuit c(4);
    c.add_phase_layer();
    c.add_mixer_layer({0});
    const auto grown = append_mixer_layer(c, {3, 1});
    EXPECT_EQ(grown.param_count(), 3U);
    EXPECT_EQ(mixer_vertices(grown, 2), (std::vector<std::size_t>{3, 1}));
    EXPECT_EQ(append_mixer_layer(grown, {2}).param_count(), 4U);
    try {
        (void)append_mixer_layer(c, {});
        FAIL() << "expected an error";
    } catch (const InputError &e) {
        EXPECT_STREQ(e.what(), "empty mixer layer");
    }
}

TEST(Evaluate, SingleVertexClosedForm) {
    const auto c = build_qaoa_plus(kK1, 1);
    for (int k = 0; k < 100; ++k) {
        const double beta = -kPi + 2 * kPi * k / 99.0;
        const std::vector<double> theta{0.37, beta};
        EXPECT_NEAR(expectation(c, theta, kK1), -std::pow(std::sin(beta), 2), 1e-12);
    }
}

TEST(Evaluate, K2ReachesMinusOne) {
    const auto c = build_qaoa_plus(kK2, 1);
    const std::vector<double> theta{0.0, kPi / 2};
    const auto ev = evaluate(c, theta, kK2);
    EXPECT_NEAR(ev.expectation, -1.0, 1e-12);
    const test::DenseVector dense = test::dense_evolve(c, theta, kK2);
    EXPECT_NEAR(test::dense_expectation(dense), -1.0, 1e-12);
    EXPECT_LT((test::to_dense(ev.state) - dense).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Evaluate, ZeroParametersStayAtVacuum) {
    const auto g = generate_regular(8, 3, 2);
    const auto c = build_pnu(g, 3, 5, 4);
    EXPECT_EQ(expectation(c, std::vector<double>(c.param_count(), 0.0), g), 0.0);
}

TEST(Evaluate, MatchesDenseCircuit) {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial) % 4;
        const Graph g = test::random_graph(rng, n, 0.5);
        const auto c = build_pnu(g, 2, n / 2 + 1, static_cast<std::uint64_t>(trial));
        const auto theta = test::random_angles(rng, c.param_count());
        for (const auto phase : {MixerPhase::ControlledRx, MixerPhase::ExactExponential}) {
            const auto ev = evaluate(c, theta, g, phase);
            const test::DenseVector dense = test::dense_evolve(c, theta, g, phase);
            EXPECT_LT((test::to_dense(ev.state) - dense).cwiseAbs().maxCoeff(), 1e-12);
            EXPECT_NEAR(ev.expectation, test::dense_expectation(dense), 1e-12);
        }
    }
}

TEST(Evaluate, PeriodicInEveryParameter) {
    std::mt19937_64 rng(47);
    const Graph g = generate_er(6, 0.5, 9);
    const auto c = build_qaoa_plus(g, 2);
    const auto theta = test::random_angles(rng, c.param_count());
    const double base = expectation(c, theta, g);
    for (std::size_t j = 0; j < theta.size(); ++j) {
        auto shifted = theta;
        shifted[j] += 2 * kPi;
        EXPECT_NEAR(expectation(c, shifted, g), base, 1e-10);
    }
}

TEST(Evaluate, RejectsBadParameters) {
    const auto c = build_qaoa_plus(kK2, 1);
    EXPECT_THROW((void)evaluate(c, std::vector<double>{0.1}, kK2), InputError);
    EXPECT_THROW((void)evaluate(c, std::vector<double>{0.1, NAN}, kK2), InputError);
    EXPECT_THROW((void)evaluate(c, std::vector<double>{0.1, 0.2}, kK1), InputError);
}

TEST(Gradient, SingleVertexClosedForm) {
    const auto c = build_qaoa_plus(kK1, 1);
    const std::vector<std::size_t> beta_only{1};
    const auto at = [&](double beta) {
        return gradient(c, std::vector<double>{0.2, beta}, kK1, beta_only)[0];
    };
    EXPECT_NEAR(at(kPi / 4), -1.0, 1e-6);
    EXPECT_NEAR(at(0.0), 0.0, 1e-6);
    for (int k = 0; k < 20; ++k) {
        const double beta = -3.0 + 0.3 * k;
        EXPECT_NEAR(at(beta), -std::sin(2 * beta), 1e-6);
    }
    // gamma does nothing to a single qubit starting at |0>
    EXPECT_NEAR(full_gradient(c, std::vector<double>{0.2, 0.5}, kK1)[0], 0.0, 1e-12);
}

TEST(Gradient, TwoVertexClosedForm) {
    // On K2 a single mixer layer from |00> gives
    // F = -(sin^2 b + cos^2 b sin^2 b) for beta = b.
    const auto c = build_qaoa_plus(kK2, 1);
    for (int k = 0; k < 15; ++k) {
        const double b = -1.4 + 0.2 * k;
        const double s = std::sin(b);
        const double co = std::cos(b);
        const double f = -(s * s + co * co * s * s);
        const double df = -(2 * s * co + (-2 * co * s) * s * s + co * co * 2 * s * co);
        const std::vector<double> theta{0.6, b};
        EXPECT_NEAR(expectation(c, theta, kK2), f, 1e-12);
        EXPECT_NEAR(full_gradient(c, theta, kK2)[1], df, 1e-6);
    }
}

TEST(Gradient, StepHalvingConsistency) {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 3 + static_cast<std::size_t>(trial) % 4;
        const Graph g = test::random_graph(rng, n, 0.5);
        const auto c = build_qaoa_plus(g, 2);
        const auto theta = test::random_angles(rng, c.param_count());
        const auto g1 = full_gradient(c, theta, g, 1e-4);
        const auto g2 = full_gradient(c, theta, g, 5e-5);
        for (std::size_t j = 0; j < g1.size(); ++j) {
            EXPECT_LT(std::abs(g1[j] - g2[j]), 1e-6);
        }
    }
}

TEST(Gradient, SubsetMatchesFull) {
    const Graph g = generate_er(5, 0.5, 2);
    const auto c = build_qaoa_plus(g, 2);
    const std::vector<double> theta{0.1, 0.2, 0.3, 0.4};
    const auto full = full_gradient(c, theta, g);
    const std::vector<std::size_t> idx{3, 0};
    const auto part = gradient(c, theta, g, idx);
    EXPECT_EQ(part[0], full[3]);
    EXPECT_EQ(part[1], full[0]);
    const std::vector<std::size_t> bad{4};
    EXPECT_THROW((void)gradient(c, theta, g, bad), InputError);
    EXPECT_THROW((void)gradient(c, theta, g, idx, 0.0), InputError);
}

TEST(Depth, Examples) {
    const auto g8 = generate_er(8, 0.5, 1);
    EXPECT_EQ(circuit_depth(build_qaoa_plus(g8, 4)), 100U);
    const auto g12 = generate_er(12, 0.5, 1);
    EXPECT_EQ(circuit_depth(build_pu(g12, 5, 7, 1)), 110U);
    Circuit phase_only(3);
    phase_only.add_phase_layer();
    EXPECT_EQ(circuit_depth(phase_only), 1U);
    EXPECT_EQ(circuit_depth(build_qaoa_plus(kK2, 1)), 7U);
    ResourceModel custom;
    custom.depth_per_mixer = 5;
    custom.phase_layer_depth = 2;
    EXPECT_EQ(circuit_depth(build_qaoa_plus(kK2, 1), custom), 12U);
}

TEST(Cnots, CostModel) {
    const ResourceModel model;
    EXPECT_EQ(model.cnot_cost(0), 0U);
    EXPECT_EQ(model.cnot_cost(1), 2U);
    EXPECT_EQ(model.cnot_cost(2), 10U);
    EXPECT_EQ(model.cnot_cost(3), 18U);
    ResourceModel custom;
    custom.cnot_overrides[4] = 20;
    EXPECT_EQ(custom.cnot_cost(4), 20U);
    EXPECT_EQ(custom.cnot_cost(3), 18U);
    custom.cnot_overrides[0] = 1;
    EXPECT_THROW(custom.validate(), ConfigError);
}

TEST(Cnots, Examples) {
    const auto g10 = generate_regular(10, 3, 6);
    Circuit one_layer(10);
    one_layer.add_phase_layer();
    one_layer.add_mixer_layer({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    EXPECT_EQ(cnot_count(one_layer, g10), 180U);
    EXPECT_EQ(100 * cnot_count(build_qaoa_plus(g10, 4), g10), 72000U);
    const auto g12 = generate_regular(12, 3, 6);
    EXPECT_EQ(100 * cnot_count(build_qaoa_plus(g12, 4), g12), 86400U);
    EXPECT_EQ(cnot_count(build_qaoa_plus(Graph(3, {}), 2), Graph(3, {})), 0U);
}

TEST(Cnots, RegularGraphsCostEighteenPerMixer) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = generate_regular(8, 3, seed);
        const auto c = build_pnu(g, 3, 5, seed);
        EXPECT_EQ(cnot_count(c, g), 18 * c.mixer_count());
    }
}

TEST(CircuitDump, Format) {
    std::ostringstream out;
    write_circuit_dump(out, append_mixer_layer(build_qaoa_plus(kK2, 1), {1}));
    EXPECT_EQ(out.str(), "P 0\nM 1 0,1\nM 2 1\n");
}
