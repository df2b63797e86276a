#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include <admix/admix.hpp>

#include "dense_oracle.hpp"
#include "generators.hpp"

using namespace admix;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;
const Graph kK2(2, {{0, 1}});

StateVector make_state(std::size_t n, std::vector<cd> amps) {
    return {n, std::move(amps)};
}

void expect_amplitudes(const StateVector &s, const std::vector<cd> &want, double tol) {
    ASSERT_EQ(s.dimension(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
        EXPECT_NEAR(s[i].real(), want[i].real(), tol) << "index " << i;
        EXPECT_NEAR(s[i].imag(), want[i].imag(), tol) << "index " << i;
    }
}

StateVector random_state(std::mt19937_64 &rng, std::size_t n) {
    std::normal_distribution<double> dist;
    std::vector<cd> amps(std::size_t{1} << n);
    double norm = 0.0;
    for (auto &a : amps) {
        a = {dist(rng), dist(rng)};
        norm += std::norm(a);
    }
    for (auto &a : amps) {
        a /= std::sqrt(norm);
    }
    return {n, std::move(amps)};
}

} // namespace

TEST(InitZeroState, BasisVectorAtZero) {
    expect_amplitudes(init_zero_state(1), {1.0, 0.0}, 0.0);
    expect_amplitudes(init_zero_state(2), {1.0, 0.0, 0.0, 0.0}, 0.0);
    const auto s3 = init_zero_state(3);
    EXPECT_EQ(s3.dimension(), 8U);
    EXPECT_EQ(s3[0], cd(1.0));
    EXPECT_THROW(init_zero_state(0), SizeError);
    EXPECT_THROW(init_zero_state(27), SizeError);
}

TEST(InitZeroState, SinglePrecisionInstantiates) {
    auto s = init_zero_state<float>(3);
    apply_phase_layer(s, 0.3f);
    EXPECT_FLOAT_EQ(s.norm_squared(), 1.0f);
}

TEST(PhaseLayer, Examples) {
    auto s = init_zero_state(3);
    apply_phase_layer(s, 1.234);
    expect_amplitudes(s, {1.0, 0, 0, 0, 0, 0, 0, 0}, 0.0);

    auto s11 = make_state(2, {0, 0, 0, 1});
    apply_phase_layer(s11, kPi);
    expect_amplitudes(s11, {0, 0, 0, 1}, 1e-12);

    const double r = 1.0 / std::sqrt(2.0);
    auto sup = make_state(2, {r, r, 0, 0});
    apply_phase_layer(sup, kPi / 2);
    expect_amplitudes(sup, {r, cd(0, r), 0, 0}, 1e-12);
}

TEST(Mixer, UncontrolledRxPiIsMinusIX) {
    auto s = init_zero_state(1);
    apply_mixer(s, MixerGate{0, {}, kPi / 2});
    expect_amplitudes(s, {0, cd(0, -1)}, 1e-12);
}

TEST(Mixer, OpenControlFiresOnZero) {
    const double beta = 0.7;
    auto s = init_zero_state(2);
    apply_mixer(s, MixerGate{0, {1}, beta});
    // index 1 is qubit 0 set
    expect_amplitudes(s, {std::cos(beta), cd(0, -std::sin(beta)), 0, 0}, 1e-12);
}

TEST(Mixer, OpenControlBlockedByOne) {
    auto s = make_state(2, {0, 0, 1, 0}); // qubit 1 set
    apply_mixer(s, MixerGate{0, {1}, 0.9});
    expect_amplitudes(s, {0, 0, 1, 0}, 0.0);
}

TEST(Mixer, ExactModeAddsBlockedPhase) {
    const double beta = 0.4;
    auto s = make_state(2, {0, 0, 1, 0});
    apply_mixer(s, MixerGate{0, {1}, beta}, MixerPhase::ExactExponential);
    expect_amplitudes(s, {0, 0, std::polar(1.0, -beta), 0}, 1e-12);
}

TEST(Mixer, RejectsBadIndices) {
    auto s = init_zero_state(3);
    EXPECT_THROW(apply_mixer(s, MixerGate{3, {}, 0.1}), InputError);
    EXPECT_THROW(apply_mixer(s, MixerGate{0, {3}, 0.1}), InputError);
    EXPECT_THROW(apply_mixer(s, MixerGate{1, {1}, 0.1}), InputError);
}

TEST(Mixer, MatchesDenseOracle) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (std::size_t n = 1; n <= 4; ++n) {
        for (std::size_t target = 0; target < n; ++target) {
            for (std::uint64_t controls = 0; controls < (std::uint64_t{1} << n); ++controls) {
                if (((controls >> target) & 1U) != 0) {
                    continue;
                }
                MixerGate gate{target, {}, angle(rng)};
                for (std::size_t q = 0; q < n; ++q) {
                    if (((controls >> q) & 1U) != 0) {
                        gate.open_controls.push_back(q);
                    }
                }
                for (const auto phase :
                     {MixerPhase::ControlledRx, MixerPhase::ExactExponential}) {
                    auto s = random_state(rng, n);
                    const auto before = test::to_dense(s);
                    apply_mixer(s, gate, phase);
                    const test::DenseVector want = test::dense_mixer(gate, n, phase) * before;
                    const auto got = test::to_dense(s);
                    EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-12)
                        << "n=" << n << " target=" << target << " controls=" << controls;
                }
            }
        }
    }
}

TEST(PhaseLayer, MatchesDenseOracle) {
    std::mt19937_64 rng(7);
    for (std::size_t n = 1; n <= 4; ++n) {
        auto s = random_state(rng, n);
        const auto before = test::to_dense(s);
        apply_phase_layer(s, 0.83);
        const test::DenseVector want = test::dense_phase(n, 0.83) * before;
        EXPECT_LT((test::to_dense(s) - want).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Unitarity, InverseAnglesRestoreState) {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial) % 6;
        const Graph g = test::random_graph(rng, n, 0.4);
        const auto s0 = random_state(rng, n);
        const double beta = std::uniform_real_distribution<double>(-kPi, kPi)(rng);
        const std::size_t v = static_cast<std::size_t>(trial) % n;
        for (const auto phase : {MixerPhase::ControlledRx, MixerPhase::ExactExponential}) {
            auto s = s0;
            apply_mixer(s, mixer_for_vertex(g, v, beta), phase);
            EXPECT_NEAR(s.norm_squared(), 1.0, 1e-10);
            apply_mixer(s, mixer_for_vertex(g, v, -beta), phase);
            for (std::size_t i = 0; i < s.dimension(); ++i) {
                EXPECT_LT(std::abs(s[i] - s0[i]), 1e-10);
            }
        }
        auto s = s0;
        apply_phase_layer(s, beta);
        EXPECT_NEAR(s.norm_squared(), 1.0, 1e-10);
        apply_phase_layer(s, -beta);
        for (std::size_t i = 0; i < s.dimension(); ++i) {
            EXPECT_LT(std::abs(s[i] - s0[i]), 1e-10);
        }
    }
}

TEST(Unitarity, ZeroAnglesAreExactIdentities) {
    std::mt19937_64 rng(23);
    const Graph g = test::random_graph(rng, 6, 0.5);
    const auto s0 = random_state(rng, 6);
    auto s = s0;
    apply_phase_layer(s, 0.0);
    for (std::size_t v = 0; v < 6; ++v) {
        apply_mixer(s, mixer_for_vertex(g, v, 0.0));
        apply_mixer(s, mixer_for_vertex(g, v, 0.0), MixerPhase::ExactExponential);
    }
    for (std::size_t i = 0; i < s.dimension(); ++i) {
        EXPECT_EQ(s[i], s0[i]);
    }
}

TEST(Expectation, Examples) {
    EXPECT_DOUBLE_EQ(expectation_hc(init_zero_state(2)), 0.0);
    EXPECT_DOUBLE_EQ(expectation_hc(make_state(2, {0, 0, 0, 1})), -2.0);
    const double r = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(expectation_hc(make_state(1, {r, r})), -0.5, 1e-15);
}

TEST(Feasibility, Examples) {
    EXPECT_TRUE(support_is_feasible(init_zero_state(2), kK2, 1e-12));
    EXPECT_FALSE(support_is_feasible(make_state(2, {0, 0, 0, 1}), kK2, 1e-12));
    EXPECT_THROW((void)support_is_feasible(init_zero_state(3), kK2, 1e-12), InputError);
}

TEST(Feasibility, AnsatzStatesStayInsideIndependentSets) {
    // Every circuit family on small graphs; expectation bounded by -alpha.
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial) % 9;
        const Graph g = test::random_graph(rng, n, 0.45);
        const auto alpha = static_cast<double>(brute_force_mis(g).alpha);
        const std::size_t p = 1 + static_cast<std::size_t>(trial) % 3;
        const auto seed = static_cast<std::uint64_t>(trial);
        for (const auto &c : {build_qaoa_plus(g, p), build_pu(g, p, n / 2 + 1, seed),
                              build_pnu(g, p, n / 2 + 1, seed)}) {
            const auto theta = test::random_angles(rng, c.param_count());
            for (const auto phase : {MixerPhase::ControlledRx, MixerPhase::ExactExponential}) {
                const auto ev = evaluate(c, theta, g, phase);
                EXPECT_TRUE(support_is_feasible(ev.state, g, 1e-12));
                EXPECT_NEAR(ev.state.norm_squared(), 1.0, 1e-10);
                EXPECT_LE(ev.expectation, 0.0);
                EXPECT_GE(ev.expectation, -alpha - 1e-12);
            }
        }
    }
}

TEST(Feasibility, C5ExhaustiveOverLayers) {
    const Graph c5 = test::cycle_graph(5);
    std::mt19937_64 rng(37);
    for (std::size_t p = 1; p <= 5; ++p) {
        const auto c = build_qaoa_plus(c5, p);
        const auto ev = evaluate(c, test::random_angles(rng, c.param_count()), c5);
        EXPECT_TRUE(support_is_feasible(ev.state, c5, 1e-12));
    }
}

TEST(BasisProbabilities, Examples) {
    const auto one = basis_probabilities(make_state(2, {0, 1, 0, 0}));
    ASSERT_EQ(one.size(), 1U);
    EXPECT_EQ(one[0].state.to_string(), "10"); // qubit 0 set, x_0 first
    EXPECT_DOUBLE_EQ(one[0].probability, 1.0);

    const double r = 1.0 / std::sqrt(2.0);
    const auto two = basis_probabilities(make_state(2, {r, 0, r, 0}));
    ASSERT_EQ(two.size(), 2U);
    EXPECT_NEAR(two[0].probability, 0.5, 1e-15);
    EXPECT_NEAR(two[1].probability, 0.5, 1e-15);
    EXPECT_EQ(two[0].state.bits(), 0U); // ties keep ascending basis order
    EXPECT_EQ(two[1].state.bits(), 2U);

    auto s = init_zero_state(1);
    apply_mixer(s, MixerGate{0, {}, kPi / 4});
    const auto half = basis_probabilities(s);
    ASSERT_EQ(half.size(), 2U);
    EXPECT_NEAR(half[0].probability, 0.5, 1e-12);
    EXPECT_NEAR(half[1].probability, 0.5, 1e-12);
}

TEST(StateDump, VertexOrderedLines) {
    std::ostringstream out;
    write_state_dump(out, make_state(2, {0, 1, 0, 0}));
    EXPECT_EQ(out.str(), "00 0 0\n10 1 0\n01 0 0\n11 0 0\n");
    std::ostringstream big;
    EXPECT_THROW(write_state_dump(big, init_zero_state(11)), SizeError);
}
