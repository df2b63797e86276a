#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ansatz.hpp"
#include "errors.hpp"
#include "random.hpp"

namespace admix {

enum class OptimizerMethod { Adam, GradientDescent };

struct OptimizerConfig {
    OptimizerMethod method = OptimizerMethod::Adam;
    double learning_rate = 0.05;
    double inner_tol = 1e-3;
    std::size_t patience = 3;
    std::size_t max_iters = 500;
    double fd_step = kDefaultFdStep;
    double init_lo = -std::numbers::pi;
    double init_hi = std::numbers::pi;
    // Adam moment decay rates and denominator guard.
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;

    void validate(const std::string &prefix = "optimizer") const {
        if (!(learning_rate > 0.0)) {
            throw ConfigError("must be positive", prefix + ".learning_rate");
        }
        if (!(inner_tol > 0.0)) {
            throw ConfigError("must be positive", prefix + ".inner_tol");
        }
        if (patience < 1) {
            throw ConfigError("must be at least 1", prefix + ".patience");
        }
        if (max_iters < 1) {
            throw ConfigError("must be at least 1", prefix + ".max_iters");
        }
        if (!(fd_step > 0.0)) {
            throw ConfigError("must be positive", prefix + ".fd_step");
        }
        if (!(init_lo < init_hi) || !std::isfinite(init_lo) ||
            !std::isfinite(init_hi)) {
            throw ConfigError("init range must satisfy init_lo < init_hi",
                              prefix + ".init_lo");
        }
        if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
            !(adam_beta2 >= 0.0 && adam_beta2 < 1.0) || !(adam_eps > 0.0)) {
            throw ConfigError("Adam decay rates must lie in [0, 1)",
                              prefix + ".adam");
        }
    }
};

struct RunResult {
    double final_expectation = 0.0; // best seen
    ParameterVector best_params;
    std::size_t iterations = 0;
    /// trajectory[0] is the starting value, trajectory[t] the value after
    /// step t.
    std::vector<double> trajectory;
};

inline ParameterVector random_init(std::size_t param_count,
                                   const OptimizerConfig &cfg,
                                   std::uint64_t seed) {
    Rng rng(seed);
    ParameterVector theta(param_count);
    for (auto &t : theta) {
        t = uniform_real(rng, cfg.init_lo, cfg.init_hi);
    }
    return theta;
}

/// Gradient-based minimization of an arbitrary objective with a
/// caller-supplied gradient. One iteration is one gradient evaluation
/// followed by one update. Stops once |F_t - F_{t-1}| < inner_tol for
/// `patience` consecutive steps, or after max_iters steps; returns the best
/// point seen.
template <class Objective, class Gradient>
RunResult minimize_function(Objective &&objective, Gradient &&grad_fn,
                            ParameterVector theta, const OptimizerConfig &cfg) {
    cfg.validate();
    const std::size_t dim = theta.size();
    RunResult result;
    double f = objective(theta);
    result.trajectory.push_back(f);
    result.final_expectation = f;
    result.best_params = theta;

    std::vector<double> m(dim, 0.0);
    std::vector<double> v(dim, 0.0);
    double beta1_pow = 1.0;
    double beta2_pow = 1.0;
    std::size_t calm_steps = 0;

    while (result.iterations < cfg.max_iters && dim > 0) {
        const std::vector<double> g = grad_fn(theta);
        ++result.iterations;
        if (cfg.method == OptimizerMethod::Adam) {
            beta1_pow *= cfg.adam_beta1;
            beta2_pow *= cfg.adam_beta2;
            for (std::size_t j = 0; j < dim; ++j) {
                m[j] = cfg.adam_beta1 * m[j] + (1.0 - cfg.adam_beta1) * g[j];
                v[j] = cfg.adam_beta2 * v[j] + (1.0 - cfg.adam_beta2) * g[j] * g[j];
                const double m_hat = m[j] / (1.0 - beta1_pow);
                const double v_hat = v[j] / (1.0 - beta2_pow);
                theta[j] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
            }
        } else {
            for (std::size_t j = 0; j < dim; ++j) {
                theta[j] -= cfg.learning_rate * g[j];
            }
        }
        const double f_next = objective(theta);
        result.trajectory.push_back(f_next);
        if (f_next < result.final_expectation) {
            result.final_expectation = f_next;
            result.best_params = theta;
        }
        calm_steps = std::abs(f_next - f) < cfg.inner_tol ? calm_steps + 1 : 0;
        f = f_next;
        if (calm_steps >= cfg.patience) {
            break;
        }
    }
    return result;
}

/// Minimizes <H_C> of circuit `c` on `g` from `init`. The procedure is
/// deterministic; `seed` is accepted for interface symmetry with the
/// stochastic builders and does not influence the result.
inline RunResult minimize(const Circuit &c, const Graph &g,
                          ParameterVector init, const OptimizerConfig &cfg,
                          [[maybe_unused]] std::uint64_t seed = 0,
                          MixerPhase phase = MixerPhase::ControlledRx) {
    check_parameters(c, init);
    if (c.num_qubits() != g.size()) {
        throw InputError("circuit and graph sizes differ");
    }
    return minimize_function(
        [&](const ParameterVector &theta) { return expectation(c, theta, g, phase); },
        [&](const ParameterVector &theta) {
            return full_gradient(c, theta, g, cfg.fd_step, phase);
        },
        std::move(init), cfg);
}

} // namespace admix
