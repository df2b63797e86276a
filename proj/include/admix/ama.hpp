#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ansatz.hpp"
#include "errors.hpp"
#include "graphs.hpp"
#include "optimizer.hpp"
#include "random.hpp"
#include "statevector.hpp"

namespace admix {

/// Which derivative enters the gradient term of the selection score.
enum class GradientTarget {
    NewLayerBeta,       // |dF/dbeta| of the layer being grown
    FullParameterVector // Euclidean norm over every circuit parameter
};

struct AmaConfig {
    double f1 = 0.5;
    std::size_t sample_sets = 10;
    std::optional<std::size_t> delta_add;           // default floor(n/2)+1
    double delta_gra = 1e-3;
    std::optional<std::size_t> initial_subset_size; // default floor(n/2)+1
    double outer_tol = 0.1;
    std::optional<std::size_t> max_layers; // mixer layers incl. initial; default n
    GradientTarget gradient_target = GradientTarget::NewLayerBeta;
    bool normalize_scores = false;
    MixerPhase mixer_phase = MixerPhase::ControlledRx;
    OptimizerConfig optimizer;

    [[nodiscard]] std::size_t delta_add_for(std::size_t n) const {
        return delta_add.value_or(default_partial_mixers(n));
    }
    [[nodiscard]] std::size_t initial_subset_for(std::size_t n) const {
        return initial_subset_size.value_or(default_partial_mixers(n));
    }
    [[nodiscard]] std::size_t max_layers_for(std::size_t n) const {
        return max_layers.value_or(n);
    }

    /// Checks graph-independent fields; pass n > 0 to also check the
    /// size-dependent ones.
    void validate(std::size_t n = 0) const {
        if (!(f1 >= 0.0 && f1 <= 1.0)) {
            throw ConfigError("must lie in [0, 1]", "ama.f1");
        }
        if (sample_sets < 1) {
            throw ConfigError("must be at least 1", "ama.sample_sets");
        }
        if (!(delta_gra >= 0.0)) {
            throw ConfigError("must be nonnegative", "ama.delta_gra");
        }
        if (!(outer_tol > 0.0)) {
            throw ConfigError("must be positive", "ama.outer_tol");
        }
        if (delta_add && *delta_add < 1) {
            throw ConfigError("must be at least 1", "ama.delta_add");
        }
        if (initial_subset_size && *initial_subset_size < 1) {
            throw ConfigError("must be at least 1", "ama.initial_subset_size");
        }
        if (max_layers && *max_layers < 1) {
            throw ConfigError("must be at least 1", "ama.max_layers");
        }
        optimizer.validate("ama.optimizer");
        if (n > 0) {
            if (delta_add_for(n) > n) {
                throw ConfigError("exceeds vertex count " + std::to_string(n),
                                  "ama.delta_add");
            }
            if (initial_subset_for(n) > n) {
                throw ConfigError("exceeds vertex count " + std::to_string(n),
                                  "ama.initial_subset_size");
            }
        }
    }
};

/// Selection score of one pool member: (1 - f1) f_fun + f1 f_gra.
struct MixerScore {
    std::size_t vertex = 0;
    double f_fun = 0.0; // mean of -<H_C> over the shared samples
    double f_gra = 0.0; // mean gradient magnitude over the shared samples
    double score = 0.0;
    std::uint64_t samples_hash = 0; // identifies the sample list used
};

struct SelectionRound {
    std::size_t round = 0;
    std::vector<double> samples;
    std::vector<MixerScore> candidates; // ascending vertex
    MixerScore chosen;
    double max_f_gra = 0.0; // before any normalization
};

struct GrowthStep {
    std::vector<std::size_t> selected; // selection order
    std::vector<SelectionRound> rounds;
    ParameterVector start_params; // optimizer start after growth
    double expectation_after = 0.0;
    std::size_t iterations = 0;
};

struct AmaTrace {
    std::vector<std::size_t> initial_subset;
    ParameterVector initial_start_params;
    double initial_expectation = 0.0;
    std::size_t initial_iterations = 0;
    std::vector<GrowthStep> steps;

    [[nodiscard]] std::size_t growth_steps() const noexcept { return steps.size(); }
};

struct AmaOutcome {
    /// Result of the last layer optimization, with `iterations` summed over
    /// every optimization in the run.
    RunResult result;
    AmaTrace trace;
    Circuit circuit;
};

inline std::uint64_t hash_samples(std::span<const double> samples) {
    std::uint64_t h = splitmix64(samples.size());
    for (const double s : samples) {
        h = splitmix64(h ^ std::bit_cast<std::uint64_t>(s));
    }
    return h;
}

/// Phase layer on every qubit followed by one mixer layer over a seeded
/// random subset (ascending).
inline Circuit build_initial_circuit(const Graph &g, const AmaConfig &cfg,
                                     std::uint64_t seed) {
    const std::size_t n = g.size();
    const std::size_t k = cfg.initial_subset_for(n);
    if (k < 1 || k > n) {
        throw InputError("initial subset size " + std::to_string(k) +
                         " outside 1.." + std::to_string(n));
    }
    Rng rng(seed);
    Circuit c(n);
    c.add_phase_layer();
    c.add_mixer_layer(sample_subset(rng, n, k));
    return c;
}

namespace detail {

/// Trained prefix plus the growth layer assembled so far; evaluates the
/// candidate layer from the cached prefix state.
class GrowthScorer {
  public:
    GrowthScorer(const Circuit &trained, std::span<const double> trained_params,
                 const Graph &g, const AmaConfig &cfg)
        : trained_(trained), params_(trained_params.begin(), trained_params.end()),
          graph_(g), cfg_(cfg), prefix_(evaluate(trained, trained_params, g,
                                                 cfg.mixer_phase).state) {}

    [[nodiscard]] double layer_expectation(std::span<const std::size_t> layer,
                                           double beta) const {
        StateVector s = prefix_;
        apply_mixer_layer(s, graph_, layer, beta, cfg_.mixer_phase);
        return expectation_hc(s);
    }

    [[nodiscard]] MixerScore score(std::span<const std::size_t> layer_so_far,
                                   std::size_t candidate,
                                   std::span<const double> samples) const {
        std::vector<std::size_t> layer(layer_so_far.begin(), layer_so_far.end());
        layer.push_back(candidate);
        const double h = cfg_.optimizer.fd_step;

        double fun_sum = 0.0;
        double gra_sum = 0.0;
        std::optional<Circuit> full;
        if (cfg_.gradient_target == GradientTarget::FullParameterVector) {
            full = append_mixer_layer(trained_, layer);
        }
        for (const double beta : samples) {
            fun_sum += -layer_expectation(layer, beta);
            if (full) {
                ParameterVector theta = params_;
                theta.push_back(beta);
                const auto grad = full_gradient(*full, theta, graph_, h,
                                                cfg_.mixer_phase);
                double sq = 0.0;
                for (const double gj : grad) {
                    sq += gj * gj;
                }
                gra_sum += std::sqrt(sq);
            } else {
                const double up = layer_expectation(layer, beta + h);
                const double down = layer_expectation(layer, beta - h);
                gra_sum += std::abs((up - down) / (2.0 * h));
            }
        }
        const auto count = static_cast<double>(samples.size());
        MixerScore out;
        out.vertex = candidate;
        out.f_fun = fun_sum / count;
        out.f_gra = gra_sum / count;
        out.score = (1.0 - cfg_.f1) * out.f_fun + cfg_.f1 * out.f_gra;
        out.samples_hash = hash_samples(samples);
        return out;
    }

  private:
    const Circuit &trained_;
    ParameterVector params_;
    const Graph &graph_;
    const AmaConfig &cfg_;
    StateVector prefix_;
};

inline void check_candidate(std::span<const std::size_t> layer, std::size_t v,
                            std::size_t n) {
    if (v >= n) {
        throw InputError("candidate vertex " + std::to_string(v) +
                         " out of range");
    }
    if (std::find(layer.begin(), layer.end(), v) != layer.end()) {
        throw InputError("candidate vertex " + std::to_string(v) +
                         " already selected in this layer");
    }
}

} // namespace detail

/// Scores `candidate` for inclusion in the growth layer that currently holds
/// `growth_layer` (possibly empty). The trained prefix keeps its optimized
/// parameters; the growth layer's shared beta takes each value in
/// `shared_samples`.
inline MixerScore score_candidate(const Circuit &trained,
                                  std::span<const double> trained_params,
                                  const Graph &g,
                                  std::span<const std::size_t> growth_layer,
                                  std::size_t candidate,
                                  std::span<const double> shared_samples,
                                  const AmaConfig &cfg) {
    detail::check_candidate(growth_layer, candidate, g.size());
    if (shared_samples.empty()) {
        throw InputError("score_candidate needs at least one beta sample");
    }
    const detail::GrowthScorer scorer(trained, trained_params, g, cfg);
    return scorer.score(growth_layer, candidate, shared_samples);
}

struct GrowLayerResult {
    Circuit circuit;
    GrowthStep step;
};

/// Builds one new mixer layer by greedy selection from the full vertex pool.
/// Each round draws `sample_sets` beta values shared by every candidate,
/// picks the highest score (lowest vertex on ties) and continues while the
/// round's largest f_gra exceeds delta_gra and fewer than delta_add mixers
/// have been placed.
inline GrowLayerResult grow_layer(const Circuit &c, std::span<const double> params,
                                  const Graph &g, const AmaConfig &cfg,
                                  std::uint64_t seed) {
    const std::size_t n = g.size();
    const std::size_t cap = cfg.delta_add_for(n);
    const detail::GrowthScorer scorer(c, params, g, cfg);
    Rng rng(seed);

    std::vector<std::size_t> pool(n);
    for (std::size_t v = 0; v < n; ++v) {
        pool[v] = v;
    }
    GrowthStep step;
    for (std::size_t round = 0;; ++round) {
        SelectionRound record;
        record.round = round;
        record.samples.resize(cfg.sample_sets);
        for (auto &beta : record.samples) {
            beta = uniform_real(rng, cfg.optimizer.init_lo, cfg.optimizer.init_hi);
        }
        for (const auto v : pool) {
            record.candidates.push_back(scorer.score(step.selected, v, record.samples));
        }
        double max_fun = 0.0;
        record.max_f_gra = 0.0;
        for (const auto &s : record.candidates) {
            max_fun = std::max(max_fun, s.f_fun);
            record.max_f_gra = std::max(record.max_f_gra, s.f_gra);
        }
        if (cfg.normalize_scores) {
            for (auto &s : record.candidates) {
                s.f_fun = max_fun > 0.0 ? s.f_fun / max_fun : 0.0;
                s.f_gra = record.max_f_gra > 0.0 ? s.f_gra / record.max_f_gra : 0.0;
                s.score = (1.0 - cfg.f1) * s.f_fun + cfg.f1 * s.f_gra;
            }
        }
        // Candidates are in ascending vertex order; strict > keeps the
        // lowest vertex on ties.
        std::size_t best = 0;
        for (std::size_t i = 1; i < record.candidates.size(); ++i) {
            if (record.candidates[i].score > record.candidates[best].score) {
                best = i;
            }
        }
        record.chosen = record.candidates[best];
        step.selected.push_back(record.chosen.vertex);
        pool.erase(std::find(pool.begin(), pool.end(), record.chosen.vertex));
        const double max_gra = record.max_f_gra;
        step.rounds.push_back(std::move(record));
        if (!(max_gra > cfg.delta_gra) || step.selected.size() >= cap ||
            pool.empty()) {
            break;
        }
    }
    return {append_mixer_layer(c, step.selected), std::move(step)};
}

/// Full adaptive run: optimize the initial circuit, then repeatedly grow a
/// mixer layer and re-optimize every parameter (previous optimum
/// warm-started, new beta random) until two consecutive layer optimizations
/// differ by less than outer_tol or the layer cap is hit.
inline AmaOutcome run_ama(const Graph &g, const AmaConfig &cfg,
                          std::uint64_t seed) {
    const std::size_t n = g.size();
    cfg.validate(n);
    const auto &opt = cfg.optimizer;

    AmaOutcome out;
    out.circuit = build_initial_circuit(g, cfg, derive_seed(seed, "initial-subset"));
    out.trace.initial_subset =
        std::get<MixerLayer>(out.circuit.layers().back()).vertices;
    out.trace.initial_start_params =
        random_init(out.circuit.param_count(), opt, derive_seed(seed, "initial-params"));

    RunResult current = minimize(out.circuit, g, out.trace.initial_start_params,
                                 opt, 0, cfg.mixer_phase);
    out.trace.initial_expectation = current.final_expectation;
    out.trace.initial_iterations = current.iterations;
    std::size_t total_iterations = current.iterations;

    const std::size_t layer_cap = cfg.max_layers_for(n);
    for (std::size_t k = 0; out.circuit.mixer_layer_count() < layer_cap; ++k) {
        auto grown = grow_layer(out.circuit, current.best_params, g, cfg,
                                derive_seed(seed, "grow", k));
        ParameterVector start = current.best_params;
        Rng beta_rng(derive_seed(seed, "new-beta", k));
        start.push_back(uniform_real(beta_rng, opt.init_lo, opt.init_hi));

        RunResult next = minimize(grown.circuit, g, start, opt, 0, cfg.mixer_phase);
        total_iterations += next.iterations;
        grown.step.start_params = std::move(start);
        grown.step.expectation_after = next.final_expectation;
        grown.step.iterations = next.iterations;
        out.trace.steps.push_back(std::move(grown.step));
        out.circuit = std::move(grown.circuit);

        const double change = std::abs(next.final_expectation - current.final_expectation);
        current = std::move(next);
        if (change < cfg.outer_tol) {
            break;
        }
    }
    out.result = std::move(current);
    out.result.iterations = total_iterations;
    return out;
}

} // namespace admix
