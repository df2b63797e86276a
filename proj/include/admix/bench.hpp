#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ama.hpp"
#include "ansatz.hpp"
#include "errors.hpp"
#include "graphs.hpp"
#include "optimizer.hpp"
#include "random.hpp"

namespace admix {

enum class Algorithm { Ama, QaoaPlus, Pu, Pnu };

inline constexpr std::string_view algorithm_tag(Algorithm a) noexcept {
    switch (a) {
    case Algorithm::Ama:
        return "ama";
    case Algorithm::QaoaPlus:
        return "qaoa_plus";
    case Algorithm::Pu:
        return "pu";
    case Algorithm::Pnu:
        return "pnu";
    }
    return "unknown";
}

inline Algorithm parse_algorithm(std::string_view tag) {
    for (const auto a : {Algorithm::Ama, Algorithm::QaoaPlus, Algorithm::Pu,
                         Algorithm::Pnu}) {
        if (algorithm_tag(a) == tag) {
            return a;
        }
    }
    throw InputError("unknown algorithm '" + std::string(tag) +
                     "' (expected ama, qaoa_plus, pu or pnu)");
}

enum class GraphFamily { Er, Regular3 };

/// Name used in config files.
inline constexpr std::string_view family_name(GraphFamily f) noexcept {
    return f == GraphFamily::Er ? "er" : "regular-3";
}

/// Short tag used in graph ids and file names.
inline constexpr std::string_view family_tag(GraphFamily f) noexcept {
    return f == GraphFamily::Er ? "er" : "reg3";
}

inline GraphFamily parse_family(std::string_view name) {
    if (name == "er") {
        return GraphFamily::Er;
    }
    if (name == "regular-3" || name == "reg3") {
        return GraphFamily::Regular3;
    }
    throw InputError("unknown graph family '" + std::string(name) +
                     "' (expected er or regular-3)");
}

struct ExperimentConfig {
    GraphFamily family = GraphFamily::Er;
    std::vector<std::size_t> sizes{8, 10, 12};
    std::size_t graphs_per_size = 20;
    std::vector<Algorithm> algorithms{Algorithm::Ama, Algorithm::QaoaPlus,
                                      Algorithm::Pu, Algorithm::Pnu};
    std::vector<std::size_t> depths{4, 5, 6};
    std::size_t runs_per_setting = 100;
    std::uint64_t master_seed = 0;
    double er_edge_prob = 0.5;
    std::optional<std::size_t> mixers_per_layer; // PU/PNU; default floor(n/2)+1
    AmaConfig ama;
    OptimizerConfig optimizer; // QAOA+, PU, PNU
    ResourceModel resources;
    double runtime_constant = 0.1;
    std::size_t jobs = 1;

    // Resource-to-reach-OAR protocol.
    std::vector<Algorithm> oar_algorithms{Algorithm::Ama, Algorithm::QaoaPlus,
                                          Algorithm::Pnu};
    std::size_t oar_runs_per_depth = 200; // runs at depth p = this * p
    std::size_t oar_ama_runs_per_vertex = 50;
    std::optional<std::size_t> oar_max_depth; // default n

    [[nodiscard]] std::size_t mixers_for(std::size_t n) const {
        return mixers_per_layer.value_or(default_partial_mixers(n));
    }

    void validate() const {
        optimizer.validate("optimizer");
        resources.validate();
        if (sizes.empty()) {
            throw ConfigError("must list at least one size", "bench.sizes");
        }
        for (const auto n : sizes) {
            if (n < 2 || n > kMaxOracleVertices) {
                throw ConfigError("size " + std::to_string(n) + " outside 2.." +
                                      std::to_string(kMaxOracleVertices),
                                  "bench.sizes");
            }
            if (family == GraphFamily::Regular3 && (n % 2 != 0 || n < 4)) {
                throw ConfigError("3-regular graphs need even n >= 4", "bench.sizes");
            }
            if (mixers_for(n) < 1 || mixers_for(n) > n) {
                throw ConfigError("exceeds vertex count " + std::to_string(n),
                                  "bench.mixers_per_layer");
            }
            ama.validate(n);
        }
        if (graphs_per_size < 1) {
            throw ConfigError("must be at least 1", "bench.graphs_per_size");
        }
        if (algorithms.empty()) {
            throw ConfigError("must list at least one algorithm", "bench.algorithms");
        }
        if (runs_per_setting < 1) {
            throw ConfigError("must be at least 1", "bench.runs_per_setting");
        }
        for (const auto p : depths) {
            if (p < 1) {
                throw ConfigError("depths must be at least 1", "bench.depths");
            }
        }
        const bool needs_depths =
            std::any_of(algorithms.begin(), algorithms.end(),
                        [](Algorithm a) { return a != Algorithm::Ama; });
        if (needs_depths && depths.empty()) {
            throw ConfigError("baselines need at least one depth", "bench.depths");
        }
        if (!(er_edge_prob >= 0.0 && er_edge_prob <= 1.0)) {
            throw ConfigError("must lie in [0, 1]", "bench.er_edge_prob");
        }
        if (!(runtime_constant >= 0.0) || !std::isfinite(runtime_constant)) {
            throw ConfigError("must be a nonnegative number", "bench.runtime_constant");
        }
        if (jobs < 1) {
            throw ConfigError("must be at least 1", "bench.jobs");
        }
        if (oar_runs_per_depth < 1) {
            throw ConfigError("must be at least 1", "oar.runs_per_depth");
        }
        if (oar_ama_runs_per_vertex < 1) {
            throw ConfigError("must be at least 1", "oar.ama_runs_per_vertex");
        }
        if (oar_max_depth && *oar_max_depth < 1) {
            throw ConfigError("must be at least 1", "oar.max_depth");
        }
    }
};

// ---------------------------------------------------------------------------
// Metrics primitives

/// F / F_min clamped to [0, 1]. F_min must be negative (any graph with a
/// vertex has alpha >= 1).
inline double approximation_ratio(double f, double f_min) {
    if (!(f_min < 0.0)) {
        throw InputError("degenerate instance: ground energy must be negative");
    }
    return std::clamp(f / f_min, 0.0, 1.0);
}

inline double runtime_estimate(double iterations, double runtime_constant = 0.1) {
    return runtime_constant * iterations;
}

/// Pairwise summation in a fixed tree so totals do not depend on scheduling.
inline double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (const double v : values) {
            s += v;
        }
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

inline double mean(std::span<const double> values) {
    return values.empty() ? 0.0
                          : pairwise_sum(values) / static_cast<double>(values.size());
}

// ---------------------------------------------------------------------------
// Instances and single runs

struct GraphInstance {
    std::string id;
    std::uint64_t seed = 0;
    Graph graph;
    std::size_t alpha = 0;
};

/// Graph k of size n uses seed master_seed + k.
inline GraphInstance make_instance(GraphFamily family, std::size_t n,
                                   std::uint64_t seed, double er_edge_prob) {
    GraphInstance inst;
    inst.seed = seed;
    inst.id = graph_id(family_tag(family), n, seed);
    inst.graph = family == GraphFamily::Er ? generate_er(n, er_edge_prob, seed)
                                           : generate_regular(n, 3, seed);
    inst.alpha = brute_force_mis(inst.graph).alpha;
    return inst;
}

inline std::vector<GraphInstance> make_instances(const ExperimentConfig &cfg,
                                                 std::size_t n) {
    std::vector<GraphInstance> out;
    out.reserve(cfg.graphs_per_size);
    for (std::size_t k = 0; k < cfg.graphs_per_size; ++k) {
        out.push_back(make_instance(cfg.family, n, cfg.master_seed + k, cfg.er_edge_prob));
    }
    return out;
}

inline std::uint64_t run_seed(std::uint64_t master_seed, std::string_view graph,
                              Algorithm algo, std::size_t p, std::size_t run_index) {
    return derive_seed(master_seed, graph, algorithm_tag(algo),
                       static_cast<std::uint64_t>(p),
                       static_cast<std::uint64_t>(run_index));
}

struct RunRecord {
    double expectation = 0.0;
    double ar = 0.0;
    std::size_t iterations = 0;
    std::size_t depth = 0;
    std::size_t cnots = 0;
};

struct SolveOutcome {
    RunRecord record;
    Circuit circuit;
    ParameterVector params; // best parameters found
    std::optional<AmaTrace> trace;
};

/// One optimization run of `algo` (depth p ignored for AMA), keeping the
/// trained circuit.
inline SolveOutcome solve_instance(const GraphInstance &inst, Algorithm algo,
                                   std::size_t p, const ExperimentConfig &cfg,
                                   std::uint64_t seed) {
    const Graph &g = inst.graph;
    SolveOutcome out;
    RunRecord &rec = out.record;
    if (algo == Algorithm::Ama) {
        auto ama = run_ama(g, cfg.ama, seed);
        rec.expectation = ama.result.final_expectation;
        rec.iterations = ama.result.iterations;
        out.circuit = std::move(ama.circuit);
        out.params = std::move(ama.result.best_params);
        out.trace = std::move(ama.trace);
    } else {
        const std::uint64_t subset_seed = derive_seed(seed, "subset");
        switch (algo) {
        case Algorithm::QaoaPlus:
            out.circuit = build_qaoa_plus(g, p);
            break;
        case Algorithm::Pu:
            out.circuit = build_pu(g, p, cfg.mixers_for(g.size()), subset_seed);
            break;
        default:
            out.circuit = build_pnu(g, p, cfg.mixers_for(g.size()), subset_seed);
            break;
        }
        const auto init = random_init(out.circuit.param_count(), cfg.optimizer,
                                      derive_seed(seed, "params"));
        auto r = minimize(out.circuit, g, init, cfg.optimizer);
        rec.expectation = r.final_expectation;
        rec.iterations = r.iterations;
        out.params = std::move(r.best_params);
    }
    rec.ar = approximation_ratio(rec.expectation, -static_cast<double>(inst.alpha));
    rec.depth = circuit_depth(out.circuit, cfg.resources);
    rec.cnots = cnot_count(out.circuit, g, cfg.resources);
    return out;
}

inline RunRecord single_run(const GraphInstance &inst, Algorithm algo,
                            std::size_t p, const ExperimentConfig &cfg,
                            std::uint64_t seed) {
    return solve_instance(inst, algo, p, cfg, seed).record;
}

/// Runs fn(0..count-1) on up to `jobs` threads. Callers write results into
/// preallocated slots, so scheduling order never affects output.
inline void parallel_for(std::size_t count, std::size_t jobs,
                         const std::function<void(std::size_t)> &fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> workers;
        const std::size_t threads = std::min(jobs, count);
        for (std::size_t t = 0; t < threads; ++t) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        const std::lock_guard lock(error_mutex);
                        if (!error) {
                            error = std::current_exception();
                        }
                        next = count;
                    }
                }
            });
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

// ---------------------------------------------------------------------------
// Campaign

struct GraphMetrics {
    std::string graph_id;
    std::size_t n = 0;
    std::size_t alpha = 0;
    Algorithm algo = Algorithm::Ama;
    std::optional<std::size_t> p;
    double oar = 0.0;
    double aar = 0.0;
    double total_itrs = 0.0;
    double total_cds = 0.0;
    double total_cnots = 0.0;
    std::vector<RunRecord> runs;
};

struct MetricsRow {
    Algorithm algo = Algorithm::Ama;
    std::optional<std::size_t> p; // absent for AMA
    std::size_t n = 0;
    double oar = 0.0;
    double aar = 0.0;
    double total_itrs = 0.0;
    double total_cds = 0.0;
    double total_cnots = 0.0;
    double total_runtime = 0.0;
};

struct CampaignResult {
    std::vector<GraphMetrics> per_graph; // sorted by algo, p, n, graph order
    std::vector<MetricsRow> rows;        // sorted by algo, p, n
};

inline GraphMetrics summarize_runs(const GraphInstance &inst, Algorithm algo,
                                   std::optional<std::size_t> p,
                                   std::vector<RunRecord> runs) {
    GraphMetrics gm;
    gm.graph_id = inst.id;
    gm.n = inst.graph.size();
    gm.alpha = inst.alpha;
    gm.algo = algo;
    gm.p = p;
    std::vector<double> ars;
    ars.reserve(runs.size());
    std::size_t itrs = 0;
    std::size_t cds = 0;
    std::size_t cnots = 0;
    for (const auto &r : runs) {
        ars.push_back(r.ar);
        gm.oar = std::max(gm.oar, r.ar);
        itrs += r.iterations;
        cds += r.depth;
        cnots += r.cnots;
    }
    gm.aar = mean(ars);
    gm.total_itrs = static_cast<double>(itrs);
    gm.total_cds = static_cast<double>(cds);
    gm.total_cnots = static_cast<double>(cnots);
    gm.runs = std::move(runs);
    return gm;
}

inline MetricsRow average_rows(std::span<const GraphMetrics> graphs,
                               double runtime_constant) {
    MetricsRow row;
    row.algo = graphs.front().algo;
    row.p = graphs.front().p;
    row.n = graphs.front().n;
    auto column = [&](auto field) {
        std::vector<double> v;
        v.reserve(graphs.size());
        for (const auto &g : graphs) {
            v.push_back(g.*field);
        }
        return mean(v);
    };
    row.oar = column(&GraphMetrics::oar);
    row.aar = column(&GraphMetrics::aar);
    row.total_itrs = column(&GraphMetrics::total_itrs);
    row.total_cds = column(&GraphMetrics::total_cds);
    row.total_cnots = column(&GraphMetrics::total_cnots);
    row.total_runtime = runtime_estimate(row.total_itrs, runtime_constant);
    return row;
}

/// Every (size, graph, algorithm, depth, run) cell of the campaign. Rows
/// average the per-graph OAR/AAR/totals over the graphs of each size.
inline CampaignResult run_campaign_detailed(const ExperimentConfig &cfg) {
    cfg.validate();

    std::vector<Algorithm> algos = cfg.algorithms;
    std::sort(algos.begin(), algos.end());
    algos.erase(std::unique(algos.begin(), algos.end()), algos.end());
    std::vector<std::size_t> depths = cfg.depths;
    std::sort(depths.begin(), depths.end());
    depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
    std::vector<std::size_t> sizes = cfg.sizes;
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

    std::map<std::size_t, std::vector<GraphInstance>> instances;
    for (const auto n : sizes) {
        instances[n] = make_instances(cfg, n);
    }

    struct Setting {
        Algorithm algo;
        std::optional<std::size_t> p;
        std::size_t n;
    };
    std::vector<Setting> settings;
    for (const auto a : algos) {
        if (a == Algorithm::Ama) {
            for (const auto n : sizes) {
                settings.push_back({a, std::nullopt, n});
            }
            continue;
        }
        for (const auto p : depths) {
            for (const auto n : sizes) {
                settings.push_back({a, p, n});
            }
        }
    }

    struct Task {
        std::size_t setting;
        std::size_t graph;
        std::size_t run;
    };
    std::vector<Task> tasks;
    for (std::size_t s = 0; s < settings.size(); ++s) {
        for (std::size_t gi = 0; gi < cfg.graphs_per_size; ++gi) {
            for (std::size_t r = 0; r < cfg.runs_per_setting; ++r) {
                tasks.push_back({s, gi, r});
            }
        }
    }
    std::vector<RunRecord> records(tasks.size());
    parallel_for(tasks.size(), cfg.jobs, [&](std::size_t i) {
        const auto &t = tasks[i];
        const auto &st = settings[t.setting];
        const auto &inst = instances.at(st.n)[t.graph];
        const std::size_t p = st.p.value_or(0);
        records[i] = single_run(inst, st.algo, p, cfg,
                                run_seed(cfg.master_seed, inst.id, st.algo, p, t.run));
    });

    CampaignResult out;
    std::size_t cursor = 0;
    for (const auto &st : settings) {
        const auto &graphs = instances.at(st.n);
        const std::size_t first = out.per_graph.size();
        for (const auto &inst : graphs) {
            std::vector<RunRecord> runs(
                records.begin() + static_cast<std::ptrdiff_t>(cursor),
                records.begin() + static_cast<std::ptrdiff_t>(cursor + cfg.runs_per_setting));
            cursor += cfg.runs_per_setting;
            out.per_graph.push_back(summarize_runs(inst, st.algo, st.p, std::move(runs)));
        }
        out.rows.push_back(average_rows(
            std::span<const GraphMetrics>(out.per_graph).subspan(first, graphs.size()),
            cfg.runtime_constant));
    }
    return out;
}

inline std::vector<MetricsRow> run_campaign(const ExperimentConfig &cfg) {
    return run_campaign_detailed(cfg).rows;
}

// ---------------------------------------------------------------------------
// Resources needed to reach a target OAR

struct ExpectedCost {
    double t_avg = 0.0;
    double itrs = 0.0;
    double runtime = 0.0;
    double depth = 0.0;
    double cnots = 0.0;
};

/// T_avg = runs / successes; each expected total is T_avg times the per-run
/// mean at that depth.
inline ExpectedCost expected_cost(std::size_t successes,
                                  std::span<const RunRecord> runs,
                                  double runtime_constant) {
    if (successes == 0 || runs.empty()) {
        throw InputError("expected cost undefined without successful runs");
    }
    if (successes > runs.size()) {
        throw InputError("more successes than runs");
    }
    std::vector<double> itrs;
    std::vector<double> depth;
    std::vector<double> cnots;
    for (const auto &r : runs) {
        itrs.push_back(static_cast<double>(r.iterations));
        depth.push_back(static_cast<double>(r.depth));
        cnots.push_back(static_cast<double>(r.cnots));
    }
    ExpectedCost c;
    c.t_avg = static_cast<double>(runs.size()) / static_cast<double>(successes);
    c.itrs = c.t_avg * mean(itrs);
    c.runtime = runtime_estimate(c.itrs, runtime_constant);
    c.depth = c.t_avg * mean(depth);
    c.cnots = c.t_avg * mean(cnots);
    return c;
}

struct OarCostRow {
    Algorithm algo = Algorithm::Ama;
    std::size_t n = 0;
    double target_oar = 0.0;
    std::optional<double> min_depth; // mean over reached graphs; absent for AMA
    double t_avg = 0.0;
    double itrs = 0.0;
    double runtime = 0.0;
    double depth = 0.0;
    double cnots = 0.0;
    std::size_t graphs_reached = 0;
    std::size_t graphs_total = 0;
    /// Some graph never reached the target; averages cover reached graphs.
    bool unreached = false;
};

/// Per-graph outcome of the reach-OAR protocol.
struct OarCostGraph {
    std::string graph_id;
    Algorithm algo = Algorithm::Ama;
    std::optional<std::size_t> min_depth;
    std::size_t successes = 0;
    std::size_t runs = 0;
    std::optional<ExpectedCost> cost; // empty when the target was never reached
};

inline std::size_t count_successes(std::span<const RunRecord> runs, double target) {
    return static_cast<std::size_t>(std::count_if(
        runs.begin(), runs.end(), [&](const RunRecord &r) { return r.ar >= target; }));
}

inline std::vector<RunRecord> run_batch(const GraphInstance &inst, Algorithm algo,
                                        std::size_t p, std::size_t count,
                                        const ExperimentConfig &cfg) {
    std::vector<RunRecord> runs(count);
    parallel_for(count, cfg.jobs, [&](std::size_t r) {
        runs[r] = single_run(inst, algo, p, cfg,
                             run_seed(cfg.master_seed, inst.id, algo, p, r));
    });
    return runs;
}

inline OarCostGraph oar_cost_for_graph(const GraphInstance &inst, Algorithm algo,
                                       double target_oar,
                                       const ExperimentConfig &cfg) {
    OarCostGraph out;
    out.graph_id = inst.id;
    out.algo = algo;
    const std::size_t n = inst.graph.size();
    if (algo == Algorithm::Ama) {
        const auto runs = run_batch(inst, algo, 0, cfg.oar_ama_runs_per_vertex * n, cfg);
        out.runs = runs.size();
        out.successes = count_successes(runs, target_oar);
        if (out.successes > 0) {
            out.cost = expected_cost(out.successes, runs, cfg.runtime_constant);
        }
        return out;
    }
    const std::size_t max_depth = cfg.oar_max_depth.value_or(n);
    for (std::size_t p = 1; p <= max_depth; ++p) {
        const auto runs = run_batch(inst, algo, p, cfg.oar_runs_per_depth * p, cfg);
        const std::size_t s = count_successes(runs, target_oar);
        if (s > 0) {
            out.min_depth = p;
            out.runs = runs.size();
            out.successes = s;
            out.cost = expected_cost(s, runs, cfg.runtime_constant);
            return out;
        }
    }
    return out;
}

inline std::vector<OarCostRow> oar_cost_protocol(const ExperimentConfig &cfg,
                                                 double target_oar) {
    cfg.validate();
    if (!(target_oar > 0.0 && target_oar <= 1.0)) {
        throw ConfigError("must lie in (0, 1]", "oar.target");
    }
    std::vector<Algorithm> algos = cfg.oar_algorithms;
    std::sort(algos.begin(), algos.end());
    algos.erase(std::unique(algos.begin(), algos.end()), algos.end());
    std::vector<std::size_t> sizes = cfg.sizes;
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

    std::vector<OarCostRow> rows;
    for (const auto algo : algos) {
        for (const auto n : sizes) {
            const auto instances = make_instances(cfg, n);
            OarCostRow row;
            row.algo = algo;
            row.n = n;
            row.target_oar = target_oar;
            row.graphs_total = instances.size();
            std::vector<double> t, itrs, runtime, depth, cnots, min_depth;
            for (const auto &inst : instances) {
                const auto gc = oar_cost_for_graph(inst, algo, target_oar, cfg);
                if (!gc.cost) {
                    continue;
                }
                ++row.graphs_reached;
                t.push_back(gc.cost->t_avg);
                itrs.push_back(gc.cost->itrs);
                runtime.push_back(gc.cost->runtime);
                depth.push_back(gc.cost->depth);
                cnots.push_back(gc.cost->cnots);
                if (gc.min_depth) {
                    min_depth.push_back(static_cast<double>(*gc.min_depth));
                }
            }
            row.unreached = row.graphs_reached < row.graphs_total;
            row.t_avg = mean(t);
            row.itrs = mean(itrs);
            row.runtime = mean(runtime);
            row.depth = mean(depth);
            row.cnots = mean(cnots);
            if (algo != Algorithm::Ama && !min_depth.empty()) {
                row.min_depth = mean(min_depth);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

} // namespace admix
