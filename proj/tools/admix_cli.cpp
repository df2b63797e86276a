// admix command-line driver: graph generation, single solves, campaigns,
// reach-OAR costs, oracle queries and report regeneration.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <admix/admix.hpp>

namespace fs = std::filesystem;
using namespace admix;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kConfig = 2, kRuntime = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GlobalOptions {
    std::string config_file;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    bool print_config = false;
};

CliConfig load_config(const GlobalOptions &opts) {
    KeyValues file_values;
    if (!opts.config_file.empty()) {
        std::string text;
        try {
            text = read_text_file(opts.config_file);
        } catch (const IoError &e) {
            throw ConfigError(e.what(), "--config");
        }
        file_values = parse_config_text(text, opts.config_file);
    }
    KeyValues overrides;
    for (const auto &s : opts.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw UsageError("--set expects key=value, got '" + s + "'");
        }
        overrides[s.substr(0, eq)] = s.substr(eq + 1);
    }
    if (opts.seed) {
        overrides["bench.master_seed"] = std::to_string(*opts.seed);
    }
    if (opts.jobs) {
        overrides["bench.jobs"] = std::to_string(*opts.jobs);
    }
    auto cfg = resolve_config(file_values, overrides, process_env);
    if (opts.print_config) {
        std::cout << config_to_text(cfg);
    }
    return cfg;
}

Graph load_graph(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open graph file " + path);
    }
    return read_edge_list(in);
}

GraphInstance instance_from_file(const std::string &path) {
    GraphInstance inst;
    inst.graph = load_graph(path);
    inst.id = fs::path(path).stem().string();
    inst.alpha = brute_force_mis(inst.graph).alpha;
    return inst;
}

void print_rows(std::ostream &out, const std::vector<MetricsRow> &rows) {
    char line[256];
    std::snprintf(line, sizeof line, "%-10s %3s %3s %8s %8s %12s %12s %12s %12s\n",
                  "algo", "p", "n", "OAR", "AAR", "ITRs", "CDs", "CNOTs", "runtime");
    out << line;
    for (const auto &r : rows) {
        std::snprintf(line, sizeof line, "%-10s %3s %3zu %8s %8s %12s %12s %12s %12s\n",
                      std::string(algorithm_tag(r.algo)).c_str(),
                      r.p ? std::to_string(*r.p).c_str() : "-", r.n,
                      format_fixed(r.oar).c_str(), format_fixed(r.aar).c_str(),
                      format_fixed(r.total_itrs, 1).c_str(),
                      format_fixed(r.total_cds, 1).c_str(),
                      format_fixed(r.total_cnots, 1).c_str(),
                      format_fixed(r.total_runtime, 3).c_str());
        out << line;
    }
}

// ---------------------------------------------------------------------------

struct GenArgs {
    std::string family = "er";
    std::size_t n = 8;
    std::size_t count = 1;
    std::string out_dir = ".";
};

int cmd_gen(const GenArgs &args, const CliConfig &cfg) {
    GraphFamily family;
    try {
        family = parse_family(args.family);
    } catch (const InputError &e) {
        throw UsageError(e.what());
    }
    std::error_code ec;
    fs::create_directories(args.out_dir, ec);
    if (ec) {
        throw IoError("cannot create directory " + args.out_dir + ": " + ec.message());
    }
    const auto &exp = cfg.experiment;
    for (std::size_t k = 0; k < args.count; ++k) {
        const std::uint64_t seed = exp.master_seed + k;
        const Graph g = family == GraphFamily::Er ? generate_er(args.n, exp.er_edge_prob, seed)
                                                  : generate_regular(args.n, 3, seed);
        const auto path =
            fs::path(args.out_dir) / (graph_id(family_tag(family), args.n, seed) + ".graph");
        auto out = open_for_write(path);
        write_edge_list(out, g);
        check_written(out, path);
        std::cout << path.string() << '\n';
    }
    return kOk;
}

struct SolveArgs {
    std::string graph_file;
    std::string algorithm;
    std::optional<std::size_t> p;
    std::string json_path;
    std::string state_dump;
    std::string circuit_dump;
    std::string trace_log;
};

int cmd_solve(const SolveArgs &args, const CliConfig &cfg) {
    Algorithm algo;
    try {
        algo = parse_algorithm(args.algorithm);
    } catch (const InputError &e) {
        throw UsageError(e.what());
    }
    if (algo == Algorithm::Ama && args.p) {
        throw UsageError("p not applicable to ama");
    }
    if (algo != Algorithm::Ama && !args.p) {
        throw UsageError("p is required for " + std::string(algorithm_tag(algo)));
    }
    const auto inst = instance_from_file(args.graph_file);
    const auto &exp = cfg.experiment;
    const std::size_t p = args.p.value_or(0);
    const auto seed = run_seed(exp.master_seed, inst.id, algo, p, 0);
    const auto outcome = solve_instance(inst, algo, p, exp, seed);
    const auto &rec = outcome.record;
    const auto phase =
        algo == Algorithm::Ama ? exp.ama.mixer_phase : MixerPhase::ControlledRx;
    const auto state = evaluate(outcome.circuit, outcome.params, inst.graph, phase).state;
    auto probs = basis_probabilities(state);
    if (probs.size() > 5) {
        probs.resize(5);
    }

    std::cout << "graph: " << inst.id << " (n=" << inst.graph.size()
              << ", m=" << inst.graph.edge_count() << ", alpha=" << inst.alpha << ")\n"
              << "algorithm: " << algorithm_tag(algo);
    if (args.p) {
        std::cout << " p=" << *args.p;
    }
    std::cout << "\nexpectation: " << format_fixed(rec.expectation, 6) << '\n'
              << "approximation ratio: " << format_fixed(rec.ar, 6) << '\n'
              << "iterations: " << rec.iterations << '\n'
              << "depth: " << rec.depth << '\n'
              << "cnots: " << rec.cnots << '\n'
              << "mixer layers: " << outcome.circuit.mixer_layer_count() << '\n'
              << "top basis states:\n";
    for (const auto &bp : probs) {
        std::cout << "  " << bp.state.to_string() << "  " << format_fixed(bp.probability, 6)
                  << (is_independent(inst.graph, bp.state) ? "" : "  (infeasible)") << '\n';
    }
    if (outcome.trace) {
        const auto &tr = *outcome.trace;
        std::cout << "trace:\n  initial subset:";
        for (const auto v : tr.initial_subset) {
            std::cout << ' ' << v;
        }
        std::cout << "  F=" << format_fixed(tr.initial_expectation, 6) << '\n';
        for (std::size_t k = 0; k < tr.steps.size(); ++k) {
            std::cout << "  layer " << k + 2 << ":";
            for (const auto v : tr.steps[k].selected) {
                std::cout << ' ' << v;
            }
            std::cout << "  F=" << format_fixed(tr.steps[k].expectation_after, 6) << '\n';
        }
    }

    if (!args.json_path.empty()) {
        nlohmann::json j;
        j["graph"] = inst.id;
        j["n"] = inst.graph.size();
        j["alpha"] = inst.alpha;
        j["algorithm"] = algorithm_tag(algo);
        j["p"] = args.p ? nlohmann::json(*args.p) : nlohmann::json(nullptr);
        j["seed"] = exp.master_seed;
        j["expectation"] = rec.expectation;
        j["approximation_ratio"] = rec.ar;
        j["iterations"] = rec.iterations;
        j["depth"] = rec.depth;
        j["cnots"] = rec.cnots;
        j["params"] = outcome.params;
        auto top = nlohmann::json::array();
        for (const auto &bp : probs) {
            top.push_back({{"state", bp.state.to_string()}, {"probability", bp.probability}});
        }
        j["top_states"] = std::move(top);
        if (outcome.trace) {
            j["trace"] = trace_to_json(*outcome.trace);
        }
        const fs::path path(args.json_path);
        auto out = open_for_write(path);
        out << j.dump(2) << '\n';
        check_written(out, path);
    }
    if (!args.state_dump.empty()) {
        const fs::path path(args.state_dump);
        auto out = open_for_write(path);
        write_state_dump(out, state);
        check_written(out, path);
    }
    if (!args.circuit_dump.empty()) {
        const fs::path path(args.circuit_dump);
        auto out = open_for_write(path);
        write_circuit_dump(out, outcome.circuit);
        check_written(out, path);
    }
    if (!args.trace_log.empty() && outcome.trace) {
        const fs::path path(args.trace_log);
        auto out = open_for_write(path);
        write_trace_log(out, *outcome.trace);
        check_written(out, path);
    }
    return kOk;
}

void write_per_graph_csv(const fs::path &path, const std::vector<GraphMetrics> &graphs) {
    auto out = open_for_write(path);
    out << "algo,p,n,graph,alpha,oar,aar,total_itrs,total_cds,total_cnots\n";
    for (const auto &g : graphs) {
        out << algorithm_tag(g.algo) << ',' << (g.p ? std::to_string(*g.p) : "") << ','
            << g.n << ',' << g.graph_id << ',' << g.alpha << ',' << format_fixed(g.oar)
            << ',' << format_fixed(g.aar) << ',' << format_fixed(g.total_itrs) << ','
            << format_fixed(g.total_cds) << ',' << format_fixed(g.total_cnots) << '\n';
    }
    check_written(out, path);
}

int cmd_bench(const std::string &out_dir, const CliConfig &cfg) {
    const auto result = run_campaign_detailed(cfg.experiment);
    const fs::path dir(out_dir);
    serialize_results(result.rows, ResultFormat::Csv, dir / "results.csv");
    serialize_results(result.rows, ResultFormat::Json, dir / "results.json");
    write_per_graph_csv(dir / "per_graph.csv", result.per_graph);
    write_plot_data(metrics_plot_data(result.rows), dir / "plotdata");
    {
        const auto path = dir / "config.toml";
        auto out = open_for_write(path);
        out << config_to_text(cfg);
        check_written(out, path);
    }
    print_rows(std::cout, result.rows);
    return kOk;
}

int cmd_oar_cost(const std::string &out_dir, const CliConfig &cfg) {
    std::vector<OarCostRow> rows;
    for (const double target : cfg.oar_targets) {
        auto part = oar_cost_protocol(cfg.experiment, target);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    const fs::path dir(out_dir);
    {
        const auto path = dir / "oar_cost.csv";
        auto out = open_for_write(path);
        write_oar_cost_csv(out, rows);
        check_written(out, path);
    }
    write_plot_data(oar_cost_plot_data(rows), dir / "plotdata");
    write_oar_cost_csv(std::cout, rows);
    return kOk;
}

int cmd_oracle(const std::string &graph_file) {
    const Graph g = load_graph(graph_file);
    const auto oracle = brute_force_mis(g);
    std::cout << "alpha=" << oracle.alpha << '\n' << "optima:";
    for (const auto &x : oracle.optima) {
        std::cout << ' ' << x.to_string();
    }
    std::cout << '\n';

    // The penalty energy with lambda = 2 must be maximized exactly on the
    // maximum independent sets.
    constexpr double kLambda = 2.0;
    const std::uint64_t count = std::uint64_t{1} << g.size();
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::uint64_t> argmax;
    for (std::uint64_t bits = 0; bits < count; ++bits) {
        const double e = penalty_energy(g, Assignment(g.size(), bits), kLambda);
        if (e > best) {
            best = e;
            argmax.assign(1, bits);
        } else if (e == best) {
            argmax.push_back(bits);
        }
    }
    std::vector<std::uint64_t> optima;
    for (const auto &x : oracle.optima) {
        optima.push_back(x.bits());
    }
    std::sort(optima.begin(), optima.end());
    const bool ok = argmax == optima && best == static_cast<double>(oracle.alpha);
    std::cout << "penalty-check: " << (ok ? "ok" : "FAILED") << '\n';
    return ok ? kOk : kRuntime;
}

int cmd_report(const std::string &results, const std::string &out_dir) {
    const auto rows = load_results_json(results);
    print_rows(std::cout, rows);
    if (!out_dir.empty()) {
        const fs::path dir(out_dir);
        serialize_results(rows, ResultFormat::Csv, dir / "results.csv");
        write_plot_data(metrics_plot_data(rows), dir / "plotdata");
    }
    return kOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Adaptive mixer allocation for QAOA+ on maximum independent set"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    app.add_option("--config", global.config_file,
                   "Sectioned key = value file; ADMIX_<SECTION>_<KEY> env vars and "
                   "--set override it");
    app.add_option("--set", global.sets, "Override one key, e.g. --set ama.f1=0.3")
        ->take_all()
        ->allow_extra_args(false);
    app.add_option("--seed", global.seed, "Master seed for all randomness");
    app.add_option("--jobs", global.jobs, "Worker threads for campaigns");
    app.add_flag("--print-config", global.print_config,
                 "Echo the fully resolved configuration");

    GenArgs gen;
    auto *gen_cmd = app.add_subcommand("gen", "Generate seeded random graphs");
    gen_cmd->add_option("--family", gen.family, "er or regular-3")->required();
    gen_cmd->add_option("--n", gen.n, "Vertex count")->required();
    gen_cmd->add_option("--count", gen.count, "Number of graphs");
    gen_cmd->add_option("--out", gen.out_dir, "Output directory");

    SolveArgs solve;
    auto *solve_cmd = app.add_subcommand("solve", "Optimize one circuit on one graph");
    solve_cmd->add_option("graph", solve.graph_file, "Edge-list file")->required();
    solve_cmd->add_option("--algorithm,-a", solve.algorithm, "ama, qaoa_plus, pu or pnu")
        ->required();
    solve_cmd->add_option("--p", solve.p, "Layer count (baselines only)");
    solve_cmd->add_option("--json", solve.json_path, "Write a JSON report");
    solve_cmd->add_option("--state-dump", solve.state_dump,
                          "Write final amplitudes (n <= 10)");
    solve_cmd->add_option("--circuit-dump", solve.circuit_dump, "Write the circuit");
    solve_cmd->add_option("--trace-log", solve.trace_log,
                          "Write AMA selections as JSON lines");

    std::string bench_out = "results";
    auto *bench_cmd = app.add_subcommand("bench", "Run a full campaign");
    bench_cmd->add_option("--out", bench_out, "Output directory");

    std::string oar_out = "oar-cost";
    auto *oar_cmd =
        app.add_subcommand("oar-cost", "Expected resources to reach target OARs");
    oar_cmd->add_option("--out", oar_out, "Output directory");

    std::string oracle_file;
    auto *oracle_cmd = app.add_subcommand("oracle", "Brute-force maximum independent sets");
    oracle_cmd->add_option("graph", oracle_file, "Edge-list file")->required();

    std::string report_in;
    std::string report_out;
    auto *report_cmd = app.add_subcommand("report", "Print a results table");
    report_cmd->add_option("--results", report_in, "results.json from bench")->required();
    report_cmd->add_option("--out", report_out, "Regenerate CSV and plot data here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*oracle_cmd) {
            return cmd_oracle(oracle_file);
        }
        if (*report_cmd) {
            return cmd_report(report_in, report_out);
        }
        const auto cfg = load_config(global);
        if (*gen_cmd) {
            return cmd_gen(gen, cfg);
        }
        if (*solve_cmd) {
            return cmd_solve(solve, cfg);
        }
        if (*bench_cmd) {
            return cmd_bench(bench_out, cfg);
        }
        if (*oar_cmd) {
            return cmd_oar_cost(oar_out, cfg);
        }
    } catch (const UsageError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kUsage;
}
