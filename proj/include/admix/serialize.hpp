#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ama.hpp"
#include "bench.hpp"
#include "errors.hpp"

namespace admix {

/// Table precision for every reported float.
inline constexpr int kReportDecimals = 4;

inline std::string format_fixed(double value, int decimals = kReportDecimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    std::string out(buf);
    if (out.starts_with("-") && out.find_first_not_of("-0.") == std::string::npos) {
        out.erase(0, 1); // no "-0.0000"
    }
    return out;
}

inline double round_report(double value) {
    return std::round(value * 1e4) / 1e4;
}

inline constexpr const char *kMetricsCsvHeader =
    "algo,p,n,oar,aar,total_itrs,total_cds,total_cnots,total_runtime";

inline void write_metrics_csv(std::ostream &out, const std::vector<MetricsRow> &rows) {
    out << kMetricsCsvHeader << '\n';
    for (const auto &r : rows) {
        out << algorithm_tag(r.algo) << ',' << (r.p ? std::to_string(*r.p) : "")
            << ',' << r.n << ',' << format_fixed(r.oar) << ',' << format_fixed(r.aar)
            << ',' << format_fixed(r.total_itrs) << ',' << format_fixed(r.total_cds)
            << ',' << format_fixed(r.total_cnots) << ','
            << format_fixed(r.total_runtime) << '\n';
    }
}

inline nlohmann::json metrics_to_json(const std::vector<MetricsRow> &rows) {
    auto arr = nlohmann::json::array();
    for (const auto &r : rows) {
        nlohmann::json j;
        j["algo"] = algorithm_tag(r.algo);
        j["p"] = r.p ? nlohmann::json(*r.p) : nlohmann::json(nullptr);
        j["n"] = r.n;
        j["oar"] = round_report(r.oar);
        j["aar"] = round_report(r.aar);
        j["total_itrs"] = round_report(r.total_itrs);
        j["total_cds"] = round_report(r.total_cds);
        j["total_cnots"] = round_report(r.total_cnots);
        j["total_runtime"] = round_report(r.total_runtime);
        arr.push_back(std::move(j));
    }
    return arr;
}

inline std::vector<MetricsRow> metrics_from_json(const nlohmann::json &arr) {
    std::vector<MetricsRow> rows;
    try {
        for (const auto &j : arr) {
            MetricsRow r;
            r.algo = parse_algorithm(j.at("algo").get<std::string>());
            if (!j.at("p").is_null()) {
                r.p = j.at("p").get<std::size_t>();
            }
            r.n = j.at("n").get<std::size_t>();
            r.oar = j.at("oar").get<double>();
            r.aar = j.at("aar").get<double>();
            r.total_itrs = j.at("total_itrs").get<double>();
            r.total_cds = j.at("total_cds").get<double>();
            r.total_cnots = j.at("total_cnots").get<double>();
            r.total_runtime = j.at("total_runtime").get<double>();
            rows.push_back(r);
        }
    } catch (const nlohmann::json::exception &e) {
        throw InputError(std::string("malformed results JSON: ") + e.what());
    }
    return rows;
}

enum class ResultFormat { Csv, Json };

inline std::ofstream open_for_write(const std::filesystem::path &path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory " + path.parent_path().string() +
                          ": " + ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    return out;
}

inline void check_written(std::ostream &out, const std::filesystem::path &path) {
    out.flush();
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

inline void serialize_results(const std::vector<MetricsRow> &rows,
                              ResultFormat format,
                              const std::filesystem::path &path) {
    auto out = open_for_write(path);
    if (format == ResultFormat::Csv) {
        write_metrics_csv(out, rows);
    } else {
        out << metrics_to_json(rows).dump(2) << '\n';
    }
    check_written(out, path);
}

inline std::string read_text_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<MetricsRow> load_results_json(const std::filesystem::path &path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error &e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return metrics_from_json(j);
}

// ---------------------------------------------------------------------------
// Reach-OAR rows

inline constexpr const char *kOarCostCsvHeader =
    "algo,n,target_oar,min_depth,t_avg,itrs,runtime,depth,cnots,graphs_reached,"
    "graphs_total,unreached";

inline void write_oar_cost_csv(std::ostream &out, const std::vector<OarCostRow> &rows) {
    out << kOarCostCsvHeader << '\n';
    for (const auto &r : rows) {
        out << algorithm_tag(r.algo) << ',' << r.n << ',' << format_fixed(r.target_oar)
            << ',' << (r.min_depth ? format_fixed(*r.min_depth) : "") << ','
            << format_fixed(r.t_avg) << ',' << format_fixed(r.itrs) << ','
            << format_fixed(r.runtime) << ',' << format_fixed(r.depth) << ','
            << format_fixed(r.cnots) << ',' << r.graphs_reached << ','
            << r.graphs_total << ',' << (r.unreached ? "true" : "false") << '\n';
    }
}

// ---------------------------------------------------------------------------
// Plot data: long-format "series,x,y" files.

struct PlotPoint {
    std::string series;
    double x = 0.0;
    double y = 0.0;
};

using PlotData = std::map<std::string, std::vector<PlotPoint>>; // file stem -> points

inline std::string series_name(Algorithm algo, std::optional<std::size_t> p) {
    std::string s(algorithm_tag(algo));
    if (p) {
        s += "-p" + std::to_string(*p);
    }
    return s;
}

/// Bar data: each metric against n, one series per (algorithm, depth).
inline PlotData metrics_plot_data(const std::vector<MetricsRow> &rows) {
    PlotData data;
    for (const auto &r : rows) {
        const auto s = series_name(r.algo, r.p);
        const auto x = static_cast<double>(r.n);
        data["oar"].push_back({s, x, r.oar});
        data["aar"].push_back({s, x, r.aar});
        data["itrs"].push_back({s, x, r.total_itrs});
        data["cds"].push_back({s, x, r.total_cds});
        data["cnots"].push_back({s, x, r.total_cnots});
        data["runtime"].push_back({s, x, r.total_runtime});
    }
    return data;
}

/// Curves: expected resource against target OAR, one file per (n, resource).
inline PlotData oar_cost_plot_data(const std::vector<OarCostRow> &rows) {
    PlotData data;
    for (const auto &r : rows) {
        if (r.graphs_reached == 0) {
            continue;
        }
        const std::string s(algorithm_tag(r.algo));
        const std::string n = "n" + std::to_string(r.n);
        data["oarcost-" + n + "-itrs"].push_back({s, r.target_oar, r.itrs});
        data["oarcost-" + n + "-runtime"].push_back({s, r.target_oar, r.runtime});
        data["oarcost-" + n + "-depth"].push_back({s, r.target_oar, r.depth});
        data["oarcost-" + n + "-cnots"].push_back({s, r.target_oar, r.cnots});
    }
    return data;
}

inline void write_plot_data(const PlotData &data, const std::filesystem::path &dir) {
    for (const auto &[stem, points] : data) {
        const auto path = dir / (stem + ".csv");
        auto out = open_for_write(path);
        out << "series,x,y\n";
        for (const auto &pt : points) {
            out << pt.series << ',' << format_fixed(pt.x) << ',' << format_fixed(pt.y)
                << '\n';
        }
        check_written(out, path);
    }
}

// ---------------------------------------------------------------------------
// Adaptive run trace

/// One JSON record per selection: step, round, vertex, f_fun, f_gra, score.
inline void write_trace_log(std::ostream &out, const AmaTrace &trace) {
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
        for (const auto &round : trace.steps[k].rounds) {
            nlohmann::json j;
            j["step"] = k;
            j["round"] = round.round;
            j["vertex"] = round.chosen.vertex;
            j["f_fun"] = round.chosen.f_fun;
            j["f_gra"] = round.chosen.f_gra;
            j["score"] = round.chosen.score;
            out << j.dump() << '\n';
        }
    }
}

inline nlohmann::json trace_to_json(const AmaTrace &trace) {
    nlohmann::json j;
    j["initial_subset"] = trace.initial_subset;
    j["initial_expectation"] = trace.initial_expectation;
    j["initial_iterations"] = trace.initial_iterations;
    auto steps = nlohmann::json::array();
    for (const auto &step : trace.steps) {
        nlohmann::json s;
        s["selected"] = step.selected;
        s["expectation_after"] = step.expectation_after;
        s["iterations"] = step.iterations;
        auto rounds = nlohmann::json::array();
        for (const auto &round : step.rounds) {
            nlohmann::json r;
            r["round"] = round.round;
            r["vertex"] = round.chosen.vertex;
            r["f_fun"] = round.chosen.f_fun;
            r["f_gra"] = round.chosen.f_gra;
            r["score"] = round.chosen.score;
            r["max_f_gra"] = round.max_f_gra;
            rounds.push_back(std::move(r));
        }
        s["rounds"] = std::move(rounds);
        steps.push_back(std::move(s));
    }
    j["steps"] = std::move(steps);
    return j;
}

} // namespace admix
