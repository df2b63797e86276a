#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bench.hpp"
#include "errors.hpp"

namespace admix {

// Plain-text configuration: "[section]" headers followed by "key = value"
// lines, '#' comments. Keys are addressed as "section.key". Values are
// numbers, booleans, bare or quoted strings, or bracketed lists.

using KeyValues = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

inline std::string strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') {
            quoted = !quoted;
        } else if (line[i] == '#' && !quoted) {
            return std::string(line.substr(0, i));
        }
    }
    return std::string(line);
}

inline std::string unquote(std::string s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

} // namespace detail

inline KeyValues parse_config_text(std::string_view text,
                                   std::string_view source = "config") {
    KeyValues kv;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = detail::trim(detail::strip_comment(raw));
        if (line.empty()) {
            continue;
        }
        const std::string where = std::string(source) + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ConfigError("malformed section header '" + line + "'", where);
            }
            section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected 'key = value', got '" + line + "'", where);
        }
        const auto key = detail::trim(std::string_view(line).substr(0, eq));
        if (key.empty()) {
            throw ConfigError("missing key", where);
        }
        const auto full = section.empty() ? key : section + "." + key;
        kv[full] = detail::trim(std::string_view(line).substr(eq + 1));
    }
    return kv;
}

// ---------------------------------------------------------------------------
// Typed value parsing; errors carry the key path.

inline double parse_double(const std::string &key, const std::string &value) {
    const auto v = detail::unquote(value);
    char *end = nullptr;
    const double out = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(out)) {
        throw ConfigError("expected a number, got '" + value + "'", key);
    }
    return out;
}

inline std::uint64_t parse_uint(const std::string &key, const std::string &value) {
    const auto v = detail::unquote(value);
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError("expected a nonnegative integer, got '" + value + "'", key);
    }
    return out;
}

inline bool parse_bool(const std::string &key, const std::string &value) {
    const auto v = detail::unquote(value);
    if (v == "true" || v == "1") {
        return true;
    }
    if (v == "false" || v == "0") {
        return false;
    }
    throw ConfigError("expected true or false, got '" + value + "'", key);
}

inline std::vector<std::string> parse_list(const std::string &key,
                                           const std::string &value) {
    auto v = detail::trim(value);
    if (v.size() >= 2 && v.front() == '[' && v.back() == ']') {
        v = v.substr(1, v.size() - 2);
    } else if (v.empty()) {
        throw ConfigError("expected a list", key);
    }
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        auto t = detail::unquote(item);
        if (!t.empty()) {
            items.push_back(t);
        }
    }
    return items;
}

// ---------------------------------------------------------------------------
// Resolved CLI configuration

struct CliConfig {
    ExperimentConfig experiment;
    std::vector<double> oar_targets{0.9, 0.95, 0.99};
};

namespace detail {

struct KeySpec {
    std::function<void(CliConfig &, const std::string &key, const std::string &value)>
        apply;
    std::function<std::string(const CliConfig &)> show;
};

// Shortest text that parses back to the same double.
inline std::string show_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <class T> std::string show_list(const std::vector<T> &items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        out += (i == 0 ? "" : ", ");
        if constexpr (std::is_same_v<T, std::string>) {
            out += "\"" + items[i] + "\"";
        } else if constexpr (std::is_floating_point_v<T>) {
            out += show_double(items[i]);
        } else {
            out += std::to_string(items[i]);
        }
    }
    return out + "]";
}

inline std::string show_optional(const std::optional<std::size_t> &v) {
    return v ? std::to_string(*v) : "\"auto\"";
}

inline std::optional<std::size_t> parse_optional(const std::string &key,
                                                 const std::string &value) {
    if (unquote(value) == "auto") {
        return std::nullopt;
    }
    return static_cast<std::size_t>(parse_uint(key, value));
}

inline std::vector<std::string> algorithm_names(const std::vector<Algorithm> &algos) {
    std::vector<std::string> out;
    for (const auto a : algos) {
        out.emplace_back(algorithm_tag(a));
    }
    return out;
}

inline std::vector<Algorithm> parse_algorithms(const std::string &key,
                                               const std::string &value) {
    std::vector<Algorithm> out;
    for (const auto &name : parse_list(key, value)) {
        try {
            out.push_back(parse_algorithm(name));
        } catch (const InputError &e) {
            throw ConfigError(e.what(), key);
        }
    }
    return out;
}

inline std::vector<std::size_t> parse_uint_list(const std::string &key,
                                                const std::string &value) {
    std::vector<std::size_t> out;
    for (const auto &item : parse_list(key, value)) {
        out.push_back(static_cast<std::size_t>(parse_uint(key, item)));
    }
    return out;
}

// Shorthand for the key table below.
#define ADMIX_KEY_DOUBLE(name, field)                                              \
    {name,                                                                         \
     {[](CliConfig &c, const std::string &k, const std::string &v) {               \
          c.field = parse_double(k, v);                                            \
      },                                                                           \
      [](const CliConfig &c) { return show_double(c.field); }}}
#define ADMIX_KEY_UINT(name, field)                                                \
    {name,                                                                         \
     {[](CliConfig &c, const std::string &k, const std::string &v) {               \
          c.field = static_cast<decltype(c.field)>(parse_uint(k, v));              \
      },                                                                           \
      [](const CliConfig &c) { return std::to_string(c.field); }}}
#define ADMIX_KEY_OPTIONAL(name, field)                                            \
    {name,                                                                         \
     {[](CliConfig &c, const std::string &k, const std::string &v) {               \
          c.field = parse_optional(k, v);                                          \
      },                                                                           \
      [](const CliConfig &c) { return show_optional(c.field); }}}

inline const std::map<std::string, KeySpec> &key_table() {
    static const std::map<std::string, KeySpec> table = {
        {"bench.family",
         {[](CliConfig &c, const std::string &k, const std::string &v) {
              try {
                  c.experiment.family = parse_family(unquote(v));
              } catch (const InputError &e) {
                  throw ConfigError(e.what(), k);
              }
          },
          [](const CliConfig &c) {
              return "\"" + std::string(family_name(c.experiment.family)) + "\"";
          }}},
        {"bench.sizes",
         {[](CliConfig &c, const std::string &k, const std::string &v) {
              c.experiment.sizes = parse_uint_list(k, v);
          },
          [](const CliConfig &c) { return show_list(c.experiment.sizes); }}},
        ADMIX_KEY_UINT("bench.graphs_per_size", experiment.graphs_per_size),
        {"bench.algorithms",
         {[](CliConfig &c, const std::string &k, const std::string &v) {
              c.experiment.algorithms = parse_algorithms(k, v);
          },
          [](const CliConfig &c) {
              return show_list(algorithm_names(c.experiment.algorithms));
          }}},
        {"bench.depths",
         {[](CliConfig &c, const std::string &k, const std::string &v) {
              c.experiment.depths = parse_uint_list(k, v);
          },
          [](const CliConfig &c) { return show_list(c.experiment.depths); }}},
        ADMIX_KEY_UINT("bench.runs_per_setting", experiment.runs_per_setting),
        ADMIX_KEY_UINT("bench.master_seed", experiment.master_seed),
        ADMIX_KEY_DOUBLE("bench.er_edge_prob", experiment.er_edge_prob),
        ADMIX_KEY_OPTIONAL("bench.mixers_per_layer", experiment.mixers_per_layer),
        ADMIX_KEY_DOUBLE("bench.runtime_constant", experiment.runtime_constant),
        ADMIX_KEY_UINT("bench.jobs", experiment.jobs),

        {"optimizer.method",
         {[](CliConfig &c, const std::string &k, const std::string &v) {
              const auto m = unquote(v);
              if (m == "adam") {
                  c.experiment.optimizer.method = OptimizerMethod::Adam;
              } else if (m == "gd" || m == "plain-gradient-descent") {
                  c.experiment.optimizer.method = OptimizerMethod::GradientDescent;
              } else {
                  throw ConfigError("expected adam or gd, got '" + v + "'", k);
              }
          },
          [](const CliConfig &c) {
              return std::string(c.experiment.optimizer.method == OptimizerMethod::Adam
                                     ? "\"adam\""
                                     : "\"gd\"");
          }}},
        ADMIX_KEY_DOUBLE("optimizer.learning_rate", experiment.optimizer.learning_rate),
        ADMIX_KEY_DOUBLE("optimizer.inner_tol", experiment.optimizer.inner_tol),
        ADMIX_KEY_UINT("optimizer.patience", experiment.optimizer.patience),
        ADMIX_KEY_UINT("optimizer.max_iters", experiment.optimizer.max_iters),
        ADMIX_KEY_DOUBLE("optimizer.fd_step", experiment.optimizer.fd_step),
        ADMIX_KEY_DOUBLE("optimizer.init_lo", experiment.optimizer.init_lo),
        ADMIX_KEY_DOUBLE("optimizer.init_hi", experiment.optimizer.init_hi),

        ADMIX_KEY_DOUBLE("ama.f1", experiment.ama.f1),
        ADMIX_KEY_UINT("ama.sample_sets", experiment.ama.sample_sets),
        ADMIX_KEY_OPTIONAL("ama.delta_add", experiment.ama.delta_add),
        ADMIX_KEY_DOUBLE("ama.delta_gra", experiment.ama.delta_gra),
        ADMIX_KEY_OPTIONAL("ama.initial_subset_size", experiment.ama.initial_subset_size),
        ADMIX_KEY_DOUBLE("ama.outer_tol", experiment.ama.outer_tol),
        ADMIX_KEY_OPTIONAL("ama.max_layers", experiment.ama.max_layers),
        {"ama.gradient_target",
         {[](CliConfig &c, const std::string &k, const std::string &v) {
              const auto m = unquote(v);
              if (m == "new_beta") {
                  c.experiment.ama.gradient_target = GradientTarget::NewLayerBeta;
              } else if (m == "full_norm") {
                  c.experiment.ama.gradient_target = GradientTarget::FullParameterVector;
              } else {
                  throw ConfigError("expected new_beta or full_norm, got '" + v + "'", k);
              }
          },
          [](const CliConfig &c) {
              return std::string(c.experiment.ama.gradient_target ==
                                         GradientTarget::NewLayerBeta
                                     ? "\"new_beta\""
                                     : "\"full_norm\"");
          }}},
        {"ama.normalize_scores",
         {[](CliConfig &c, const std::string &k, const std::string &v) {
              c.experiment.ama.normalize_scores = parse_bool(k, v);
          },
          [](const CliConfig &c) {
              return std::string(c.experiment.ama.normalize_scores ? "true" : "false");
          }}},
        {"ama.mixer_phase_exact",
         {[](CliConfig &c, const std::string &k, const std::string &v) {
              c.experiment.ama.mixer_phase = parse_bool(k, v)
                                                 ? MixerPhase::ExactExponential
                                                 : MixerPhase::ControlledRx;
          },
          [](const CliConfig &c) {
              return std::string(c.experiment.ama.mixer_phase ==
                                         MixerPhase::ExactExponential
                                     ? "true"
                                     : "false");
          }}},

        ADMIX_KEY_UINT("resources.depth_per_mixer", experiment.resources.depth_per_mixer),
        ADMIX_KEY_UINT("resources.phase_layer_depth",
                       experiment.resources.phase_layer_depth),

        {"oar.targets",
         {[](CliConfig &c, const std::string &k, const std::string &v) {
              c.oar_targets.clear();
              for (const auto &item : parse_list(k, v)) {
                  c.oar_targets.push_back(parse_double(k, item));
              }
          },
          [](const CliConfig &c) { return show_list(c.oar_targets); }}},
        {"oar.algorithms",
         {[](CliConfig &c, const std::string &k, const std::string &v) {
              c.experiment.oar_algorithms = parse_algorithms(k, v);
          },
          [](const CliConfig &c) {
              return show_list(algorithm_names(c.experiment.oar_algorithms));
          }}},
        ADMIX_KEY_UINT("oar.runs_per_depth", experiment.oar_runs_per_depth),
        ADMIX_KEY_UINT("oar.ama_runs_per_vertex", experiment.oar_ama_runs_per_vertex),
        ADMIX_KEY_OPTIONAL("oar.max_depth", experiment.oar_max_depth),
    };
    return table;
}

#undef ADMIX_KEY_DOUBLE
#undef ADMIX_KEY_UINT
#undef ADMIX_KEY_OPTIONAL

inline constexpr std::string_view kCnotCostPrefix = "resources.cnot_cost.";

} // namespace detail

/// Environment variable consulted for `key`: ADMIX_ + upper-cased key with
/// '.' and '-' mapped to '_' (ama.f1 -> ADMIX_AMA_F1).
inline std::string env_name(std::string_view key) {
    std::string out = "ADMIX_";
    for (const char c : key) {
        out += (c == '.' || c == '-') ? '_'
                                      : static_cast<char>(std::toupper(
                                            static_cast<unsigned char>(c)));
    }
    return out;
}

/// Applies one key; unknown keys are rejected by name.
inline void apply_config_value(CliConfig &cfg, const std::string &key,
                               const std::string &value) {
    if (key.starts_with(detail::kCnotCostPrefix)) {
        const auto degree = key.substr(detail::kCnotCostPrefix.size());
        const auto d = parse_uint(key, degree);
        cfg.experiment.resources.cnot_overrides[static_cast<std::size_t>(d)] =
            static_cast<std::size_t>(parse_uint(key, value));
        return;
    }
    const auto &table = detail::key_table();
    const auto it = table.find(key);
    if (it == table.end()) {
        throw ConfigError("unknown configuration key", key);
    }
    it->second.apply(cfg, key, value);
}

inline std::vector<std::string> known_config_keys() {
    std::vector<std::string> keys;
    for (const auto &[k, spec] : detail::key_table()) {
        keys.push_back(k);
    }
    return keys;
}

/// Merge order: defaults, then file values, then ADMIX_* environment
/// variables, then explicit overrides. The result is validated.
template <class EnvLookup>
CliConfig resolve_config(const KeyValues &file_values, const KeyValues &overrides,
                         EnvLookup &&env) {
    CliConfig cfg;
    for (const auto &[k, v] : file_values) {
        apply_config_value(cfg, k, v);
    }
    for (const auto &k : known_config_keys()) {
        if (const auto value = env(env_name(k))) {
            apply_config_value(cfg, k, *value);
        }
    }
    for (const auto &[k, v] : overrides) {
        apply_config_value(cfg, k, v);
    }
    cfg.experiment.ama.optimizer = cfg.experiment.optimizer;
    cfg.experiment.validate();
    for (const double t : cfg.oar_targets) {
        if (!(t > 0.0 && t <= 1.0)) {
            throw ConfigError("targets must lie in (0, 1]", "oar.targets");
        }
    }
    return cfg;
}

inline std::optional<std::string> process_env(const std::string &name) {
    if (const char *v = std::getenv(name.c_str())) {
        return std::string(v);
    }
    return std::nullopt;
}

/// Resolved configuration in the file format, sections in key order.
inline std::string config_to_text(const CliConfig &cfg) {
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
    for (const auto &[key, spec] : detail::key_table()) {
        const auto dot = key.find('.');
        sections[key.substr(0, dot)].emplace_back(key.substr(dot + 1), spec.show(cfg));
    }
    for (const auto &[degree, count] : cfg.experiment.resources.cnot_overrides) {
        sections["resources"].emplace_back("cnot_cost." + std::to_string(degree),
                                           std::to_string(count));
    }
    std::string out;
    for (const auto &[name, entries] : sections) {
        out += "[" + name + "]\n";
        for (const auto &[k, v] : entries) {
            out += k + " = " + v + "\n";
        }
        out += "\n";
    }
    return out;
}

} // namespace admix
