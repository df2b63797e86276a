#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "graphs.hpp"
#include "random.hpp"
#include "statevector.hpp"

namespace admix {

/// Rotation angles in radians, indexed by Circuit parameter index.
using ParameterVector = std::vector<double>;

/// exp(-i gamma H_C) over all qubits.
struct PhaseLayer {
    std::size_t param_index = 0;

    friend bool operator==(const PhaseLayer &, const PhaseLayer &) = default;
};

/// Sequential mixers on `vertices`, in the stored order, all sharing one beta.
struct MixerLayer {
    std::vector<std::size_t> vertices;
    std::size_t param_index = 0;

    friend bool operator==(const MixerLayer &, const MixerLayer &) = default;
};

using Layer = std::variant<PhaseLayer, MixerLayer>;

/// Layered ansatz shared by QAOA+, PU, PNU and the adaptive builder. Each
/// layer owns exactly one parameter; parameter indices follow layer order.
class Circuit {
  public:
    Circuit() = default;
    explicit Circuit(std::size_t n_qubits) : n_qubits_(n_qubits) {}

    [[nodiscard]] std::size_t num_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t param_count() const noexcept { return layers_.size(); }
    [[nodiscard]] const std::vector<Layer> &layers() const noexcept { return layers_; }

    void add_phase_layer() { layers_.emplace_back(PhaseLayer{layers_.size()}); }

    void add_mixer_layer(std::vector<std::size_t> vertices) {
        if (vertices.empty()) {
            throw InputError("empty mixer layer");
        }
        std::uint64_t seen = 0;
        for (const auto v : vertices) {
            if (v >= n_qubits_) {
                throw InputError("mixer vertex " + std::to_string(v) +
                                 " out of range for " +
                                 std::to_string(n_qubits_) + " qubits");
            }
            if (((seen >> v) & 1U) != 0) {
                throw InputError("duplicate vertex " + std::to_string(v) +
                                 " in mixer layer");
            }
            seen |= std::uint64_t{1} << v;
        }
        layers_.emplace_back(MixerLayer{std::move(vertices), layers_.size()});
    }

    [[nodiscard]] std::size_t mixer_layer_count() const noexcept {
        std::size_t count = 0;
        for (const auto &layer : layers_) {
            count += std::holds_alternative<MixerLayer>(layer) ? 1 : 0;
        }
        return count;
    }

    /// Total number of single-vertex mixers across all layers.
    [[nodiscard]] std::size_t mixer_count() const noexcept {
        std::size_t count = 0;
        for (const auto &layer : layers_) {
            if (const auto *m = std::get_if<MixerLayer>(&layer)) {
                count += m->vertices.size();
            }
        }
        return count;
    }

    friend bool operator==(const Circuit &, const Circuit &) = default;

  private:
    std::size_t n_qubits_ = 0;
    std::vector<Layer> layers_;
};

/// Calibrated cost model for the multi-controlled mixers.
struct ResourceModel {
    std::size_t depth_per_mixer = 3;
    std::size_t phase_layer_depth = 1;
    /// Explicit CNOT counts keyed by control count (vertex degree). Degrees
    /// not listed fall back to 8k - 6 (k >= 1) and 0 for k = 0.
    std::map<std::size_t, std::size_t> cnot_overrides;

    [[nodiscard]] std::size_t cnot_cost(std::size_t degree) const {
        if (const auto it = cnot_overrides.find(degree);
            it != cnot_overrides.end()) {
            return it->second;
        }
        return degree == 0 ? 0 : 8 * degree - 6;
    }

    void validate() const {
        if (const auto it = cnot_overrides.find(0);
            it != cnot_overrides.end() && it->second != 0) {
            throw ConfigError("CNOT cost of an uncontrolled mixer must be 0",
                              "resources.cnot_cost.0");
        }
    }
};

// ---------------------------------------------------------------------------
// Builders

inline Circuit build_qaoa_plus(const Graph &g, std::size_t p) {
    if (p < 1) {
        throw InputError("layer depth p must be at least 1");
    }
    std::vector<std::size_t> all(g.size());
    for (std::size_t v = 0; v < all.size(); ++v) {
        all[v] = v;
    }
    Circuit c(g.size());
    for (std::size_t layer = 0; layer < p; ++layer) {
        c.add_phase_layer();
        c.add_mixer_layer(all);
    }
    return c;
}

namespace detail {
inline void check_partial_args(const Graph &g, std::size_t p, std::size_t n_pm) {
    if (p < 1) {
        throw InputError("layer depth p must be at least 1");
    }
    if (n_pm < 1 || n_pm > g.size()) {
        throw InputError("mixers per layer " + std::to_string(n_pm) +
                         " outside 1.." + std::to_string(g.size()));
    }
}
} // namespace detail

/// Partial-uniform: one random n_pm-subset reused by every mixer layer.
inline Circuit build_pu(const Graph &g, std::size_t p, std::size_t n_pm,
                        std::uint64_t seed) {
    detail::check_partial_args(g, p, n_pm);
    Rng rng(seed);
    const auto subset = sample_subset(rng, g.size(), n_pm);
    Circuit c(g.size());
    for (std::size_t layer = 0; layer < p; ++layer) {
        c.add_phase_layer();
        c.add_mixer_layer(subset);
    }
    return c;
}

/// Partial-non-uniform: an independent n_pm-subset per mixer layer.
inline Circuit build_pnu(const Graph &g, std::size_t p, std::size_t n_pm,
                         std::uint64_t seed) {
    detail::check_partial_args(g, p, n_pm);
    Rng rng(seed);
    Circuit c(g.size());
    for (std::size_t layer = 0; layer < p; ++layer) {
        c.add_phase_layer();
        c.add_mixer_layer(sample_subset(rng, g.size(), n_pm));
    }
    return c;
}

inline Circuit append_mixer_layer(Circuit c, std::vector<std::size_t> vertices) {
    c.add_mixer_layer(std::move(vertices));
    return c;
}

/// Default mixers per layer for the partial baselines: floor(n/2) + 1.
constexpr std::size_t default_partial_mixers(std::size_t n) noexcept {
    return n / 2 + 1;
}

// ---------------------------------------------------------------------------
// Evaluation

struct Evaluation {
    StateVector state;
    double expectation = 0.0;
};

inline void check_parameters(const Circuit &c, std::span<const double> theta) {
    if (theta.size() != c.param_count()) {
        throw InputError("parameter vector has " + std::to_string(theta.size()) +
                         " entries; circuit expects " +
                         std::to_string(c.param_count()));
    }
    for (const auto t : theta) {
        if (!std::isfinite(t)) {
            throw InputError("non-finite circuit parameter");
        }
    }
}

/// Applies one mixer layer with angle `beta` to `s`; controls are N(v).
inline void apply_mixer_layer(StateVector &s, const Graph &g,
                              std::span<const std::size_t> vertices, double beta,
                              MixerPhase phase = MixerPhase::ControlledRx) {
    if (s.num_qubits() != g.size()) {
        throw InputError("state and graph sizes differ");
    }
    for (const auto v : vertices) {
        detail::apply_open_controlled_rx(s.amplitudes(), s.num_qubits(), v,
                                         g.neighbor_mask(v), beta, phase);
    }
}

/// Runs layers [first, last) of `c` on `s` in place.
inline void apply_layers(StateVector &s, const Circuit &c,
                         std::span<const double> theta, const Graph &g,
                         std::size_t first, std::size_t last,
                         MixerPhase phase = MixerPhase::ControlledRx) {
    const auto &layers = c.layers();
    for (std::size_t i = first; i < last; ++i) {
        if (const auto *ph = std::get_if<PhaseLayer>(&layers[i])) {
            apply_phase_layer(s, theta[ph->param_index]);
        } else {
            const auto &mx = std::get<MixerLayer>(layers[i]);
            apply_mixer_layer(s, g, mx.vertices, theta[mx.param_index], phase);
        }
    }
}

inline Evaluation evaluate(const Circuit &c, std::span<const double> theta,
                           const Graph &g,
                           MixerPhase phase = MixerPhase::ControlledRx) {
    if (c.num_qubits() != g.size()) {
        throw InputError("circuit and graph sizes differ");
    }
    check_parameters(c, theta);
    auto s = init_zero_state(g.size());
    apply_layers(s, c, theta, g, 0, c.layers().size(), phase);
    const double f = expectation_hc(s);
    return {std::move(s), f};
}

inline double expectation(const Circuit &c, std::span<const double> theta,
                          const Graph &g,
                          MixerPhase phase = MixerPhase::ControlledRx) {
    return evaluate(c, theta, g, phase).expectation;
}

inline constexpr double kDefaultFdStep = 1e-4;

/// Central finite differences of the expectation w.r.t. theta[indices[k]].
inline std::vector<double> gradient(const Circuit &c,
                                    std::span<const double> theta,
                                    const Graph &g,
                                    std::span<const std::size_t> indices,
                                    double h = kDefaultFdStep,
                                    MixerPhase phase = MixerPhase::ControlledRx) {
    check_parameters(c, theta);
    if (!(h > 0.0)) {
        throw InputError("finite-difference step must be positive");
    }
    std::vector<double> shifted(theta.begin(), theta.end());
    std::vector<double> grad;
    grad.reserve(indices.size());
    for (const auto j : indices) {
        if (j >= theta.size()) {
            throw InputError("gradient index " + std::to_string(j) +
                             " out of range");
        }
        const double keep = shifted[j];
        shifted[j] = keep + h;
        const double up = expectation(c, shifted, g, phase);
        shifted[j] = keep - h;
        const double down = expectation(c, shifted, g, phase);
        shifted[j] = keep;
        grad.push_back((up - down) / (2.0 * h));
    }
    return grad;
}

inline std::vector<double> full_gradient(const Circuit &c,
                                         std::span<const double> theta,
                                         const Graph &g,
                                         double h = kDefaultFdStep,
                                         MixerPhase phase = MixerPhase::ControlledRx) {
    std::vector<std::size_t> all(c.param_count());
    for (std::size_t j = 0; j < all.size(); ++j) {
        all[j] = j;
    }
    return gradient(c, theta, g, all, h, phase);
}

// ---------------------------------------------------------------------------
// Resources

inline std::size_t circuit_depth(const Circuit &c, const ResourceModel &model = {}) {
    std::size_t depth = 0;
    for (const auto &layer : c.layers()) {
        if (const auto *m = std::get_if<MixerLayer>(&layer)) {
            depth += model.depth_per_mixer * m->vertices.size();
        } else {
            depth += model.phase_layer_depth;
        }
    }
    return depth;
}

inline std::size_t cnot_count(const Circuit &c, const Graph &g,
                              const ResourceModel &model = {}) {
    std::size_t total = 0;
    for (const auto &layer : c.layers()) {
        if (const auto *m = std::get_if<MixerLayer>(&layer)) {
            for (const auto v : m->vertices) {
                total += model.cnot_cost(g.degree(v));
            }
        }
    }
    return total;
}

/// Debug dump: "P <idx>" or "M <idx> v1,v2,..." per layer.
inline void write_circuit_dump(std::ostream &out, const Circuit &c) {
    for (const auto &layer : c.layers()) {
        if (const auto *ph = std::get_if<PhaseLayer>(&layer)) {
            out << "P " << ph->param_index << '\n';
            continue;
        }
        const auto &mx = std::get<MixerLayer>(layer);
        out << "M " << mx.param_index << ' ';
        for (std::size_t i = 0; i < mx.vertices.size(); ++i) {
            out << (i == 0 ? "" : ",") << mx.vertices[i];
        }
        out << '\n';
    }
}

} // namespace admix
