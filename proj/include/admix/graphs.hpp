#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "random.hpp"

namespace admix {

/// Vertex count limit; assignments are stored as 64-bit masks.
inline constexpr std::size_t kMaxVertices = 64;

/// Exhaustive enumeration guard for the classical oracle.
inline constexpr std::size_t kMaxOracleVertices = 26;

struct Edge {
    std::size_t u;
    std::size_t v;

    friend auto operator<=>(const Edge &, const Edge &) = default;
};

/// Undirected simple graph on vertices 0..n-1. Edges are stored normalized
/// (u < v) and sorted; neighbor lists are sorted ascending. Immutable once
/// constructed.
class Graph {
  public:
    Graph() = default;

    Graph(std::size_t n, std::vector<Edge> edges) : n_(n) {
        if (n > kMaxVertices) {
            throw InputError("graph has " + std::to_string(n) +
                             " vertices; at most " +
                             std::to_string(kMaxVertices) + " supported");
        }
        for (auto &e : edges) {
            if (e.u >= n || e.v >= n) {
                throw InputError("edge (" + std::to_string(e.u) + "," +
                                 std::to_string(e.v) +
                                 ") references a vertex outside 0.." +
                                 std::to_string(n == 0 ? 0 : n - 1));
            }
            if (e.u == e.v) {
                throw InputError("self-loop at vertex " + std::to_string(e.u));
            }
            if (e.u > e.v) {
                std::swap(e.u, e.v);
            }
        }
        std::sort(edges.begin(), edges.end());
        if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
            throw InputError("duplicate edge");
        }
        edges_ = std::move(edges);

        offsets_.assign(n + 1, 0);
        for (const auto &e : edges_) {
            ++offsets_[e.u + 1];
            ++offsets_[e.v + 1];
        }
        for (std::size_t v = 0; v < n; ++v) {
            offsets_[v + 1] += offsets_[v];
        }
        neighbors_.resize(2 * edges_.size());
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        for (const auto &e : edges_) {
            neighbors_[fill[e.u]++] = e.v;
            neighbors_[fill[e.v]++] = e.u;
        }
        masks_.assign(n, 0);
        for (std::size_t v = 0; v < n; ++v) {
            std::sort(neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
                      neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]));
            for (const auto w : neighbors(v)) {
                masks_[v] |= std::uint64_t{1} << w;
            }
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }
    [[nodiscard]] const std::vector<Edge> &edges() const noexcept { return edges_; }

    [[nodiscard]] std::span<const std::size_t> neighbors(std::size_t v) const {
        check_vertex(v);
        return {neighbors_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }

    [[nodiscard]] std::size_t degree(std::size_t v) const {
        check_vertex(v);
        return offsets_[v + 1] - offsets_[v];
    }

    /// Bit w set iff w is adjacent to v.
    [[nodiscard]] std::uint64_t neighbor_mask(std::size_t v) const {
        check_vertex(v);
        return masks_[v];
    }

    [[nodiscard]] bool has_edge(std::size_t u, std::size_t v) const {
        return ((neighbor_mask(u) >> v) & 1U) != 0;
    }

    friend bool operator==(const Graph &a, const Graph &b) {
        return a.n_ == b.n_ && a.edges_ == b.edges_;
    }

  private:
    void check_vertex(std::size_t v) const {
        if (v >= n_) {
            throw InputError("vertex " + std::to_string(v) +
                             " out of range for graph with " +
                             std::to_string(n_) + " vertices");
        }
    }

    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::size_t> neighbors_;
    std::vector<std::uint64_t> masks_;
};

/// Candidate vertex set x_0..x_{n-1}; bit v of `bits()` is x_v. The string
/// form lists x_0 first, so "10100" selects vertices 0 and 2.
class Assignment {
  public:
    Assignment() = default;

    Assignment(std::size_t size, std::uint64_t bits) : size_(size), bits_(bits) {
        if (size > kMaxVertices) {
            throw InputError("assignment longer than " +
                             std::to_string(kMaxVertices) + " bits");
        }
        if (size < kMaxVertices && (bits >> size) != 0) {
            throw InputError("assignment has bits set beyond its length");
        }
    }

    static Assignment from_string(std::string_view text) {
        if (text.size() > kMaxVertices) {
            throw InputError("assignment longer than " +
                             std::to_string(kMaxVertices) + " bits");
        }
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] == '1') {
                bits |= std::uint64_t{1} << i;
            } else if (text[i] != '0') {
                throw InputError("assignment string must contain only 0/1: '" +
                                 std::string(text) + "'");
            }
        }
        return {text.size(), bits};
    }

    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] std::uint64_t bits() const noexcept { return bits_; }
    [[nodiscard]] bool operator[](std::size_t v) const noexcept {
        return ((bits_ >> v) & 1U) != 0;
    }
    [[nodiscard]] std::size_t popcount() const noexcept {
        return static_cast<std::size_t>(std::popcount(bits_));
    }

    [[nodiscard]] std::string to_string() const {
        std::string out(size_, '0');
        for (std::size_t i = 0; i < size_; ++i) {
            if ((*this)[i]) {
                out[i] = '1';
            }
        }
        return out;
    }

    friend auto operator<=>(const Assignment &, const Assignment &) = default;

  private:
    std::size_t size_ = 0;
    std::uint64_t bits_ = 0;
};

struct MisOracleResult {
    std::size_t alpha = 0;
    std::vector<Assignment> optima; // ascending by bit pattern
};

// ---------------------------------------------------------------------------
// Generators

inline Graph generate_er(std::size_t n, double p_edge, std::uint64_t seed) {
    if (n < 1) {
        throw InputError("generate_er: n must be at least 1");
    }
    if (!(p_edge >= 0.0 && p_edge <= 1.0)) {
        throw InputError("generate_er: edge probability must lie in [0, 1]");
    }
    Rng rng(seed);
    std::vector<Edge> edges;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u + 1; v < n; ++v) {
            if (bernoulli(rng, p_edge)) {
                edges.push_back({u, v});
            }
        }
    }
    return {n, std::move(edges)};
}

/// Random d-regular graph by the pairing (configuration) model. A pairing
/// containing a self-loop or repeated edge is discarded whole and redrawn.
inline Graph generate_regular(std::size_t n, std::size_t d, std::uint64_t seed,
                              std::size_t max_attempts = 100000) {
    if ((n * d) % 2 != 0) {
        throw InputError("infeasible degree sequence: n*d must be even (n=" +
                         std::to_string(n) + ", d=" + std::to_string(d) + ")");
    }
    if (d >= n) {
        throw InputError("infeasible degree sequence: degree " +
                         std::to_string(d) + " requires more than " +
                         std::to_string(n) + " vertices");
    }
    Rng rng(seed);
    std::vector<std::size_t> points(n * d);
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            points[i] = i / d;
        }
        shuffle(points, rng);
        std::vector<Edge> edges;
        edges.reserve(points.size() / 2);
        std::vector<std::uint64_t> adj(n, 0);
        bool simple = true;
        for (std::size_t i = 0; i + 1 < points.size(); i += 2) {
            const auto a = points[i];
            const auto b = points[i + 1];
            if (a == b || ((adj[a] >> b) & 1U) != 0) {
                simple = false;
                break;
            }
            adj[a] |= std::uint64_t{1} << b;
            adj[b] |= std::uint64_t{1} << a;
            edges.push_back({a, b});
        }
        if (simple) {
            return {n, std::move(edges)};
        }
    }
    throw InputError("generate_regular: no simple pairing found after " +
                     std::to_string(max_attempts) + " attempts");
}

/// Identifier used in benchmark outputs, e.g. "er-8-42".
inline std::string graph_id(std::string_view family, std::size_t n,
                            std::uint64_t seed) {
    return std::string(family) + "-" + std::to_string(n) + "-" +
           std::to_string(seed);
}

// ---------------------------------------------------------------------------
// Classical objective and oracles

inline void check_length(const Graph &g, const Assignment &x) {
    if (x.size() != g.size()) {
        throw InputError("assignment length " + std::to_string(x.size()) +
                         " does not match graph size " +
                         std::to_string(g.size()));
    }
}

/// Number of edges with both endpoints selected.
inline std::size_t violated_edges(const Graph &g, std::uint64_t bits) {
    std::size_t count = 0;
    for (const auto &e : g.edges()) {
        count += ((bits >> e.u) & (bits >> e.v) & 1U);
    }
    return count;
}

/// Independence test on a raw basis index; no length check.
inline bool is_independent_bits(const Graph &g, std::uint64_t bits) {
    for (std::uint64_t rest = bits; rest != 0; rest &= rest - 1) {
        const auto v = static_cast<std::size_t>(std::countr_zero(rest));
        if ((g.neighbor_mask(v) & bits) != 0) {
            return false;
        }
    }
    return true;
}

inline bool is_independent(const Graph &g, const Assignment &x) {
    check_length(g, x);
    return is_independent_bits(g, x.bits());
}

inline std::size_t classical_objective(const Assignment &x) noexcept {
    return x.popcount();
}

/// Lagrangian form sum_v x_v - lambda * sum_{uv in E} x_u x_v.
inline double penalty_energy(const Graph &g, const Assignment &x,
                             double lambda) {
    if (!(lambda > 1.0)) {
        throw ConfigError("penalty multiplier must exceed 1 to enforce "
                          "independence (got " +
                              std::to_string(lambda) + ")",
                          "lambda");
    }
    check_length(g, x);
    return static_cast<double>(x.popcount()) -
           lambda * static_cast<double>(violated_edges(g, x.bits()));
}

inline MisOracleResult brute_force_mis(const Graph &g) {
    const std::size_t n = g.size();
    if (n > kMaxOracleVertices) {
        throw SizeError("instance too large for oracle: n=" + std::to_string(n) +
                        " exceeds " + std::to_string(kMaxOracleVertices));
    }
    MisOracleResult result;
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t bits = 0; bits < count; ++bits) {
        const auto size = static_cast<std::size_t>(std::popcount(bits));
        if (size < result.alpha || !is_independent_bits(g, bits)) {
            continue;
        }
        if (size > result.alpha) {
            result.alpha = size;
            result.optima.clear();
        }
        result.optima.emplace_back(n, bits);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Edge-list file format: first line "n m", then m lines "u v".

inline void write_edge_list(std::ostream &out, const Graph &g) {
    out << g.size() << ' ' << g.edge_count() << '\n';
    for (const auto &e : g.edges()) {
        out << e.u << ' ' << e.v << '\n';
    }
}

inline std::string to_edge_list(const Graph &g) {
    std::ostringstream out;
    write_edge_list(out, g);
    return out.str();
}

inline Graph read_edge_list(std::istream &in) {
    long long n = -1;
    long long m = -1;
    if (!(in >> n >> m) || n < 0 || m < 0) {
        throw InputError("edge list: expected header 'n m'");
    }
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(m));
    for (long long i = 0; i < m; ++i) {
        long long u = -1;
        long long v = -1;
        if (!(in >> u >> v) || u < 0 || v < 0) {
            throw InputError("edge list: malformed edge line " +
                             std::to_string(i + 2));
        }
        edges.push_back({static_cast<std::size_t>(u), static_cast<std::size_t>(v)});
    }
    return {static_cast<std::size_t>(n), std::move(edges)};
}

} // namespace admix
