#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "graphs.hpp"

namespace admix {

/// Dense storage bound: 2^26 complex doubles is 1 GiB.
inline constexpr std::size_t kMaxQubits = 26;

/// How a mixer treats basis states whose neighbors are not all |0>.
///  - ControlledRx: identity (the plain open-controlled Rx gate).
///  - ExactExponential: phase e^{-i beta}, i.e. exactly exp(-i beta B_v)
///    where B_v acts as identity on that subspace.
enum class MixerPhase { ControlledRx, ExactExponential };

/// 2^n amplitudes; bit v of the basis index is qubit v (little-endian).
template <class Real> class BasicStateVector {
  public:
    using complex_type = std::complex<Real>;

    BasicStateVector() = default;

    BasicStateVector(std::size_t n_qubits, std::vector<complex_type> amplitudes)
        : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
        if (n_qubits > kMaxQubits) {
            throw SizeError("statevector of " + std::to_string(n_qubits) +
                            " qubits exceeds limit " +
                            std::to_string(kMaxQubits));
        }
        if (amps_.size() != (std::size_t{1} << n_qubits)) {
            throw InputError("amplitude count must be 2^n_qubits");
        }
    }

    [[nodiscard]] std::size_t num_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return amps_.size(); }

    [[nodiscard]] std::span<complex_type> amplitudes() noexcept { return amps_; }
    [[nodiscard]] std::span<const complex_type> amplitudes() const noexcept {
        return amps_;
    }

    complex_type &operator[](std::size_t i) noexcept { return amps_[i]; }
    const complex_type &operator[](std::size_t i) const noexcept {
        return amps_[i];
    }

    [[nodiscard]] Real norm_squared() const noexcept {
        Real sum = 0;
        for (const auto &a : amps_) {
            sum += std::norm(a);
        }
        return sum;
    }

  private:
    std::size_t n_qubits_ = 0;
    std::vector<complex_type> amps_;
};

using StateVector = BasicStateVector<double>;

/// Open-controlled Rx(2 beta) on `target`; fires only when every qubit in
/// `open_controls` is |0>.
struct MixerGate {
    std::size_t target = 0;
    std::vector<std::size_t> open_controls; // sorted ascending
    double beta = 0.0;
};

/// Mixer gate for vertex v of g: controls are N(v).
inline MixerGate mixer_for_vertex(const Graph &g, std::size_t v, double beta) {
    const auto nb = g.neighbors(v);
    return {v, {nb.begin(), nb.end()}, beta};
}

template <class Real = double>
BasicStateVector<Real> init_zero_state(std::size_t n) {
    if (n < 1 || n > kMaxQubits) {
        throw SizeError("qubit count " + std::to_string(n) +
                        " outside supported range 1.." +
                        std::to_string(kMaxQubits));
    }
    std::vector<std::complex<Real>> amps(std::size_t{1} << n);
    amps[0] = 1;
    return {n, std::move(amps)};
}

/// Multiplies amplitude x by e^{+i gamma popcount(x)}. Equal to
/// exp(-i gamma H_C) for H_C = -sum_v (I - Z_v)/2, with |0..0> left
/// untouched.
template <class Real>
void apply_phase_layer(BasicStateVector<Real> &s,
                       std::type_identity_t<Real> gamma) {
    const std::size_t n = s.num_qubits();
    std::vector<std::complex<Real>> phase(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        phase[k] = std::polar(Real{1}, gamma * static_cast<Real>(k));
    }
    auto amps = s.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        amps[i] *= phase[static_cast<std::size_t>(std::popcount(i))];
    }
}

namespace detail {
template <class Real>
void apply_open_controlled_rx(std::span<std::complex<Real>> amps,
                              std::size_t n_qubits, std::size_t target,
                              std::uint64_t control_mask, Real beta,
                              MixerPhase phase) {
    const Real c = std::cos(beta);
    const Real sn = std::sin(beta);
    const std::complex<Real> minus_i_sin(0, -sn);
    const std::uint64_t tbit = std::uint64_t{1} << target;
    const std::uint64_t low = tbit - 1;
    const std::size_t half = std::size_t{1} << (n_qubits - 1);
    const bool exact = phase == MixerPhase::ExactExponential;
    const std::complex<Real> blocked_phase = std::polar(Real{1}, -beta);
    for (std::size_t k = 0; k < half; ++k) {
        const std::size_t i0 = ((k & ~low) << 1) | (k & low);
        const std::size_t i1 = i0 | tbit;
        if ((i0 & control_mask) == 0) {
            const auto a0 = amps[i0];
            const auto a1 = amps[i1];
            amps[i0] = c * a0 + minus_i_sin * a1;
            amps[i1] = minus_i_sin * a0 + c * a1;
        } else if (exact) {
            amps[i0] *= blocked_phase;
            amps[i1] *= blocked_phase;
        }
    }
}
} // namespace detail

template <class Real>
void apply_mixer(BasicStateVector<Real> &s, const MixerGate &m,
                 MixerPhase phase = MixerPhase::ControlledRx) {
    const std::size_t n = s.num_qubits();
    if (m.target >= n) {
        throw InputError("mixer target " + std::to_string(m.target) +
                         " out of range for " + std::to_string(n) + " qubits");
    }
    std::uint64_t mask = 0;
    for (const auto c : m.open_controls) {
        if (c >= n) {
            throw InputError("mixer control " + std::to_string(c) +
                             " out of range for " + std::to_string(n) +
                             " qubits");
        }
        if (c == m.target) {
            throw InputError("mixer target " + std::to_string(c) +
                             " also listed as a control");
        }
        mask |= std::uint64_t{1} << c;
    }
    detail::apply_open_controlled_rx(s.amplitudes(), n, m.target, mask,
                                     static_cast<Real>(m.beta), phase);
}

/// <H_C> = -sum_x |a_x|^2 popcount(x), the negated expected set size.
template <class Real> Real expectation_hc(const BasicStateVector<Real> &s) {
    Real sum = 0;
    const auto amps = s.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        sum += std::norm(amps[i]) * static_cast<Real>(std::popcount(i));
    }
    return -sum;
}

template <class Real>
bool support_is_feasible(const BasicStateVector<Real> &s, const Graph &g,
                         std::type_identity_t<Real> tol) {
    if (s.num_qubits() != g.size()) {
        throw InputError("state has " + std::to_string(s.num_qubits()) +
                         " qubits but graph has " + std::to_string(g.size()) +
                         " vertices");
    }
    const auto amps = s.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (std::norm(amps[i]) > tol && !is_independent_bits(g, i)) {
            return false;
        }
    }
    return true;
}

struct BasisProbability {
    Assignment state;
    double probability = 0.0;
};

/// Nonzero basis probabilities (above `min_probability`), most likely first;
/// equal probabilities keep ascending basis order.
template <class Real>
std::vector<BasisProbability>
basis_probabilities(const BasicStateVector<Real> &s,
                    double min_probability = 0.0) {
    std::vector<BasisProbability> out;
    const auto amps = s.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double p = static_cast<double>(std::norm(amps[i]));
        if (p > min_probability) {
            out.push_back({Assignment(s.num_qubits(), i), p});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
        return a.probability > b.probability;
    });
    return out;
}

/// Debug dump, one line per basis state: "bitstring re im" with the
/// bitstring in vertex order (x_0 first).
template <class Real>
void write_state_dump(std::ostream &out, const BasicStateVector<Real> &s) {
    if (s.num_qubits() > 10) {
        throw SizeError("state dump limited to 10 qubits");
    }
    const auto amps = s.amplitudes();
    const auto flags = out.flags();
    const auto precision = out.precision();
    out.precision(17);
    for (std::size_t i = 0; i < amps.size(); ++i) {
        out << Assignment(s.num_qubits(), i).to_string() << ' '
            << amps[i].real() << ' ' << amps[i].imag() << '\n';
    }
    out.flags(flags);
    out.precision(precision);
}

} // namespace admix
