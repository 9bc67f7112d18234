// measurement.hpp — Pauli and Hamiltonian expectation values on qumode states
// via basis rotation plus photon-number readout, with an exact dense oracle

#pragma once

#include "qss/fock.hpp"
#include "qss/linalg.hpp"
#include "qss/pauli.hpp"
#include "qss/synthesis.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace qss {

struct MeasurementDistribution {
    RealVector probabilities;
    std::optional<long long> shots;

    MeasurementDistribution(RealVector p, std::optional<long long> shot_count = {})
        : probabilities(std::move(p)), shots(shot_count) {
        double sum = 0.0;
        for (Eigen::Index n = 0; n < probabilities.size(); ++n) {
            if (probabilities(n) < -1e-12)
                throw std::invalid_argument("MeasurementDistribution: negative probability");
            sum += probabilities(n);
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("MeasurementDistribution: probabilities must sum to 1");
    }
};

// <Z...Z restricted to the word's Z positions> = sum_b (-1)^{parity} P(b),
// with b the bitstring of each Fock index under the binary encoding.
inline double parity_expectation(const MeasurementDistribution& dist, const PauliWord& word) {
    if (!word.is_diagonal())
        throw std::invalid_argument("parity_expectation: word must contain only I and Z");
    const int nq = word.num_qubits();
    if (dist.probabilities.size() != (1 << nq))
        throw std::invalid_argument("parity_expectation: distribution length must be 2^num_qubits");
    double value = 0.0;
    for (int n = 0; n < (1 << nq); ++n) {
        int parity = 0;
        for (int j = 1; j <= nq; ++j)
            if (word.letter(j) == 'Z') parity ^= (n >> (nq - j)) & 1;
        value += (parity ? -1.0 : 1.0) * dist.probabilities(n);
    }
    return value;
}

// <psi| P |psi> by dense matrix-vector products; oracle for the protocol below.
inline double pauli_expectation_exact(const StateVector& state, const PauliWord& word) {
    if (state.size() != (1 << word.num_qubits()))
        throw std::invalid_argument("pauli_expectation_exact: dimension mismatch");
    const Complex value = state.dot(pauli_matrix(word) * state);
    return value.real();
}

// Measurement protocol: apply the library circuit for each X position (H_j)
// and Y position (W_j) in ascending j, then read the photon distribution and
// take the parity of the word's diagonal skeleton.
inline double pauli_expectation_via_rotation(const StateVector& state, const PauliWord& word,
                                             const RotationLibrary& library,
                                             std::optional<long long> shots = {},
                                             std::uint64_t seed = 0) {
    const int nq = word.num_qubits();
    if (state.size() != (1 << nq))
        throw std::invalid_argument("pauli_expectation_via_rotation: dimension mismatch");
    if (library.num_qubits() != nq)
        throw std::invalid_argument("pauli_expectation_via_rotation: library qubit count mismatch");

    StateVector rotated = state;
    for (int j = 1; j <= nq; ++j) {
        const char letter = word.letter(j);
        if (letter != 'X' && letter != 'Y') continue;
        const Matrix& rotation = library.rotation_matrix(
            j, letter == 'X' ? RotationKind::hadamard : RotationKind::hadamard_sdg);
        if (rotation.rows() != rotated.size())
            throw std::invalid_argument("pauli_expectation_via_rotation: library cutoff mismatch");
        rotated = rotation * rotated;
    }

    RealVector probs = shots ? photon_distribution(rotated, *shots, seed)
                             : photon_distribution(rotated);
    // sampled distributions are exactly normalized by construction; the exact
    // one is normalized up to gate unitarity
    return parity_expectation(MeasurementDistribution(std::move(probs), shots),
                              word.diagonal_skeleton());
}

enum class EvalMode { exact, rotation, sampled };

struct EvalOptions {
    EvalMode mode = EvalMode::exact;
    long long shots = 0;
    std::uint64_t seed = 0;
};

// sum_j g_j <P_j>, each term in the requested mode; identity terms contribute
// their coefficient directly without measurement.
inline double hamiltonian_expectation(const StateVector& state, const QubitHamiltonian& h,
                                      const RotationLibrary* library,
                                      const EvalOptions& options = {}) {
    if (state.size() != h.dimension())
        throw std::invalid_argument("hamiltonian_expectation: dimension mismatch");
    if (options.mode != EvalMode::exact && library == nullptr)
        throw std::invalid_argument("hamiltonian_expectation: rotation library required");
    if (options.mode == EvalMode::sampled && options.shots <= 0)
        throw std::invalid_argument("hamiltonian_expectation: sampled mode needs positive shots");

    double energy = 0.0;
    std::size_t term_index = 0;
    for (const auto& term : h.terms()) {
        double expectation = 1.0;
        if (!term.word.is_identity()) {
            switch (options.mode) {
                case EvalMode::exact:
                    expectation = pauli_expectation_exact(state, term.word);
                    break;
                case EvalMode::rotation:
                    expectation = pauli_expectation_via_rotation(state, term.word, *library);
                    break;
                case EvalMode::sampled:
                    expectation = pauli_expectation_via_rotation(
                        state, term.word, *library, options.shots,
                        derive_seed(options.seed, term_index));
                    break;
            }
        }
        energy += term.coeff.real() * expectation;
        ++term_index;
    }
    return energy;
}

} // namespace qss
