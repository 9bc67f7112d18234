// fock.hpp — truncated Fock-space linear algebra: bosonic operators,
// displacement and SNAP gates, SNAP-displacement circuits

#pragma once

#include "qss/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qss {

// Truncated single-mode Fock space with L retained levels.
struct FockSpace {
    int cutoff;

    explicit FockSpace(int levels) : cutoff(levels) {
        if (levels < 2) throw std::invalid_argument("FockSpace: cutoff must be >= 2");
    }

    bool is_qubit_encodable() const { return (cutoff & (cutoff - 1)) == 0; }

    // Number of qubits encoded when L = 2^N_Q.
    int num_qubits() const {
        if (!is_qubit_encodable())
            throw std::invalid_argument("FockSpace: cutoff is not a power of two");
        int n = 0;
        for (int l = cutoff; l > 1; l >>= 1) ++n;
        return n;
    }
};

using StateVector = Vector;

// |n> in the given space
inline StateVector fock_state(const FockSpace& space, int n) {
    if (n < 0 || n >= space.cutoff) throw std::out_of_range("fock_state: level out of range");
    StateVector v = StateVector::Zero(space.cutoff);
    v(n) = 1.0;
    return v;
}

// ------------------------------ bosonic operators ---------------------------

enum class BosonicLabel { annihilate, create, number, position, momentum, custom };

struct BosonicOperator {
    Matrix matrix;
    BosonicLabel label = BosonicLabel::custom;
};

// a |n> = sqrt(n) |n-1>
inline BosonicOperator annihilation_matrix(const FockSpace& space) {
    const int L = space.cutoff;
    Matrix m = Matrix::Zero(L, L);
    for (int n = 1; n < L; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
    return {m, BosonicLabel::annihilate};
}

inline BosonicOperator creation_matrix(const FockSpace& space) {
    return {annihilation_matrix(space).matrix.adjoint(), BosonicLabel::create};
}

inline BosonicOperator number_matrix(const FockSpace& space) {
    const int L = space.cutoff;
    Matrix m = Matrix::Zero(L, L);
    for (int n = 0; n < L; ++n) m(n, n) = static_cast<double>(n);
    return {m, BosonicLabel::number};
}

// x = (a^dag + a) / sqrt(2)
inline BosonicOperator position_matrix(const FockSpace& space) {
    Matrix a = annihilation_matrix(space).matrix;
    return {(a.adjoint() + a) / std::sqrt(2.0), BosonicLabel::position};
}

// p = i (a^dag - a) / sqrt(2)
inline BosonicOperator momentum_matrix(const FockSpace& space) {
    Matrix a = annihilation_matrix(space).matrix;
    return {Complex(0.0, 1.0) * (a.adjoint() - a) / std::sqrt(2.0), BosonicLabel::momentum};
}

// ---------------------------------- gates -----------------------------------

// Coherent support leaks past the cutoff once |alpha|^2 > L/4; callers report
// this as a warning, not an error.
inline bool displacement_exceeds_cutoff(double alpha, const FockSpace& space) {
    return alpha * alpha > 0.25 * static_cast<double>(space.cutoff);
}

// D(alpha) = exp(alpha a^dag - alpha a) on the truncated space, alpha real.
inline Matrix displacement_gate(double alpha, const FockSpace& space) {
    if (!std::isfinite(alpha)) throw std::invalid_argument("displacement_gate: alpha not finite");
    Matrix a = annihilation_matrix(space).matrix;
    Matrix generator = alpha * (a.adjoint() - a);
    return generator.exp();
}

// Batch displacement construction from one spectral decomposition of the
// fixed generator a^dag - a; agrees with displacement_gate to machine
// precision and avoids a fresh matrix exponential per call in hot loops.
class DisplacementFactory {
public:
    explicit DisplacementFactory(const FockSpace& space) {
        const Matrix a = annihilation_matrix(space).matrix;
        Eigen::SelfAdjointEigenSolver<Matrix> solver(Complex(0, 1) * (a.adjoint() - a));
        basis_ = solver.eigenvectors();
        frequencies_ = solver.eigenvalues();
    }

    // exp(alpha (a^dag - a)) = W exp(-i alpha mu) W^dag
    Matrix operator()(double alpha) const {
        Vector phases(frequencies_.size());
        for (Eigen::Index n = 0; n < frequencies_.size(); ++n)
            phases(n) = std::polar(1.0, -alpha * frequencies_(n));
        return basis_ * phases.asDiagonal() * basis_.adjoint();
    }

private:
    Matrix basis_;
    RealVector frequencies_;
};

// S(theta) = diag(e^{i theta_n})
inline Matrix snap_gate(const RealVector& thetas, const FockSpace& space) {
    if (thetas.size() != space.cutoff)
        throw std::invalid_argument("snap_gate: phase vector length must equal the cutoff");
    Matrix m = Matrix::Zero(space.cutoff, space.cutoff);
    for (int n = 0; n < space.cutoff; ++n)
        m(n, n) = std::polar(1.0, thetas(n));
    return m;
}

// --------------------------- SNAP-displacement circuits ---------------------

struct SnapDispLayer {
    double alpha = 0.0;
    RealVector thetas;
};

// Ordered layers; each layer acts as S(theta) D(alpha), layer 1 first.
struct SnapDispCircuit {
    int cutoff = 0;
    std::vector<SnapDispLayer> layers;

    SnapDispCircuit() = default;
    explicit SnapDispCircuit(int levels) : cutoff(levels) {
        if (levels < 2) throw std::invalid_argument("SnapDispCircuit: cutoff must be >= 2");
    }

    int depth() const { return static_cast<int>(layers.size()); }

    void add_layer(double alpha, RealVector thetas) {
        if (thetas.size() != cutoff)
            throw std::invalid_argument("SnapDispCircuit: phase vector length must equal the cutoff");
        layers.push_back({alpha, std::move(thetas)});
    }
};

inline StateVector apply_circuit(const SnapDispCircuit& circuit, const StateVector& state) {
    if (state.size() != circuit.cutoff)
        throw std::invalid_argument("apply_circuit: state dimension does not match circuit cutoff");
    const FockSpace space(circuit.cutoff);
    StateVector psi = state;
    for (const auto& layer : circuit.layers) {
        psi = displacement_gate(layer.alpha, space) * psi;
        for (int n = 0; n < circuit.cutoff; ++n)
            psi(n) *= std::polar(1.0, layer.thetas(n));
    }
    return psi;
}

// U = U_SD(alpha_d, theta_d) ... U_SD(alpha_1, theta_1)
inline Matrix circuit_matrix(const SnapDispCircuit& circuit) {
    const FockSpace space(circuit.cutoff);
    Matrix u = Matrix::Identity(circuit.cutoff, circuit.cutoff);
    for (const auto& layer : circuit.layers) {
        Matrix step = displacement_gate(layer.alpha, space);
        for (int n = 0; n < circuit.cutoff; ++n)
            step.row(n) *= std::polar(1.0, layer.thetas(n));
        u = step * u;
    }
    return u;
}

// ------------------------------- measurement --------------------------------

// Exact photon-number distribution |<n|psi>|^2.
inline RealVector photon_distribution(const StateVector& state) {
    return state.cwiseAbs2();
}

// Empirical distribution from `shots` categorical draws (inverse-CDF sampling,
// bit-reproducible for a fixed seed).
inline RealVector photon_distribution(const StateVector& state, long long shots,
                                      std::uint64_t seed) {
    if (shots <= 0) throw std::invalid_argument("photon_distribution: shots must be positive");
    const RealVector exact = state.cwiseAbs2();
    const Eigen::Index L = exact.size();
    RealVector cumulative(L);
    double total = 0.0;
    for (Eigen::Index n = 0; n < L; ++n) {
        total += exact(n);
        cumulative(n) = total;
    }
    std::mt19937_64 rng(seed);
    RealVector counts = RealVector::Zero(L);
    for (long long s = 0; s < shots; ++s) {
        const double u = uniform_unit(rng) * total;
        Eigen::Index lo = 0, hi = L - 1;
        while (lo < hi) {
            const Eigen::Index mid = (lo + hi) / 2;
            if (u < cumulative(mid)) hi = mid; else lo = mid + 1;
        }
        counts(lo) += 1.0;
    }
    return counts / static_cast<double>(shots);
}

inline RealVector photon_distribution(const StateVector& state,
                                      std::optional<long long> shots,
                                      std::optional<std::uint64_t> seed) {
    if (!shots) return photon_distribution(state);
    return photon_distribution(state, *shots, seed.value_or(0));
}

} // namespace qss
