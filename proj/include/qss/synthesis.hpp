// synthesis.hpp — compiling target unitaries (notably the embedded basis
// rotations H_j and W_j = H_j S_j^dag) into SNAP-displacement circuits

#pragma once

#include "qss/fock.hpp"
#include "qss/linalg.hpp"
#include "qss/optimize.hpp"
#include "qss/pauli.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qss {

inline Matrix hadamard_gate() {
    Matrix h(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    h << s, s, s, -s;
    return h;
}

inline Matrix phase_gate() {
    Matrix s(2, 2);
    s << 1, 0, 0, Complex(0, 1);
    return s;
}

enum class RotationKind { hadamard, hadamard_sdg };  // H_j, W_j = H_j S_j^dag

inline Matrix rotation_gate(RotationKind kind) {
    if (kind == RotationKind::hadamard) return hadamard_gate();
    return hadamard_gate() * phase_gate().adjoint();
}

inline std::string rotation_kind_name(RotationKind kind) {
    return kind == RotationKind::hadamard ? "H" : "W";
}

// I (x) ... (x) gate at slot j (x) ... (x) I in Fock order under the binary
// encoding (qubit 1 = most significant bit = leftmost factor).
inline Matrix embed_single_qubit_gate(const Matrix& gate, int qubit_j, int num_qubits) {
    if (gate.rows() != 2 || gate.cols() != 2)
        throw std::invalid_argument("embed_single_qubit_gate: gate must be 2x2");
    if (qubit_j < 1 || qubit_j > num_qubits)
        throw std::out_of_range("embed_single_qubit_gate: qubit index out of range");
    const int left = 1 << (qubit_j - 1);
    const int right = 1 << (num_qubits - qubit_j);
    return kron(kron(Matrix::Identity(left, left), gate), Matrix::Identity(right, right));
}

// ------------------------------ targets & loss ------------------------------

struct SynthesisTarget {
    Matrix unitary;
    std::string label;

    SynthesisTarget(Matrix v, std::string name) : unitary(std::move(v)), label(std::move(name)) {
        if (unitary.rows() != unitary.cols())
            throw std::invalid_argument("SynthesisTarget: matrix not square");
        if (unitarity_residual(unitary) >= 1e-10)
            throw std::invalid_argument("SynthesisTarget: matrix not unitary");
    }
};

inline SynthesisTarget rotation_target(int qubit_j, RotationKind kind, int num_qubits) {
    return SynthesisTarget(embed_single_qubit_gate(rotation_gate(kind), qubit_j, num_qubits),
                           rotation_kind_name(kind) + "_" + std::to_string(qubit_j) + " of " +
                               std::to_string(num_qubits) + " qubits");
}

namespace detail {

// C = (1/L^2) sum_{n,m < L} |V_{n,m} - U_{n,m}|^2, L fixed by the target.
inline double element_loss(const Matrix& realized, const Matrix& target) {
    const Eigen::Index L = target.rows();
    return (target - realized.topLeftCorner(L, L)).squaredNorm() /
           static_cast<double>(L * L);
}

} // namespace detail

// The circuit may live on a working cutoff at or above the target dimension;
// the loss compares the target-sized block.
inline double synthesis_loss(const SnapDispCircuit& circuit, const SynthesisTarget& target) {
    if (circuit.cutoff < target.unitary.rows())
        throw std::invalid_argument("synthesis_loss: circuit cutoff below target dimension");
    return detail::element_loss(circuit_matrix(circuit), target.unitary);
}

// --------------------------- optimization problem ---------------------------

// Parameter packing per layer: [alpha, theta_0 ... theta_{L-1}].
class SnapDispSynthesisProblem {
public:
    SnapDispSynthesisProblem(Matrix target, int depth, int working_cutoff, double grad_step)
        : target_(std::move(target)),
          depth_(depth),
          cutoff_(working_cutoff),
          step_(grad_step),
          space_(working_cutoff),
          displace_(space_) {
        if (depth < 1) throw std::invalid_argument("synthesis: depth must be >= 1");
        if (cutoff_ < target_.rows())
            throw std::invalid_argument("synthesis: working cutoff below target dimension");
    }

    int num_params() const { return depth_ * (1 + cutoff_); }
    int cutoff() const { return cutoff_; }

    SnapDispCircuit circuit(const RealVector& x) const {
        SnapDispCircuit c(cutoff_);
        for (int l = 0; l < depth_; ++l) {
            const int base = l * (1 + cutoff_);
            c.add_layer(x(base), x.segment(base + 1, cutoff_));
        }
        return c;
    }

    double loss(const RealVector& x) const {
        Matrix u = Matrix::Identity(cutoff_, cutoff_);
        for (int l = 0; l < depth_; ++l) {
            const int base = l * (1 + cutoff_);
            Matrix step = displace_(x(base));
            for (int n = 0; n < cutoff_; ++n)
                step.row(n) *= std::polar(1.0, x(base + 1 + n));
            u = step * u;
        }
        return detail::element_loss(u, target_);
    }

    // Central differences, reusing the unchanged layer products: perturbing a
    // SNAP phase is a rank-one update of the realized matrix, perturbing a
    // displacement amplitude rebuilds one layer.
    RealVector gradient(const RealVector& x) const {
        const int L = cutoff_;
        const int d = depth_;
        const Eigen::Index tl = target_.rows();
        const double h = step_;

        std::vector<Matrix> disp(d), ulayer(d);
        std::vector<RealVector> thetas(d);
        std::vector<double> alphas(d);
        for (int l = 0; l < d; ++l) {
            const int base = l * (1 + L);
            alphas[l] = x(base);
            thetas[l] = x.segment(base + 1, L);
            disp[l] = displace_(alphas[l]);
            ulayer[l] = disp[l];
            for (int n = 0; n < L; ++n)
                ulayer[l].row(n) *= std::polar(1.0, thetas[l](n));
        }

        std::vector<Matrix> prefix(d + 1), suffix(d + 1);
        prefix[0] = Matrix::Identity(L, L);
        for (int l = 0; l < d; ++l) prefix[l + 1] = ulayer[l] * prefix[l];
        suffix[d - 1] = Matrix::Identity(L, L);
        for (int l = d - 2; l >= 0; --l) suffix[l] = suffix[l + 1] * ulayer[l + 1];

        RealVector g(num_params());
        const double area = static_cast<double>(tl * tl);
        for (int l = 0; l < d; ++l) {
            const int base = l * (1 + L);
            const Matrix scaled = disp[l] * prefix[l];  // D_l applied after earlier layers
            Matrix snapped = scaled;
            for (int n = 0; n < L; ++n)
                snapped.row(n) *= std::polar(1.0, thetas[l](n));
            const Matrix residual = target_ - (suffix[l] * snapped).topLeftCorner(tl, tl);

            // alpha_l
            for (int sign : {+1, -1}) {
                Matrix shifted = displace_(alphas[l] + sign * h) * prefix[l];
                for (int n = 0; n < L; ++n)
                    shifted.row(n) *= std::polar(1.0, thetas[l](n));
                const double loss_shifted =
                    (target_ - (suffix[l] * shifted).topLeftCorner(tl, tl)).squaredNorm() / area;
                if (sign > 0) g(base) = loss_shifted;
                else g(base) = (g(base) - loss_shifted) / (2.0 * h);
            }

            // theta_{l,n}: the perturbation is rank one, B = u v, so the
            // shifted loss expands to ||R||^2 - 2 Re(d <R,B>) + |d|^2 ||B||^2
            // with <R,B> = sum_j v_j (R^H u)_j; the ||R||^2 term cancels in
            // the central difference
            for (int n = 0; n < L; ++n) {
                const Vector ru = residual.adjoint() * suffix[l].col(n).head(tl);
                const auto v = scaled.row(n).head(tl);
                const Complex inner = (v * ru)(0);
                const double bnorm =
                    suffix[l].col(n).head(tl).squaredNorm() * v.squaredNorm();
                const Complex phase = std::polar(1.0, thetas[l](n));
                const Complex dplus = std::polar(1.0, thetas[l](n) + h) - phase;
                const Complex dminus = std::polar(1.0, thetas[l](n) - h) - phase;
                const double diff = -2.0 * ((dplus - dminus) * inner).real() +
                                    (std::norm(dplus) - std::norm(dminus)) * bnorm;
                g(base + 1 + n) = diff / (2.0 * h * area);
            }
        }
        return g;
    }

private:
    Matrix target_;
    int depth_;
    int cutoff_;
    double step_;
    FockSpace space_;
    DisplacementFactory displace_;
};

// -------------------------------- synthesize --------------------------------

struct SynthesisResult {
    SnapDispCircuit circuit;
    double final_loss = 0.0;
    int restarts_used = 0;
    int iterations = 0;
    bool converged = false;  // best restart failed to converge => best-effort result
};

inline InitSampler snap_disp_init_sampler(int depth, int cutoff) {
    return [depth, cutoff](std::mt19937_64& rng) {
        RealVector x(depth * (1 + cutoff));
        for (int l = 0; l < depth; ++l) {
            const int base = l * (1 + cutoff);
            x(base) = uniform_in(rng, -1.0, 1.0);
            for (int n = 0; n < cutoff; ++n)
                x(base + 1 + n) = uniform_in(rng, -std::numbers::pi, std::numbers::pi);
        }
        return x;
    };
}

// Best circuit over `restarts` independently seeded local searches. A working
// cutoff above the target dimension may be requested; 0 means "target size".
inline SynthesisResult synthesize(const SynthesisTarget& target, int depth,
                                  const OptimizerConfig& opt, int restarts, std::uint64_t seed,
                                  int working_cutoff = 0) {
    const int L = static_cast<int>(target.unitary.rows());
    const int cutoff = working_cutoff == 0 ? L : working_cutoff;
    SnapDispSynthesisProblem problem(target.unitary, depth, cutoff, opt.grad_step);

    const auto result = multi_restart_minimize(
        [&problem](const RealVector& x) { return problem.loss(x); },
        [&problem](const RealVector& x) { return problem.gradient(x); },
        snap_disp_init_sampler(depth, cutoff), restarts, seed, opt);

    SynthesisResult out;
    out.circuit = problem.circuit(result.best.x);
    out.final_loss = result.best.value;
    out.restarts_used = restarts;
    out.iterations = result.total_iterations();
    out.converged = result.outcomes[static_cast<std::size_t>(result.best_restart)].converged;
    return out;
}

// ------------------------------ rotation library ----------------------------

struct LibraryEntry {
    int qubit = 0;  // 1-based
    RotationKind kind = RotationKind::hadamard;
    SnapDispCircuit circuit;
    double loss = 0.0;
    bool within_tolerance = false;
    int restarts_used = 0;
    Matrix realized;  // cached circuit matrix
};

// Precompiled basis-change circuits for every (qubit, kind) of one register.
class RotationLibrary {
public:
    RotationLibrary(int num_qubits, int depth, double tolerance)
        : num_qubits_(num_qubits), depth_(depth), tolerance_(tolerance) {
        if (num_qubits < 1) throw std::invalid_argument("RotationLibrary: need at least one qubit");
    }

    int num_qubits() const { return num_qubits_; }
    int depth() const { return depth_; }
    double tolerance() const { return tolerance_; }

    void insert(LibraryEntry entry) {
        if (entry.qubit < 1 || entry.qubit > num_qubits_)
            throw std::out_of_range("RotationLibrary: qubit index out of range");
        if (entry.realized.size() == 0) entry.realized = circuit_matrix(entry.circuit);
        entries_[key(entry.qubit, entry.kind)] = std::move(entry);
    }

    bool contains(int qubit_j, RotationKind kind) const {
        return entries_.count(key(qubit_j, kind)) > 0;
    }

    const LibraryEntry& entry(int qubit_j, RotationKind kind) const {
        const auto it = entries_.find(key(qubit_j, kind));
        if (it == entries_.end())
            throw std::out_of_range("RotationLibrary: missing entry " +
                                    rotation_kind_name(kind) + "_" + std::to_string(qubit_j));
        return it->second;
    }

    const Matrix& rotation_matrix(int qubit_j, RotationKind kind) const {
        return entry(qubit_j, kind).realized;
    }

    bool all_within_tolerance() const {
        if (entries_.size() != static_cast<std::size_t>(2 * num_qubits_)) return false;
        for (const auto& [k, e] : entries_)
            if (!e.within_tolerance) return false;
        return true;
    }

    const std::map<std::pair<int, int>, LibraryEntry>& entries() const { return entries_; }

private:
    static std::pair<int, int> key(int qubit_j, RotationKind kind) {
        return {qubit_j, kind == RotationKind::hadamard ? 0 : 1};
    }

    int num_qubits_;
    int depth_;
    double tolerance_;
    std::map<std::pair<int, int>, LibraryEntry> entries_;
};

// Synthesizes H_j and W_j for all j, escalating restarts (x2 per round, three
// rounds) until each loss clears the tolerance; failures are flagged per entry.
inline RotationLibrary build_rotation_library(int num_qubits, int depth, double tolerance,
                                              const OptimizerConfig& opt, std::uint64_t seed,
                                              int working_cutoff = 0) {
    RotationLibrary library(num_qubits, depth, tolerance);
    for (int j = 1; j <= num_qubits; ++j) {
        for (const RotationKind kind : {RotationKind::hadamard, RotationKind::hadamard_sdg}) {
            const SynthesisTarget target = rotation_target(j, kind, num_qubits);
            const int entry_id = (j - 1) * 2 + (kind == RotationKind::hadamard ? 0 : 1);

            LibraryEntry entry;
            entry.qubit = j;
            entry.kind = kind;
            int restarts = opt.restarts;
            for (int round = 0; round < 3; ++round) {
                const std::uint64_t round_seed =
                    derive_seed(seed, static_cast<std::uint64_t>(entry_id * 8 + round));
                SynthesisResult res =
                    synthesize(target, depth, opt, restarts, round_seed, working_cutoff);
                entry.restarts_used += res.restarts_used;
                if (round == 0 || res.final_loss < entry.loss) {
                    entry.loss = res.final_loss;
                    entry.circuit = std::move(res.circuit);
                }
                if (entry.loss < tolerance) break;
                restarts *= 2;
            }
            entry.within_tolerance = entry.loss < tolerance;
            library.insert(std::move(entry));
        }
    }
    return library;
}

} // namespace qss
