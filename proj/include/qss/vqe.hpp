// vqe.hpp — weighted-subspace variational eigensolvers: the qumode
// SNAP-displacement ansatz, a single-displacement ansatz, and a TwoLocal
// qubit baseline, plus the average-absolute-error metric

#pragma once

#include "qss/fock.hpp"
#include "qss/linalg.hpp"
#include "qss/measurement.hpp"
#include "qss/optimize.hpp"
#include "qss/pauli.hpp"
#include "qss/synthesis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qss {

// Weights from the reference runs: (1.0, 0.9, 0.8, ...).
inline RealVector default_subspace_weights(int num_states) {
    if (num_states < 1 || num_states > 10)
        throw std::invalid_argument("default_subspace_weights: supported for 1..10 states");
    RealVector w(num_states);
    for (int n = 0; n < num_states; ++n) w(n) = 1.0 - 0.1 * n;
    return w;
}

// Weighted sum of energies of orthonormal trial states sharing one unitary.
struct SubspaceObjective {
    QubitHamiltonian hamiltonian;
    int num_states;
    RealVector weights;
    std::vector<int> initial_states;  // Fock indices, 0..N_S-1 by default

    SubspaceObjective(QubitHamiltonian h, int states, RealVector w = {},
                      std::vector<int> initials = {})
        : hamiltonian(std::move(h)),
          num_states(states),
          weights(w.size() ? std::move(w) : default_subspace_weights(states)),
          initial_states(std::move(initials)) {
        if (num_states < 1 || num_states > hamiltonian.dimension())
            throw std::invalid_argument("SubspaceObjective: need 1 <= N_S <= 2^num_qubits");
        if (weights.size() != num_states)
            throw std::invalid_argument("SubspaceObjective: weight count mismatch");
        for (int n = 0; n < num_states; ++n)
            if (weights(n) <= 0)
                throw std::invalid_argument("SubspaceObjective: weights must be positive");
        if (initial_states.empty())
            for (int n = 0; n < num_states; ++n) initial_states.push_back(n);
        if (static_cast<int>(initial_states.size()) != num_states)
            throw std::invalid_argument("SubspaceObjective: initial state count mismatch");
        for (int s : initial_states)
            if (s < 0 || s >= hamiltonian.dimension())
                throw std::out_of_range("SubspaceObjective: initial state out of range");
    }
};

enum class AnsatzKind { snap_displacement, single_displacement, qubit_two_local };

struct AnsatzSpec {
    AnsatzKind kind = AnsatzKind::snap_displacement;
    int depth = 1;  // circuit depth D, or TwoLocal layer count

    void validate() const {
        if (kind != AnsatzKind::single_displacement && depth < 1)
            throw std::invalid_argument("AnsatzSpec: depth must be >= 1");
    }
};

struct RunResult {
    std::vector<double> energies;           // per trial state, input order
    double objective = 0.0;                 // F = sum_n w_n E_n
    std::optional<double> delta;            // average |exact - computed|, k = N_S
    std::vector<double> subspace_energies;  // eigenvalues of H projected on the trial span
    RealVector parameters;
    std::vector<std::pair<int, double>> trace;
    bool converged = false;
    int restarts_used = 0;
    int iterations = 0;
};

// (1/k) sum |E_n^exact - E_n^method| over the k lowest states, both ascending.
inline double delta_metric(const std::vector<double>& exact, const std::vector<double>& computed,
                           int k) {
    if (k < 1) throw std::invalid_argument("delta_metric: k must be positive");
    if (static_cast<int>(exact.size()) < k || static_cast<int>(computed.size()) < k)
        throw std::invalid_argument("delta_metric: fewer than k entries");
    double sum = 0.0;
    for (int n = 0; n < k; ++n) sum += std::abs(exact[static_cast<std::size_t>(n)] -
                                                computed[static_cast<std::size_t>(n)]);
    return sum / static_cast<double>(k);
}

// <n| D(alpha)^dag H D(alpha) |n> for the requested Fock indices; no optimization.
inline std::vector<double> displaced_ansatz_energies(const QubitHamiltonian& h, double alpha,
                                                     const std::vector<int>& states) {
    const FockSpace space(h.dimension());
    const Matrix hm = hamiltonian_matrix(h);
    const Matrix d = displacement_gate(alpha, space);
    std::vector<double> energies;
    energies.reserve(states.size());
    for (int n : states) {
        if (n < 0 || n >= space.cutoff)
            throw std::out_of_range("displaced_ansatz_energies: state index out of range");
        const Vector psi = d.col(n);
        energies.push_back(psi.dot(hm * psi).real());
    }
    return energies;
}

// ------------------------------ TwoLocal circuit ----------------------------

inline Matrix ry_gate(double theta) {
    Matrix m(2, 2);
    m << std::cos(theta / 2), -std::sin(theta / 2), std::sin(theta / 2), std::cos(theta / 2);
    return m;
}

inline Matrix rx_gate(double theta) {
    Matrix m(2, 2);
    const Complex ims(0, -std::sin(theta / 2));
    m << std::cos(theta / 2), ims, ims, std::cos(theta / 2);
    return m;
}

// CX with 1-based control/target under the MSB-first encoding.
inline Matrix cx_gate_matrix(int control, int target, int num_qubits) {
    const int dim = 1 << num_qubits;
    Matrix m = Matrix::Zero(dim, dim);
    for (int n = 0; n < dim; ++n) {
        const int cbit = (n >> (num_qubits - control)) & 1;
        const int out = cbit ? n ^ (1 << (num_qubits - target)) : n;
        m(out, n) = 1.0;
    }
    return m;
}

// Linear chain of CX gates between adjacent qubits, one pass.
inline Matrix cx_chain_matrix(int num_qubits) {
    const int dim = 1 << num_qubits;
    Matrix m = Matrix::Identity(dim, dim);
    for (int c = 1; c < num_qubits; ++c) m = cx_gate_matrix(c, c + 1, num_qubits) * m;
    return m;
}

inline int two_local_param_count(int num_qubits, int layers) {
    return 2 * num_qubits * (layers + 1);
}

// Layered rotation/entangler circuit: per stage R_y then R_x on each qubit,
// entangled by a CX chain, with a final rotation stage after the last chain.
// Parameters per stage: [ry_1..ry_N, rx_1..rx_N].
inline Matrix two_local_matrix(const RealVector& params, int num_qubits, int layers) {
    if (layers < 1) throw std::invalid_argument("two_local_matrix: layers must be >= 1");
    if (params.size() != two_local_param_count(num_qubits, layers))
        throw std::invalid_argument("two_local_matrix: parameter count mismatch");
    const int dim = 1 << num_qubits;
    const Matrix chain = cx_chain_matrix(num_qubits);
    Matrix u = Matrix::Identity(dim, dim);
    for (int stage = 0; stage <= layers; ++stage) {
        const int base = stage * 2 * num_qubits;
        Matrix ry = ry_gate(params(base));
        Matrix rx = rx_gate(params(base + num_qubits));
        for (int q = 1; q < num_qubits; ++q) {
            ry = kron(ry, ry_gate(params(base + q)));
            rx = kron(rx, rx_gate(params(base + num_qubits + q)));
        }
        u = rx * (ry * u);
        if (stage < layers) u = chain * u;
    }
    return u;
}

// ------------------------------- drivers ------------------------------------

namespace detail {

inline double subspace_energy_sum(const Matrix& u, const Matrix& hm,
                                  const SubspaceObjective& objective,
                                  std::vector<double>* energies_out = nullptr) {
    double f = 0.0;
    for (int n = 0; n < objective.num_states; ++n) {
        const Vector psi = u.col(objective.initial_states[static_cast<std::size_t>(n)]);
        const double e = psi.dot(hm * psi).real();
        if (energies_out) energies_out->push_back(e);
        f += objective.weights(n) * e;
    }
    return f;
}

inline double subspace_energy_sum_measured(const Matrix& u, const SubspaceObjective& objective,
                                           const RotationLibrary& library, EvalMode mode,
                                           std::vector<double>* energies_out = nullptr) {
    double f = 0.0;
    for (int n = 0; n < objective.num_states; ++n) {
        const StateVector psi = u.col(objective.initial_states[static_cast<std::size_t>(n)]);
        EvalOptions options;
        options.mode = mode;
        const double e = hamiltonian_expectation(psi, objective.hamiltonian, &library, options);
        if (energies_out) energies_out->push_back(e);
        f += objective.weights(n) * e;
    }
    return f;
}

// Eigenvalues of H restricted to the span of the trial states.
inline std::vector<double> projected_subspace_energies(const Matrix& u, const Matrix& hm,
                                                       const SubspaceObjective& objective) {
    const int k = objective.num_states;
    Matrix block(k, k);
    for (int n = 0; n < k; ++n)
        for (int m = 0; m < k; ++m)
            block(n, m) = u.col(objective.initial_states[static_cast<std::size_t>(n)])
                              .dot(hm * u.col(objective.initial_states[static_cast<std::size_t>(m)]));
    Eigen::SelfAdjointEigenSolver<Matrix> solver(block);
    std::vector<double> out(static_cast<std::size_t>(k));
    for (int n = 0; n < k; ++n) out[static_cast<std::size_t>(n)] = solver.eigenvalues()(n);
    return out;
}

inline RunResult finish_run(const SubspaceObjective& objective, const Matrix& u,
                            const MultiRestartResult& opt_result,
                            const std::vector<double>& energies, double objective_value) {
    RunResult run;
    run.energies = energies;
    run.objective = objective_value;
    run.parameters = opt_result.best.x;
    run.converged = opt_result.outcomes[static_cast<std::size_t>(opt_result.best_restart)].converged;
    run.restarts_used = static_cast<int>(opt_result.outcomes.size());
    run.iterations = opt_result.total_iterations();
    for (std::size_t i = 0; i < opt_result.best.trace.size(); ++i)
        run.trace.emplace_back(static_cast<int>(i), opt_result.best.trace[i]);

    const Matrix hm = hamiltonian_matrix(objective.hamiltonian);
    run.subspace_energies = projected_subspace_energies(u, hm, objective);

    const Spectrum spectrum = exact_spectrum(objective.hamiltonian);
    std::vector<double> exact(spectrum.eigenvalues.data(),
                              spectrum.eigenvalues.data() + objective.num_states);
    std::vector<double> sorted = energies;
    std::sort(sorted.begin(), sorted.end());
    run.delta = delta_metric(exact, sorted, objective.num_states);
    return run;
}

} // namespace detail

// Qumode subspace VQE: shared SNAP-displacement (or single-displacement)
// unitary on Fock inputs; orthonormality of the trial set holds by
// construction. Energies are evaluated exactly or through the measurement
// protocol with a precompiled rotation library.
inline RunResult qss_vqe(const SubspaceObjective& objective, const AnsatzSpec& ansatz,
                         const RotationLibrary* library, const OptimizerConfig& opt,
                         EvalMode mode = EvalMode::exact) {
    ansatz.validate();
    if (ansatz.kind == AnsatzKind::qubit_two_local)
        throw std::invalid_argument("qss_vqe: qubit ansatz belongs to qubit_ssvqe");
    if (mode == EvalMode::sampled)
        throw std::invalid_argument("qss_vqe: sampled mode is not supported in the driver");
    if (mode == EvalMode::rotation && library == nullptr)
        throw std::invalid_argument("qss_vqe: rotation mode requires a library");
    const int cutoff = objective.hamiltonian.dimension();
    const FockSpace space(cutoff);
    const Matrix hm = hamiltonian_matrix(objective.hamiltonian);

    const bool single = ansatz.kind == AnsatzKind::single_displacement;
    const int depth = single ? 1 : ansatz.depth;

    const DisplacementFactory displace(space);
    const auto realize = [&](const RealVector& x) -> Matrix {
        if (single) return displace(x(0));
        Matrix u = Matrix::Identity(cutoff, cutoff);
        for (int l = 0; l < depth; ++l) {
            const int base = l * (1 + cutoff);
            Matrix step = displace(x(base));
            for (int n = 0; n < cutoff; ++n)
                step.row(n) *= std::polar(1.0, x(base + 1 + n));
            u = step * u;
        }
        return u;
    };

    const ObjectiveFn f = [&](const RealVector& x) {
        const Matrix u = realize(x);
        return mode == EvalMode::exact
                   ? detail::subspace_energy_sum(u, hm, objective)
                   : detail::subspace_energy_sum_measured(u, objective, *library, mode);
    };
    const GradientFn grad = central_difference_gradient(f, opt.grad_step);

    const InitSampler init =
        single ? InitSampler([](std::mt19937_64& rng) {
              RealVector x(1);
              x(0) = uniform_in(rng, -1.0, 1.0);
              return x;
          })
               : snap_disp_init_sampler(depth, cutoff);

    const MultiRestartResult result =
        multi_restart_minimize(f, grad, init, opt.restarts, opt.seed, opt);

    const Matrix u = realize(result.best.x);
    std::vector<double> energies;
    const double value = mode == EvalMode::exact
                             ? detail::subspace_energy_sum(u, hm, objective, &energies)
                             : detail::subspace_energy_sum_measured(u, objective, *library, mode,
                                                                    &energies);
    return detail::finish_run(objective, u, result, energies, value);
}

// Qubit-baseline subspace VQE over the TwoLocal ansatz; initial states are the
// computational basis states matching the Fock indices.
inline RunResult qubit_ssvqe(const SubspaceObjective& objective, const AnsatzSpec& ansatz,
                             const OptimizerConfig& opt) {
    ansatz.validate();
    if (ansatz.kind != AnsatzKind::qubit_two_local)
        throw std::invalid_argument("qubit_ssvqe: expected the qubit_two_local ansatz");
    const int nq = objective.hamiltonian.num_qubits();
    const int layers = ansatz.depth;
    const Matrix hm = hamiltonian_matrix(objective.hamiltonian);

    const ObjectiveFn f = [&](const RealVector& x) {
        return detail::subspace_energy_sum(two_local_matrix(x, nq, layers), hm, objective);
    };
    const GradientFn grad = central_difference_gradient(f, opt.grad_step);
    const InitSampler init = [nq, layers](std::mt19937_64& rng) {
        RealVector x(two_local_param_count(nq, layers));
        for (Eigen::Index i = 0; i < x.size(); ++i)
            x(i) = uniform_in(rng, -std::numbers::pi, std::numbers::pi);
        return x;
    };

    const MultiRestartResult result =
        multi_restart_minimize(f, grad, init, opt.restarts, opt.seed, opt);

    const Matrix u = two_local_matrix(result.best.x, nq, layers);
    std::vector<double> energies;
    const double value = detail::subspace_energy_sum(u, hm, objective, &energies);
    return detail::finish_run(objective, u, result, energies, value);
}

} // namespace qss
