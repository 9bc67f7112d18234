// harness.hpp — experiment configuration, task execution, CSV/manifest
// emission; the CLI front end is a thin argument parser over run()

#pragma once

#include "qss/measurement.hpp"
#include "qss/serialize.hpp"
#include "qss/vqe.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace qss {

inline constexpr const char* artifact_version = "0.1.0";

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(OptimizerConfig, method, grad_step, obj_tol,
                                                grad_tol, max_iters, restarts, seed)

// Mirrors the config file one-to-one; every run manifest embeds the resolved
// form so the run can be reproduced bit-identically.
struct ExperimentConfig {
    std::string task;

    // Hamiltonian source: a JSONL file, or the builtin displaced_qho(alpha, num_qubits)
    std::string hamiltonian;
    bool builtin = false;
    double alpha = 0.0;
    int num_qubits = 2;

    std::string mode = "exact";  // exact | rotation | sampled
    long long shots = 0;
    std::uint64_t seed = 0;
    std::string out = "out.csv";
    std::string library;

    std::string ansatz = "snap_displacement";
    int depth = 4;
    int num_states = 3;
    std::vector<double> weights;

    // gate synthesis
    std::string target_kind = "H";
    int target_qubit = 1;
    double tolerance = 1e-10;
    int working_cutoff = 0;

    // scans and sweeps
    std::vector<int> states = {0, 1, 2};
    std::vector<double> alphas;
    std::vector<std::string> hamiltonians;
    std::string sweep_task = "displaced-scan";

    OptimizerConfig optimizer;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ExperimentConfig, task, hamiltonian, builtin,
                                                alpha, num_qubits, mode, shots, seed, out,
                                                library, ansatz, depth, num_states, weights,
                                                target_kind, target_qubit, tolerance,
                                                working_cutoff, states, alphas, hamiltonians,
                                                sweep_task, optimizer)

// Exit codes partition the error classes.
enum class ExitCode : int {
    ok = 0,
    config_error = 2,
    ingestion_error = 3,
    tolerance_failure = 4,
    internal_error = 5,
};

namespace detail {

struct TaskOutcome {
    std::vector<std::filesystem::path> outputs;
    json extras = json::object();
    bool tolerance_ok = true;
};

inline EvalMode parse_mode(const std::string& mode) {
    if (mode == "exact") return EvalMode::exact;
    if (mode == "rotation") return EvalMode::rotation;
    if (mode == "sampled") return EvalMode::sampled;
    throw ConfigError("unknown mode \"" + mode + "\" (expected exact, rotation or sampled)");
}

inline AnsatzSpec parse_ansatz(const std::string& name, int depth) {
    AnsatzSpec spec;
    spec.depth = depth;
    if (name == "snap_displacement") spec.kind = AnsatzKind::snap_displacement;
    else if (name == "single_displacement") spec.kind = AnsatzKind::single_displacement;
    else if (name == "qubit_two_local") spec.kind = AnsatzKind::qubit_two_local;
    else throw ConfigError("unknown ansatz \"" + name + "\"");
    return spec;
}

inline RotationKind parse_rotation_kind(const std::string& kind) {
    if (kind == "H") return RotationKind::hadamard;
    if (kind == "W") return RotationKind::hadamard_sdg;
    throw ConfigError("target_kind must be \"H\" or \"W\"");
}

inline HamiltonianFile resolve_hamiltonian(const ExperimentConfig& config) {
    if (config.builtin) {
        if (config.num_qubits < 1) throw ConfigError("num_qubits must be positive");
        return {displaced_qho_hamiltonian(config.alpha, config.num_qubits),
                json{{"source", "displaced_qho"},
                     {"alpha", config.alpha},
                     {"num_qubits", config.num_qubits},
                     {"units", "oscillator"}}};
    }
    if (config.hamiltonian.empty())
        throw ConfigError("no Hamiltonian source configured (set hamiltonian or builtin)");
    return load_hamiltonian(config.hamiltonian);
}

inline std::filesystem::path resolve_library_path(const ExperimentConfig& config,
                                                  int num_qubits, bool for_writing) {
    namespace fs = std::filesystem;
    const char* env_dir = std::getenv("QSSVQE_LIBRARY_DIR");
    if (!config.library.empty()) {
        fs::path p = config.library;
        if (!for_writing && !fs::exists(p) && p.is_relative() && env_dir) {
            const fs::path fallback = fs::path(env_dir) / p;
            if (fs::exists(fallback)) return fallback;
        }
        return p;
    }
    if (!env_dir)
        throw ConfigError("no library path configured (set library or QSSVQE_LIBRARY_DIR)");
    return fs::path(env_dir) / ("rotations_nq" + std::to_string(num_qubits) + ".jsonl");
}

inline RotationLibrary load_library_checked(const ExperimentConfig& config, int num_qubits,
                                            json& extras) {
    const auto path = resolve_library_path(config, num_qubits, false);
    LibraryLoadReport report = load_library(path);
    for (const auto& err : report.entry_errors)
        std::cerr << "warning: " << err << "\n";
    if (report.library.num_qubits() != num_qubits)
        throw ConfigError("library was built for " + std::to_string(report.library.num_qubits()) +
                          " qubits, Hamiltonian has " + std::to_string(num_qubits));
    json losses = json::object();
    for (const auto& [key, entry] : report.library.entries())
        losses[rotation_kind_name(entry.kind) + "_" + std::to_string(entry.qubit)] = entry.loss;
    extras["library"] = {{"path", path.string()}, {"losses", losses}};
    return report.library;
}

inline RealVector weights_from(const ExperimentConfig& config) {
    if (config.weights.empty()) return default_subspace_weights(config.num_states);
    RealVector w(static_cast<Eigen::Index>(config.weights.size()));
    for (std::size_t i = 0; i < config.weights.size(); ++i)
        w(static_cast<Eigen::Index>(i)) = config.weights[i];
    return w;
}

// Pair each computed energy with an exact eigenvalue by ascending rank.
inline std::vector<double> rank_paired_exact(const std::vector<double>& energies,
                                             const RealVector& eigenvalues) {
    const std::size_t k = energies.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return energies[a] < energies[b]; });
    std::vector<double> exact(k);
    for (std::size_t rank = 0; rank < k; ++rank)
        exact[order[rank]] = eigenvalues(static_cast<Eigen::Index>(rank));
    return exact;
}

inline json run_result_extras(const RunResult& result) {
    json extras = {{"objective", result.objective},
                   {"converged", result.converged},
                   {"restarts_used", result.restarts_used},
                   {"iterations", result.iterations},
                   {"subspace_energies", result.subspace_energies}};
    if (result.delta) extras["delta"] = *result.delta;
    return extras;
}

// ----------------------------------- tasks ----------------------------------

inline TaskOutcome task_spectrum(const ExperimentConfig& config) {
    const HamiltonianFile file = resolve_hamiltonian(config);
    const Spectrum spectrum = exact_spectrum(file.hamiltonian);
    std::vector<std::vector<std::string>> rows;
    for (Eigen::Index n = 0; n < spectrum.eigenvalues.size(); ++n)
        rows.push_back({std::to_string(n), format_double(spectrum.eigenvalues(n))});
    write_csv(config.out, {"index", "energy"}, rows);
    TaskOutcome outcome;
    outcome.outputs.push_back(config.out);
    outcome.extras["num_terms"] = file.hamiltonian.terms().size();
    outcome.extras["metadata"] = file.metadata;
    return outcome;
}

inline TaskOutcome task_validate(const ExperimentConfig& config) {
    if (config.hamiltonian.empty()) throw ConfigError("validate requires a Hamiltonian file");
    const HamiltonianFile file = load_hamiltonian(config.hamiltonian);
    std::cout << "file: " << config.hamiltonian << "\n"
              << "num_qubits: " << file.hamiltonian.num_qubits() << "\n"
              << "terms: " << file.hamiltonian.terms().size() << "\n"
              << "hermitian: " << (file.hamiltonian.is_hermitian() ? "yes" : "no") << "\n"
              << "metadata: " << file.metadata.dump() << "\n";
    TaskOutcome outcome;
    outcome.extras["num_terms"] = file.hamiltonian.terms().size();
    outcome.extras["hermitian"] = file.hamiltonian.is_hermitian();
    return outcome;
}

inline TaskOutcome task_synthesize(const ExperimentConfig& config) {
    const SynthesisTarget target = rotation_target(
        config.target_qubit, parse_rotation_kind(config.target_kind), config.num_qubits);
    const SynthesisResult result = synthesize(target, config.depth, config.optimizer,
                                              config.optimizer.restarts, config.seed,
                                              config.working_cutoff);
    const FockSpace space(result.circuit.cutoff);
    for (const auto& layer : result.circuit.layers)
        if (displacement_exceeds_cutoff(layer.alpha, space))
            std::cerr << "warning: displacement amplitude " << layer.alpha
                      << " leaks past the Fock cutoff " << space.cutoff << "\n";

    write_csv(config.out,
              {"target", "qubit", "kind", "depth", "loss", "iterations", "restarts_used",
               "converged"},
              {{target.label, std::to_string(config.target_qubit), config.target_kind,
                std::to_string(config.depth), format_double(result.final_loss),
                std::to_string(result.iterations), std::to_string(result.restarts_used),
                result.converged ? "1" : "0"}});
    TaskOutcome outcome;
    outcome.outputs.push_back(config.out);
    outcome.extras["loss"] = result.final_loss;
    outcome.extras["converged"] = result.converged;
    return outcome;
}

inline TaskOutcome task_build_library(const ExperimentConfig& config) {
    const RotationLibrary library =
        build_rotation_library(config.num_qubits, config.depth, config.tolerance,
                               config.optimizer, config.seed, config.working_cutoff);
    const auto library_path = resolve_library_path(config, config.num_qubits, true);
    save_library(library, library_path);

    std::vector<std::vector<std::string>> rows;
    json losses = json::object();
    for (const auto& [key, entry] : library.entries()) {
        const std::string name = rotation_kind_name(entry.kind) + "_" + std::to_string(entry.qubit);
        rows.push_back({std::to_string(entry.qubit), rotation_kind_name(entry.kind),
                        std::to_string(config.depth), format_double(entry.loss),
                        entry.within_tolerance ? "1" : "0", std::to_string(entry.restarts_used)});
        losses[name] = entry.loss;
    }
    write_csv(config.out, {"qubit", "kind", "depth", "loss", "within_tolerance", "restarts_used"},
              rows);

    TaskOutcome outcome;
    outcome.outputs.push_back(config.out);
    outcome.outputs.push_back(library_path);
    outcome.extras["library"] = {{"path", library_path.string()}, {"losses", losses}};
    outcome.tolerance_ok = library.all_within_tolerance();
    if (!outcome.tolerance_ok)
        std::cerr << "warning: some library entries missed the tolerance "
                  << format_double(config.tolerance) << "\n";
    return outcome;
}

inline TaskOutcome run_subspace_task(const ExperimentConfig& config, bool qumode) {
    const HamiltonianFile file = resolve_hamiltonian(config);
    const EvalMode mode = parse_mode(config.mode);
    if (qumode && mode == EvalMode::sampled)
        throw ConfigError("sampled mode is not available for variational tasks");

    TaskOutcome outcome;
    OptimizerConfig optimizer = config.optimizer;
    optimizer.seed = config.seed;

    RunResult result;
    SubspaceObjective objective(file.hamiltonian, config.num_states, weights_from(config));
    if (qumode) {
        std::optional<RotationLibrary> library;
        if (mode == EvalMode::rotation)
            library.emplace(load_library_checked(config, file.hamiltonian.num_qubits(),
                                                 outcome.extras));
        result = qss_vqe(objective, parse_ansatz(config.ansatz, config.depth),
                         library ? &*library : nullptr, optimizer, mode);
    } else {
        if (mode != EvalMode::exact)
            throw ConfigError("qubit-ssvqe runs on a statevector simulator; use exact mode");
        AnsatzSpec spec = parse_ansatz("qubit_two_local", config.depth);
        result = qubit_ssvqe(objective, spec, optimizer);
        outcome.extras["entangler"] = "cx-chain";
    }

    const Spectrum spectrum = exact_spectrum(file.hamiltonian);
    const std::vector<double> exact = rank_paired_exact(result.energies, spectrum.eigenvalues);
    std::vector<std::vector<std::string>> rows;
    for (int n = 0; n < config.num_states; ++n) {
        const auto i = static_cast<std::size_t>(n);
        rows.push_back({std::to_string(objective.initial_states[i]),
                        format_double(objective.weights(n)), format_double(result.energies[i]),
                        format_double(exact[i]),
                        format_double(std::abs(result.energies[i] - exact[i]))});
    }
    write_csv(config.out, {"state", "weight", "energy", "exact", "abs_error"}, rows);
    outcome.outputs.push_back(config.out);
    outcome.extras.update(run_result_extras(result));
    outcome.extras["metadata"] = file.metadata;
    return outcome;
}

inline std::vector<double> scan_energies(const QubitHamiltonian& h, double alpha,
                                         const std::vector<int>& states, EvalMode mode,
                                         const RotationLibrary* library, long long shots,
                                         std::uint64_t seed) {
    if (mode == EvalMode::exact) return displaced_ansatz_energies(h, alpha, states);
    const FockSpace space(h.dimension());
    const Matrix d = displacement_gate(alpha, space);
    std::vector<double> energies;
    std::size_t index = 0;
    for (int n : states) {
        EvalOptions options;
        options.mode = mode;
        options.shots = shots;
        options.seed = derive_seed(seed, index++);
        energies.push_back(hamiltonian_expectation(d.col(n), h, library, options));
    }
    return energies;
}

inline TaskOutcome task_displaced_scan(const ExperimentConfig& config) {
    const HamiltonianFile file = resolve_hamiltonian(config);
    const EvalMode mode = parse_mode(config.mode);
    TaskOutcome outcome;
    std::optional<RotationLibrary> library;
    if (mode != EvalMode::exact)
        library.emplace(load_library_checked(config, file.hamiltonian.num_qubits(),
                                             outcome.extras));
    if (mode == EvalMode::sampled && config.shots <= 0)
        throw ConfigError("sampled mode requires positive shots");

    const std::vector<double> energies =
        scan_energies(file.hamiltonian, config.alpha, config.states, mode,
                      library ? &*library : nullptr, config.shots, config.seed);
    const Spectrum spectrum = exact_spectrum(file.hamiltonian);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < config.states.size(); ++i) {
        const double exact = spectrum.eigenvalues(config.states[i]);
        const double rel = std::abs(exact) > 1e-12
                               ? std::abs(energies[i] - exact) / std::abs(exact)
                               : std::abs(energies[i] - exact);
        rows.push_back({std::to_string(config.states[i]), format_double(energies[i]),
                        format_double(exact), format_double(rel)});
    }
    write_csv(config.out, {"n", "energy", "exact", "rel_error"}, rows);
    outcome.outputs.push_back(config.out);
    outcome.extras["alpha"] = config.alpha;
    return outcome;
}

inline TaskOutcome task_sweep(const ExperimentConfig& config) {
    TaskOutcome outcome;
    if (config.sweep_task == "displaced-scan") {
        if (config.alphas.empty()) throw ConfigError("sweep over displaced-scan needs alphas");
        const EvalMode mode = parse_mode(config.mode);
        std::optional<RotationLibrary> library;
        if (mode != EvalMode::exact)
            library.emplace(load_library_checked(config, config.num_qubits, outcome.extras));
        std::vector<std::vector<std::string>> rows;
        for (std::size_t point = 0; point < config.alphas.size(); ++point) {
            const double alpha = config.alphas[point];
            ExperimentConfig local = config;
            local.alpha = alpha;
            const HamiltonianFile file = resolve_hamiltonian(local);
            const std::vector<double> energies =
                scan_energies(file.hamiltonian, alpha, config.states, mode,
                              library ? &*library : nullptr, config.shots,
                              derive_seed(config.seed, point));
            const Spectrum spectrum = exact_spectrum(file.hamiltonian);
            for (std::size_t i = 0; i < config.states.size(); ++i) {
                const double exact = spectrum.eigenvalues(config.states[i]);
                const double rel = std::abs(exact) > 1e-12
                                       ? std::abs(energies[i] - exact) / std::abs(exact)
                                       : std::abs(energies[i] - exact);
                rows.push_back({format_double(alpha), std::to_string(config.states[i]),
                                format_double(energies[i]), format_double(exact),
                                format_double(rel)});
            }
        }
        write_csv(config.out, {"alpha", "n", "energy", "exact", "rel_error"}, rows);
        outcome.outputs.push_back(config.out);
        return outcome;
    }

    if (config.sweep_task != "qss-vqe" && config.sweep_task != "qubit-ssvqe")
        throw ConfigError("sweep_task must be displaced-scan, qss-vqe or qubit-ssvqe");
    const bool qumode = config.sweep_task == "qss-vqe";

    struct Point {
        std::string label;
        ExperimentConfig config;
    };
    std::vector<Point> points;
    if (!config.hamiltonians.empty()) {
        for (std::size_t i = 0; i < config.hamiltonians.size(); ++i) {
            ExperimentConfig local = config;
            local.builtin = false;
            local.hamiltonian = config.hamiltonians[i];
            points.push_back({"", std::move(local)});
        }
    } else if (config.builtin && !config.alphas.empty()) {
        for (double alpha : config.alphas) {
            ExperimentConfig local = config;
            local.alpha = alpha;
            points.push_back({format_double(alpha), std::move(local)});
        }
    } else {
        throw ConfigError("sweep needs hamiltonians (files) or builtin with alphas");
    }

    std::vector<std::vector<std::string>> rows;
    for (std::size_t point = 0; point < points.size(); ++point) {
        ExperimentConfig& local = points[point].config;
        local.seed = derive_seed(config.seed, point);
        const HamiltonianFile file = resolve_hamiltonian(local);
        EvalMode mode = parse_mode(local.mode);
        OptimizerConfig optimizer = local.optimizer;
        optimizer.seed = local.seed;
        SubspaceObjective objective(file.hamiltonian, local.num_states, weights_from(local));

        RunResult result;
        if (qumode) {
            std::optional<RotationLibrary> library;
            if (mode == EvalMode::rotation)
                library.emplace(load_library_checked(local, file.hamiltonian.num_qubits(),
                                                     outcome.extras));
            result = qss_vqe(objective, parse_ansatz(local.ansatz, local.depth),
                             library ? &*library : nullptr, optimizer, mode);
        } else {
            result = qubit_ssvqe(objective, parse_ansatz("qubit_two_local", local.depth),
                                 optimizer);
        }

        std::string label = points[point].label;
        if (label.empty()) {
            if (file.metadata.contains("bond_length"))
                label = format_double(file.metadata["bond_length"].get<double>());
            else
                label = std::to_string(point);
        }
        std::vector<double> sorted = result.energies;
        std::sort(sorted.begin(), sorted.end());
        std::vector<std::string> row{label};
        for (double e : sorted) row.push_back(format_double(e));
        row.push_back(format_double(result.delta.value_or(0.0)));
        rows.push_back(std::move(row));
    }

    std::vector<std::string> columns{config.hamiltonians.empty() ? "alpha" : "R"};
    for (int n = 0; n < config.num_states; ++n) columns.push_back("E" + std::to_string(n));
    columns.push_back("delta");
    write_csv(config.out, columns, rows);
    outcome.outputs.push_back(config.out);
    return outcome;
}

inline void emit_error(const std::string& error_class, const std::string& message) {
    std::cerr << json{{"error_class", error_class}, {"message", message}}.dump() << "\n";
}

} // namespace detail

// Executes the configured task; writes the CSV and a manifest sufficient to
// re-run the experiment bit-identically. Returns a process exit code.
inline int run(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    try {
        detail::TaskOutcome outcome;
        if (config.task == "spectrum") outcome = detail::task_spectrum(config);
        else if (config.task == "validate") outcome = detail::task_validate(config);
        else if (config.task == "synthesize") outcome = detail::task_synthesize(config);
        else if (config.task == "build-library") outcome = detail::task_build_library(config);
        else if (config.task == "qss-vqe") outcome = detail::run_subspace_task(config, true);
        else if (config.task == "qubit-ssvqe") outcome = detail::run_subspace_task(config, false);
        else if (config.task == "displaced-scan") outcome = detail::task_displaced_scan(config);
        else if (config.task == "sweep") outcome = detail::task_sweep(config);
        else throw ConfigError("unknown task \"" + config.task + "\"");

        if (!outcome.outputs.empty()) {
            const double wall =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            json manifest = {{"artifact", "qssvqe"},
                             {"version", artifact_version},
                             {"task", config.task},
                             {"config", json(config)},
                             {"seed", config.seed},
                             {"wall_time_seconds", wall},
                             {"outputs", json::array()}};
            for (const auto& path : outcome.outputs)
                manifest["outputs"].push_back(path.string());
            manifest.update(outcome.extras);
            std::filesystem::path manifest_path = outcome.outputs.front();
            manifest_path.replace_extension(".manifest.json");
            write_manifest(manifest_path, manifest);
        }
        return static_cast<int>(outcome.tolerance_ok ? ExitCode::ok : ExitCode::tolerance_failure);
    } catch (const ConfigError& e) {
        detail::emit_error("config", e.what());
        return static_cast<int>(ExitCode::config_error);
    } catch (const IngestionError& e) {
        detail::emit_error("ingestion", e.what());
        return static_cast<int>(ExitCode::ingestion_error);
    } catch (const std::invalid_argument& e) {
        detail::emit_error("config", e.what());
        return static_cast<int>(ExitCode::config_error);
    } catch (const std::out_of_range& e) {
        detail::emit_error("config", e.what());
        return static_cast<int>(ExitCode::config_error);
    } catch (const std::exception& e) {
        detail::emit_error("internal", e.what());
        return static_cast<int>(ExitCode::internal_error);
    }
}

} // namespace qss
