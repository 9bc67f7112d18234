// qssvqe — command-line front end: Hamiltonian ingestion, gate synthesis,
// rotation-library builds, spectra, variational runs and sweeps

#include "qss/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

// --config is resolved before flag parsing so command-line flags override the
// config file field-by-field.
qss::ExperimentConfig preload_config(int argc, char** argv) {
    qss::ExperimentConfig config;
    for (int i = 1; i + 1 < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" || arg == "-c") {
            std::ifstream in(argv[i + 1]);
            if (!in) throw qss::ConfigError(std::string("cannot open config file: ") + argv[i + 1]);
            qss::json parsed = qss::json::parse(in, nullptr, false);
            if (parsed.is_discarded())
                throw qss::ConfigError(std::string("config file is not valid JSON: ") + argv[i + 1]);
            config = parsed.get<qss::ExperimentConfig>();
        }
    }
    return config;
}

void add_source_options(CLI::App* cmd, qss::ExperimentConfig& config) {
    cmd->add_option("--hamiltonian", config.hamiltonian, "Hamiltonian file (JSONL)");
    cmd->add_flag("--builtin", config.builtin, "use the builtin displaced-oscillator Hamiltonian");
    cmd->add_option("--alpha", config.alpha, "displacement parameter for the builtin model");
    cmd->add_option("--num-qubits", config.num_qubits, "qubit count for the builtin model");
}

void add_vqe_options(CLI::App* cmd, qss::ExperimentConfig& config) {
    cmd->add_option("--depth", config.depth, "ansatz circuit depth / layer count");
    cmd->add_option("--num-states", config.num_states, "number of subspace states");
    cmd->add_option("--weights", config.weights, "subspace weights (default 1.0 0.9 0.8 ...)");
    cmd->add_option("--restarts", config.optimizer.restarts, "optimizer restarts");
    cmd->add_option("--max-iters", config.optimizer.max_iters, "optimizer iteration cap");
}

} // namespace

int main(int argc, char** argv) {
    qss::ExperimentConfig config;
    try {
        config = preload_config(argc, argv);
    } catch (const std::exception& e) {
        qss::detail::emit_error("config", e.what());
        return static_cast<int>(qss::ExitCode::config_error);
    }

    CLI::App app{"qumode subspace eigensolver toolkit"};
    app.require_subcommand(0, 1);
    std::string config_path;
    app.add_option("-c,--config", config_path, "JSON config file mirroring the run record");
    app.add_option("--seed", config.seed, "master seed");
    app.add_option("--out", config.out, "output CSV path");
    app.add_option("--mode", config.mode, "expectation mode: exact, rotation or sampled");
    app.add_option("--shots", config.shots, "shots per term in sampled mode");
    app.add_option("--library", config.library,
                   "rotation library path (falls back to $QSSVQE_LIBRARY_DIR)");

    auto* synth = app.add_subcommand("synthesize", "compile one basis-rotation gate");
    synth->add_option("--target-kind", config.target_kind, "H or W");
    synth->add_option("--qubit", config.target_qubit, "target qubit index (1-based)");
    synth->add_option("--num-qubits", config.num_qubits, "register size");
    synth->add_option("--depth", config.depth, "circuit depth");
    synth->add_option("--restarts", config.optimizer.restarts, "optimizer restarts");
    synth->add_option("--max-iters", config.optimizer.max_iters, "optimizer iteration cap");
    synth->add_option("--working-cutoff", config.working_cutoff,
                      "internal Fock cutoff (0 = target size)");

    auto* build = app.add_subcommand("build-library", "compile H_j / W_j for a register");
    build->add_option("--num-qubits", config.num_qubits, "register size");
    build->add_option("--depth", config.depth, "circuit depth");
    build->add_option("--tolerance", config.tolerance, "per-entry loss tolerance");
    build->add_option("--restarts", config.optimizer.restarts, "base optimizer restarts");
    build->add_option("--max-iters", config.optimizer.max_iters, "optimizer iteration cap");
    build->add_option("--working-cutoff", config.working_cutoff,
                      "internal Fock cutoff (0 = target size)");

    auto* spectrum = app.add_subcommand("spectrum", "exact eigenvalues of a Hamiltonian");
    add_source_options(spectrum, config);

    auto* qssvqe = app.add_subcommand("qss-vqe", "qumode subspace VQE");
    add_source_options(qssvqe, config);
    add_vqe_options(qssvqe, config);
    qssvqe->add_option("--ansatz", config.ansatz, "snap_displacement or single_displacement");

    auto* qubit = app.add_subcommand("qubit-ssvqe", "qubit-baseline subspace VQE (TwoLocal)");
    add_source_options(qubit, config);
    add_vqe_options(qubit, config);

    auto* scan = app.add_subcommand("displaced-scan", "displaced-Fock trial energies at one alpha");
    add_source_options(scan, config);
    scan->add_option("--states", config.states, "Fock indices to scan");

    auto* sweep = app.add_subcommand("sweep", "run a task over an alpha grid or Hamiltonian files");
    add_source_options(sweep, config);
    add_vqe_options(sweep, config);
    sweep->add_option("--sweep-task", config.sweep_task,
                      "displaced-scan, qss-vqe or qubit-ssvqe");
    sweep->add_option("--alphas", config.alphas, "alpha grid");
    sweep->add_option("--hamiltonians", config.hamiltonians, "Hamiltonian files to sweep");
    sweep->add_option("--states", config.states, "Fock indices for displaced-scan sweeps");
    sweep->add_option("--ansatz", config.ansatz, "ansatz for qss-vqe sweeps");

    auto* validate = app.add_subcommand("validate", "check a Hamiltonian file");
    validate->add_option("--hamiltonian", config.hamiltonian, "Hamiltonian file (JSONL)")
        ->required();

    for (CLI::App* cmd : {synth, build, spectrum, qssvqe, qubit, scan, sweep, validate})
        cmd->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    for (CLI::App* cmd : {synth, build, spectrum, qssvqe, qubit, scan, sweep, validate})
        if (cmd->parsed()) config.task = cmd->get_name();
    if (config.task.empty()) {
        std::cerr << app.help() << "\n";
        return static_cast<int>(qss::ExitCode::config_error);
    }
    return qss::run(config);
}
