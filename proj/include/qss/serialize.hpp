// serialize.hpp — file formats: line-oriented JSON for Hamiltonians and
// rotation libraries, CSV emission, run manifests

#pragma once

#include "qss/pauli.hpp"
#include "qss/synthesis.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qss {

using json = nlohmann::json;

// Ingestion failures: unparseable or invalid input files.
struct IngestionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid run configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr const char* hamiltonian_format = "pauli-hamiltonian";
inline constexpr const char* library_format = "rotation-library";
inline constexpr int format_version = 1;

namespace detail {

// No partial output on failure: stage to a sibling .tmp, rename into place.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out << content;
        if (!out.good()) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::vector<std::string> read_nonempty_lines(const std::filesystem::path& path,
                                                    std::vector<int>* line_numbers) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open file: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        lines.push_back(line);
        if (line_numbers) line_numbers->push_back(number);
    }
    return lines;
}

inline json parse_line(const std::filesystem::path& path, const std::string& line, int number) {
    json parsed = json::parse(line, nullptr, false);
    if (parsed.is_discarded())
        throw IngestionError(path.string() + ":" + std::to_string(number) + ": invalid JSON");
    if (!parsed.is_object())
        throw IngestionError(path.string() + ":" + std::to_string(number) + ": expected an object");
    return parsed;
}

} // namespace detail

// ---------------------------- Hamiltonian files ------------------------------
//
// Line 1: {"format":"pauli-hamiltonian","version":1,"num_qubits":N,"metadata":{...}}
// Then one term per line: {"word":"XY..","coeff":g}

struct HamiltonianFile {
    QubitHamiltonian hamiltonian;
    json metadata;
};

inline void save_hamiltonian(const QubitHamiltonian& h, const json& metadata,
                             const std::filesystem::path& path) {
    std::ostringstream out;
    json header = {{"format", hamiltonian_format},
                   {"version", format_version},
                   {"num_qubits", h.num_qubits()},
                   {"metadata", metadata.is_null() ? json::object() : metadata}};
    out << header.dump() << "\n";
    for (const auto& term : h.terms()) {
        if (std::abs(term.coeff.imag()) > 1e-12)
            throw std::invalid_argument("save_hamiltonian: complex coefficients not representable");
        out << json{{"word", term.word.str()}, {"coeff", term.coeff.real()}}.dump() << "\n";
    }
    detail::atomic_write(path, out.str());
}

inline HamiltonianFile load_hamiltonian(const std::filesystem::path& path) {
    std::vector<int> numbers;
    const auto lines = detail::read_nonempty_lines(path, &numbers);
    if (lines.empty()) throw IngestionError(path.string() + ": missing header line");

    const json header = detail::parse_line(path, lines[0], numbers[0]);
    if (!header.contains("format") || header["format"] != hamiltonian_format)
        throw IngestionError(path.string() + ":" + std::to_string(numbers[0]) +
                             ": header must declare format \"" + hamiltonian_format + "\"");
    if (!header.contains("num_qubits") || !header["num_qubits"].is_number_integer())
        throw IngestionError(path.string() + ":" + std::to_string(numbers[0]) +
                             ": header field num_qubits missing or not an integer");
    const int num_qubits = header["num_qubits"].get<int>();
    if (num_qubits < 1)
        throw IngestionError(path.string() + ":" + std::to_string(numbers[0]) +
                             ": num_qubits must be positive");

    std::vector<PauliTerm> terms;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string where = path.string() + ":" + std::to_string(numbers[i]);
        const json entry = detail::parse_line(path, lines[i], numbers[i]);
        if (!entry.contains("word") || !entry["word"].is_string())
            throw IngestionError(where + ": field word missing or not a string");
        if (!entry.contains("coeff") || !entry["coeff"].is_number())
            throw IngestionError(where + ": field coeff missing or not a number");
        const std::string word = entry["word"].get<std::string>();
        const double coeff = entry["coeff"].get<double>();
        if (!std::isfinite(coeff)) throw IngestionError(where + ": coefficient not finite");
        if (static_cast<int>(word.size()) != num_qubits)
            throw IngestionError(where + ": word length " + std::to_string(word.size()) +
                                 " does not match num_qubits " + std::to_string(num_qubits));
        try {
            terms.push_back({Complex(coeff, 0.0), PauliWord(word)});
        } catch (const std::invalid_argument& e) {
            throw IngestionError(where + ": " + e.what());
        }
    }
    return {QubitHamiltonian(num_qubits, terms),
            header.contains("metadata") ? header["metadata"] : json::object()};
}

// ------------------------------ library files --------------------------------
//
// Line 1: {"format":"rotation-library","version":1,"num_qubits":N,"depth":d,"tolerance":tol}
// Then one entry per line:
//   {"qubit":j,"kind":"H"|"W","cutoff":L,"loss":c,"within_tolerance":b,
//    "restarts_used":r,"alphas":[...],"thetas":[[...],...]}

inline void save_library(const RotationLibrary& library, const std::filesystem::path& path) {
    std::ostringstream out;
    out << json{{"format", library_format},
                {"version", format_version},
                {"num_qubits", library.num_qubits()},
                {"depth", library.depth()},
                {"tolerance", library.tolerance()}}
               .dump()
        << "\n";
    for (const auto& [key, entry] : library.entries()) {
        std::vector<double> alphas;
        std::vector<std::vector<double>> thetas;
        for (const auto& layer : entry.circuit.layers) {
            alphas.push_back(layer.alpha);
            thetas.emplace_back(layer.thetas.data(), layer.thetas.data() + layer.thetas.size());
        }
        out << json{{"qubit", entry.qubit},
                    {"kind", rotation_kind_name(entry.kind)},
                    {"cutoff", entry.circuit.cutoff},
                    {"loss", entry.loss},
                    {"within_tolerance", entry.within_tolerance},
                    {"restarts_used", entry.restarts_used},
                    {"alphas", alphas},
                    {"thetas", thetas}}
                   .dump()
            << "\n";
    }
    detail::atomic_write(path, out.str());
}

struct LibraryLoadReport {
    RotationLibrary library;
    std::vector<std::string> entry_errors;  // faults are isolated per entry

    bool clean() const { return entry_errors.empty(); }
};

// Loads a library and re-verifies every recorded loss against a rebuilt
// target; an entry whose recomputed loss differs by more than 1e-9 (e.g. a
// tampered parameter) is rejected while the remaining entries stay usable.
inline LibraryLoadReport load_library(const std::filesystem::path& path) {
    std::vector<int> numbers;
    const auto lines = detail::read_nonempty_lines(path, &numbers);
    if (lines.empty()) throw IngestionError(path.string() + ": missing header line");

    const json header = detail::parse_line(path, lines[0], numbers[0]);
    if (!header.contains("format") || header["format"] != library_format)
        throw IngestionError(path.string() + ":" + std::to_string(numbers[0]) +
                             ": header must declare format \"" + library_format + "\"");
    if (header.value("version", 0) != format_version)
        throw IngestionError(path.string() + ":" + std::to_string(numbers[0]) +
                             ": unsupported version");
    for (const char* field : {"num_qubits", "depth", "tolerance"})
        if (!header.contains(field))
            throw IngestionError(path.string() + ":" + std::to_string(numbers[0]) +
                                 ": header field " + field + " missing");

    LibraryLoadReport report{RotationLibrary(header["num_qubits"].get<int>(),
                                             header["depth"].get<int>(),
                                             header["tolerance"].get<double>()),
                             {}};

    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string where = path.string() + ":" + std::to_string(numbers[i]);
        try {
            const json entry = detail::parse_line(path, lines[i], numbers[i]);
            for (const char* field : {"qubit", "kind", "cutoff", "loss", "alphas", "thetas"})
                if (!entry.contains(field))
                    throw IngestionError(where + ": field " + field + " missing");

            LibraryEntry loaded;
            loaded.qubit = entry["qubit"].get<int>();
            const std::string kind = entry["kind"].get<std::string>();
            if (kind != "H" && kind != "W")
                throw IngestionError(where + ": kind must be \"H\" or \"W\"");
            loaded.kind = kind == "H" ? RotationKind::hadamard : RotationKind::hadamard_sdg;
            loaded.loss = entry["loss"].get<double>();
            loaded.within_tolerance = entry.value("within_tolerance", false);
            loaded.restarts_used = entry.value("restarts_used", 0);

            const auto alphas = entry["alphas"].get<std::vector<double>>();
            const auto thetas = entry["thetas"].get<std::vector<std::vector<double>>>();
            if (alphas.size() != thetas.size())
                throw IngestionError(where + ": alphas/thetas layer count mismatch");
            const int cutoff = entry["cutoff"].get<int>();
            loaded.circuit = SnapDispCircuit(cutoff);
            for (std::size_t l = 0; l < alphas.size(); ++l) {
                if (static_cast<int>(thetas[l].size()) != cutoff)
                    throw IngestionError(where + ": theta vector length does not match cutoff");
                RealVector t(cutoff);
                for (int n = 0; n < cutoff; ++n) t(n) = thetas[l][static_cast<std::size_t>(n)];
                loaded.circuit.add_layer(alphas[l], std::move(t));
            }

            const SynthesisTarget target =
                rotation_target(loaded.qubit, loaded.kind, report.library.num_qubits());
            const double recomputed = synthesis_loss(loaded.circuit, target);
            if (std::abs(recomputed - loaded.loss) > 1e-9)
                throw IngestionError(where + ": recorded loss does not re-verify (stored " +
                                     std::to_string(loaded.loss) + ", recomputed " +
                                     std::to_string(recomputed) + ")");
            report.library.insert(std::move(loaded));
        } catch (const std::exception& e) {
            report.entry_errors.emplace_back(e.what());
        }
    }
    return report;
}

// ---------------------------------- CSV --------------------------------------

inline std::string format_double(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

inline void write_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream out;
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << (c ? "," : "") << columns[c];
    out << "\n";
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw std::invalid_argument("write_csv: row width does not match header");
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << row[c];
        out << "\n";
    }
    detail::atomic_write(path, out.str());
}

inline void write_manifest(const std::filesystem::path& path, const json& manifest) {
    detail::atomic_write(path, manifest.dump(2) + "\n");
}

} // namespace qss
