// tests/test_measurement.cpp
#include "qss/measurement.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <random>
#include <string>
#include <vector>

using namespace qss;
using Catch::Matchers::WithinAbs;

namespace {

OptimizerConfig synthesis_config() {
    OptimizerConfig cfg;
    cfg.max_iters = 4000;
    cfg.grad_tol = 1e-9;
    cfg.obj_tol = 1e-17;
    cfg.restarts = 3;
    return cfg;
}

const RotationLibrary& library_for(int num_qubits) {
    static const RotationLibrary one = build_rotation_library(1, 4, 1e-10, synthesis_config(), 101);
    static const RotationLibrary two = build_rotation_library(2, 4, 1e-10, synthesis_config(), 102);
    static const RotationLibrary three =
        build_rotation_library(3, 8, 1e-10, synthesis_config(), 103);
    switch (num_qubits) {
        case 1: return one;
        case 2: return two;
        default: return three;
    }
}

StateVector random_state(int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    StateVector psi(dim);
    for (int n = 0; n < dim; ++n)
        psi(n) = Complex(uniform_in(rng, -1, 1), uniform_in(rng, -1, 1));
    return psi / psi.norm();
}

std::vector<std::string> all_words(int num_qubits) {
    const char letters[] = {'I', 'X', 'Y', 'Z'};
    std::vector<std::string> words;
    const int total = 1;
    int count = 1;
    for (int i = 0; i < num_qubits; ++i) count *= 4;
    for (int code = total; code < count; ++code) {  // skip the all-identity word 0
        std::string word;
        int rest = code;
        for (int q = 0; q < num_qubits; ++q) {
            word.push_back(letters[rest % 4]);
            rest /= 4;
        }
        words.push_back(word);
    }
    return words;
}

} // namespace

TEST_CASE("measurement distribution validation") {
    RealVector good(2);
    good << 0.25, 0.75;
    REQUIRE_NOTHROW(MeasurementDistribution(good));
    RealVector negative(2);
    negative << -0.1, 1.1;
    REQUIRE_THROWS_AS(MeasurementDistribution(negative), std::invalid_argument);
    RealVector unnormalized(2);
    unnormalized << 0.4, 0.4;
    REQUIRE_THROWS_AS(MeasurementDistribution(unnormalized), std::invalid_argument);
}

TEST_CASE("parity expectation") {
    SECTION("Fock state parities") {
        const MeasurementDistribution dist(photon_distribution(fock_state(FockSpace(4), 3)));
        REQUIRE_THAT(parity_expectation(dist, PauliWord("ZZ")), WithinAbs(1.0, 1e-15));
        const MeasurementDistribution two(photon_distribution(fock_state(FockSpace(4), 2)));
        REQUIRE_THAT(parity_expectation(two, PauliWord("IZ")), WithinAbs(1.0, 1e-15));
        REQUIRE_THAT(parity_expectation(two, PauliWord("ZI")), WithinAbs(-1.0, 1e-15));
    }
    SECTION("uniform distribution balances every non-identity parity") {
        const MeasurementDistribution uniform(RealVector::Constant(8, 1.0 / 8.0));
        for (const std::string& word : {"ZII", "IZI", "IIZ", "ZZI", "ZIZ", "IZZ", "ZZZ"})
            REQUIRE_THAT(parity_expectation(uniform, PauliWord(word)), WithinAbs(0.0, 1e-15));
    }
    SECTION("popcount parity on every Fock state") {
        for (int n = 0; n < 8; ++n) {
            const MeasurementDistribution dist(photon_distribution(fock_state(FockSpace(8), n)));
            const double sign = std::popcount(static_cast<unsigned>(n)) % 2 ? -1.0 : 1.0;
            REQUIRE_THAT(parity_expectation(dist, PauliWord("ZZZ")), WithinAbs(sign, 1e-15));
        }
    }
    SECTION("non-diagonal words rejected") {
        const MeasurementDistribution dist(photon_distribution(fock_state(FockSpace(4), 0)));
        REQUIRE_THROWS_AS(parity_expectation(dist, PauliWord("XZ")), std::invalid_argument);
    }
}

TEST_CASE("exact Pauli expectation") {
    SECTION("diagonal words on the vacuum") {
        REQUIRE_THAT(pauli_expectation_exact(fock_state(FockSpace(8), 0), PauliWord("ZZZ")),
                     WithinAbs(1.0, 1e-15));
    }
    SECTION("plus state is an X eigenstate") {
        StateVector plus(2);
        plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
        REQUIRE_THAT(pauli_expectation_exact(plus, PauliWord("X")), WithinAbs(1.0, 1e-15));
    }
    SECTION("values stay within the operator norm") {
        std::mt19937_64 rng(9);
        const auto words = all_words(2);
        for (int trial = 0; trial < 20; ++trial) {
            const StateVector psi = random_state(4, 200 + trial);
            const auto& word = words[rng() % words.size()];
            const double value = pauli_expectation_exact(psi, PauliWord(word));
            REQUIRE(std::abs(value) <= 1.0 + 1e-12);
        }
    }
    SECTION("dimension mismatch") {
        REQUIRE_THROWS_AS(pauli_expectation_exact(random_state(4, 1), PauliWord("Z")),
                          std::invalid_argument);
    }
}

TEST_CASE("rotation-protocol expectation matches the dense oracle") {
    SECTION("identity word") {
        REQUIRE_THAT(pauli_expectation_via_rotation(random_state(4, 7), PauliWord("II"),
                                                    library_for(2)),
                     WithinAbs(1.0, 1e-12));
    }
    SECTION("XX on random two-qubit states") {
        const auto& lib = library_for(2);
        for (int trial = 0; trial < 50; ++trial) {
            const StateVector psi = random_state(4, 300 + trial);
            const double protocol = pauli_expectation_via_rotation(psi, PauliWord("XX"), lib);
            const double oracle = pauli_expectation_exact(psi, PauliWord("XX"));
            REQUIRE_THAT(protocol, WithinAbs(oracle, 1e-6));
        }
    }
    SECTION("X on a basis state vanishes") {
        const auto& lib = library_for(3);
        for (const std::string& word : {"XII", "IXI", "IIX"})
            REQUIRE_THAT(pauli_expectation_via_rotation(fock_state(FockSpace(8), 0),
                                                        PauliWord(word), lib),
                         WithinAbs(0.0, 1e-6));
    }
    SECTION("every non-identity word on one qubit") {
        const auto& lib = library_for(1);
        for (int trial = 0; trial < 25; ++trial) {
            const StateVector psi = random_state(2, 400 + trial);
            for (const std::string& word : {"X", "Y", "Z"})
                REQUIRE_THAT(pauli_expectation_via_rotation(psi, PauliWord(word), lib),
                             WithinAbs(pauli_expectation_exact(psi, PauliWord(word)), 1e-6));
        }
    }
    SECTION("missing library entry") {
        RotationLibrary empty(2, 4, 1e-10);
        REQUIRE_THROWS_AS(pauli_expectation_via_rotation(random_state(4, 5), PauliWord("XI"),
                                                         empty),
                          std::out_of_range);
    }
    SECTION("library register size must match the word") {
        REQUIRE_THROWS_AS(pauli_expectation_via_rotation(random_state(4, 5), PauliWord("XX"),
                                                         library_for(1)),
                          std::invalid_argument);
    }
}

TEST_CASE("Hamiltonian expectation") {
    const QubitHamiltonian qho = displaced_qho_hamiltonian(0.0, 2);
    const StateVector one = fock_state(FockSpace(4), 1);
    SECTION("identity-only terms bypass measurement") {
        const QubitHamiltonian constant(2, {{0.37, PauliWord("II")}});
        REQUIRE_THAT(hamiltonian_expectation(random_state(4, 3), constant, nullptr),
                     WithinAbs(0.37, 1e-15));
        EvalOptions rotation{EvalMode::rotation, 0, 0};
        REQUIRE_THAT(hamiltonian_expectation(random_state(4, 3), constant, &library_for(2),
                                             rotation),
                     WithinAbs(0.37, 1e-15));
    }
    SECTION("first excited level of the oscillator in every mode") {
        REQUIRE_THAT(hamiltonian_expectation(one, qho, nullptr), WithinAbs(1.5, 1e-12));
        EvalOptions rotation{EvalMode::rotation, 0, 0};
        REQUIRE_THAT(hamiltonian_expectation(one, qho, &library_for(2), rotation),
                     WithinAbs(1.5, 1e-6));
        EvalOptions sampled{EvalMode::sampled, 1000000, 42};
        REQUIRE_THAT(hamiltonian_expectation(one, qho, &library_for(2), sampled),
                     WithinAbs(1.5, 5e-3));
    }
    SECTION("rotation mode tracks exact mode across random states") {
        const QubitHamiltonian displaced = displaced_qho_hamiltonian(0.3, 2);
        double worst = 0.0;
        EvalOptions rotation{EvalMode::rotation, 0, 0};
        for (int trial = 0; trial < 100; ++trial) {
            const StateVector psi = random_state(4, 500 + trial);
            const double exact = hamiltonian_expectation(psi, displaced, nullptr);
            const double measured =
                hamiltonian_expectation(psi, displaced, &library_for(2), rotation);
            worst = std::max(worst, std::abs(exact - measured));
        }
        REQUIRE(worst < 1e-5);
    }
    SECTION("linearity over term-wise sums") {
        const QubitHamiltonian first(2, {{0.4, PauliWord("XZ")}, {-0.2, PauliWord("YI")}});
        const QubitHamiltonian second(2, {{0.1, PauliWord("XZ")}, {0.9, PauliWord("IZ")}});
        auto combined_terms = first.terms();
        for (const auto& t : second.terms()) combined_terms.push_back(t);
        const QubitHamiltonian combined(2, combined_terms);
        const StateVector psi = random_state(4, 77);
        REQUIRE_THAT(hamiltonian_expectation(psi, combined, nullptr),
                     WithinAbs(hamiltonian_expectation(psi, first, nullptr) +
                                   hamiltonian_expectation(psi, second, nullptr),
                               1e-12));
    }
    SECTION("sampled mode is deterministic per seed and scales as one over root shots") {
        const StateVector psi = random_state(4, 88);
        const QubitHamiltonian h(2, {{1.0, PauliWord("XY")}});
        EvalOptions options{EvalMode::sampled, 10000, 5};
        const double first = hamiltonian_expectation(psi, h, &library_for(2), options);
        REQUIRE(hamiltonian_expectation(psi, h, &library_for(2), options) == first);

        const double exact = hamiltonian_expectation(psi, h, nullptr);
        auto stddev = [&](long long shots) {
            double sum = 0, sumsq = 0;
            const int repeats = 24;
            for (int r = 0; r < repeats; ++r) {
                EvalOptions opt{EvalMode::sampled, shots, derive_seed(1000, r)};
                const double est = hamiltonian_expectation(psi, h, &library_for(2), opt) - exact;
                sum += est;
                sumsq += est * est;
            }
            const double mean = sum / repeats;
            return std::sqrt(sumsq / repeats - mean * mean);
        };
        const double ratio = stddev(10000) / stddev(1000000);
        REQUIRE(ratio > 5.0);
        REQUIRE(ratio < 20.0);
    }
    SECTION("sampled mode requires shots and a library") {
        EvalOptions bad{EvalMode::sampled, 0, 0};
        REQUIRE_THROWS_AS(hamiltonian_expectation(one, qho, &library_for(2), bad),
                          std::invalid_argument);
        EvalOptions rotation{EvalMode::rotation, 0, 0};
        REQUIRE_THROWS_AS(hamiltonian_expectation(one, qho, nullptr, rotation),
                          std::invalid_argument);
    }
}
