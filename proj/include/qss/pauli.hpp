// pauli.hpp — Pauli-word / qubit-Hamiltonian algebra, Jordan-Wigner ladder
// operators, binary<->integer encoding, and the truncated-boson-to-qubit mapper

#pragma once

#include "qss/fock.hpp"
#include "qss/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qss {

// ------------------------------- Pauli words --------------------------------

// Tensor product of single-qubit Paulis, qubit 1 = leftmost letter.
class PauliWord {
public:
    explicit PauliWord(std::string letters) : letters_(std::move(letters)) {
        if (letters_.empty()) throw std::invalid_argument("PauliWord: empty word");
        for (char c : letters_)
            if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
                throw std::invalid_argument("PauliWord: invalid letter '" + std::string(1, c) + "'");
    }

    const std::string& str() const { return letters_; }
    int num_qubits() const { return static_cast<int>(letters_.size()); }

    // qubit index j is 1-based
    char letter(int j) const {
        if (j < 1 || j > num_qubits()) throw std::out_of_range("PauliWord: qubit index out of range");
        return letters_[static_cast<std::size_t>(j - 1)];
    }

    bool is_identity() const { return letters_.find_first_not_of('I') == std::string::npos; }
    bool is_diagonal() const { return letters_.find_first_of("XY") == std::string::npos; }

    // X and Y replaced by Z: the word measured after basis rotation.
    PauliWord diagonal_skeleton() const {
        std::string s = letters_;
        for (char& c : s)
            if (c == 'X' || c == 'Y') c = 'Z';
        return PauliWord(s);
    }

    friend bool operator==(const PauliWord& a, const PauliWord& b) { return a.letters_ == b.letters_; }
    friend auto operator<=>(const PauliWord& a, const PauliWord& b) { return a.letters_ <=> b.letters_; }

private:
    std::string letters_;
};

inline Matrix pauli_letter_matrix(char c) {
    Matrix m(2, 2);
    switch (c) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("pauli_letter_matrix: invalid letter");
    }
    return m;
}

// Ordered tensor product, qubit 1 as the leftmost factor.
inline Matrix pauli_matrix(const PauliWord& word) {
    Matrix m = pauli_letter_matrix(word.letter(1));
    for (int j = 2; j <= word.num_qubits(); ++j)
        m = kron(m, pauli_letter_matrix(word.letter(j)));
    return m;
}

// ---------------------------- qubit Hamiltonians ----------------------------

struct PauliTerm {
    Complex coeff;
    PauliWord word;
};

// Weighted sum of Pauli words in canonical form: terms sorted lexicographically
// by word, duplicates merged, coefficients below 1e-14 dropped.
class QubitHamiltonian {
public:
    static constexpr double coeff_prune_tol = 1e-14;

    explicit QubitHamiltonian(int num_qubits) : num_qubits_(num_qubits) {
        if (num_qubits < 1) throw std::invalid_argument("QubitHamiltonian: need at least one qubit");
    }

    QubitHamiltonian(int num_qubits, const std::vector<PauliTerm>& terms)
        : QubitHamiltonian(num_qubits) {
        std::map<std::string, Complex> merged;
        for (const auto& t : terms) {
            if (t.word.num_qubits() != num_qubits_)
                throw std::invalid_argument("QubitHamiltonian: mixed word lengths");
            merged[t.word.str()] += t.coeff;
        }
        for (const auto& [word, coeff] : merged)
            if (std::abs(coeff) > coeff_prune_tol)
                terms_.push_back({coeff, PauliWord(word)});
    }

    int num_qubits() const { return num_qubits_; }
    int dimension() const { return 1 << num_qubits_; }
    const std::vector<PauliTerm>& terms() const { return terms_; }

    Complex coefficient(const PauliWord& word) const {
        for (const auto& t : terms_)
            if (t.word == word) return t.coeff;
        return Complex(0, 0);
    }

    // For a merged canonical form, Hermiticity is equivalent to real coefficients.
    bool is_hermitian(double tol = 1e-12) const {
        for (const auto& t : terms_)
            if (std::abs(t.coeff.imag()) > tol) return false;
        return true;
    }

private:
    int num_qubits_;
    std::vector<PauliTerm> terms_;
};

inline Matrix hamiltonian_matrix(const QubitHamiltonian& h) {
    Matrix m = Matrix::Zero(h.dimension(), h.dimension());
    for (const auto& t : h.terms())
        m += t.coeff * pauli_matrix(t.word);
    return m;
}

// ------------------------------- Jordan-Wigner ------------------------------

enum class LadderKind { create, annihilate };

// Fermionic ladder operator on orbital p of M:
//   a^dag_p -> 1/2 (X_p - i Y_p) (x)_{q<p} Z_q
//   a_p     -> 1/2 (X_p + i Y_p) (x)_{q<p} Z_q
inline QubitHamiltonian jordan_wigner(int orbital_p, int num_orbitals, LadderKind kind) {
    if (orbital_p < 1 || orbital_p > num_orbitals)
        throw std::out_of_range("jordan_wigner: orbital index out of range");
    std::string base(static_cast<std::size_t>(num_orbitals), 'I');
    for (int q = 1; q < orbital_p; ++q) base[static_cast<std::size_t>(q - 1)] = 'Z';
    std::string xw = base, yw = base;
    xw[static_cast<std::size_t>(orbital_p - 1)] = 'X';
    yw[static_cast<std::size_t>(orbital_p - 1)] = 'Y';
    const Complex iy = (kind == LadderKind::create) ? Complex(0, -0.5) : Complex(0, 0.5);
    return QubitHamiltonian(num_orbitals,
                            {{Complex(0.5, 0), PauliWord(xw)}, {iy, PauliWord(yw)}});
}

// --------------------------- binary <-> integer map -------------------------

// n = 2^{N_Q-1} q_1 + ... + 2^0 q_{N_Q}; qubit 1 is the most significant bit.
inline std::vector<int> index_to_bits(int n, int num_qubits) {
    if (num_qubits < 1) throw std::invalid_argument("index_to_bits: need at least one qubit");
    if (n < 0 || n >= (1 << num_qubits)) throw std::out_of_range("index_to_bits: index out of range");
    std::vector<int> bits(static_cast<std::size_t>(num_qubits));
    for (int j = 0; j < num_qubits; ++j)
        bits[static_cast<std::size_t>(j)] = (n >> (num_qubits - 1 - j)) & 1;
    return bits;
}

inline int bits_to_index(const std::vector<int>& bits) {
    if (bits.empty()) throw std::invalid_argument("bits_to_index: empty bitstring");
    int n = 0;
    for (int b : bits) {
        if (b != 0 && b != 1) throw std::invalid_argument("bits_to_index: bits must be 0 or 1");
        n = (n << 1) | b;
    }
    return n;
}

// Bijection between N_Q-qubit bitstrings and Fock indices.
struct EncodedIndexMap {
    int num_qubits;
    std::vector<int> to_bits(int n) const { return index_to_bits(n, num_qubits); }
    int to_index(const std::vector<int>& bits) const {
        if (static_cast<int>(bits.size()) != num_qubits)
            throw std::invalid_argument("EncodedIndexMap: bitstring length mismatch");
        return bits_to_index(bits);
    }
};

// --------------------------- boson -> qubit mapping -------------------------

// Expands a truncated bosonic operator (any L x L matrix built from a, a^dag,
// identity and their products/sums at L = 2^{N_Q}) into a qubit Hamiltonian.
// Each |n><m| projector factors into single-qubit projectors under the binary
// encoding; the per-qubit pieces are
//   |0><0| = (I + Z)/2,  |1><1| = (I - Z)/2,  |0><1| = (X + iY)/2,  |1><0| = (X - iY)/2
// and the product is multiplied out and merged into canonical form.
inline QubitHamiltonian truncated_boson_to_qubit(const Matrix& op, int num_qubits) {
    if (num_qubits < 1)
        throw std::invalid_argument("truncated_boson_to_qubit: need at least one qubit");
    const int L = 1 << num_qubits;
    if (op.rows() != L || op.cols() != L)
        throw std::invalid_argument(
            "truncated_boson_to_qubit: operator dimension must equal 2^num_qubits");

    std::map<std::string, Complex> merged;
    // per-qubit expansion: letter/weight pairs for each (row bit, col bit)
    const auto factor = [](int br, int bc, int pick) -> std::pair<char, Complex> {
        if (br == 0 && bc == 0) return pick ? std::pair{'Z', Complex(0.5, 0)} : std::pair{'I', Complex(0.5, 0)};
        if (br == 1 && bc == 1) return pick ? std::pair{'Z', Complex(-0.5, 0)} : std::pair{'I', Complex(0.5, 0)};
        if (br == 0 && bc == 1) return pick ? std::pair{'Y', Complex(0, 0.5)} : std::pair{'X', Complex(0.5, 0)};
        return pick ? std::pair{'Y', Complex(0, -0.5)} : std::pair{'X', Complex(0.5, 0)};
    };

    for (int r = 0; r < L; ++r) {
        const auto rbits = index_to_bits(r, num_qubits);
        for (int c = 0; c < L; ++c) {
            const Complex entry = op(r, c);
            if (entry == Complex(0, 0)) continue;
            const auto cbits = index_to_bits(c, num_qubits);
            for (int mask = 0; mask < (1 << num_qubits); ++mask) {
                std::string word(static_cast<std::size_t>(num_qubits), 'I');
                Complex weight = entry;
                for (int j = 0; j < num_qubits; ++j) {
                    const auto [letter, w] =
                        factor(rbits[static_cast<std::size_t>(j)],
                               cbits[static_cast<std::size_t>(j)], (mask >> j) & 1);
                    word[static_cast<std::size_t>(j)] = letter;
                    weight *= w;
                }
                merged[word] += weight;
            }
        }
    }

    std::vector<PauliTerm> terms;
    terms.reserve(merged.size());
    for (const auto& [word, coeff] : merged)
        terms.push_back({coeff, PauliWord(word)});
    return QubitHamiltonian(num_qubits, terms);
}

// ------------------------- displaced harmonic oscillator --------------------

// H = p^2/2 + (x - sqrt(2) alpha)^2 / 2 with quadratures truncated first.
inline Matrix displaced_qho_matrix(double alpha, const FockSpace& space) {
    const Matrix x = position_matrix(space).matrix;
    const Matrix p = momentum_matrix(space).matrix;
    const Matrix shifted =
        x - std::sqrt(2.0) * alpha * Matrix::Identity(space.cutoff, space.cutoff);
    return 0.5 * (p * p) + 0.5 * (shifted * shifted);
}

inline QubitHamiltonian displaced_qho_hamiltonian(double alpha, int num_qubits) {
    const FockSpace space(1 << num_qubits);
    return truncated_boson_to_qubit(displaced_qho_matrix(alpha, space), num_qubits);
}

// ------------------------------ exact spectrum ------------------------------

struct Spectrum {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // columns match eigenvalues
};

inline Spectrum exact_spectrum(const QubitHamiltonian& h) {
    if (!h.is_hermitian())
        throw std::invalid_argument("exact_spectrum: Hamiltonian is not Hermitian");
    const Matrix m = hamiltonian_matrix(h);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("exact_spectrum: eigensolver failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

} // namespace qss
