// linalg.hpp — dense complex linear-algebra aliases and small shared helpers

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace qss {

using Complex    = std::complex<double>;
using Matrix     = Eigen::MatrixXcd;
using Vector     = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline double max_abs(const Matrix& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

// ||U^dag U - I||_max
inline double unitarity_residual(const Matrix& u) {
    if (u.rows() != u.cols()) throw std::invalid_argument("unitarity_residual: matrix not square");
    Matrix r = u.adjoint() * u;
    r.diagonal().array() -= 1.0;
    return max_abs(r);
}

inline bool is_unitary(const Matrix& u, double tol = 1e-10) {
    return unitarity_residual(u) <= tol;
}

inline bool is_hermitian_matrix(const Matrix& a, double tol = 1e-12) {
    return max_abs(a - a.adjoint()) <= tol;
}

// ------------------------------- seeding ------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Stream seed for sub-task `stream` of a run keyed by `master`. Independent
// streams keep restarts/terms/sweep-points schedule-independent.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 1));
}

// Canonical 53-bit uniform in [0, 1); bit-reproducible for a fixed engine state.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

} // namespace qss
