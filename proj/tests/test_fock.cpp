// tests/test_fock.cpp
#include "qss/fock.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace qss;
using Catch::Matchers::WithinAbs;

namespace {

StateVector random_state(int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    StateVector psi(dim);
    for (int n = 0; n < dim; ++n)
        psi(n) = Complex(uniform_in(rng, -1, 1), uniform_in(rng, -1, 1));
    return psi / psi.norm();
}

SnapDispCircuit random_circuit(int cutoff, int depth, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    SnapDispCircuit c(cutoff);
    for (int l = 0; l < depth; ++l) {
        RealVector thetas(cutoff);
        for (int n = 0; n < cutoff; ++n) thetas(n) = uniform_in(rng, -M_PI, M_PI);
        c.add_layer(uniform_in(rng, -1, 1), thetas);
    }
    return c;
}

} // namespace

TEST_CASE("Fock space validation") {
    REQUIRE_THROWS_AS(FockSpace(1), std::invalid_argument);
    REQUIRE_THROWS_AS(FockSpace(0), std::invalid_argument);
    REQUIRE(FockSpace(4).num_qubits() == 2);
    REQUIRE(FockSpace(16).num_qubits() == 4);
    REQUIRE_FALSE(FockSpace(6).is_qubit_encodable());
    REQUIRE_THROWS_AS(FockSpace(6).num_qubits(), std::invalid_argument);
}

TEST_CASE("annihilation and creation matrices") {
    SECTION("L=2 single superdiagonal entry") {
        const Matrix a = annihilation_matrix(FockSpace(2)).matrix;
        Matrix expected(2, 2);
        expected << 0, 1, 0, 0;
        REQUIRE(max_abs(a - expected) == 0.0);
    }
    SECTION("L=4 superdiagonal sqrt(n)") {
        const Matrix a = annihilation_matrix(FockSpace(4)).matrix;
        REQUIRE_THAT(a(0, 1).real(), WithinAbs(1.0, 1e-15));
        REQUIRE_THAT(a(1, 2).real(), WithinAbs(std::sqrt(2.0), 1e-15));
        REQUIRE_THAT(a(2, 3).real(), WithinAbs(std::sqrt(3.0), 1e-15));
        REQUIRE_THAT(a.cwiseAbs().sum(), WithinAbs(1 + std::sqrt(2.0) + std::sqrt(3.0), 1e-14));
    }
    SECTION("creation is the conjugate transpose") {
        const FockSpace space(4);
        const Matrix a = annihilation_matrix(space).matrix;
        const Matrix adag = creation_matrix(space).matrix;
        REQUIRE(max_abs(adag - a.adjoint()) == 0.0);
        REQUIRE_THAT(adag(3, 2).real(), WithinAbs(std::sqrt(3.0), 1e-15));
    }
    SECTION("number, position, momentum") {
        const FockSpace space(8);
        const Matrix a = annihilation_matrix(space).matrix;
        REQUIRE(max_abs(number_matrix(space).matrix - a.adjoint() * a) < 1e-13);
        REQUIRE(is_hermitian_matrix(position_matrix(space).matrix, 1e-12));
        REQUIRE(is_hermitian_matrix(momentum_matrix(space).matrix, 1e-12));
    }
}

TEST_CASE("displacement gate") {
    SECTION("alpha=0 is the identity") {
        const Matrix d = displacement_gate(0.0, FockSpace(8));
        REQUIRE(max_abs(d - Matrix::Identity(8, 8)) < 1e-14);
    }
    SECTION("coherent state photon distribution is Poisson") {
        const double alpha = 0.5;
        const Matrix d = displacement_gate(alpha, FockSpace(16));
        for (int n = 0; n < 16; ++n) {
            const double poisson =
                std::exp(-alpha * alpha) * std::pow(alpha * alpha, n) / std::tgamma(n + 1.0);
            REQUIRE_THAT(std::norm(d(n, 0)), WithinAbs(poisson, 1e-8));
        }
    }
    SECTION("inverse pair composes to identity") {
        const FockSpace space(8);
        const Matrix prod = displacement_gate(0.3, space) * displacement_gate(-0.3, space);
        REQUIRE(max_abs(prod - Matrix::Identity(8, 8)) < 1e-9);
    }
    SECTION("unitarity") {
        for (double alpha : {0.1, 0.5, 1.2})
            REQUIRE(unitarity_residual(displacement_gate(alpha, FockSpace(16))) < 1e-10);
    }
    SECTION("cutoff leak predicate") {
        REQUIRE(displacement_exceeds_cutoff(3.0, FockSpace(8)));
        REQUIRE_FALSE(displacement_exceeds_cutoff(0.5, FockSpace(16)));
    }
    SECTION("non-finite alpha rejected") {
        REQUIRE_THROWS_AS(displacement_gate(std::nan(""), FockSpace(4)), std::invalid_argument);
    }
    SECTION("factory agrees with the matrix exponential") {
        const FockSpace space(16);
        const DisplacementFactory factory(space);
        for (double alpha : {-0.7, 0.05, 0.9})
            REQUIRE(max_abs(factory(alpha) - displacement_gate(alpha, space)) < 1e-13);
    }
}

TEST_CASE("SNAP gate") {
    SECTION("zero phases give the identity") {
        const Matrix s = snap_gate(RealVector::Zero(4), FockSpace(4));
        REQUIRE(max_abs(s - Matrix::Identity(4, 4)) == 0.0);
    }
    SECTION("(0, pi) encodes a Z") {
        RealVector thetas(2);
        thetas << 0.0, M_PI;
        const Matrix s = snap_gate(thetas, FockSpace(2));
        REQUIRE_THAT(s(0, 0).real(), WithinAbs(1.0, 1e-15));
        REQUIRE_THAT(s(1, 1).real(), WithinAbs(-1.0, 1e-15));
        REQUIRE_THAT(s(1, 1).imag(), WithinAbs(0.0, 1e-15));
    }
    SECTION("unit-modulus diagonal for random phases") {
        std::mt19937_64 rng(11);
        RealVector thetas(8);
        for (int n = 0; n < 8; ++n) thetas(n) = uniform_in(rng, -M_PI, M_PI);
        const Matrix s = snap_gate(thetas, FockSpace(8));
        REQUIRE_THAT(std::abs(s.determinant()), WithinAbs(1.0, 1e-12));
        for (int n = 0; n < 8; ++n) REQUIRE_THAT(std::abs(s(n, n)), WithinAbs(1.0, 1e-14));
        REQUIRE(unitarity_residual(s) < 1e-12);
    }
    SECTION("length mismatch") {
        REQUIRE_THROWS_AS(snap_gate(RealVector::Zero(3), FockSpace(4)), std::invalid_argument);
    }
}

TEST_CASE("circuit application") {
    SECTION("depth zero leaves the state unchanged") {
        const SnapDispCircuit c(4);
        const StateVector psi = random_state(4, 21);
        REQUIRE(max_abs(apply_circuit(c, psi) - psi) == 0.0);
        REQUIRE(max_abs(circuit_matrix(c) - Matrix::Identity(4, 4)) == 0.0);
    }
    SECTION("identity layer fixes a Fock state") {
        SnapDispCircuit c(8);
        c.add_layer(0.0, RealVector::Zero(8));
        const StateVector psi = fock_state(FockSpace(8), 3);
        REQUIRE(max_abs(apply_circuit(c, psi) - psi) < 1e-14);
    }
    SECTION("matches the dense gate-product oracle") {
        const FockSpace space(8);
        for (std::uint64_t seed : {3u, 4u, 5u}) {
            const SnapDispCircuit c = random_circuit(8, 3, seed);
            Matrix oracle = Matrix::Identity(8, 8);
            for (const auto& layer : c.layers)
                oracle = snap_gate(layer.thetas, space) * displacement_gate(layer.alpha, space) *
                         oracle;
            const StateVector psi = random_state(8, seed + 100);
            REQUIRE(max_abs(apply_circuit(c, psi) - oracle * psi) < 1e-12);
            REQUIRE(max_abs(circuit_matrix(c) - oracle) < 1e-12);
        }
    }
    SECTION("depth-1 pure SNAP is diagonal") {
        SnapDispCircuit c(4);
        RealVector thetas(4);
        thetas << 0.3, -0.1, 0.9, 2.0;
        c.add_layer(0.0, thetas);
        const Matrix u = circuit_matrix(c);
        REQUIRE(max_abs(u - snap_gate(thetas, FockSpace(4))) < 1e-14);
    }
    SECTION("unitarity and norm preservation at depth 16") {
        const SnapDispCircuit c = random_circuit(16, 16, 7);
        REQUIRE(unitarity_residual(circuit_matrix(c)) < 1e-10);
        StateVector psi = random_state(16, 8);
        for (const auto& layer : c.layers) {
            SnapDispCircuit one(16);
            one.add_layer(layer.alpha, layer.thetas);
            psi = apply_circuit(one, psi);
            REQUIRE_THAT(psi.norm(), WithinAbs(1.0, 1e-10));
        }
    }
    SECTION("dimension mismatch") {
        const SnapDispCircuit c(4);
        REQUIRE_THROWS_AS(apply_circuit(c, random_state(8, 1)), std::invalid_argument);
    }
}

TEST_CASE("displacement composition and truncation convergence") {
    const double a = 0.5, b = 0.45;
    SECTION("collinear real displacements compose exactly at any cutoff") {
        // real amplitudes share one generator, so the group law survives
        // truncation up to rounding
        for (int cutoff : {4, 8, 16, 32}) {
            const FockSpace space(cutoff);
            const double residual =
                max_abs(displacement_gate(a, space) * displacement_gate(b, space) -
                        displacement_gate(a + b, space));
            REQUIRE(residual < 1e-12);
        }
    }
    SECTION("truncated gates converge blockwise as the cutoff doubles") {
        const Matrix reference = displacement_gate(a + b, FockSpace(64));
        double previous = 1e300;
        for (int cutoff : {4, 8, 16}) {
            const double residual = max_abs(displacement_gate(a + b, FockSpace(cutoff)) -
                                            reference.topLeftCorner(cutoff, cutoff));
            REQUIRE(residual < previous);
            previous = residual;
        }
    }
}

TEST_CASE("photon distribution") {
    SECTION("Fock state") {
        const RealVector p = photon_distribution(fock_state(FockSpace(4), 2));
        REQUIRE_THAT(p(2), WithinAbs(1.0, 1e-15));
        REQUIRE_THAT(p.sum(), WithinAbs(1.0, 1e-15));
    }
    SECTION("equal superposition") {
        StateVector psi = StateVector::Zero(4);
        psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
        const RealVector p = photon_distribution(psi);
        REQUIRE_THAT(p(0), WithinAbs(0.5, 1e-15));
        REQUIRE_THAT(p(3), WithinAbs(0.5, 1e-15));
        REQUIRE_THAT(p(1) + p(2), WithinAbs(0.0, 1e-15));
    }
    SECTION("sampled mode concentrates on the exact law") {
        const StateVector psi = random_state(16, 33);
        const RealVector exact = photon_distribution(psi);
        const RealVector sampled = photon_distribution(psi, 1000000, 99);
        REQUIRE(0.5 * (exact - sampled).cwiseAbs().sum() < 5e-3);
    }
    SECTION("sampling is deterministic per seed") {
        const StateVector psi = random_state(8, 34);
        const RealVector first = photon_distribution(psi, 1000, 5);
        const RealVector again = photon_distribution(psi, 1000, 5);
        const RealVector other = photon_distribution(psi, 1000, 6);
        REQUIRE((first - again).cwiseAbs().maxCoeff() == 0.0);
        REQUIRE((first - other).cwiseAbs().maxCoeff() > 0.0);
    }
    SECTION("zero shots rejected") {
        REQUIRE_THROWS_AS(photon_distribution(fock_state(FockSpace(4), 0), 0, 1),
                          std::invalid_argument);
    }
}

TEST_CASE("SNAP commutes with photon readout") {
    std::mt19937_64 rng(55);
    const FockSpace space(8);
    const StateVector psi = random_state(8, 56);
    RealVector thetas(8);
    for (int n = 0; n < 8; ++n) thetas(n) = uniform_in(rng, -M_PI, M_PI);
    const StateVector snapped = snap_gate(thetas, space) * psi;
    REQUIRE((photon_distribution(psi) - photon_distribution(snapped)).cwiseAbs().maxCoeff() <
            1e-12);
}
