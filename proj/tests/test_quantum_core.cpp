#include <cmath>
#include <numbers>

#include <Eigen/SVD>
#include <gtest/gtest.h>

#include "pbqc/error.hpp"
#include "pbqc/gates.hpp"
#include "pbqc/linalg.hpp"
#include "pbqc/state.hpp"

using namespace pbqc;

namespace {

StateVector random_state(std::size_t n, RngStream& rng) {
    ComplexVector v(static_cast<Eigen::Index>(std::uint64_t{1} << n));
    for (auto& a : v) a = rng.complex_normal();
    return StateVector::normalized(v);
}

double spectral_norm(const ComplexMatrix& m) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(0);
}

// Brute-force oracle: scan phi on a fine grid, then refine by golden section.
double brute_force_phase_distance(const ComplexMatrix& u, const ComplexMatrix& v) {
    auto f = [&](double phi) { return spectral_norm(u - std::polar(1.0, phi) * v); };
    double best_phi = 0.0, best = f(0.0);
    const int steps = 2000;
    for (int i = 1; i < steps; ++i) {
        const double phi = 2 * std::numbers::pi * i / steps;
        const double val = f(phi);
        if (val < best) best = val, best_phi = phi;
    }
    double lo = best_phi - 2 * std::numbers::pi / steps, hi = best_phi + 2 * std::numbers::pi / steps;
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 80; ++it) {
        const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
        if (f(a) < f(b)) hi = b; else lo = a;
    }
    return std::min(best, f(0.5 * (lo + hi)));
}

}  // namespace

TEST(HaarRandomUnitary, IsUnitary) {
    RngStream rng(1);
    for (std::size_t dim : {1u, 2u, 3u, 4u, 8u}) {
        const auto u = haar_random_unitary(dim, rng);
        EXPECT_TRUE(is_unitary(u, 1e-10)) << dim;
    }
}

TEST(HaarRandomUnitary, DimOneIsUnitModulus) {
    RngStream rng(2);
    const auto u = haar_random_unitary(1, rng);
    EXPECT_NEAR(std::abs(u(0, 0)), 1.0, 1e-12);
}

TEST(HaarRandomUnitary, ZeroDimensionRejected) {
    RngStream rng(3);
    EXPECT_THROW(haar_random_unitary(0, rng), DimensionError);
}

TEST(HaarRandomUnitary, SecondMomentMatchesSphereOracle) {
    RngStream rng(4), oracle_rng(5);
    const int samples = 10000;
    double haar = 0.0, sphere = 0.0;
    for (int i = 0; i < samples; ++i) {
        haar += std::norm(haar_random_unitary(2, rng)(0, 0));
        // First column of a Haar unitary is uniform on the unit sphere of C^2.
        const Complex a = oracle_rng.complex_normal(), b = oracle_rng.complex_normal();
        sphere += std::norm(a) / (std::norm(a) + std::norm(b));
    }
    haar /= samples;
    sphere /= samples;
    EXPECT_NEAR(haar, 0.5, 0.02);
    EXPECT_NEAR(haar, sphere, 0.02);
}

TEST(ApplyUnitary, FlipsAndIdentity) {
    const auto one = apply_unitary(StateVector::basis(1, 0), gates::X(), {0});
    EXPECT_NEAR(std::abs(one.amplitude(1)), 1.0, 1e-12);

    RngStream rng(6);
    const auto psi = random_state(1, rng);
    const auto same = apply_unitary(psi, gates::identity(1), {0});
    EXPECT_LT((same.amplitudes() - psi.amplitudes()).norm(), 1e-12);
}

TEST(ApplyUnitary, HadamardThenCnotMakesBellState) {
    auto s = apply_unitary(StateVector::basis(2, 0), gates::H(), {0});
    s = apply_unitary(s, gates::CNOT(), {0, 1});
    // Hand product: CNOT (H ⊗ I) |00> = (|00> + |11>)/sqrt2.
    const double r = 1 / std::sqrt(2.0);
    EXPECT_NEAR(s.amplitude(0).real(), r, 1e-12);
    EXPECT_NEAR(std::abs(s.amplitude(1)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(s.amplitude(2)), 0.0, 1e-12);
    EXPECT_NEAR(s.amplitude(3).real(), r, 1e-12);
}

TEST(ApplyUnitary, QubitZeroIsMostSignificant) {
    const auto s = apply_unitary(StateVector::basis(3, 0), gates::X(), {0});
    EXPECT_NEAR(std::abs(s.amplitude(4)), 1.0, 1e-12);
    const auto t = apply_unitary(StateVector::basis(3, 0), gates::CNOT(), {2, 0});
    EXPECT_NEAR(std::abs(t.amplitude(0)), 1.0, 1e-12);
    const auto u = apply_unitary(StateVector::basis(3, 1), gates::CNOT(), {2, 0});
    EXPECT_NEAR(std::abs(u.amplitude(5)), 1.0, 1e-12);
}

TEST(ApplyUnitary, Errors) {
    const auto s = StateVector::basis(2, 0);
    EXPECT_THROW(apply_unitary(s, gates::CNOT(), {0}), DimensionError);
    EXPECT_THROW(apply_unitary(s, gates::CNOT(), {1, 1}), ValidationError);
    EXPECT_THROW(apply_unitary(s, gates::X(), {2}), DimensionError);
}

TEST(ApplyUnitary, LinearOnRandomThreeQubitInstances) {
    RngStream rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_state(3, rng), b = random_state(3, rng);
        const Complex ca = rng.complex_normal(), cb = rng.complex_normal();
        const auto u = haar_random_unitary(4, rng);
        const std::array<std::size_t, 2> targets{2, 0};
        const ComplexVector mix = ca * a.amplitudes() + cb * b.amplitudes();
        const double norm = mix.norm();
        const auto lhs = apply_unitary(StateVector::normalized(mix), u, targets);
        const auto ua = apply_unitary(a, u, targets), ub = apply_unitary(b, u, targets);
        const ComplexVector rhs = (ca * ua.amplitudes() + cb * ub.amplitudes()) / norm;
        EXPECT_LT((lhs.amplitudes() - rhs).norm(), 1e-10);
        EXPECT_NEAR(lhs.norm(), 1.0, 1e-10);
    }
}

TEST(Measure, DeterministicAndBornRule) {
    RngStream rng(8);
    const auto one = StateVector::basis(1, 1);
    const std::array<std::size_t, 1> q0{0};
    for (int i = 0; i < 100; ++i) EXPECT_EQ(measure_computational(one, q0, rng).outcome[0], 1);

    const auto plus = apply_unitary(StateVector::basis(1, 0), gates::H(), {0});
    const int trials = 10000;
    int ones = 0;
    for (int i = 0; i < trials; ++i) ones += measure_computational(plus, q0, rng).outcome[0];
    EXPECT_NEAR(ones / double(trials), 0.5, 0.02);
}

TEST(Measure, BornFrequenciesWithinThreeStandardErrors) {
    RngStream rng(9);
    const auto psi = random_state(2, rng);
    const int trials = 20000;
    std::array<int, 4> counts{};
    for (int i = 0; i < trials; ++i) {
        const auto r = measure_all(psi, rng);
        ++counts[bits_to_index(r.outcome)];
        ASSERT_NEAR(r.post.norm(), 1.0, 1e-10);
    }
    for (std::uint64_t k = 0; k < 4; ++k) {
        const double p = std::norm(psi.amplitude(k));
        const double se = std::sqrt(p * (1 - p) / trials);
        EXPECT_NEAR(counts[k] / double(trials), p, 3 * se + 1e-12) << k;
    }
}

TEST(Measure, BellStateCorrelations) {
    RngStream rng(10);
    const auto bell = bell_pair();
    for (int i = 0; i < 200; ++i) {
        const std::array<std::size_t, 1> q0{0}, q1{1};
        const auto first = measure_computational(bell, q0, rng);
        const auto second = measure_computational(first.post, q1, rng);
        EXPECT_EQ(first.outcome[0], second.outcome[0]);
    }
}

TEST(BellPair, Amplitudes) {
    const auto b = bell_pair();
    const double r = 1 / std::sqrt(2.0);
    EXPECT_DOUBLE_EQ(b.amplitude(0).real(), r);
    EXPECT_DOUBLE_EQ(b.amplitude(3).real(), r);
    EXPECT_EQ(b.amplitude(1), Complex(0));
    EXPECT_EQ(b.amplitude(2), Complex(0));
    EXPECT_NEAR(b.norm(), 1.0, 1e-15);
}

TEST(BellMeasurement, HalvesOfPhiPlusGiveIdentity) {
    RngStream rng(11);
    for (int i = 0; i < 100; ++i) {
        const auto r = bell_measurement(bell_pair(), 0, 1, rng);
        EXPECT_EQ(r.outcome, (BellOutcome{0, 0}));
        EXPECT_EQ(r.post.num_qubits(), 0u);
    }
    EXPECT_THROW(bell_measurement(bell_pair(), 1, 1, rng), ValidationError);
}

TEST(BellMeasurement, IdentifiesEachBellState) {
    RngStream rng(12);
    // (I ⊗ X^x Z^z)|Phi+> must be reported as (x, z).
    for (std::uint8_t x = 0; x < 2; ++x)
        for (std::uint8_t z = 0; z < 2; ++z) {
            auto s = bell_pair();
            if (z) s = apply_unitary(s, gates::Z(), {1});
            if (x) s = apply_unitary(s, gates::X(), {1});
            const auto r = bell_measurement(s, 0, 1, rng);
            EXPECT_EQ(r.outcome, (BellOutcome{x, z}));
        }
}

TEST(MoveQubit, PermutesRegister) {
    const auto s = StateVector::basis(Bits{1, 0, 0});
    const auto moved = move_qubit(s, 0, 2);
    EXPECT_NEAR(std::abs(moved.amplitude(bits_to_index(Bits{0, 0, 1}))), 1.0, 1e-12);
    const auto back = move_qubit(moved, 2, 0);
    EXPECT_NEAR(std::abs(back.amplitude(4)), 1.0, 1e-12);
}

TEST(PartialTrace, Examples) {
    const auto bell = DensityMatrix::pure(bell_pair());
    const auto half = partial_trace(bell, {0});
    EXPECT_LT(max_abs(half.matrix() - ComplexMatrix::Identity(2, 2) / 2.0), 1e-12);

    const auto all = partial_trace(bell, {0, 1});
    EXPECT_LT(max_abs(all.matrix() - bell.matrix()), 1e-15);

    const auto rho01 = DensityMatrix::pure(StateVector::basis(Bits{0, 1}));
    const auto keep0 = partial_trace(rho01, {0});
    EXPECT_NEAR(keep0.matrix()(0, 0).real(), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(keep0.matrix()(1, 1)), 0.0, 1e-15);
}

TEST(PartialTrace, PreservesTraceAndValidity) {
    RngStream rng(13);
    for (int i = 0; i < 20; ++i) {
        const auto rho = DensityMatrix::pure(random_state(4, rng));
        const auto reduced = partial_trace(rho, {3, 1});
        EXPECT_NEAR(reduced.trace(), 1.0, 1e-10);
        EXPECT_NO_THROW(DensityMatrix::from_matrix(reduced.matrix(), 1e-10));
    }
}

TEST(HermitianEigen, Examples) {
    const auto z = hermitian_eigendecomposition(gates::Z());
    EXPECT_NEAR(z.values(0), -1.0, 1e-12);
    EXPECT_NEAR(z.values(1), 1.0, 1e-12);
    const auto id = hermitian_eigendecomposition(gates::identity(1));
    EXPECT_NEAR(id.values(0), 1.0, 1e-12);
    EXPECT_NEAR(id.values(1), 1.0, 1e-12);
    EXPECT_THROW(hermitian_eigendecomposition(gates::T() + gates::X() * Complex(0, 1)), ValidationError);
}

TEST(HermitianEigen, ReconstructsRandomHermitian) {
    RngStream rng(14);
    for (int i = 0; i < 20; ++i) {
        ComplexMatrix a(16, 16);
        for (auto& v : a.reshaped()) v = rng.complex_normal();
        const ComplexMatrix h = a + a.adjoint();
        const auto eig = hermitian_eigendecomposition(h);
        const ComplexMatrix rebuilt = eig.vectors * eig.values.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
        EXPECT_LT(max_abs(h - rebuilt), 1e-8);
        EXPECT_TRUE(is_unitary(eig.vectors, 1e-10));
        for (Eigen::Index k = 1; k < eig.values.size(); ++k) EXPECT_LE(eig.values(k - 1), eig.values(k));
    }
}

TEST(PsdInverseSqrt, Examples) {
    EXPECT_LT(max_abs(psd_inverse_sqrt(gates::identity(1), 1e-12) - gates::identity(1)), 1e-12);
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 4.0;
    const auto inv = psd_inverse_sqrt(d, 1e-12);
    EXPECT_NEAR(inv(0, 0).real(), 0.5, 1e-12);
    EXPECT_NEAR(std::abs(inv(1, 1)), 0.0, 1e-12);
    ComplexMatrix neg = ComplexMatrix::Identity(2, 2);
    neg(1, 1) = -0.1;
    EXPECT_THROW(psd_inverse_sqrt(neg, 1e-12), ValidationError);
}

TEST(PsdInverseSqrt, ResidualIsSupportProjector) {
    RngStream rng(15);
    for (int i = 0; i < 10; ++i) {
        ComplexMatrix a(8, 3);  // rank 3 PSD on dimension 8
        for (auto& v : a.reshaped()) v = rng.complex_normal();
        const ComplexMatrix m = a * a.adjoint();
        const auto r = psd_inverse_sqrt(m, 1e-10);
        const ComplexMatrix proj = r * m * r;
        const auto eig = hermitian_eigendecomposition(m);
        ComplexMatrix support = ComplexMatrix::Zero(8, 8);
        for (Eigen::Index k = 0; k < 8; ++k)
            if (eig.values(k) > 1e-10) support += eig.vectors.col(k) * eig.vectors.col(k).adjoint();
        EXPECT_LT(max_abs(proj - support), 1e-8);
    }
}

TEST(PhaseInvariantDistance, Examples) {
    RngStream rng(16);
    const auto u = haar_random_unitary(2, rng);
    EXPECT_NEAR(phase_invariant_distance(u, u), 0.0, 1e-7);
    EXPECT_NEAR(phase_invariant_distance(u, std::polar(1.0, std::numbers::pi / 3) * u), 0.0, 1e-7);
    EXPECT_NEAR(phase_invariant_distance(gates::identity(1), gates::X()), std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(brute_force_phase_distance(gates::identity(1), gates::X()), std::sqrt(2.0), 1e-9);
    EXPECT_THROW(phase_invariant_distance(gates::X(), gates::CNOT()), DimensionError);
}

TEST(PhaseInvariantDistance, MatchesBruteForceAndIsSymmetric) {
    RngStream rng(17);
    for (std::size_t dim : {2u, 4u}) {
        for (int i = 0; i < 8; ++i) {
            const auto u = haar_random_unitary(dim, rng), v = haar_random_unitary(dim, rng);
            const double d = phase_invariant_distance(u, v);
            EXPECT_NEAR(d, brute_force_phase_distance(u, v), 1e-7) << dim;
            EXPECT_NEAR(d, phase_invariant_distance(v, u), 1e-10);
        }
    }
}

TEST(Fidelity, Examples) {
    RngStream rng(18);
    const auto psi = random_state(2, rng);
    EXPECT_NEAR(fidelity(psi, DensityMatrix::pure(psi)), 1.0, 1e-12);
    EXPECT_NEAR(fidelity(StateVector::basis(1, 0), DensityMatrix::pure(StateVector::basis(1, 1))), 0.0, 1e-15);
    EXPECT_NEAR(fidelity(StateVector::basis(1, 0), DensityMatrix::maximally_mixed(1)), 0.5, 1e-15);
}

TEST(RngStream, Reproducible) {
    RngStream a(42, 7), b(42, 7), c(42, 8);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        EXPECT_EQ(va, b.next_u64());
        differs |= va != c.next_u64();
    }
    EXPECT_TRUE(differs);
}

TEST(DensityMatrix, ValidationRejectsBadInput) {
    ComplexMatrix m = ComplexMatrix::Identity(2, 2);
    EXPECT_THROW(DensityMatrix::from_matrix(m), ValidationError);  // trace 2
    m(0, 1) = 0.3;
    m /= 2.0;
    EXPECT_THROW(DensityMatrix::from_matrix(m), ValidationError);  // not Hermitian
}
