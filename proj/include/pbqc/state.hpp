#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pbqc/rng.hpp"
#include "pbqc/types.hpp"

namespace pbqc {

/// Normalised pure state of n qubits (2^n amplitudes, qubit 0 most significant).
///
/// A zero-qubit state is the scalar 1; it appears after every qubit of a
/// register has been measured out.
class StateVector {
public:
    static constexpr std::size_t kMaxQubits = 20;

    static StateVector basis(std::size_t num_qubits, std::uint64_t index);
    static StateVector basis(const Bits& bits);
    /// Validates norm 1 within `tol`.
    static StateVector from_amplitudes(ComplexVector amplitudes, double tol = kExactTol);
    /// Rescales to unit norm; throws on a zero vector.
    static StateVector normalized(ComplexVector amplitudes);

    std::size_t num_qubits() const noexcept { return num_qubits_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
    const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
    Complex amplitude(std::uint64_t index) const { return amplitudes_(static_cast<Eigen::Index>(index)); }
    double norm() const { return amplitudes_.norm(); }

    /// this ⊗ other; the qubits of `this` come first.
    StateVector tensor(const StateVector& other) const;
    Complex inner(const StateVector& other) const { return amplitudes_.dot(other.amplitudes_); }

private:
    StateVector(std::size_t num_qubits, ComplexVector amplitudes);

    std::size_t num_qubits_ = 0;
    ComplexVector amplitudes_;
};

/// Hermitian, unit-trace, positive semidefinite matrix on n qubits.
class DensityMatrix {
public:
    static DensityMatrix pure(const StateVector& state);
    static DensityMatrix maximally_mixed(std::size_t num_qubits);
    /// Validates hermiticity, trace and positivity.
    static DensityMatrix from_matrix(ComplexMatrix matrix, double tol = kExactTol);
    /// Skips validation; the caller guarantees the invariants.
    static DensityMatrix unchecked(ComplexMatrix matrix);

    std::size_t num_qubits() const noexcept { return num_qubits_; }
    const ComplexMatrix& matrix() const noexcept { return matrix_; }
    double trace() const { return matrix_.trace().real(); }

private:
    DensityMatrix(std::size_t num_qubits, ComplexMatrix matrix);

    std::size_t num_qubits_ = 0;
    ComplexMatrix matrix_;
};

struct MeasurementResult {
    Bits outcome;
    StateVector post;
};

/// Bell-basis outcome expressed as the teleportation correction X^x Z^z it
/// leaves on the receiver's half.
struct BellOutcome {
    std::uint8_t x = 0;
    std::uint8_t z = 0;

    friend bool operator==(const BellOutcome&, const BellOutcome&) = default;
};

struct BellMeasurementResult {
    BellOutcome outcome;
    /// Remaining register with the two measured qubits removed.
    StateVector post;
};

StateVector apply_unitary(const StateVector& state, const ComplexMatrix& unitary,
                          std::span<const std::size_t> targets);
StateVector apply_unitary(const StateVector& state, const ComplexMatrix& unitary,
                          std::initializer_list<std::size_t> targets);

/// Born-rule measurement of `targets` (in order) in the computational basis.
/// The post-measurement state keeps all qubits, collapsed.
MeasurementResult measure_computational(const StateVector& state, std::span<const std::size_t> targets,
                                        RngStream& rng);
MeasurementResult measure_all(const StateVector& state, RngStream& rng);

/// Probability of finding `qubit` in `bit`.
double qubit_probability(const StateVector& state, std::size_t qubit, int bit);

/// Postselects `qubit` on `bit` and removes it from the register.
/// Throws ProtocolError if the outcome has (numerically) zero probability.
StateVector project_out(const StateVector& state, std::size_t qubit, int bit);

/// Moves qubit `from` to position `to`, shifting the qubits in between.
StateVector move_qubit(const StateVector& state, std::size_t from, std::size_t to);

StateVector bell_pair();

/// Measures (q1, q2) in the Bell basis and removes them from the register.
BellMeasurementResult bell_measurement(const StateVector& state, std::size_t q1, std::size_t q2,
                                       RngStream& rng);

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<std::size_t> keep);

/// <psi| rho |psi>.
double fidelity(const StateVector& pure, const DensityMatrix& rho);

}  // namespace pbqc
