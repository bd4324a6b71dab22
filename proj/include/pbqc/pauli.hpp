#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pbqc/state.hpp"
#include "pbqc/types.hpp"

namespace pbqc {

/// n-qubit Pauli operator i^phase * (X^{x_0} Z^{z_0}) ⊗ ... ⊗ (X^{x_{n-1}} Z^{z_{n-1}}).
///
/// Bit masks follow the register convention (qubit q at bit n-1-q), so
/// x_mask XOR a basis index is the index the operator maps it to. Note that
/// with phase 0 the factor on a qubit with x = z = 1 is XZ = -iY.
class PauliOperator {
public:
    static constexpr std::size_t kMaxQubits = 32;

    explicit PauliOperator(std::size_t num_qubits = 1);
    PauliOperator(std::size_t num_qubits, std::uint64_t x_mask, std::uint64_t z_mask, int phase = 0);

    /// Hermitian Pauli with the given masks (Y factors carry their own i).
    static PauliOperator hermitian(std::size_t num_qubits, std::uint64_t x_mask, std::uint64_t z_mask);
    /// Parses strings like "XIZ", "-iY", "+X".
    static PauliOperator parse(std::string_view text);
    /// X^x Z^z on `qubit` of an n-qubit register.
    static PauliOperator from_bell(const BellOutcome& outcome, std::size_t num_qubits = 1, std::size_t qubit = 0);

    std::size_t num_qubits() const noexcept { return num_qubits_; }
    std::uint64_t x_mask() const noexcept { return x_; }
    std::uint64_t z_mask() const noexcept { return z_; }
    int phase() const noexcept { return phase_; }
    bool is_identity() const noexcept { return x_ == 0 && z_ == 0 && phase_ == 0; }

    ComplexMatrix matrix() const;
    PauliOperator inverse() const;
    PauliOperator tensor(const PauliOperator& other) const;
    /// Same operator with the phase reset to make it Hermitian.
    PauliOperator without_phase() const { return hermitian(num_qubits_, x_, z_); }
    bool commutes_with(const PauliOperator& other) const;
    /// Restriction to one qubit (phase dropped to the Hermitian form).
    PauliOperator on_qubit(std::size_t qubit) const;

    /// e.g. "+XZ", "-iY".
    std::string to_string() const;

    friend bool operator==(const PauliOperator&, const PauliOperator&) = default;

private:
    std::size_t num_qubits_;
    std::uint64_t x_ = 0;
    std::uint64_t z_ = 0;
    int phase_ = 0;
};

/// P·Q as operators (P applied after Q).
PauliOperator pauli_mul(const PauliOperator& p, const PauliOperator& q);
inline PauliOperator operator*(const PauliOperator& p, const PauliOperator& q) { return pauli_mul(p, q); }

struct BasisImage {
    Bits bits;
    Complex phase;
};

/// P|x> = phase |y> with y = x XOR x_bits(P).
BasisImage pauli_apply_to_basis(const PauliOperator& p, const Bits& x);

/// Recognises M as i^k times a Pauli string, within `tol` entrywise.
std::optional<PauliOperator> try_as_pauli(const ComplexMatrix& m, double tol = 1e-8);

/// Recognises M as an arbitrary global phase times a Hermitian Pauli.
std::optional<PauliOperator> try_as_pauli_up_to_phase(const ComplexMatrix& m, double tol = 1e-8);

/// All 4^n Hermitian Pauli strings, identity first.
std::vector<PauliOperator> all_paulis(std::size_t num_qubits);

/// Applies a Pauli to the given qubits of a register (|targets| = P's qubits).
StateVector apply_pauli(const StateVector& state, const PauliOperator& p, std::span<const std::size_t> targets);

}  // namespace pbqc
