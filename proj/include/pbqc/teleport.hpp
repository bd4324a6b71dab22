#pragma once

#include <array>
#include <optional>
#include <vector>

#include "pbqc/pauli.hpp"
#include "pbqc/rng.hpp"
#include "pbqc/state.hpp"

namespace pbqc {

struct TeleportResult {
    PauliOperator correction;  // on the full register, acting on the teleported qubit
    StateVector receiver_state;
    int epr_consumed = 0;
};

/// Teleports `qubit` of `state` through a fresh Bell pair. The register layout
/// is kept: the receiver's qubit takes the sender's index, and it holds
/// correction·|psi>.
TeleportResult teleport(const StateVector& state, std::size_t qubit, RngStream& rng);

/// Teleports every qubit of the register (one Bell pair each); the combined
/// correction is the product of the per-qubit ones.
TeleportResult teleport_all(const StateVector& state, RngStream& rng);

struct TeleportGateResult {
    StateVector state;    // U|psi> after the inverse of r1 has been applied
    PauliOperator r;      // teleportation correction R
    ComplexMatrix r1;     // U R U^dagger, a Clifford for U in C_3
    int epr_consumed = 0;
};

/// Teleports |psi> and applies U to the received qubits, leaving U R|psi> =
/// R1 U|psi>; R1 is checked to be Clifford and then undone.
TeleportGateResult teleport_gate(const StateVector& state, const ComplexMatrix& u, RngStream& rng);

/// Square-root-measurement port-based teleportation of one qubit over N ports.
/// Register order for the POVM: input qubit first, then Alice's port halves.
class PbtChannel {
public:
    static constexpr std::size_t kMinPorts = 2;
    static constexpr std::size_t kMaxPorts = 8;

    std::size_t num_ports() const noexcept { return num_ports_; }
    /// N port elements followed by the completion element.
    const std::vector<ComplexMatrix>& povm_elements() const noexcept { return povm_; }
    /// Unnormalised state of Bob's port for outcome i given input rho:
    /// its trace is the outcome probability. Index N is the completion outcome.
    ComplexMatrix branch(std::size_t outcome, const ComplexMatrix& rho) const;

private:
    friend PbtChannel build_pbt_channel(std::size_t num_ports);
    std::size_t num_ports_ = 0;
    std::vector<ComplexMatrix> povm_;
    // maps_[i][2a+b] = branch(i, |a><b|)
    std::vector<std::array<ComplexMatrix, 4>> maps_;
};

PbtChannel build_pbt_channel(std::size_t num_ports);

struct PbtResult {
    std::optional<std::size_t> port;  // empty on the completion outcome
    DensityMatrix receiver;           // I/2 on failure
    int epr_consumed = 0;
};

PbtResult pbt_teleport(const StateVector& input, const PbtChannel& channel, RngStream& rng);
PbtResult pbt_teleport(const DensityMatrix& input, const PbtChannel& channel, RngStream& rng);

struct FidelityPoint {
    std::size_t num_ports = 0;
    double mean = 0.0;
    double std_error = 0.0;
    double failure_rate = 0.0;
};

/// Mean fidelity of PBT over Haar-random inputs for each port count.
std::vector<FidelityPoint> pbt_fidelity_curve(const std::vector<std::size_t>& ports, std::size_t trials,
                                              RngStream& rng);

}  // namespace pbqc
