#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pbqc/costs.hpp"
#include "pbqc/layout.hpp"
#include "pbqc/protocols.hpp"
#include "pbqc/sk.hpp"
#include "pbqc/teleport.hpp"

namespace pbqc {

// ---- Pauli-frame engine for teleportation-chain attacks ----
//
// The payload is psi = (A_d ··· A_1)^dagger |x>. Alice teleports it to Bob,
// who applies the undo steps A_1, A_2, ... in order. Bob's register always
// holds F·phi with phi the ideally undone state; teleporting multiplies F by
// the Pauli outcome, a step A maps F to A F A^dagger, and a round trip (Bob
// teleports back, Alice teleports again, Bob applies (σ_B F)^dagger) lowers F
// by one hierarchy level. A step declared at level k therefore costs
// max(k - 2, 0) round trips, after which F is a Pauli.

struct FrameStep {
    ComplexMatrix gate;  // undo gate on the whole register
    int level = 3;       // declared hierarchy level of the gate
};

struct FrameTranscript {
    std::vector<PauliOperator> sigma_a;  // Alice's teleportation outcomes in order
    std::vector<PauliOperator> sigma_b;  // Bob's
};

/// Teleportation hops for one register: 1 + Σ 2·max(k_j - 2, 0).
std::uint64_t frame_hops(const std::vector<FrameStep>& steps);

/// Final frame F given the outcomes. When `frames` is set it receives F after
/// every step and every round trip.
ComplexMatrix replay_frame(const std::vector<FrameStep>& steps, const FrameTranscript& transcript,
                           std::size_t num_qubits, std::vector<ComplexMatrix>* frames = nullptr);

/// x = z XOR x-bits(F); empty when F is not a Pauli up to phase.
std::optional<Bits> decode_frame(const Bits& z, const ComplexMatrix& frame);

struct FrameRun {
    FrameTranscript transcript;
    Bits z;                  // Bob's final computational measurement
    StateVector final_state; // Bob's register just before measuring
    std::uint64_t hops = 0;
};

/// Realized-path simulation: teleportation outcomes are drawn uniformly (they
/// are independent of the state), the register evolves through every hop.
FrameRun run_frame(const StateVector& psi, const std::vector<FrameStep>& steps, RngStream& lab);

struct FullTreeResult {
    bool correct = false;
    double fidelity = 0.0;  // realized Bob slot vs the frame engine's F|x>
    int epr_used = 0;
};

/// Full simulation of the k = 3, n = 1 tree: 13 qubits, explicit Bell
/// measurements, Bob acting on all four second-round slots.
FullTreeResult full_tree_trial(const ComplexMatrix& u, int x, RngStream& rng);

// ---- strategies ----

std::unique_ptr<CoalitionStrategy> make_pauli_attack();
std::unique_ptr<CoalitionStrategy> make_clifford_attack();
std::unique_ptr<CoalitionStrategy> make_tree_attack(int k);
std::unique_ptr<CoalitionStrategy> make_layout_attack(CircuitLayout layout);
/// One entry applies to every hop; otherwise 2t - 1 entries are required.
std::unique_ptr<CoalitionStrategy> make_pbt_attack(std::vector<int> ports);
std::unique_ptr<CoalitionStrategy> make_sk_attack(int depth, int l0 = 16);
std::unique_ptr<CoalitionStrategy> make_random_basis_attack();
/// Declares ∅ on the least confident qubits, using the game's eta_loss.
std::unique_ptr<CoalitionStrategy> make_lossy_confidence_attack();
std::unique_ptr<CoalitionStrategy> make_breidbart_attack();
std::unique_ptr<CoalitionStrategy> make_random_guess_attack();

/// Parses a stable strategy identifier: pauli, clifford, tree:k,
/// layout:<file>, pbt:m1,m2,..., sk:depth, random-basis, lossy-confidence,
/// breidbart, random-guess.
std::unique_ptr<CoalitionStrategy> make_strategy(const std::string& id);

}  // namespace pbqc
