#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "pbqc/costs.hpp"
#include "pbqc/layout.hpp"
#include "pbqc/rng.hpp"
#include "pbqc/state.hpp"

namespace pbqc {

enum class FamilyKind { Explicit, Identity, Pauli, Clifford, Bb84, Haar, C3, Layout };

/// Set the basis-game unitary is drawn from. Bb84 draws I or H independently
/// per qubit, so its challenges are product states.
struct UnitaryFamily {
    FamilyKind kind = FamilyKind::Haar;
    std::vector<ComplexMatrix> members;  // Explicit
    std::optional<CircuitLayout> layout; // Layout

    static UnitaryFamily named(const std::string& name);
    std::string name() const;
    bool is_product() const { return kind == FamilyKind::Bb84; }
};

struct BasisGameSpec {
    std::size_t n = 1;
    UnitaryFamily family;
    double eta = 0.0;
};

struct IPGameSpec {
    std::size_t n = 1;
    int t = 1;
    double eta_err = 0.0;
    double eta_loss = 0.0;
    bool per_qubit_unitary = false;
};

using GameSpec = std::variant<BasisGameSpec, IPGameSpec>;

void validate_spec(const GameSpec& spec);
std::size_t spec_qubits(const GameSpec& spec);

/// Quantum payload as a list of registers; qubits are numbered across
/// registers in order.
struct Payload {
    std::vector<StateVector> registers;
    std::size_t num_qubits() const;
};

struct Secret {
    Bits x;
    /// One unitary per payload register (the register's U).
    std::vector<ComplexMatrix> unitaries;
};

struct Challenge {
    Payload payload;
    /// Basis game: v0 empty; v1 holds the register unitaries, or the layer
    /// unitaries L_1..L_d for the layout family.
    /// IP game: v0 = u_1..u_t and v1 = v_1..v_t (times n, register-major, when
    /// per_qubit_unitary is set).
    std::vector<ComplexMatrix> v0_classical;
    std::vector<ComplexMatrix> v1_classical;
    Secret secret;
};

using Answer = std::vector<std::int8_t>;
inline constexpr std::int8_t kNoResult = -1;

struct Verdict {
    bool accepted = false;
    std::size_t error_count = 0;
    std::size_t loss_count = 0;
    bool answers_equal = false;
};

struct ChannelModel {
    double p_loss = 0.0;
    double p_dep = 0.0;
};

void validate_channel(const ChannelModel& channel);

struct ChannelOutput {
    Payload payload;
    Bits lost;  // one flag per qubit
};

/// Per qubit: lost with p_loss, otherwise hit by a uniformly random Pauli with p_dep.
ChannelOutput apply_channel(const Payload& payload, const ChannelModel& channel, RngStream& rng);

Challenge gen_basis_challenge(const BasisGameSpec& spec, RngStream& rng);
Challenge gen_ip_challenge(const IPGameSpec& spec, RngStream& rng);
Challenge gen_challenge(const GameSpec& spec, RngStream& rng);

/// Product u_1 v_1 ... u_t v_t for register r of an IP challenge.
ComplexMatrix ip_product(const Challenge& c, const IPGameSpec& spec, std::size_t reg);

/// Lost qubits yield a uniformly random bit.
Answer honest_prover_basis(const Challenge& challenge, const Bits& lost, RngStream& rng);
/// Lost qubits yield kNoResult.
Answer honest_prover_ip(const Challenge& challenge, const IPGameSpec& spec, const Bits& lost, RngStream& rng);

Verdict verify_basis(const Bits& x, const Answer& alice, const Answer& bob, double eta);
Verdict verify_ip(const Bits& x, const Answer& alice, const Answer& bob, double eta_err, double eta_loss);
Verdict verify(const GameSpec& spec, const Bits& x, const Answer& alice, const Answer& bob);

class StateBank {
public:
    std::string issue(const IPGameSpec& spec, RngStream& rng);
    Challenge redeem(const std::string& id);
    std::size_t outstanding() const;

private:
    struct Entry {
        Challenge challenge;
        bool redeemed = false;
    };
    mutable std::mutex mutex_;
    std::unordered_map<std::string, Entry> registry_;
};

std::string bank_issue(const IPGameSpec& spec, StateBank& bank, RngStream& rng);
Challenge bank_redeem(StateBank& bank, const std::string& id);

// ---- coalition interface ----

struct EntanglementLedger {
    BigInt reserved = 0;
    std::uint64_t consumed = 0;
};

struct AliceInput {
    const Payload& payload;
    const Bits& lost;
    const std::vector<ComplexMatrix>& v0_classical;
};

struct BobInput {
    const std::vector<ComplexMatrix>& v1_classical;
};

/// Classical message; each strategy defines its own contents.
struct Message {
    virtual ~Message() = default;
};

/// One trial of a two-party strategy. The public entry points enforce the
/// single simultaneous round: act, act, message, message, finalize, finalize,
/// and a party's finalize is refused until its own message has been emitted.
class CoalitionSession {
public:
    virtual ~CoalitionSession() = default;

    void alice_act(const AliceInput& in);
    void bob_act(const BobInput& in);
    std::shared_ptr<const Message> alice_message();
    std::shared_ptr<const Message> bob_message();
    Answer alice_finalize(const Message& from_bob);
    Answer bob_finalize(const Message& from_alice);

    virtual EntanglementLedger ledger() const { return {}; }
    /// Set when the strategy met a challenge outside its scope.
    virtual bool failed() const { return false; }

protected:
    virtual void do_alice_act(const AliceInput& in) = 0;
    virtual void do_bob_act(const BobInput& in) = 0;
    virtual std::shared_ptr<const Message> do_alice_message() = 0;
    virtual std::shared_ptr<const Message> do_bob_message() = 0;
    virtual Answer do_alice_finalize(const Message& from_bob) = 0;
    virtual Answer do_bob_finalize(const Message& from_alice) = 0;

private:
    enum Step : unsigned { kAliceActed = 1, kBobActed = 2, kAliceSent = 4, kBobSent = 8, kAliceDone = 16, kBobDone = 32 };
    void require(unsigned needed, Step step, const char* what);
    unsigned done_ = 0;
};

/// Per-trial randomness handed to a new session.
struct SessionStreams {
    RngStream alice;
    RngStream bob;
    RngStream shared;  // pre-shared classical randomness
    RngStream lab;     // nature: measurement outcomes on the realized path
};

class CoalitionStrategy {
public:
    virtual ~CoalitionStrategy() = default;
    virtual std::string name() const = 0;
    /// Throws ValidationError when the strategy cannot target this game.
    virtual void check_compatible(const GameSpec& spec) const = 0;
    virtual std::unique_ptr<CoalitionSession> new_session(const GameSpec& spec, SessionStreams streams) const = 0;
    /// Reserved EPR pairs for this game (zero for non-entangled strategies).
    virtual BigInt reserved_epr(const GameSpec& spec) const = 0;
};

struct TrialRecord {
    std::size_t trial = 0;
    bool accepted = false;
    std::size_t errors = 0;
    std::size_t losses = 0;
    std::size_t answered = 0;
    bool answers_equal = false;
    std::uint64_t epr_consumed = 0;
    bool strategy_failed = false;
};

struct GameStats {
    std::size_t trials = 0;
    std::size_t n = 0;
    std::size_t wins = 0;
    double win_rate = 0.0;
    double win_stderr = 0.0;
    double mean_errors = 0.0;
    double errors_stderr = 0.0;
    double mean_error_fraction = 0.0;           // errors / n
    double mean_answered_error_fraction = 0.0;  // errors / answered
    double mean_losses = 0.0;
    double mean_epr_consumed = 0.0;
    std::uint64_t max_epr_consumed = 0;
    BigInt reserved_epr = 0;
    std::size_t ledger_violations = 0;  // trials with consumed > reserved
    std::size_t strategy_failures = 0;
    std::map<std::size_t, std::size_t> error_histogram;
    std::vector<TrialRecord> records;
};

struct RunOptions {
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    bool bank = false;  // IP game only: payload delivered through the state bank
};

/// Runs the game with the honest prover when `strategy` is null.
GameStats run_game(const GameSpec& spec, const CoalitionStrategy* strategy, const ChannelModel& channel,
                   const RunOptions& options);

}  // namespace pbqc
