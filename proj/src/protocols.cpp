#include "pbqc/protocols.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <thread>

#include "pbqc/clifford.hpp"
#include "pbqc/error.hpp"
#include "pbqc/gates.hpp"
#include "pbqc/linalg.hpp"
#include "pbqc/pauli.hpp"

namespace pbqc {

namespace {

constexpr std::size_t kMaxRegisterQubits = 10;
constexpr std::size_t kMaxProductQubits = 1'000'000;
constexpr int kMaxProductLength = 64;

std::vector<std::size_t> all_targets(std::size_t n) {
    std::vector<std::size_t> t(n);
    std::iota(t.begin(), t.end(), std::size_t{0});
    return t;
}

StateVector apply_full(const StateVector& s, const ComplexMatrix& u) {
    if (s.num_qubits() == 1) {
        ComplexVector a = u * s.amplitudes();
        return StateVector::from_amplitudes(std::move(a), 1e-8);
    }
    const auto t = all_targets(s.num_qubits());
    return apply_unitary(s, u, std::span<const std::size_t>(t));
}

ComplexMatrix sample_c3(std::size_t n, RngStream& rng) {
    ComplexMatrix core;
    if (n == 1) {
        core = gates::T();
    } else {
        core = ComplexMatrix::Identity(4, 4);
        if (rng.bit()) core(3, 3) = Complex(0, 1);  // controlled-S
        else core = kron(gates::T(), gates::identity(1));
    }
    const ComplexMatrix c1 = random_clifford(n, rng);
    const ComplexMatrix c2 = random_clifford(n, rng);
    return c1 * core * c2;
}

ComplexMatrix sample_member(const UnitaryFamily& f, std::size_t n, RngStream& rng) {
    switch (f.kind) {
        case FamilyKind::Identity:
            return gates::identity(n);
        case FamilyKind::Pauli: {
            const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
            const std::uint64_t xm = rng.next_u64() & mask;
            const std::uint64_t zm = rng.next_u64() & mask;
            return PauliOperator::hermitian(n, xm, zm).matrix();
        }
        case FamilyKind::Clifford:
            return random_clifford(n, rng);
        case FamilyKind::Bb84:
            return rng.bit() ? gates::H() : gates::identity(1);
        case FamilyKind::Haar:
            return haar_random_unitary(std::size_t{1} << n, rng);
        case FamilyKind::C3:
            return sample_c3(n, rng);
        case FamilyKind::Explicit:
            return f.members[rng.index(f.members.size())];
        case FamilyKind::Layout:
            return layout_unitary(*f.layout);
    }
    throw ValidationError("unknown unitary family");
}

Bits random_bits(std::size_t n, RngStream& rng) {
    Bits x(n);
    for (auto& b : x) b = static_cast<std::uint8_t>(rng.bit());
    return x;
}

void check_answer(const Answer& a, std::size_t n, const char* who) {
    if (a.size() != n) {
        throw ValidationError(std::string(who) + " answer has " + std::to_string(a.size()) + " entries, expected " +
                              std::to_string(n));
    }
    for (auto v : a) {
        if (v != 0 && v != 1 && v != kNoResult) throw ValidationError(std::string(who) + " answer has invalid symbol");
    }
}

std::string hex_token(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

UnitaryFamily UnitaryFamily::named(const std::string& name) {
    UnitaryFamily f;
    if (name == "identity") f.kind = FamilyKind::Identity;
    else if (name == "pauli") f.kind = FamilyKind::Pauli;
    else if (name == "clifford") f.kind = FamilyKind::Clifford;
    else if (name == "bb84") f.kind = FamilyKind::Bb84;
    else if (name == "haar") f.kind = FamilyKind::Haar;
    else if (name == "c3") f.kind = FamilyKind::C3;
    else throw ValidationError("unknown unitary family '" + name + "'");
    return f;
}

std::string UnitaryFamily::name() const {
    switch (kind) {
        case FamilyKind::Explicit: return "explicit";
        case FamilyKind::Identity: return "identity";
        case FamilyKind::Pauli: return "pauli";
        case FamilyKind::Clifford: return "clifford";
        case FamilyKind::Bb84: return "bb84";
        case FamilyKind::Haar: return "haar";
        case FamilyKind::C3: return "c3";
        case FamilyKind::Layout: return "layout";
    }
    return "unknown";
}

void validate_spec(const GameSpec& spec) {
    if (const auto* b = std::get_if<BasisGameSpec>(&spec)) {
        if (b->n == 0) throw ValidationError("n must be at least 1");
        if (!(b->eta >= 0.0 && b->eta <= 1.0)) throw ValidationError("eta must lie in [0, 1]");
        const auto& f = b->family;
        if (f.is_product()) {
            if (b->n > kMaxProductQubits) throw ResourceError("n too large");
            return;
        }
        if (b->n > kMaxRegisterQubits) {
            throw ResourceError("family '" + f.name() + "' needs a " + std::to_string(b->n) +
                                "-qubit register; the limit is " + std::to_string(kMaxRegisterQubits));
        }
        if (f.kind == FamilyKind::C3 && b->n > 2) throw ValidationError("c3 family supports n <= 2");
        if (f.kind == FamilyKind::Explicit) {
            if (f.members.empty()) throw ValidationError("explicit family is empty");
            const Eigen::Index dim = Eigen::Index{1} << b->n;
            for (const auto& m : f.members) {
                if (m.rows() != dim || m.cols() != dim) throw DimensionError("explicit family member has wrong dimension");
                require_unitary(m, "explicit family member");
            }
        }
        if (f.kind == FamilyKind::Layout) {
            if (!f.layout) throw ValidationError("layout family without a layout");
            validate_layout(*f.layout);
            if (f.layout->num_qubits != b->n) throw ValidationError("layout qubit count differs from n");
        }
        return;
    }
    const auto& ip = std::get<IPGameSpec>(spec);
    if (ip.n == 0) throw ValidationError("n must be at least 1");
    if (ip.n > kMaxProductQubits) throw ResourceError("n too large");
    if (ip.t < 1) throw ValidationError("t must be at least 1");
    if (ip.t > kMaxProductLength) throw ResourceError("t too large");
    if (!(ip.eta_err >= 0.0 && ip.eta_err <= 1.0)) throw ValidationError("eta_err must lie in [0, 1]");
    if (!(ip.eta_loss >= 0.0 && ip.eta_loss <= 1.0)) throw ValidationError("eta_loss must lie in [0, 1]");
}

std::size_t spec_qubits(const GameSpec& spec) {
    return std::visit([](const auto& s) { return s.n; }, spec);
}

std::size_t Payload::num_qubits() const {
    std::size_t n = 0;
    for (const auto& r : registers) n += r.num_qubits();
    return n;
}

void validate_channel(const ChannelModel& c) {
    if (!(c.p_loss >= 0.0 && c.p_loss <= 1.0)) throw ValidationError("p_loss must lie in [0, 1]");
    if (!(c.p_dep >= 0.0 && c.p_dep <= 1.0)) throw ValidationError("p_dep must lie in [0, 1]");
}

ChannelOutput apply_channel(const Payload& payload, const ChannelModel& channel, RngStream& rng) {
    validate_channel(channel);
    ChannelOutput out{payload, Bits(payload.num_qubits(), 0)};
    std::size_t global = 0;
    for (auto& reg : out.payload.registers) {
        const std::size_t n = reg.num_qubits();
        for (std::size_t q = 0; q < n; ++q, ++global) {
            if (channel.p_loss > 0.0 && rng.uniform() < channel.p_loss) {
                out.lost[global] = 1;
                continue;
            }
            if (channel.p_dep > 0.0 && rng.uniform() < channel.p_dep) {
                const auto k = rng.index(4);
                if (k == 0) continue;
                const PauliOperator p = PauliOperator::hermitian(1, k & 1, (k >> 1) & 1);
                reg = apply_unitary(reg, p.matrix(), {q});
            }
        }
    }
    return out;
}

Challenge gen_basis_challenge(const BasisGameSpec& spec, RngStream& rng) {
    validate_spec(spec);
    Challenge c;
    c.secret.x = random_bits(spec.n, rng);
    if (spec.family.is_product()) {
        c.payload.registers.reserve(spec.n);
        c.secret.unitaries.reserve(spec.n);
        for (std::size_t q = 0; q < spec.n; ++q) {
            ComplexMatrix u = sample_member(spec.family, 1, rng);
            c.payload.registers.push_back(apply_full(StateVector::basis(1, c.secret.x[q]), u));
            c.secret.unitaries.push_back(std::move(u));
        }
        c.v1_classical = c.secret.unitaries;
        return c;
    }
    ComplexMatrix u = sample_member(spec.family, spec.n, rng);
    c.payload.registers.push_back(apply_full(StateVector::basis(c.secret.x), u));
    c.secret.unitaries.push_back(u);
    if (spec.family.kind == FamilyKind::Layout) {
        for (const auto& layer : spec.family.layout->layers) {
            c.v1_classical.push_back(layer_unitary(layer, spec.n));
        }
    } else {
        c.v1_classical.push_back(std::move(u));
    }
    return c;
}

Challenge gen_ip_challenge(const IPGameSpec& spec, RngStream& rng) {
    validate_spec(spec);
    Challenge c;
    c.secret.x = random_bits(spec.n, rng);
    const std::size_t groups = spec.per_qubit_unitary ? spec.n : 1;
    const auto t = static_cast<std::size_t>(spec.t);
    c.v0_classical.reserve(groups * t);
    c.v1_classical.reserve(groups * t);
    std::vector<ComplexMatrix> group_u;
    for (std::size_t g = 0; g < groups; ++g) {
        const ComplexMatrix u = haar_random_unitary(2, rng);
        // v_t = u_t^dag v_{t-1}^dag ... v_1^dag u_1^dag U closes the product.
        ComplexMatrix rest = u;
        for (std::size_t i = 0; i < t; ++i) {
            ComplexMatrix ui = haar_random_unitary(2, rng);
            rest = ui.adjoint() * rest;
            ComplexMatrix vi;
            if (i + 1 < t) {
                vi = haar_random_unitary(2, rng);
                rest = vi.adjoint() * rest;
            } else {
                vi = rest;
            }
            c.v0_classical.push_back(std::move(ui));
            c.v1_classical.push_back(std::move(vi));
        }
        group_u.push_back(u);
    }
    c.payload.registers.reserve(spec.n);
    c.secret.unitaries.reserve(spec.n);
    for (std::size_t q = 0; q < spec.n; ++q) {
        const ComplexMatrix& u = group_u[spec.per_qubit_unitary ? q : 0];
        c.payload.registers.push_back(apply_full(StateVector::basis(1, c.secret.x[q]), u));
        c.secret.unitaries.push_back(u);
    }
    return c;
}

Challenge gen_challenge(const GameSpec& spec, RngStream& rng) {
    return std::visit(
        [&](const auto& s) {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, BasisGameSpec>) return gen_basis_challenge(s, rng);
            else return gen_ip_challenge(s, rng);
        },
        spec);
}

ComplexMatrix ip_product(const Challenge& c, const IPGameSpec& spec, std::size_t reg) {
    const auto t = static_cast<std::size_t>(spec.t);
    const std::size_t base = spec.per_qubit_unitary ? reg * t : 0;
    if (c.v0_classical.size() < base + t || c.v1_classical.size() < base + t) {
        throw DimensionError("ip_product: classical shares too short");
    }
    ComplexMatrix p = ComplexMatrix::Identity(2, 2);
    for (std::size_t i = 0; i < t; ++i) p = p * c.v0_classical[base + i] * c.v1_classical[base + i];
    return p;
}

namespace {

Answer measure_undone(const Payload& payload, const std::vector<ComplexMatrix>& unitaries, const Bits& lost,
                      bool lost_as_random, RngStream& rng) {
    if (unitaries.size() != payload.registers.size()) throw DimensionError("one unitary per register expected");
    Answer y;
    y.reserve(payload.num_qubits());
    std::size_t global = 0;
    for (std::size_t r = 0; r < payload.registers.size(); ++r) {
        const StateVector undone = apply_full(payload.registers[r], unitaries[r].adjoint());
        const Bits z = measure_all(undone, rng).outcome;
        for (auto b : z) {
            if (global < lost.size() && lost[global]) {
                y.push_back(lost_as_random ? static_cast<std::int8_t>(rng.bit()) : kNoResult);
            } else {
                y.push_back(static_cast<std::int8_t>(b));
            }
            ++global;
        }
    }
    return y;
}

}  // namespace

Answer honest_prover_basis(const Challenge& c, const Bits& lost, RngStream& rng) {
    if (c.payload.registers.size() == 1 && !c.v1_classical.empty()) {
        // One register: the share is U itself or its layers L_1..L_d.
        ComplexMatrix u = c.v1_classical.front();
        for (std::size_t i = 1; i < c.v1_classical.size(); ++i) u = u * c.v1_classical[i];
        return measure_undone(c.payload, {u}, lost, true, rng);
    }
    return measure_undone(c.payload, c.v1_classical, lost, true, rng);
}

Answer honest_prover_ip(const Challenge& c, const IPGameSpec& spec, const Bits& lost, RngStream& rng) {
    std::vector<ComplexMatrix> us;
    us.reserve(c.payload.registers.size());
    if (spec.per_qubit_unitary) {
        for (std::size_t r = 0; r < c.payload.registers.size(); ++r) us.push_back(ip_product(c, spec, r));
    } else {
        us.assign(c.payload.registers.size(), ip_product(c, spec, 0));
    }
    return measure_undone(c.payload, us, lost, false, rng);
}

Verdict verify_basis(const Bits& x, const Answer& alice, const Answer& bob, double eta) {
    const std::size_t n = x.size();
    check_answer(alice, n, "alice");
    check_answer(bob, n, "bob");
    Verdict v;
    v.answers_equal = alice == bob;
    for (std::size_t i = 0; i < n; ++i) {
        if (alice[i] == kNoResult) ++v.loss_count;
        if (alice[i] != static_cast<std::int8_t>(x[i])) ++v.error_count;
    }
    v.accepted = v.answers_equal && static_cast<double>(v.error_count) <= eta * static_cast<double>(n) + 1e-9;
    return v;
}

Verdict verify_ip(const Bits& x, const Answer& alice, const Answer& bob, double eta_err, double eta_loss) {
    const std::size_t n = x.size();
    check_answer(alice, n, "alice");
    check_answer(bob, n, "bob");
    Verdict v;
    v.answers_equal = alice == bob;
    for (std::size_t i = 0; i < n; ++i) {
        if (alice[i] == kNoResult) ++v.loss_count;
        else if (alice[i] != static_cast<std::int8_t>(x[i])) ++v.error_count;
    }
    // Strict "<"; a count of zero always passes, otherwise zero thresholds
    // would make even a perfect transcript lose.
    const auto below = [n](std::size_t count, double eta) {
        return count == 0 || static_cast<double>(count) + 1e-9 < eta * static_cast<double>(n);
    };
    v.accepted = v.answers_equal && below(v.error_count, eta_err) && below(v.loss_count, eta_loss);
    return v;
}

Verdict verify(const GameSpec& spec, const Bits& x, const Answer& alice, const Answer& bob) {
    if (const auto* b = std::get_if<BasisGameSpec>(&spec)) return verify_basis(x, alice, bob, b->eta);
    const auto& ip = std::get<IPGameSpec>(spec);
    return verify_ip(x, alice, bob, ip.eta_err, ip.eta_loss);
}

// ---- state bank ----

std::string StateBank::issue(const IPGameSpec& spec, RngStream& rng) {
    Challenge c = gen_ip_challenge(spec, rng);
    std::lock_guard lock(mutex_);
    std::string id;
    do {
        id = hex_token(rng.next_u64());
    } while (registry_.count(id));
    registry_.emplace(id, Entry{std::move(c), false});
    return id;
}

Challenge StateBank::redeem(const std::string& id) {
    std::lock_guard lock(mutex_);
    const auto it = registry_.find(id);
    if (it == registry_.end()) throw ProtocolError("state bank: unknown id " + id);
    if (it->second.redeemed) throw ProtocolError("state bank: id " + id + " already redeemed");
    it->second.redeemed = true;
    Challenge c = std::move(it->second.challenge);
    it->second.challenge = Challenge{};
    return c;
}

std::size_t StateBank::outstanding() const {
    std::lock_guard lock(mutex_);
    std::size_t k = 0;
    for (const auto& [id, e] : registry_) k += e.redeemed ? 0 : 1;
    return k;
}

std::string bank_issue(const IPGameSpec& spec, StateBank& bank, RngStream& rng) { return bank.issue(spec, rng); }
Challenge bank_redeem(StateBank& bank, const std::string& id) { return bank.redeem(id); }

// ---- session ordering ----

void CoalitionSession::require(unsigned needed, Step step, const char* what) {
    if ((done_ & needed) != needed) throw ProtocolError(std::string("session: ") + what + " called out of order");
    if (done_ & step) throw ProtocolError(std::string("session: ") + what + " called twice");
    done_ |= step;
}

void CoalitionSession::alice_act(const AliceInput& in) {
    require(0, kAliceActed, "alice_act");
    do_alice_act(in);
}

void CoalitionSession::bob_act(const BobInput& in) {
    require(0, kBobActed, "bob_act");
    do_bob_act(in);
}

std::shared_ptr<const Message> CoalitionSession::alice_message() {
    require(kAliceActed | kBobActed, kAliceSent, "alice_message");
    return do_alice_message();
}

std::shared_ptr<const Message> CoalitionSession::bob_message() {
    require(kAliceActed | kBobActed, kBobSent, "bob_message");
    return do_bob_message();
}

Answer CoalitionSession::alice_finalize(const Message& from_bob) {
    require(kAliceSent | kBobSent, kAliceDone, "alice_finalize");
    return do_alice_finalize(from_bob);
}

Answer CoalitionSession::bob_finalize(const Message& from_alice) {
    require(kAliceSent | kBobSent, kBobDone, "bob_finalize");
    return do_bob_finalize(from_alice);
}

// ---- runner ----

namespace {

TrialRecord run_trial(const GameSpec& spec, const CoalitionStrategy* strategy, const ChannelModel& channel,
                      const RunOptions& opt, std::size_t trial) {
    const RngStream base(opt.seed, trial);
    RngStream challenge_rng = base.split(1);
    RngStream channel_rng = base.split(2);
    RngStream prover_rng = base.split(6);

    Challenge c;
    ChannelOutput received;
    if (opt.bank) {
        // Payload comes out of the prover's bank, not over the lossy channel.
        StateBank bank;
        const std::string id = bank.issue(std::get<IPGameSpec>(spec), challenge_rng);
        c = bank.redeem(id);
        received.payload = c.payload;
        received.lost.assign(c.payload.num_qubits(), 0);
    } else {
        c = gen_challenge(spec, challenge_rng);
        received = apply_channel(c.payload, channel, channel_rng);
    }

    TrialRecord rec;
    rec.trial = trial;
    Answer alice, bob;
    if (!strategy) {
        Challenge seen = c;
        seen.payload = received.payload;
        if (const auto* ip = std::get_if<IPGameSpec>(&spec)) alice = honest_prover_ip(seen, *ip, received.lost, prover_rng);
        else alice = honest_prover_basis(seen, received.lost, prover_rng);
        bob = alice;
    } else {
        auto session = strategy->new_session(
            spec, SessionStreams{base.split(3), base.split(4), base.split(5), prover_rng});
        session->alice_act(AliceInput{received.payload, received.lost, c.v0_classical});
        session->bob_act(BobInput{c.v1_classical});
        const auto ma = session->alice_message();
        const auto mb = session->bob_message();
        alice = session->alice_finalize(*mb);
        bob = session->bob_finalize(*ma);
        rec.epr_consumed = session->ledger().consumed;
        rec.strategy_failed = session->failed();
    }
    const Verdict v = verify(spec, c.secret.x, alice, bob);
    rec.accepted = v.accepted;
    rec.errors = v.error_count;
    rec.losses = v.loss_count;
    rec.answered = c.secret.x.size() - v.loss_count;
    rec.answers_equal = v.answers_equal;
    return rec;
}

}  // namespace

GameStats run_game(const GameSpec& spec, const CoalitionStrategy* strategy, const ChannelModel& channel,
                   const RunOptions& opt) {
    validate_spec(spec);
    validate_channel(channel);
    if (opt.trials == 0) throw ValidationError("trials must be at least 1");
    if (opt.bank && !std::holds_alternative<IPGameSpec>(spec)) {
        throw ValidationError("bank mode applies to the interleaved-product game only");
    }
    if (strategy) strategy->check_compatible(spec);

    GameStats st;
    st.trials = opt.trials;
    st.n = spec_qubits(spec);
    st.reserved_epr = strategy ? strategy->reserved_epr(spec) : BigInt(0);
    st.records.resize(opt.trials);

    const std::size_t threads = std::max<std::size_t>(1, std::min(opt.threads, opt.trials));
    std::vector<std::exception_ptr> errors(opt.trials);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    auto worker = [&] {
        for (std::size_t i; !stop.load() && (i = next.fetch_add(1)) < opt.trials;) {
            try {
                st.records[i] = run_trial(spec, strategy, channel, opt, i);
            } catch (...) {
                errors[i] = std::current_exception();
                stop.store(true);
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    const double trials = static_cast<double>(opt.trials);
    const double n = static_cast<double>(st.n);
    double sum_err = 0, sum_err2 = 0, sum_frac_ans = 0, sum_loss = 0, sum_epr = 0;
    for (const auto& r : st.records) {
        st.wins += r.accepted ? 1 : 0;
        const double e = static_cast<double>(r.errors);
        sum_err += e;
        sum_err2 += e * e;
        sum_frac_ans += r.answered ? e / static_cast<double>(r.answered) : 0.0;
        sum_loss += static_cast<double>(r.losses);
        sum_epr += static_cast<double>(r.epr_consumed);
        st.max_epr_consumed = std::max(st.max_epr_consumed, r.epr_consumed);
        if (BigInt(r.epr_consumed) > st.reserved_epr) ++st.ledger_violations;
        if (r.strategy_failed) ++st.strategy_failures;
        ++st.error_histogram[r.errors];
    }
    st.win_rate = static_cast<double>(st.wins) / trials;
    st.win_stderr = std::sqrt(st.win_rate * (1.0 - st.win_rate) / trials);
    st.mean_errors = sum_err / trials;
    const double var = opt.trials > 1 ? std::max(0.0, (sum_err2 - trials * st.mean_errors * st.mean_errors) / (trials - 1)) : 0.0;
    st.errors_stderr = std::sqrt(var / trials);
    st.mean_error_fraction = st.mean_errors / n;
    st.mean_answered_error_fraction = sum_frac_ans / trials;
    st.mean_losses = sum_loss / trials;
    st.mean_epr_consumed = sum_epr / trials;
    return st;
}

}  // namespace pbqc
