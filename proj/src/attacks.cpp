#include "pbqc/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "pbqc/clifford.hpp"
#include "pbqc/error.hpp"
#include "pbqc/gates.hpp"
#include "pbqc/linalg.hpp"
#include "pbqc/pauli.hpp"

namespace pbqc {

// ---- frame engine ----

namespace {

int rounds_for(int level) { return std::max(level - 2, 0); }

/// F and, optionally, the register it acts on.
class Tracker {
public:
    Tracker(std::size_t n, const ComplexVector* state)
        : f_(ComplexMatrix::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n)) {
        if (state) state_ = *state;
    }

    void hit(const ComplexMatrix& m) {
        f_ = m * f_;
        if (state_) *state_ = m * *state_;
    }
    void step(const ComplexMatrix& a) {
        f_ = a * f_ * a.adjoint();
        if (state_) *state_ = a * *state_;
    }
    // Pins F to an exact phase times Pauli so long chains do not drift.
    void snap() {
        if (const auto p = try_as_pauli_up_to_phase(f_, 1e-7)) {
            const ComplexMatrix pm = p->matrix();
            const Complex phase = (pm.adjoint() * f_).trace() / static_cast<double>(f_.rows());
            f_ = (phase / std::abs(phase)) * pm;
        }
    }
    const ComplexMatrix& frame() const { return f_; }
    const std::optional<ComplexVector>& state() const { return state_; }

private:
    ComplexMatrix f_;
    std::optional<ComplexVector> state_;
};

template <class NextA, class NextB>
void drive(const std::vector<FrameStep>& steps, Tracker& tr, NextA next_a, NextB next_b,
           std::vector<ComplexMatrix>* frames) {
    tr.hit(next_a());
    for (const auto& s : steps) {
        tr.step(s.gate);
        tr.snap();
        if (frames) frames->push_back(tr.frame());
        for (int r = 0; r < rounds_for(s.level); ++r) {
            tr.hit(next_b());
            const ComplexMatrix g = tr.frame();
            tr.hit(next_a());
            tr.hit(g.adjoint());
            tr.snap();
            if (frames) frames->push_back(tr.frame());
        }
    }
}

PauliOperator random_pauli(std::size_t n, RngStream& rng) {
    const std::uint64_t dim = std::uint64_t{1} << n;
    const auto xm = rng.index(dim);
    const auto zm = rng.index(dim);
    return PauliOperator(n, xm, zm);
}

}  // namespace

std::uint64_t frame_hops(const std::vector<FrameStep>& steps) {
    std::uint64_t h = 1;
    for (const auto& s : steps) h += 2 * static_cast<std::uint64_t>(rounds_for(s.level));
    return h;
}

ComplexMatrix replay_frame(const std::vector<FrameStep>& steps, const FrameTranscript& tr, std::size_t n,
                           std::vector<ComplexMatrix>* frames) {
    std::size_t rounds = 0;
    for (const auto& s : steps) rounds += static_cast<std::size_t>(rounds_for(s.level));
    if (tr.sigma_a.size() != rounds + 1 || tr.sigma_b.size() != rounds) {
        throw ProtocolError("replay_frame: transcript length does not match the declared levels");
    }
    Tracker t(n, nullptr);
    std::size_t ia = 0, ib = 0;
    drive(
        steps, t, [&] { return tr.sigma_a[ia++].matrix(); }, [&] { return tr.sigma_b[ib++].matrix(); }, frames);
    return t.frame();
}

std::optional<Bits> decode_frame(const Bits& z, const ComplexMatrix& frame) {
    const auto p = try_as_pauli_up_to_phase(frame, 1e-6);
    if (!p) return std::nullopt;
    return pauli_apply_to_basis(*p, z).bits;
}

FrameRun run_frame(const StateVector& psi, const std::vector<FrameStep>& steps, RngStream& lab) {
    const std::size_t n = psi.num_qubits();
    FrameRun run{{}, {}, psi, frame_hops(steps)};
    Tracker t(n, &psi.amplitudes());
    drive(
        steps, t,
        [&] {
            run.transcript.sigma_a.push_back(random_pauli(n, lab));
            return run.transcript.sigma_a.back().matrix();
        },
        [&] {
            run.transcript.sigma_b.push_back(random_pauli(n, lab));
            return run.transcript.sigma_b.back().matrix();
        },
        nullptr);
    run.final_state = StateVector::normalized(*t.state());
    run.z = measure_all(run.final_state, lab).outcome;
    return run;
}

// ---- full tree, k = 3, n = 1 ----

namespace {

class LabelledRegister {
public:
    explicit LabelledRegister(StateVector s, std::vector<std::string> labels)
        : state_(std::move(s)), labels_(std::move(labels)) {}

    void add_pair(const std::string& a, const std::string& b) {
        state_ = state_.tensor(bell_pair());
        labels_.push_back(a);
        labels_.push_back(b);
    }
    std::size_t index(const std::string& l) const {
        const auto it = std::find(labels_.begin(), labels_.end(), l);
        if (it == labels_.end()) throw ProtocolError("full tree: no qubit " + l);
        return static_cast<std::size_t>(it - labels_.begin());
    }
    PauliOperator bell(const std::string& a, const std::string& b, RngStream& rng) {
        const std::size_t ia = index(a), ib = index(b);
        auto r = bell_measurement(state_, ia, ib, rng);
        state_ = std::move(r.post);
        labels_.erase(labels_.begin() + static_cast<std::ptrdiff_t>(std::max(ia, ib)));
        labels_.erase(labels_.begin() + static_cast<std::ptrdiff_t>(std::min(ia, ib)));
        return PauliOperator::from_bell(r.outcome);
    }
    void apply(const ComplexMatrix& u, const std::string& q) { state_ = apply_unitary(state_, u, {index(q)}); }
    /// Reduced density matrix of one qubit.
    ComplexMatrix reduce(const std::string& q) const {
        const StateVector moved = move_qubit(state_, index(q), 0);
        const Eigen::Index half = static_cast<Eigen::Index>(moved.dim() / 2);
        const auto& a = moved.amplitudes();
        ComplexMatrix rho(2, 2);
        rho(0, 0) = a.head(half).squaredNorm();
        rho(1, 1) = a.tail(half).squaredNorm();
        rho(0, 1) = a.tail(half).dot(a.head(half));
        rho(1, 0) = std::conj(rho(0, 1));
        return rho;
    }
    const StateVector& state() const { return state_; }
    const std::vector<std::string>& labels() const { return labels_; }

private:
    StateVector state_;
    std::vector<std::string> labels_;
};

int pauli_label(const PauliOperator& p) { return static_cast<int>(2 * p.x_mask() + p.z_mask()); }

}  // namespace

FullTreeResult full_tree_trial(const ComplexMatrix& u, int x, RngStream& rng) {
    if (u.rows() != 2 || u.cols() != 2) throw DimensionError("full_tree_trial: single-qubit gate expected");
    if (!hierarchy_level(u, 3).within(3)) throw ValidationError("full_tree_trial: gate is not in the third level");
    const StateVector psi = StateVector::from_amplitudes(u * StateVector::basis(1, x).amplitudes(), 1e-9);

    LabelledRegister reg(psi, {"D"});
    reg.add_pair("A1", "B1");
    reg.add_pair("B2", "A2");
    for (int c = 0; c < 4; ++c) reg.add_pair("A3_" + std::to_string(c), "B3_" + std::to_string(c));
    FullTreeResult out;
    out.epr_used = 6;

    // Alice: first hop.
    const PauliOperator sa1 = reg.bell("D", "A1", rng);
    // Bob: undo U and send the result back.
    reg.apply(u.adjoint(), "B1");
    const PauliOperator sb1 = reg.bell("B1", "B2", rng);
    // Alice: forward A2 through the slot named by her first outcome.
    const int slot = pauli_label(sa1);
    const PauliOperator sa2 = reg.bell("A2", "A3_" + std::to_string(slot), rng);
    // Bob: in every slot c, undo (σ_B1 U^dag P_c U).
    for (int c = 0; c < 4; ++c) {
        const PauliOperator pc(1, static_cast<std::uint64_t>(c >> 1), static_cast<std::uint64_t>(c & 1));
        const ComplexMatrix g = sb1.matrix() * u.adjoint() * pc.matrix() * u;
        reg.apply(g.adjoint(), "B3_" + std::to_string(c));
    }

    const std::vector<FrameStep> steps{{u.adjoint(), 3}};
    const ComplexMatrix f = replay_frame(steps, FrameTranscript{{sa1, sa2}, {sb1}}, 1);
    const ComplexVector expected = f * StateVector::basis(1, x).amplitudes();
    const ComplexMatrix rho = reg.reduce("B3_" + std::to_string(slot));
    out.fidelity = (expected.adjoint() * rho * expected)(0, 0).real();

    std::vector<std::size_t> slots;
    for (int c = 0; c < 4; ++c) slots.push_back(reg.index("B3_" + std::to_string(c)));
    const auto m = measure_computational(reg.state(), slots, rng);
    const auto decoded = decode_frame(Bits{m.outcome[static_cast<std::size_t>(slot)]}, f);
    out.correct = decoded && (*decoded)[0] == x;
    return out;
}

// ---- strategies ----

namespace {

std::vector<std::int8_t> to_answer(const Bits& b) { return {b.begin(), b.end()}; }

/// Largest declared level of a family, when it is known.
std::optional<int> family_level(const BasisGameSpec& s) {
    switch (s.family.kind) {
        case FamilyKind::Identity:
        case FamilyKind::Pauli: return 1;
        case FamilyKind::Clifford:
        case FamilyKind::Bb84: return 2;
        case FamilyKind::C3: return 3;
        case FamilyKind::Explicit: {
            if (s.n > 2) return std::nullopt;
            int worst = 1;
            for (const auto& m : s.family.members) {
                const auto h = hierarchy_level(m, 4);
                if (!h.level) return std::nullopt;
                worst = std::max(worst, *h.level);
            }
            return worst;
        }
        default: return std::nullopt;
    }
}

const BasisGameSpec& require_basis(const GameSpec& spec, const std::string& who) {
    const auto* b = std::get_if<BasisGameSpec>(&spec);
    if (!b) throw ValidationError(who + " targets the basis game");
    return *b;
}

const IPGameSpec& require_ip(const GameSpec& spec, const std::string& who) {
    const auto* ip = std::get_if<IPGameSpec>(&spec);
    if (!ip) throw ValidationError(who + " targets the interleaved-product game");
    return *ip;
}

ComplexMatrix ip_product_of(const std::vector<ComplexMatrix>& v0, const std::vector<ComplexMatrix>& v1,
                            const IPGameSpec& spec, std::size_t reg) {
    const auto t = static_cast<std::size_t>(spec.t);
    const std::size_t base = spec.per_qubit_unitary ? reg * t : 0;
    ComplexMatrix p = ComplexMatrix::Identity(2, 2);
    for (std::size_t i = 0; i < t; ++i) p = p * v0.at(base + i) * v1.at(base + i);
    return p;
}

/// Random bit per lost position; the same stream copy on both sides keeps answers equal.
void fill_lost(Answer& a, const Bits& lost, bool ip_game, RngStream shared) {
    for (std::size_t i = 0; i < a.size() && i < lost.size(); ++i) {
        const int r = shared.bit();
        if (lost[i]) a[i] = ip_game ? kNoResult : static_cast<std::int8_t>(r);
    }
}

// -- Pauli attack --

struct BitsMessage : Message {
    Bits bits;
    Bits lost;
    std::vector<ComplexMatrix> share;
};

class PauliSession : public CoalitionSession {
public:
    explicit PauliSession(SessionStreams s) : streams_(std::move(s)) {}
    bool failed() const override { return failed_; }

protected:
    void do_alice_act(const AliceInput& in) override {
        msg_a_ = std::make_shared<BitsMessage>();
        msg_a_->lost = in.lost;
        for (const auto& r : in.payload.registers) {
            const auto z = measure_all(r, streams_.alice).outcome;
            msg_a_->bits.insert(msg_a_->bits.end(), z.begin(), z.end());
        }
    }
    void do_bob_act(const BobInput& in) override {
        msg_b_ = std::make_shared<BitsMessage>();
        msg_b_->share = in.v1_classical;
    }
    std::shared_ptr<const Message> do_alice_message() override { return msg_a_; }
    std::shared_ptr<const Message> do_bob_message() override { return msg_b_; }
    Answer do_alice_finalize(const Message& m) override {
        return decode(*msg_a_, dynamic_cast<const BitsMessage&>(m));
    }
    Answer do_bob_finalize(const Message& m) override {
        return decode(dynamic_cast<const BitsMessage&>(m), *msg_b_);
    }

private:
    Answer decode(const BitsMessage& a, const BitsMessage& b) {
        Answer out;
        std::size_t pos = 0;
        for (const auto& u : b.share) {
            const std::size_t n = static_cast<std::size_t>(std::log2(static_cast<double>(u.rows())) + 0.5);
            Bits z(a.bits.begin() + static_cast<std::ptrdiff_t>(pos), a.bits.begin() + static_cast<std::ptrdiff_t>(pos + n));
            pos += n;
            const auto p = try_as_pauli_up_to_phase(u);
            if (!p) {
                failed_ = true;
                for (auto v : z) out.push_back(static_cast<std::int8_t>(v));
                continue;
            }
            for (auto v : pauli_apply_to_basis(*p, z).bits) out.push_back(static_cast<std::int8_t>(v));
        }
        fill_lost(out, a.lost, false, streams_.shared);
        return out;
    }
    SessionStreams streams_;
    std::shared_ptr<BitsMessage> msg_a_, msg_b_;
    bool failed_ = false;
};

class PauliAttack : public CoalitionStrategy {
public:
    std::string name() const override { return "pauli"; }
    void check_compatible(const GameSpec& spec) const override {
        const auto& b = require_basis(spec, name());
        const auto lvl = family_level(b);
        if (!lvl || *lvl > 1) throw ValidationError("pauli attack requires a Pauli family");
    }
    std::unique_ptr<CoalitionSession> new_session(const GameSpec&, SessionStreams s) const override {
        return std::make_unique<PauliSession>(std::move(s));
    }
    BigInt reserved_epr(const GameSpec&) const override { return 0; }
};

// -- teleportation-chain attacks (clifford, tree, layout, sk) --

/// Steps contributed by one party: [group][factor] -> steps.
using Part = std::vector<std::vector<std::vector<FrameStep>>>;

struct FrameAliceMessage : Message {
    std::vector<FrameTranscript> sigma;  // sigma_a only
    Bits lost;
    Part part;
};

struct FrameBobMessage : Message {
    std::vector<FrameTranscript> sigma;  // sigma_b only
    std::vector<Bits> z;
    Part part;
};

class FramePlanner {
public:
    virtual ~FramePlanner() = default;
    virtual Part alice_part(const AliceInput& in, const GameSpec& spec) const = 0;
    virtual Part bob_part(const BobInput& in, const GameSpec& spec) const = 0;
    /// Failure to reduce F to a Pauli is a hard error unless this is set.
    virtual bool soft_failure() const { return false; }
};

std::vector<FrameStep> combine(const Part& a, const Part& b, std::size_t reg) {
    std::vector<FrameStep> out;
    const auto group = [&](const Part& p) -> const std::vector<std::vector<FrameStep>>* {
        if (p.empty()) return nullptr;
        return &p[p.size() == 1 ? 0 : reg];
    };
    const auto* ga = group(a);
    const auto* gb = group(b);
    const std::size_t factors = std::max(ga ? ga->size() : 0, gb ? gb->size() : 0);
    for (std::size_t i = 0; i < factors; ++i) {
        if (ga && i < ga->size()) out.insert(out.end(), (*ga)[i].begin(), (*ga)[i].end());
        if (gb && i < gb->size()) out.insert(out.end(), (*gb)[i].begin(), (*gb)[i].end());
    }
    return out;
}

class FrameSession : public CoalitionSession {
public:
    FrameSession(const FramePlanner& planner, GameSpec spec, SessionStreams s)
        : planner_(planner), spec_(std::move(spec)), streams_(std::move(s)) {}

    EntanglementLedger ledger() const override { return {0, consumed_}; }
    bool failed() const override { return failed_; }

protected:
    void do_alice_act(const AliceInput& in) override {
        payload_ = in.payload;
        msg_a_ = std::make_shared<FrameAliceMessage>();
        msg_a_->lost = in.lost;
        msg_a_->part = planner_.alice_part(in, spec_);
    }
    void do_bob_act(const BobInput& in) override {
        msg_b_ = std::make_shared<FrameBobMessage>();
        msg_b_->part = planner_.bob_part(in, spec_);
    }
    std::shared_ptr<const Message> do_alice_message() override {
        run_lab();
        return msg_a_;
    }
    std::shared_ptr<const Message> do_bob_message() override {
        run_lab();
        return msg_b_;
    }
    Answer do_alice_finalize(const Message& m) override {
        return decode(*msg_a_, dynamic_cast<const FrameBobMessage&>(m));
    }
    Answer do_bob_finalize(const Message& m) override {
        return decode(dynamic_cast<const FrameAliceMessage&>(m), *msg_b_);
    }

private:
    // The shared quantum evolution: both labs' operations on the realized path.
    void run_lab() {
        if (lab_done_) return;
        lab_done_ = true;
        for (std::size_t r = 0; r < payload_.registers.size(); ++r) {
            const auto steps = combine(msg_a_->part, msg_b_->part, r);
            const FrameRun run = run_frame(payload_.registers[r], steps, streams_.lab);
            consumed_ += run.hops * payload_.registers[r].num_qubits();
            msg_a_->sigma.push_back({run.transcript.sigma_a, {}});
            msg_b_->sigma.push_back({{}, run.transcript.sigma_b});
            msg_b_->z.push_back(run.z);
        }
    }

    Answer decode(const FrameAliceMessage& a, const FrameBobMessage& b) {
        Answer out;
        for (std::size_t r = 0; r < b.z.size(); ++r) {
            const auto steps = combine(a.part, b.part, r);
            const std::size_t n = b.z[r].size();
            const ComplexMatrix f = replay_frame(steps, {a.sigma[r].sigma_a, b.sigma[r].sigma_b}, n);
            auto x = decode_frame(b.z[r], f);
            if (!x) {
                if (!planner_.soft_failure()) throw ProtocolError("frame did not reduce to a Pauli operator");
                failed_ = true;
                x = b.z[r];
            }
            for (auto v : *x) out.push_back(static_cast<std::int8_t>(v));
        }
        fill_lost(out, a.lost, std::holds_alternative<IPGameSpec>(spec_), streams_.shared);
        return out;
    }

    const FramePlanner& planner_;
    GameSpec spec_;
    SessionStreams streams_;
    Payload payload_;
    std::shared_ptr<FrameAliceMessage> msg_a_;
    std::shared_ptr<FrameBobMessage> msg_b_;
    bool lab_done_ = false;
    bool failed_ = false;
    std::uint64_t consumed_ = 0;
};

/// Bob undoes each register's U in one step of the given level.
class SingleStepPlanner : public FramePlanner {
public:
    SingleStepPlanner(int level, bool check_level, bool soft) : level_(level), check_(check_level), soft_(soft) {}
    Part alice_part(const AliceInput&, const GameSpec&) const override { return {}; }
    Part bob_part(const BobInput& in, const GameSpec&) const override {
        Part p;
        for (const auto& u : in.v1_classical) {
            if (check_ && !hierarchy_level(u, std::min(level_, 4)).within(level_)) {
                throw ValidationError("challenge unitary lies above level " + std::to_string(level_));
            }
            p.push_back({{FrameStep{u.adjoint(), level_}}});
        }
        return p;
    }
    bool soft_failure() const override { return soft_; }

private:
    int level_;
    bool check_;
    bool soft_;
};

class SingleStepAttack : public CoalitionStrategy {
public:
    SingleStepAttack(std::string name, int level, bool check, bool soft)
        : name_(std::move(name)), level_(level), planner_(level, check, soft) {}

    std::string name() const override { return name_; }
    void check_compatible(const GameSpec& spec) const override {
        const auto& b = require_basis(spec, name_);
        if (!b.family.is_product() && b.n > 2) throw ValidationError(name_ + " attack supports at most 2 qubits");
        const auto lvl = family_level(b);
        if (!lvl || *lvl > level_) {
            throw ValidationError(name_ + " attack requires a family inside level " + std::to_string(level_) +
                                  ", got '" + b.family.name() + "'");
        }
    }
    std::unique_ptr<CoalitionSession> new_session(const GameSpec& spec, SessionStreams s) const override {
        return std::make_unique<FrameSession>(planner_, spec, std::move(s));
    }
    BigInt reserved_epr(const GameSpec& spec) const override {
        const int n = static_cast<int>(spec_qubits(spec));
        if (level_ == 2 && name_ == "clifford") return BigInt(n);
        return tree_cost(n, level_).reserved_epr;
    }

private:
    std::string name_;
    int level_;
    SingleStepPlanner planner_;
};

class LayoutPlanner : public FramePlanner {
public:
    explicit LayoutPlanner(const CircuitLayout& layout) : layout_(layout) {}
    Part alice_part(const AliceInput&, const GameSpec&) const override { return {}; }
    Part bob_part(const BobInput& in, const GameSpec&) const override {
        if (in.v1_classical.size() != layout_.layers.size()) throw ProtocolError("layer count differs from the layout");
        std::vector<FrameStep> steps;
        for (std::size_t j = 0; j < layout_.layers.size(); ++j) {
            steps.push_back({in.v1_classical[j].adjoint(), std::max(layer_level(layout_.layers[j]), 1)});
        }
        return {{steps}};
    }

private:
    const CircuitLayout& layout_;
};

class LayoutAttack : public CoalitionStrategy {
public:
    explicit LayoutAttack(CircuitLayout layout) : layout_(std::move(layout)), planner_(layout_) {
        validate_layout(layout_);
        if (layout_.num_qubits > 2) throw ValidationError("layout attack supports at most 2 qubits");
        for (const auto& layer : layout_.layers) {
            if (layer_level(layer) > 3) throw ValidationError("layout attack requires declared levels <= 3");
        }
    }
    std::string name() const override { return "layout"; }
    void check_compatible(const GameSpec& spec) const override {
        const auto& b = require_basis(spec, "layout attack");
        if (b.family.kind != FamilyKind::Layout) throw ValidationError("layout attack requires the layout family");
        if (b.family.layout->num_qubits != layout_.num_qubits ||
            b.family.layout->layers.size() != layout_.layers.size()) {
            throw ValidationError("game layout differs from the attack layout");
        }
    }
    std::unique_ptr<CoalitionSession> new_session(const GameSpec& spec, SessionStreams s) const override {
        return std::make_unique<FrameSession>(planner_, spec, std::move(s));
    }
    BigInt reserved_epr(const GameSpec&) const override { return layout_cost(layout_).reserved_epr; }

private:
    CircuitLayout layout_;
    LayoutPlanner planner_;
};

// SK: every factor is replaced by a padded word; the letters are the steps.
class SkPlanner : public FramePlanner {
public:
    SkPlanner(int depth, std::shared_ptr<const EpsilonNet> net) : depth_(depth), net_(std::move(net)) {}

    Part alice_part(const AliceInput& in, const GameSpec& spec) const override {
        return compile(in.v0_classical, require_ip(spec, "sk attack"));
    }
    Part bob_part(const BobInput& in, const GameSpec& spec) const override {
        return compile(in.v1_classical, require_ip(spec, "sk attack"));
    }
    std::size_t word_length() const { return padded_length(depth_, net_->l0); }

private:
    Part compile(const std::vector<ComplexMatrix>& factors, const IPGameSpec& spec) const {
        const auto t = static_cast<std::size_t>(spec.t);
        const double budget = spec.eta_err / (2.0 * static_cast<double>(t));
        const std::size_t groups = factors.size() / t;
        Part p(groups);
        for (std::size_t g = 0; g < groups; ++g) {
            for (std::size_t i = 0; i < t; ++i) {
                const ComplexMatrix target = factors[g * t + i].adjoint();
                const GateWord word = compile_one(target, budget);
                // The word's product is letters[0]·letters[1]···, so the last letter acts first.
                std::vector<FrameStep> steps;
                for (auto it = word.letters().rbegin(); it != word.letters().rend(); ++it) {
                    steps.push_back({letter_matrix(*it), 3});
                }
                p[g].push_back(std::move(steps));
            }
        }
        return p;
    }

    GateWord compile_one(const ComplexMatrix& target, double budget) const {
        const GateWord w = sk_decompose(target, depth_, *net_);
        const double eps = phase_invariant_distance(w.product(), target);
        if (eps > budget) {
            std::ostringstream os;
            os << "sk accuracy " << eps << " exceeds the per-gate budget " << budget;
            throw ProtocolError(os.str());
        }
        return pad_to_length(w, word_length());
    }

    int depth_;
    std::shared_ptr<const EpsilonNet> net_;
};

class SkAttack : public CoalitionStrategy {
public:
    SkAttack(int depth, int l0) : depth_(depth), net_(std::make_shared<EpsilonNet>(build_net(l0))), planner_(depth, net_) {
        if (depth < 0 || depth > kMaxSkDepth) throw ValidationError("sk depth out of range");
    }
    std::string name() const override { return "sk:" + std::to_string(depth_); }
    void check_compatible(const GameSpec& spec) const override {
        const auto& ip = require_ip(spec, "sk attack");
        if (!(ip.eta_err > 0.0)) throw ValidationError("sk attack needs eta_err > 0 for its accuracy budget");
        if (ip.n > 64 || ip.t > 4) throw ResourceError("sk attack limited to n <= 64, t <= 4");
    }
    std::unique_ptr<CoalitionSession> new_session(const GameSpec& spec, SessionStreams s) const override {
        return std::make_unique<FrameSession>(planner_, spec, std::move(s));
    }
    BigInt reserved_epr(const GameSpec& spec) const override {
        const auto& ip = require_ip(spec, "sk attack");
        return sk_cost(ip.t, static_cast<int>(planner_.word_length()), true, static_cast<int>(ip.n)).reserved_epr;
    }

private:
    int depth_;
    std::shared_ptr<const EpsilonNet> net_;
    SkPlanner planner_;
};

// -- port-based teleportation --

struct PbtAliceMessage : Message {
    Bits failed;
    Bits lost;
};
struct PbtBobMessage : Message {
    Bits z;
};

class PbtSession : public CoalitionSession {
public:
    PbtSession(const std::vector<std::shared_ptr<const PbtChannel>>& hops, IPGameSpec spec, SessionStreams s)
        : hops_(hops), spec_(std::move(spec)), streams_(std::move(s)) {}
    EntanglementLedger ledger() const override { return {0, consumed_}; }

protected:
    void do_alice_act(const AliceInput& in) override {
        payload_ = in.payload;
        v0_ = in.v0_classical;
        msg_a_ = std::make_shared<PbtAliceMessage>();
        msg_a_->lost = in.lost;
    }
    void do_bob_act(const BobInput& in) override {
        v1_ = in.v1_classical;
        msg_b_ = std::make_shared<PbtBobMessage>();
    }
    std::shared_ptr<const Message> do_alice_message() override {
        run_lab();
        return msg_a_;
    }
    std::shared_ptr<const Message> do_bob_message() override {
        run_lab();
        return msg_b_;
    }
    Answer do_alice_finalize(const Message& m) override { return decode(*msg_a_, dynamic_cast<const PbtBobMessage&>(m)); }
    Answer do_bob_finalize(const Message& m) override { return decode(dynamic_cast<const PbtAliceMessage&>(m), *msg_b_); }

private:
    void run_lab() {
        if (lab_done_) return;
        lab_done_ = true;
        const auto t = static_cast<std::size_t>(spec_.t);
        for (std::size_t r = 0; r < payload_.registers.size(); ++r) {
            const std::size_t base = spec_.per_qubit_unitary ? r * t : 0;
            const auto& a = payload_.registers[r].amplitudes();
            ComplexMatrix rho = a * a.adjoint();
            bool failed = false;
            for (std::size_t h = 0; h < hops_.size(); ++h) {
                // Even hops leave Alice after u_{h/2+1}^dag, odd hops leave Bob after v_{(h+1)/2}^dag.
                const ComplexMatrix& f = h % 2 == 0 ? v0_.at(base + h / 2) : v1_.at(base + h / 2);
                rho = f.adjoint() * rho * f;
                const PbtChannel& ch = *hops_[h];
                consumed_ += ch.num_ports();
                const double u = streams_.lab.uniform();
                double acc = 0.0;
                std::size_t outcome = ch.num_ports();
                ComplexMatrix out;
                for (std::size_t i = 0; i <= ch.num_ports(); ++i) {
                    out = ch.branch(i, rho);
                    acc += out.trace().real();
                    if (u < acc || i == ch.num_ports()) {
                        outcome = i;
                        break;
                    }
                }
                if (outcome == ch.num_ports()) {
                    failed = true;
                    break;
                }
                rho = out / out.trace().real();
            }
            msg_a_->failed.push_back(failed);
            if (failed) {
                msg_b_->z.push_back(0);
                continue;
            }
            const ComplexMatrix& last = v1_.at(base + t - 1);
            rho = last.adjoint() * rho * last;
            const double p1 = std::clamp(rho(1, 1).real(), 0.0, 1.0);
            msg_b_->z.push_back(streams_.lab.uniform() < p1 ? 1 : 0);
        }
    }

    Answer decode(const PbtAliceMessage& a, const PbtBobMessage& b) const {
        RngStream shared = streams_.shared;
        Answer out(b.z.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            const int coin = shared.bit();
            out[i] = static_cast<std::int8_t>(a.failed[i] ? coin : b.z[i]);
        }
        fill_lost(out, a.lost, true, streams_.shared.split(1));
        return out;
    }

    const std::vector<std::shared_ptr<const PbtChannel>>& hops_;
    IPGameSpec spec_;
    SessionStreams streams_;
    Payload payload_;
    std::vector<ComplexMatrix> v0_, v1_;
    std::shared_ptr<PbtAliceMessage> msg_a_;
    std::shared_ptr<PbtBobMessage> msg_b_;
    bool lab_done_ = false;
    std::uint64_t consumed_ = 0;
};

class PbtAttack : public CoalitionStrategy {
public:
    explicit PbtAttack(std::vector<int> ports) : ports_(std::move(ports)) {
        if (ports_.empty()) throw ValidationError("pbt attack needs at least one port count");
        for (int m : ports_) {
            if (m < static_cast<int>(PbtChannel::kMinPorts) || m > static_cast<int>(PbtChannel::kMaxPorts)) {
                throw ValidationError("pbt port counts must lie in [2, 8]");
            }
            if (!channels_.count(m)) {
                channels_[m] = std::make_shared<const PbtChannel>(build_pbt_channel(static_cast<std::size_t>(m)));
            }
        }
    }
    std::string name() const override {
        std::string s = "pbt:";
        for (std::size_t i = 0; i < ports_.size(); ++i) s += (i ? "," : "") + std::to_string(ports_[i]);
        return s;
    }
    void check_compatible(const GameSpec& spec) const override {
        const auto& ip = require_ip(spec, "pbt attack");
        if (ports_.size() != 1 && ports_.size() != static_cast<std::size_t>(2 * ip.t - 1)) {
            throw ValidationError("pbt attack needs 1 or 2t-1 port counts");
        }
    }
    std::unique_ptr<CoalitionSession> new_session(const GameSpec& spec, SessionStreams s) const override {
        const auto& ip = require_ip(spec, "pbt attack");
        // Hop lists are cached per hop count so sessions can hold a reference.
        std::lock_guard lock(mutex_);
        auto& hops = hop_cache_[ip.t];
        if (hops.empty()) {
            for (int m : hop_ports(ip)) hops.push_back(channels_.at(m));
        }
        return std::make_unique<PbtSession>(hops, ip, std::move(s));
    }
    BigInt reserved_epr(const GameSpec& spec) const override {
        const auto& ip = require_ip(spec, "pbt attack");
        return pbt_cost(static_cast<int>(ip.n), hop_ports(ip)).reserved_epr;
    }

private:
    std::vector<int> hop_ports(const IPGameSpec& ip) const {
        if (ports_.size() == 1) return std::vector<int>(static_cast<std::size_t>(2 * ip.t - 1), ports_[0]);
        return ports_;
    }
    std::vector<int> ports_;
    std::map<int, std::shared_ptr<const PbtChannel>> channels_;
    mutable std::mutex mutex_;
    mutable std::map<int, std::vector<std::shared_ptr<const PbtChannel>>> hop_cache_;
};

// -- non-entangled --

struct SnapshotMessage : Message {
    std::vector<ComplexVector> states;  // post-measurement state per qubit
    Bits lost;
    std::vector<ComplexMatrix> share;
};

struct ShareMessage : Message {
    std::vector<ComplexMatrix> share;
};

class RandomBasisSession : public CoalitionSession {
public:
    RandomBasisSession(IPGameSpec spec, SessionStreams s, bool lossy)
        : spec_(std::move(spec)), streams_(std::move(s)), lossy_(lossy) {}

protected:
    void do_alice_act(const AliceInput& in) override {
        msg_a_ = std::make_shared<SnapshotMessage>();
        msg_a_->lost = in.lost;
        msg_a_->share = in.v0_classical;
        for (const auto& r : in.payload.registers) {
            const ComplexMatrix v = haar_random_unitary(2, streams_.alice);
            const ComplexVector rotated = v.adjoint() * r.amplitudes();
            const int b = streams_.alice.uniform() < std::norm(rotated(1)) ? 1 : 0;
            msg_a_->states.push_back(v.col(b));
        }
    }
    void do_bob_act(const BobInput& in) override {
        msg_b_ = std::make_shared<ShareMessage>();
        msg_b_->share = in.v1_classical;
    }
    std::shared_ptr<const Message> do_alice_message() override { return msg_a_; }
    std::shared_ptr<const Message> do_bob_message() override { return msg_b_; }
    Answer do_alice_finalize(const Message& m) override { return decode(*msg_a_, dynamic_cast<const ShareMessage&>(m)); }
    Answer do_bob_finalize(const Message& m) override { return decode(dynamic_cast<const SnapshotMessage&>(m), *msg_b_); }

private:
    Answer decode(const SnapshotMessage& a, const ShareMessage& b) const {
        const std::size_t n = a.states.size();
        Answer out(n);
        std::vector<double> confidence(n);
        ComplexMatrix shared_u;
        if (!spec_.per_qubit_unitary) shared_u = ip_product_of(a.share, b.share, spec_, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const ComplexMatrix u = spec_.per_qubit_unitary ? ip_product_of(a.share, b.share, spec_, i) : shared_u;
            const ComplexVector w = u.adjoint() * a.states[i];
            const double p0 = std::norm(w(0)), p1 = std::norm(w(1));
            out[i] = p1 > p0 ? 1 : 0;  // ties go to 0
            confidence[i] = std::max(p0, p1);
        }
        if (lossy_) {
            // Largest count strictly below eta_loss·n, least confident first.
            const double limit = spec_.eta_loss * static_cast<double>(n);
            std::size_t drop = static_cast<std::size_t>(std::ceil(limit - 1e-9));
            drop = drop > 0 ? drop - 1 : 0;
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t l, std::size_t r) { return confidence[l] < confidence[r]; });
            for (std::size_t k = 0; k < drop && k < n; ++k) out[order[k]] = kNoResult;
        }
        fill_lost(out, a.lost, true, streams_.shared);
        return out;
    }

    IPGameSpec spec_;
    SessionStreams streams_;
    bool lossy_;
    std::shared_ptr<SnapshotMessage> msg_a_;
    std::shared_ptr<ShareMessage> msg_b_;
};

class RandomBasisAttack : public CoalitionStrategy {
public:
    explicit RandomBasisAttack(bool lossy) : lossy_(lossy) {}
    std::string name() const override { return lossy_ ? "lossy-confidence" : "random-basis"; }
    void check_compatible(const GameSpec& spec) const override {
        const auto& ip = require_ip(spec, name());
        if (lossy_ && ip.eta_loss >= 1.0) throw ValidationError("lossy-confidence needs eta_loss < 1");
    }
    std::unique_ptr<CoalitionSession> new_session(const GameSpec& spec, SessionStreams s) const override {
        return std::make_unique<RandomBasisSession>(require_ip(spec, name()), std::move(s), lossy_);
    }
    BigInt reserved_epr(const GameSpec&) const override { return 0; }

private:
    bool lossy_;
};

class BreidbartSession : public CoalitionSession {
public:
    explicit BreidbartSession(SessionStreams s) : streams_(std::move(s)) {}

protected:
    void do_alice_act(const AliceInput& in) override {
        msg_ = std::make_shared<BitsMessage>();
        msg_->lost = in.lost;
        const double c = std::cos(M_PI / 8), s = std::sin(M_PI / 8);
        for (const auto& r : in.payload.registers) {
            const auto& a = r.amplitudes();
            // Overlap with -sin|0> + cos|1>.
            const double p1 = std::norm(-s * a(0) + c * a(1));
            msg_->bits.push_back(streams_.alice.uniform() < p1 ? 1 : 0);
        }
    }
    void do_bob_act(const BobInput&) override {}
    std::shared_ptr<const Message> do_alice_message() override { return msg_; }
    std::shared_ptr<const Message> do_bob_message() override { return std::make_shared<BitsMessage>(); }
    Answer do_alice_finalize(const Message&) override { return answer(*msg_); }
    Answer do_bob_finalize(const Message& m) override { return answer(dynamic_cast<const BitsMessage&>(m)); }

private:
    Answer answer(const BitsMessage& m) const {
        Answer out = to_answer(m.bits);
        fill_lost(out, m.lost, false, streams_.shared);
        return out;
    }
    SessionStreams streams_;
    std::shared_ptr<BitsMessage> msg_;
};

class BreidbartAttack : public CoalitionStrategy {
public:
    std::string name() const override { return "breidbart"; }
    void check_compatible(const GameSpec& spec) const override {
        const auto& b = require_basis(spec, name());
        if (b.family.kind != FamilyKind::Bb84) throw ValidationError("breidbart attack requires the bb84 family");
    }
    std::unique_ptr<CoalitionSession> new_session(const GameSpec&, SessionStreams s) const override {
        return std::make_unique<BreidbartSession>(std::move(s));
    }
    BigInt reserved_epr(const GameSpec&) const override { return 0; }
};

class RandomGuessSession : public CoalitionSession {
public:
    RandomGuessSession(std::size_t n, SessionStreams s) : n_(n), streams_(std::move(s)) {}

protected:
    void do_alice_act(const AliceInput&) override {}
    void do_bob_act(const BobInput&) override {}
    std::shared_ptr<const Message> do_alice_message() override { return std::make_shared<BitsMessage>(); }
    std::shared_ptr<const Message> do_bob_message() override { return std::make_shared<BitsMessage>(); }
    Answer do_alice_finalize(const Message&) override { return guess(); }
    Answer do_bob_finalize(const Message&) override { return guess(); }

private:
    Answer guess() const {
        RngStream shared = streams_.shared;
        Answer out(n_);
        for (auto& v : out) v = static_cast<std::int8_t>(shared.bit());
        return out;
    }
    std::size_t n_;
    SessionStreams streams_;
};

class RandomGuessAttack : public CoalitionStrategy {
public:
    std::string name() const override { return "random-guess"; }
    void check_compatible(const GameSpec&) const override {}
    std::unique_ptr<CoalitionSession> new_session(const GameSpec& spec, SessionStreams s) const override {
        return std::make_unique<RandomGuessSession>(spec_qubits(spec), std::move(s));
    }
    BigInt reserved_epr(const GameSpec&) const override { return 0; }
};

int parse_int(const std::string& s, const std::string& id) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw ValidationError("bad integer '" + s + "' in strategy '" + id + "'");
    return v;
}

}  // namespace

std::unique_ptr<CoalitionStrategy> make_pauli_attack() { return std::make_unique<PauliAttack>(); }
std::unique_ptr<CoalitionStrategy> make_clifford_attack() {
    return std::make_unique<SingleStepAttack>("clifford", 2, false, true);
}
std::unique_ptr<CoalitionStrategy> make_tree_attack(int k) {
    if (k < 2 || k > 4) throw ValidationError("tree attack supports levels 2 to 4");
    return std::make_unique<SingleStepAttack>("tree:" + std::to_string(k), k, true, false);
}
std::unique_ptr<CoalitionStrategy> make_layout_attack(CircuitLayout layout) {
    return std::make_unique<LayoutAttack>(std::move(layout));
}
std::unique_ptr<CoalitionStrategy> make_pbt_attack(std::vector<int> ports) {
    return std::make_unique<PbtAttack>(std::move(ports));
}
std::unique_ptr<CoalitionStrategy> make_sk_attack(int depth, int l0) { return std::make_unique<SkAttack>(depth, l0); }
std::unique_ptr<CoalitionStrategy> make_random_basis_attack() { return std::make_unique<RandomBasisAttack>(false); }
std::unique_ptr<CoalitionStrategy> make_lossy_confidence_attack() { return std::make_unique<RandomBasisAttack>(true); }
std::unique_ptr<CoalitionStrategy> make_breidbart_attack() { return std::make_unique<BreidbartAttack>(); }
std::unique_ptr<CoalitionStrategy> make_random_guess_attack() { return std::make_unique<RandomGuessAttack>(); }

std::unique_ptr<CoalitionStrategy> make_strategy(const std::string& id) {
    const auto colon = id.find(':');
    const std::string head = id.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : id.substr(colon + 1);
    const bool has_arg = colon != std::string::npos;
    const auto no_arg = [&] {
        if (has_arg) throw ValidationError("strategy '" + head + "' takes no parameter");
    };
    if (head == "pauli") return no_arg(), make_pauli_attack();
    if (head == "clifford") return no_arg(), make_clifford_attack();
    if (head == "random-basis") return no_arg(), make_random_basis_attack();
    if (head == "lossy-confidence") return no_arg(), make_lossy_confidence_attack();
    if (head == "breidbart") return no_arg(), make_breidbart_attack();
    if (head == "random-guess") return no_arg(), make_random_guess_attack();
    if (head == "tree") return make_tree_attack(parse_int(arg, id));
    if (head == "sk") return make_sk_attack(parse_int(arg, id));
    if (head == "pbt") {
        std::vector<int> ports;
        std::stringstream ss(arg);
        for (std::string item; std::getline(ss, item, ',');) ports.push_back(parse_int(item, id));
        return make_pbt_attack(std::move(ports));
    }
    if (head == "layout") {
        std::ifstream in(arg);
        if (!arg.size() || !in) throw ValidationError("cannot read layout file '" + arg + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        return make_layout_attack(parse_layout_json(buf.str()));
    }
    throw ValidationError("unknown strategy '" + id + "'");
}

}  // namespace pbqc
