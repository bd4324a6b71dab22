#include <gtest/gtest.h>

#include <cmath>

#include "pbqc/error.hpp"
#include "pbqc/gates.hpp"
#include "pbqc/linalg.hpp"
#include "pbqc/protocols.hpp"

using namespace pbqc;

namespace {

BasisGameSpec basis(std::size_t n, const char* family, double eta = 0.0) {
    return BasisGameSpec{n, UnitaryFamily::named(family), eta};
}

Answer as_answer(const Bits& b) { return Answer(b.begin(), b.end()); }

}  // namespace

TEST(BasisChallenge, IdentityFamilyPayloadIsX) {
    RngStream rng(3);
    for (int i = 0; i < 20; ++i) {
        const auto c = gen_basis_challenge(basis(3, "identity"), rng);
        ASSERT_EQ(c.payload.registers.size(), 1u);
        const auto& a = c.payload.registers[0].amplitudes();
        EXPECT_NEAR(std::abs(a(static_cast<Eigen::Index>(bits_to_index(c.secret.x)))), 1.0, 1e-12);
    }
}

TEST(BasisChallenge, Bb84PayloadsAreTheFourStates) {
    RngStream rng(4);
    const double r = 1.0 / std::sqrt(2.0);
    int hadamard = 0;
    for (int i = 0; i < 400; ++i) {
        const auto c = gen_basis_challenge(basis(1, "bb84"), rng);
        const auto& a = c.payload.registers[0].amplitudes();
        const bool comp = std::abs(std::abs(a(0)) - 1.0) < 1e-12 || std::abs(std::abs(a(1)) - 1.0) < 1e-12;
        const bool diag = std::abs(std::abs(a(0)) - r) < 1e-12 && std::abs(std::abs(a(1)) - r) < 1e-12;
        EXPECT_TRUE(comp || diag);
        hadamard += diag;
    }
    EXPECT_GT(hadamard, 150);
    EXPECT_LT(hadamard, 250);
}

TEST(BasisChallenge, SecretMarginalIsUniform) {
    RngStream rng(5);
    std::vector<int> counts(16, 0);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) ++counts[bits_to_index(gen_basis_challenge(basis(4, "pauli"), rng).secret.x)];
    double chi2 = 0;
    for (int k : counts) chi2 += (k - draws / 16.0) * (k - draws / 16.0) / (draws / 16.0);
    EXPECT_LT(chi2, 37.7);  // df 15, p = 0.001
}

TEST(BasisChallenge, EmptyExplicitFamilyRejected) {
    BasisGameSpec s;
    s.family.kind = FamilyKind::Explicit;
    RngStream rng(1);
    EXPECT_THROW(gen_basis_challenge(s, rng), ValidationError);
    EXPECT_THROW(UnitaryFamily::named("nope"), ValidationError);
    s.family.members = {gates::T()};
    s.eta = 1.5;
    EXPECT_THROW(gen_basis_challenge(s, rng), ValidationError);
}

TEST(IPChallenge, ProductClosesOnU) {
    RngStream rng(6);
    for (int t = 1; t <= 4; ++t) {
        for (int i = 0; i < 50; ++i) {
            IPGameSpec s{2, t, 0.0, 0.0, false};
            const auto c = gen_ip_challenge(s, rng);
            ASSERT_EQ(c.v0_classical.size(), static_cast<std::size_t>(t));
            EXPECT_LE(phase_invariant_distance(ip_product(c, s, 0), c.secret.unitaries[0]), t == 1 ? 1e-10 : 1e-9);
        }
    }
}

TEST(IPChallenge, PerQubitVariantClosesPerRegister) {
    RngStream rng(7);
    IPGameSpec s{3, 2, 0.0, 0.0, true};
    const auto c = gen_ip_challenge(s, rng);
    ASSERT_EQ(c.v1_classical.size(), 6u);
    for (std::size_t q = 0; q < 3; ++q) {
        EXPECT_LE(phase_invariant_distance(ip_product(c, s, q), c.secret.unitaries[q]), 1e-9);
    }
    EXPECT_GT(phase_invariant_distance(c.secret.unitaries[0], c.secret.unitaries[1]), 1e-3);
}

TEST(IPChallenge, LastFactorIsHaarDistributed) {
    // For Haar U(2), |U_00|^2 is uniform on [0, 1]: moments 1/2 and 1/3.
    RngStream rng(8);
    const int draws = 10000;
    double m1 = 0, m2 = 0;
    for (int i = 0; i < draws; ++i) {
        const auto c = gen_ip_challenge(IPGameSpec{1, 3, 0, 0, false}, rng);
        const double p = std::norm(c.v1_classical.back()(0, 0));
        m1 += p;
        m2 += p * p;
    }
    m1 /= draws;
    m2 /= draws;
    EXPECT_NEAR(m1, 0.5, 4 * 0.2887 / std::sqrt(draws));
    EXPECT_NEAR(m2, 1.0 / 3.0, 4 * 0.2981 / std::sqrt(draws));
}

TEST(Verify, BasisThresholdIsInclusive) {
    Bits x(10, 0);
    Answer y = as_answer(x);
    EXPECT_TRUE(verify_basis(x, y, y, 0.0).accepted);
    y[3] = 1;
    EXPECT_FALSE(verify_basis(x, y, y, 0.0).accepted);
    y[7] = 1;
    const auto v = verify_basis(x, y, y, 0.2);
    EXPECT_TRUE(v.accepted);
    EXPECT_EQ(v.error_count, 2u);
    Answer z = y;
    z[0] = 1;
    EXPECT_FALSE(verify_basis(x, y, z, 1.0).accepted);
    EXPECT_FALSE(verify_basis(x, y, z, 1.0).answers_equal);
}

TEST(Verify, IPThresholdIsStrict) {
    Bits x(10, 1);
    Answer y = as_answer(x);
    EXPECT_TRUE(verify_ip(x, y, y, 0.0, 0.0).accepted);
    EXPECT_TRUE(verify_ip(x, y, y, 0.3, 0.3).accepted);
    Answer lost(10, kNoResult);
    const auto v = verify_ip(x, lost, lost, 1.0, 1.0);
    EXPECT_EQ(v.loss_count, 10u);
    EXPECT_EQ(v.error_count, 0u);
    EXPECT_FALSE(v.accepted);
    y[2] = 0;
    EXPECT_TRUE(verify_ip(x, y, y, 0.2, 0.0).accepted);
    y[5] = 0;
    EXPECT_FALSE(verify_ip(x, y, y, 0.2, 0.0).accepted);
    EXPECT_THROW(verify_ip(x, Answer(9, 0), Answer(9, 0), 0.5, 0.5), ValidationError);
}

TEST(Verify, MonotoneInThresholds) {
    RngStream rng(9);
    for (int i = 0; i < 200; ++i) {
        Bits x(12);
        Answer y(12);
        for (std::size_t k = 0; k < 12; ++k) {
            x[k] = static_cast<std::uint8_t>(rng.bit());
            const auto r = rng.index(5);
            y[k] = r == 0 ? kNoResult : r == 1 ? static_cast<std::int8_t>(1 - x[k]) : static_cast<std::int8_t>(x[k]);
        }
        const double e = rng.uniform(), l = rng.uniform();
        if (verify_ip(x, y, y, e, l).accepted) {
            EXPECT_TRUE(verify_ip(x, y, y, std::min(1.0, e + 0.1), std::min(1.0, l + 0.1)).accepted);
        }
        if (verify_basis(x, y, y, e).accepted) EXPECT_TRUE(verify_basis(x, y, y, std::min(1.0, e + 0.1)).accepted);
    }
}

TEST(Channel, ExtremesAndDepolarizing) {
    RngStream rng(10);
    Payload p;
    for (int i = 0; i < 5; ++i) p.registers.push_back(StateVector::basis(1, 0));
    const auto all = apply_channel(p, {1.0, 0.0}, rng);
    for (auto b : all.lost) EXPECT_EQ(b, 1);
    const auto none = apply_channel(p, {0.0, 0.0}, rng);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(none.lost[i], 0);
        EXPECT_NEAR(std::abs(none.payload.registers[i].inner(p.registers[i])), 1.0, 1e-12);
    }
    // p_dep = 1 leaves the maximally mixed state.
    int ones = 0;
    const int draws = 10000;
    Payload one{{StateVector::basis(1, 0)}};
    for (int i = 0; i < draws; ++i) {
        auto out = apply_channel(one, {0.0, 1.0}, rng);
        ones += measure_all(out.payload.registers[0], rng).outcome[0];
    }
    EXPECT_NEAR(ones / double(draws), 0.5, 0.02);
    EXPECT_THROW(apply_channel(p, {-0.1, 0.0}, rng), ValidationError);
}

TEST(HonestProver, NoiselessAlwaysCorrect) {
    RngStream rng(11);
    for (const char* fam : {"identity", "pauli", "clifford", "haar", "c3", "bb84"}) {
        const std::size_t n = std::string(fam) == "c3" ? 2 : 3;
        for (int i = 0; i < 100; ++i) {
            const auto c = gen_basis_challenge(basis(n, fam), rng);
            EXPECT_EQ(honest_prover_basis(c, Bits(n, 0), rng), as_answer(c.secret.x)) << fam;
        }
    }
    for (int i = 0; i < 100; ++i) {
        IPGameSpec s{4, 3, 0, 0, i % 2 == 1};
        const auto c = gen_ip_challenge(s, rng);
        EXPECT_EQ(honest_prover_ip(c, s, Bits(4, 0), rng), as_answer(c.secret.x));
    }
}

TEST(HonestProver, LossFractionIsBinomial) {
    RngStream rng(12);
    IPGameSpec s{10000, 1, 0, 0, false};
    const auto c = gen_ip_challenge(s, rng);
    const auto out = apply_channel(c.payload, {0.5, 0.0}, rng);
    Challenge seen = c;
    seen.payload = out.payload;
    const auto y = honest_prover_ip(seen, s, out.lost, rng);
    std::size_t empty = 0, wrong = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == kNoResult) ++empty;
        else wrong += y[i] != static_cast<std::int8_t>(c.secret.x[i]);
    }
    EXPECT_NEAR(empty / 10000.0, 0.5, 0.015);
    EXPECT_EQ(wrong, 0u);
}

TEST(HonestProver, DepolarizingErrorRate) {
    // A uniform Pauli flips a computational outcome with probability 1/2, so
    // the bit error rate is p_dep / 2.
    ChannelModel ch{0.0, 0.1};
    const auto st = run_game(basis(200, "bb84", 1.0), nullptr, ch, {200, 13, 1, false});
    EXPECT_NEAR(st.mean_error_fraction, 0.05, 0.005);
    ::testing::Test::RecordProperty("depolarizing_error_rate", std::to_string(st.mean_error_fraction));
}

TEST(StateBank, IssueRedeemOnce) {
    StateBank bank;
    RngStream rng(14);
    IPGameSpec s{3, 2, 0, 0, false};
    const auto id = bank_issue(s, bank, rng);
    const auto id2 = bank_issue(s, bank, rng);
    EXPECT_NE(id, id2);
    EXPECT_EQ(bank.outstanding(), 2u);
    const auto c = bank_redeem(bank, id);
    EXPECT_EQ(honest_prover_ip(c, s, Bits(3, 0), rng), as_answer(c.secret.x));
    EXPECT_THROW(bank_redeem(bank, id), ProtocolError);
    EXPECT_THROW(bank_redeem(bank, "deadbeef"), ProtocolError);
    EXPECT_EQ(bank.outstanding(), 1u);
}

TEST(RunGame, HonestWinsEverywhere) {
    for (std::size_t n : {1u, 3u, 6u}) {
        const auto st = run_game(basis(n, "haar"), nullptr, {}, {200, 1, 1, false});
        EXPECT_EQ(st.win_rate, 1.0);
        EXPECT_EQ(st.mean_epr_consumed, 0.0);
        EXPECT_EQ(st.reserved_epr, 0);
    }
    for (int t : {1, 4}) {
        const auto st = run_game(IPGameSpec{8, t, 0, 0, false}, nullptr, {}, {200, 2, 1, false});
        EXPECT_EQ(st.win_rate, 1.0);
    }
}

TEST(RunGame, BankSurvivesLossyChannel) {
    IPGameSpec s{20, 2, 0.0, 0.5, false};
    const ChannelModel ch{0.9, 0.0};
    const auto bank = run_game(s, nullptr, ch, {100, 3, 1, true});
    EXPECT_EQ(bank.win_rate, 1.0);
    const auto direct = run_game(s, nullptr, ch, {100, 3, 1, false});
    EXPECT_EQ(direct.win_rate, 0.0);
    EXPECT_GT(direct.mean_losses, 0.5 * 20);
    EXPECT_THROW(run_game(basis(1, "haar"), nullptr, ch, {10, 3, 1, true}), ValidationError);
}

TEST(RunGame, DeterministicAcrossThreads) {
    const ChannelModel ch{0.2, 0.1};
    IPGameSpec s{6, 2, 0.3, 0.4, false};
    const auto a = run_game(s, nullptr, ch, {300, 77, 1, false});
    const auto b = run_game(s, nullptr, ch, {300, 77, 4, false});
    EXPECT_EQ(a.wins, b.wins);
    EXPECT_EQ(a.mean_errors, b.mean_errors);
    EXPECT_EQ(a.error_histogram, b.error_histogram);
    for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].errors, b.records[i].errors);
    const auto c = run_game(s, nullptr, ch, {300, 78, 1, false});
    EXPECT_NE(a.error_histogram, c.error_histogram);
}

TEST(RunGame, ZeroTrialsRejected) {
    EXPECT_THROW(run_game(basis(1, "haar"), nullptr, {}, {0, 1, 1, false}), ValidationError);
}

namespace {

struct Empty : Message {};

class NullSession : public CoalitionSession {
protected:
    void do_alice_act(const AliceInput&) override {}
    void do_bob_act(const BobInput&) override {}
    std::shared_ptr<const Message> do_alice_message() override { return std::make_shared<Empty>(); }
    std::shared_ptr<const Message> do_bob_message() override { return std::make_shared<Empty>(); }
    Answer do_alice_finalize(const Message&) override { return {}; }
    Answer do_bob_finalize(const Message&) override { return {}; }
};

}  // namespace

TEST(Session, SingleRoundOrderingEnforced) {
    Payload p;
    Bits lost;
    std::vector<ComplexMatrix> share;
    {
        NullSession s;
        EXPECT_THROW(s.alice_message(), ProtocolError);
        s.alice_act({p, lost, share});
        EXPECT_THROW(s.alice_act({p, lost, share}), ProtocolError);
        EXPECT_THROW(s.alice_message(), ProtocolError);  // Bob has not acted
        s.bob_act({share});
        const auto ma = s.alice_message();
        EXPECT_THROW(s.alice_finalize(*ma), ProtocolError);  // no partner message yet
        const auto mb = s.bob_message();
        EXPECT_THROW(s.bob_message(), ProtocolError);  // no second exchange
        s.alice_finalize(*mb);
        s.bob_finalize(*ma);
        EXPECT_THROW(s.bob_finalize(*ma), ProtocolError);
    }
}
