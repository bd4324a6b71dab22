#include <cmath>

#include <gtest/gtest.h>

#include "pbqc/clifford.hpp"
#include "pbqc/error.hpp"
#include "pbqc/gates.hpp"
#include "pbqc/linalg.hpp"
#include "pbqc/sk.hpp"

using namespace pbqc;

namespace {

const EpsilonNet& net12() {
    static const EpsilonNet net = build_net(12);
    return net;
}

bool contains_word(const EpsilonNet& net, const std::vector<Letter>& letters) {
    const GateWord target(letters);
    for (const auto& e : net.entries)
        if (phase_invariant_distance(e.product(), target.product()) < 1e-9) return true;
    return false;
}

}  // namespace

TEST(GateWord, ProductIsLeftToRight) {
    const GateWord w({Letter::H, Letter::T, Letter::I, Letter::Tdg, Letter::H, Letter::T});
    const ComplexMatrix expected = gates::H() * gates::T() * gates::Tdg() * gates::H() * gates::T();
    EXPECT_LT(max_abs(w.product() - expected), 1e-12);
    EXPECT_EQ(w.size(), 6u);
    EXPECT_EQ(w.to_string(), "H T I Tdg H T");
}

TEST(GateWord, InverseAndConcatenation) {
    RngStream rng(1);
    for (int i = 0; i < 50; ++i) {
        std::vector<Letter> letters;
        for (int j = 0; j < 20; ++j) letters.push_back(static_cast<Letter>(rng.index(4)));
        const GateWord w(letters);
        EXPECT_LT(max_abs((w + w.inverse()).product() - gates::identity(1)), 1e-12);
        EXPECT_LT(max_abs(w.inverse().product() - w.product().adjoint()), 1e-12);
    }
}

TEST(GateWord, SimplificationKeepsProduct) {
    RngStream rng(2);
    for (int i = 0; i < 200; ++i) {
        std::vector<Letter> letters;
        for (int j = 0; j < 40; ++j) letters.push_back(static_cast<Letter>(rng.index(4)));
        const GateWord w(letters);
        const auto s = w.simplified();
        EXPECT_LE(s.size(), w.size());
        EXPECT_LT(max_abs(s.product() - w.product()), 1e-12);
        EXPECT_LT(max_abs(s.product() - GateWord(s.letters()).product()), 1e-12);
    }
    EXPECT_EQ(GateWord({Letter::H, Letter::T, Letter::Tdg, Letter::H}).simplified().size(), 0u);
    EXPECT_EQ(GateWord(std::vector<Letter>(6, Letter::T)).simplified().letters(), std::vector<Letter>(2, Letter::Tdg));
}

TEST(EpsilonNet, SmallNetsContainGenerators) {
    const auto n1 = build_net(1);
    EXPECT_TRUE(contains_word(n1, {Letter::H}));
    EXPECT_TRUE(contains_word(n1, {Letter::T}));
    EXPECT_TRUE(contains_word(n1, {Letter::Tdg}));
    const auto n2 = build_net(2);
    ASSERT_TRUE(contains_word(n2, {Letter::H, Letter::T}));
    for (const auto& e : n2.entries)
        if (e.letters() == std::vector<Letter>{Letter::H, Letter::T})
            EXPECT_LT(max_abs(e.product() - gates::H() * gates::T()), 1e-12);
}

TEST(EpsilonNet, EntriesAreDistinctAndConsistent) {
    const auto& net = net12();
    for (const auto& e : net.entries) {
        EXPECT_LE(e.size(), 12u);
        EXPECT_LT(max_abs(e.product() - GateWord(e.letters()).product()), 1e-12);
    }
    // Spot-check dedup on the first few hundred entries.
    for (std::size_t i = 0; i < 300; ++i)
        for (std::size_t j = i + 1; j < 300; ++j)
            EXPECT_GE(phase_invariant_distance(net.entries[i].product(), net.entries[j].product()), 1e-6);
}

TEST(EpsilonNet, CoveringRadiusAtTwelve) {
    const auto& net = net12();
    EXPECT_LT(net.covering_radius, 0.3);
    // Independent nearest-neighbour scan with the matrix distance.
    RngStream rng(3);
    for (int i = 0; i < 30; ++i) {
        const auto u = haar_random_unitary(2, rng);
        double best = 10.0;
        for (const auto& e : net.entries) best = std::min(best, phase_invariant_distance(u, e.product()));
        EXPECT_NEAR(net.nearest(u).distance, best, 1e-9);
    }
}

TEST(EpsilonNet, LengthLimits) {
    EXPECT_THROW(build_net(0), ValidationError);
    EXPECT_THROW(build_net(17), ResourceError);
}

TEST(CommutatorFactor, IdentityGivesIdentity) {
    const auto [v, w] = commutator_factor(gates::identity(1));
    EXPECT_LT(max_abs(v - gates::identity(1)), 1e-12);
    EXPECT_LT(max_abs(w - gates::identity(1)), 1e-12);
}

TEST(CommutatorFactor, ReconstructsAndIsBalanced) {
    RngStream rng(4);
    for (int i = 0; i < 100; ++i) {
        const double theta = 0.9 * rng.uniform();
        const ComplexMatrix delta = gates::rotation(theta, rng.normal(), rng.normal(), rng.normal());
        const auto [v, w] = commutator_factor(delta);
        EXPECT_LT(max_abs(v * w * v.adjoint() * w.adjoint() - delta), 1e-9);
        const double dnorm = (delta - gates::identity(1)).operatorNorm();
        if (dnorm > 1e-12) {
            EXPECT_LT((v - gates::identity(1)).operatorNorm() / std::sqrt(dnorm), 3.0);
            EXPECT_LT((w - gates::identity(1)).operatorNorm() / std::sqrt(dnorm), 3.0);
        }
    }
}

TEST(CommutatorFactor, RejectsFarResidual) {
    EXPECT_THROW(commutator_factor(gates::H()), ValidationError);
}

TEST(SkDecompose, NetHitIsExact) {
    for (int d = 0; d <= 3; ++d) {
        const auto w = sk_decompose(gates::H(), d, net12());
        EXPECT_LT(phase_invariant_distance(w.product(), gates::H()), 1e-9) << d;
    }
}

TEST(SkDecompose, WithinRecursionBoundAndImproves) {
    const auto& net = net12();
    RngStream rng(5);
    int improved = 0;
    for (int i = 0; i < 100; ++i) {
        const auto u = haar_random_unitary(2, rng);
        std::array<double, 4> dist{};
        for (int d = 0; d <= 3; ++d) {
            const auto w = sk_decompose(u, d, net);
            dist[static_cast<std::size_t>(d)] = phase_invariant_distance(u, w.product());
            EXPECT_LE(dist[static_cast<std::size_t>(d)], net.error_bound(d)) << d;
            EXPECT_LT(max_abs(w.product() - GateWord(w.letters()).product()), 1e-12);
        }
        EXPECT_LE(dist[0], net.covering_radius);
        improved += dist[3] < dist[1];
    }
    EXPECT_GE(improved, 95);
}

TEST(SkDecompose, LettersStayInThirdLevel) {
    RngStream rng(6);
    const auto w = sk_decompose(haar_random_unitary(2, rng), 2, net12());
    for (Letter l : w.letters()) EXPECT_TRUE(hierarchy_level(letter_matrix(l), 3).within(3));
}

TEST(SkDecompose, Preconditions) {
    RngStream rng(7);
    EXPECT_THROW(sk_decompose(gates::H(), 7, net12()), ValidationError);
    EXPECT_THROW(sk_decompose(gates::CNOT(), 1, net12()), DimensionError);
    EXPECT_THROW(sk_decompose(2.0 * gates::H(), 1, net12()), ValidationError);
    const auto coarse = build_net(4);
    EXPECT_THROW(sk_decompose(haar_random_unitary(2, rng), 2, coarse), ResourceError);
}

TEST(PadToLength, Examples) {
    const GateWord h({Letter::H});
    const auto padded = pad_to_length(h, 3);
    EXPECT_EQ(padded.letters(), (std::vector<Letter>{Letter::H, Letter::I, Letter::I}));
    EXPECT_LT(max_abs(padded.product() - gates::H()), 1e-15);
    EXPECT_EQ(pad_to_length(h, 1).letters(), h.letters());
    EXPECT_THROW(pad_to_length(padded, 2), ValidationError);
    EXPECT_EQ(padded_length(2, 12), 300u);
}

TEST(LengthAccuracyProfile, RowsBehave) {
    RngStream rng(8);
    std::vector<ComplexMatrix> samples;
    for (int i = 0; i < 30; ++i) samples.push_back(haar_random_unitary(2, rng));
    const auto rows = length_accuracy_profile(samples, {0, 1, 2, 3}, net12());
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_LE(rows[0].mean_length, 12.0);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i].mean_distance, rows[i - 1].mean_distance);
    const double c = fit_length_exponent(rows);
    EXPECT_GT(c, 1.0);
    RecordProperty("fitted_exponent", std::to_string(c));
}

TEST(LengthAccuracyProfile, FitRecoversPowerLaw) {
    std::vector<ProfileRow> rows;
    for (double x : {2.0, 4.0, 8.0, 16.0}) rows.push_back({0, 3.0 * std::pow(x, 2.5), std::exp(-x), 0.0});
    EXPECT_NEAR(fit_length_exponent(rows), 2.5, 1e-9);
    EXPECT_THROW(fit_length_exponent({rows[0]}), ValidationError);
}
