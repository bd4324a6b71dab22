#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pbqc/rng.hpp"
#include "pbqc/types.hpp"

namespace pbqc {

enum class Letter : std::uint8_t { I, H, T, Tdg };

ComplexMatrix letter_matrix(Letter l);
const char* letter_name(Letter l);

/// Word over {H, T, T^dagger, I}; the product is letters[0]·letters[1]·…
class GateWord {
public:
    GateWord() = default;
    explicit GateWord(std::vector<Letter> letters);

    const std::vector<Letter>& letters() const noexcept { return letters_; }
    std::size_t size() const noexcept { return letters_.size(); }
    const ComplexMatrix& product() const noexcept { return product_; }

    GateWord inverse() const;
    /// Cancels HH and T T^dagger, folds T-runs mod 8 and drops I letters.
    GateWord simplified() const;
    std::string to_string() const;

    friend GateWord operator+(const GateWord& a, const GateWord& b);

private:
    std::vector<Letter> letters_;
    ComplexMatrix product_ = ComplexMatrix::Identity(2, 2);
};

/// Unit quaternion (a, b, c, d) with U = aI - i(bX + cY + dZ), sign fixed so
/// the first non-negligible component is positive.
using Quaternion = std::array<double, 4>;
Quaternion to_quaternion(const ComplexMatrix& u);

struct NearestHit {
    std::size_t index = 0;
    double distance = 0.0;
};

struct EpsilonNet {
    std::vector<GateWord> entries;
    std::vector<Quaternion> keys;
    int l0 = 0;
    double covering_radius = 0.0;     // max nearest distance over the sample set
    double commutator_constant = 0.0; // C in eps(d+1) = C eps(d)^{3/2}

    NearestHit nearest(const ComplexMatrix& u) const;
    /// Analytic bound eps(depth), floored at double precision noise.
    double error_bound(int depth) const;
};

inline constexpr int kMaxNetLength = 16;
inline constexpr int kMaxSkDepth = 6;

/// All words up to length l0 over {H, T, T^dagger}, deduplicated up to phase;
/// covering radius and C are measured from `samples` Haar unitaries.
EpsilonNet build_net(int l0, RngStream& rng, std::size_t samples = 1000);
EpsilonNet build_net(int l0);

struct CommutatorPair {
    ComplexMatrix v;
    ComplexMatrix w;
};

/// Balanced group commutator: delta = V W V^dagger W^dagger (up to phase).
CommutatorPair commutator_factor(const ComplexMatrix& delta);

/// Solovay-Kitaev recursion without the convergence precondition (used for calibration).
GateWord sk_decompose_unchecked(const ComplexMatrix& u, int depth, const EpsilonNet& net);
GateWord sk_decompose(const ComplexMatrix& u, int depth, const EpsilonNet& net);

GateWord pad_to_length(const GateWord& word, std::size_t length);

/// Fixed word length used by the attack at this depth: 5^depth * l0.
std::size_t padded_length(int depth, int l0);

struct ProfileRow {
    int depth = 0;
    double mean_length = 0.0;
    double mean_distance = 0.0;
    double max_distance = 0.0;
};

std::vector<ProfileRow> length_accuracy_profile(const std::vector<ComplexMatrix>& samples,
                                                const std::vector<int>& depths, const EpsilonNet& net);

/// Least-squares slope of log(l) against log(log(1/eps)).
double fit_length_exponent(const std::vector<ProfileRow>& rows);

}  // namespace pbqc
