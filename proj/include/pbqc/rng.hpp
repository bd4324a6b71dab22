#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace pbqc {

/// Deterministic random stream identified by (seed, stream id).
///
/// Streams with the same pair produce identical draw sequences, and streams
/// with different ids are decorrelated through a SplitMix64 finaliser, so a
/// Monte Carlo trial can be reproduced from (seed, trial index) alone
/// regardless of which thread runs it.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream = 0);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    /// Child stream; deterministic in (seed, stream, id).
    RngStream split(std::uint64_t id) const;

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1).
    double uniform();
    double normal();
    std::complex<double> complex_normal();
    int bit() { return static_cast<int>(engine_() >> 63); }
    /// Uniform integer in [0, bound).
    std::uint64_t index(std::uint64_t bound);

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finaliser, exposed for hashing labels into streams.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace pbqc
