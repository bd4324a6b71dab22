#include "pbqc/rng.hpp"

#include "pbqc/error.hpp"

namespace pbqc {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL))) {}

RngStream RngStream::split(std::uint64_t id) const {
    return RngStream(mix64(seed_ ^ mix64(stream_)), id);
}

double RngStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(engine_); }

std::complex<double> RngStream::complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
}

std::uint64_t RngStream::index(std::uint64_t bound) {
    if (bound == 0) throw ValidationError("RngStream::index: empty range");
    std::uniform_int_distribution<std::uint64_t> dist(0, bound - 1);
    return dist(engine_);
}

}  // namespace pbqc
