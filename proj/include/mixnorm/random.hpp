#pragma once

#include <array>
#include <cstdint>

namespace mixnorm {

/// Philox4x32 with 10 rounds (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). A pure function of a 128-bit counter and 64-bit key.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter counter, Key key);
};

/// SplitMix64 finalizer, used to derive child stream ids.
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic stream of random numbers identified by (seed, stream_id).
///
/// The seed is the Philox key and the stream id occupies the upper half of
/// the counter, so distinct streams never share a counter block. Streams are
/// single-owner; parallel work derives children instead of sharing one.
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Independent stream keyed by (seed, mix(stream_id, index)).
    RandomStream child(std::uint64_t index) const;

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform on (0, 1), never exactly 0 or 1.
    double uniform_open();

    /// Standard normal (Marsaglia polar method).
    double normal();

    /// Standard exponential.
    double exponential();

    /// ln G for G ~ Gamma(shape, 1). Marsaglia-Tsang for shape >= 1; for
    /// shape < 1, G = G' U^{1/shape} with G' ~ Gamma(shape + 1), combined in
    /// log space so tiny shapes never underflow.
    double log_gamma_variate(double shape);

    /// G ~ Gamma(shape, 1).
    double gamma_variate(double shape);

  private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mixnorm
