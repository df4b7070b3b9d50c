#pragma once
// Counter-based random number generation with independent, replayable streams.
//
// PhiloxStream runs the Philox4x32-10 block function in counter mode: the
// 64-bit key is derived from (seed, stream_id) with the splitmix64 finalizer
// and the 128-bit counter enumerates blocks of four 32-bit words.  A stream's
// output depends only on (seed, stream_id) and on how many values have been
// drawn from it -- never on other streams or on thread scheduling -- which is
// what makes worker-count-independent parallel reduction possible.
//
// gaussian() samples the standard Normal through a 128-layer ziggurat with
// exact tail handling; uniform_01() returns doubles in the open interval
// (0,1) built from 53 random bits.

#include <array>
#include <cstdint>

namespace follmer {

// SplitMix64 finalizer step: the standard 64-bit mix used to key streams.
std::uint64_t splitmix64_next(std::uint64_t& state);

// One Philox4x32-10 block for an explicit counter and key.
std::array<std::uint32_t, 4> philox4x32_10(const std::array<std::uint32_t, 4>& counter,
                                           const std::array<std::uint32_t, 2>& key);

class PhiloxStream {
public:
    PhiloxStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    // Uniform double in (0,1); never returns an endpoint.
    double uniform_01();
    // Standard Normal deviate.
    double gaussian();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // One Philox4x32-10 block for the given counter words and this stream's
    // key.  Exposed so known-answer tests can drive the block function
    // directly.
    std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter) const;

private:
    void refill();

    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::uint32_t key_[2] = {0, 0};
    std::uint64_t counter_hi_ = 0;   // per-stream constant in counter words 2..3
    std::uint64_t counter_ = 0;      // block index in counter words 0..1
    std::array<std::uint32_t, 4> buffer_{};
    int cursor_ = 4;                 // next unread word in buffer_
};

} // namespace follmer
