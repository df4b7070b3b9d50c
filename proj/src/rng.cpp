#include "follmer/rng.hpp"

#include <cmath>
#include <cstdlib>

namespace follmer {

std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& c, std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}

// 128-layer ziggurat tables for the standard Normal (Marsaglia-Tsang
// construction; layer edge r and area v are the published constants for 128
// layers).  Built once on first use.
struct ZigguratTables {
    std::uint32_t threshold[128];
    double scale[128];
    double density[128];
    double tail_edge = 3.442619855899;

    ZigguratTables() {
        const double m = 2147483648.0;  // 2^31
        const double v = 9.91256303526217e-3;
        double d = tail_edge;
        double t = d;
        const double q = v / std::exp(-0.5 * d * d);
        threshold[0] = static_cast<std::uint32_t>((d / q) * m);
        threshold[1] = 0;
        scale[0] = q / m;
        scale[127] = d / m;
        density[0] = 1.0;
        density[127] = std::exp(-0.5 * d * d);
        for (int i = 126; i >= 1; --i) {
            d = std::sqrt(-2.0 * std::log(v / d + std::exp(-0.5 * d * d)));
            threshold[i + 1] = static_cast<std::uint32_t>((d / t) * m);
            t = d;
            density[i] = std::exp(-0.5 * d * d);
            scale[i] = d / m;
        }
    }
};

const ZigguratTables& ziggurat() {
    static const ZigguratTables tables;
    return tables;
}

} // namespace

std::array<std::uint32_t, 4> philox4x32_10(const std::array<std::uint32_t, 4>& counter,
                                           const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> c = counter;
    std::uint32_t k0 = key[0];
    std::uint32_t k1 = key[1];
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k0 += kPhiloxW0;
            k1 += kPhiloxW1;
        }
        philox_round(c, k0, k1);
    }
    return c;
}

PhiloxStream::PhiloxStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
    std::uint64_t s = seed;
    const std::uint64_t a = splitmix64_next(s);
    s = a ^ stream_id;
    const std::uint64_t key64 = splitmix64_next(s);
    counter_hi_ = splitmix64_next(s);
    key_[0] = static_cast<std::uint32_t>(key64);
    key_[1] = static_cast<std::uint32_t>(key64 >> 32);
}

std::array<std::uint32_t, 4> PhiloxStream::block(const std::array<std::uint32_t, 4>& counter) const {
    return philox4x32_10(counter, {key_[0], key_[1]});
}

void PhiloxStream::refill() {
    const std::array<std::uint32_t, 4> counter = {
        static_cast<std::uint32_t>(counter_),
        static_cast<std::uint32_t>(counter_ >> 32),
        static_cast<std::uint32_t>(counter_hi_),
        static_cast<std::uint32_t>(counter_hi_ >> 32)};
    buffer_ = block(counter);
    ++counter_;
    cursor_ = 0;
}

std::uint32_t PhiloxStream::next_u32() {
    if (cursor_ >= 4) refill();
    return buffer_[cursor_++];
}

std::uint64_t PhiloxStream::next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
}

double PhiloxStream::uniform_01() {
    // 53 random bits onto (0,1): offset by 2^-54 so 0 is never returned.
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double PhiloxStream::gaussian() {
    const ZigguratTables& z = ziggurat();
    for (;;) {
        const std::int32_t h = static_cast<std::int32_t>(next_u32());
        const std::uint32_t layer = static_cast<std::uint32_t>(h) & 127u;
        const std::uint32_t magnitude =
            static_cast<std::uint32_t>(std::llabs(static_cast<long long>(h)));
        if (magnitude < z.threshold[layer]) {
            return h * z.scale[layer];  // inside the rectangle: accept directly
        }
        if (layer == 0) {
            // Tail of the distribution beyond the last layer edge.
            double x, y;
            do {
                x = -std::log(uniform_01()) / z.tail_edge;
                y = -std::log(uniform_01());
            } while (y + y < x * x);
            return h > 0 ? z.tail_edge + x : -z.tail_edge - x;
        }
        const double x = h * z.scale[layer];
        if (z.density[layer] + uniform_01() * (z.density[layer - 1] - z.density[layer]) <
            std::exp(-0.5 * x * x)) {
            return x;
        }
        // Rejected: resample from scratch.
    }
}

} // namespace follmer
