#pragma once

#include <cmath>
#include <cstdint>

namespace ggof {

// Philox4x32-10 counter-based generator. Output is a pure function of
// (key, counter), so independent streams never share state and replicated
// draws are bit-identical regardless of evaluation order or thread count.
namespace detail {

struct PhiloxBlock {
    std::uint32_t v[4];
};

inline void philox_round(std::uint32_t& c0, std::uint32_t& c1,
                         std::uint32_t& c2, std::uint32_t& c3,
                         std::uint32_t k0, std::uint32_t k1) {
    constexpr std::uint64_t kMul0 = 0xD2511F53;
    constexpr std::uint64_t kMul1 = 0xCD9E8D57;
    const std::uint64_t p0 = kMul0 * c0;
    const std::uint64_t p1 = kMul1 * c2;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t n0 = hi1 ^ c1 ^ k0;
    const std::uint32_t n2 = hi0 ^ c3 ^ k1;
    c0 = n0;
    c1 = lo1;
    c2 = n2;
    c3 = lo0;
}

inline PhiloxBlock philox4x32(std::uint64_t key, std::uint64_t counter_hi,
                              std::uint64_t counter_lo) {
    std::uint32_t c0 = static_cast<std::uint32_t>(counter_lo);
    std::uint32_t c1 = static_cast<std::uint32_t>(counter_lo >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(counter_hi);
    std::uint32_t c3 = static_cast<std::uint32_t>(counter_hi >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    constexpr std::uint32_t kW0 = 0x9E3779B9;
    constexpr std::uint32_t kW1 = 0xBB67AE85;
    for (int r = 0; r < 10; ++r) {
        philox_round(c0, c1, c2, c3, k0, k1);
        k0 += kW0;
        k1 += kW1;
    }
    return {{c0, c1, c2, c3}};
}

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace detail

// Combine a user seed with a stream id into a Philox key.
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
    return detail::mix64(seed ^ detail::mix64(stream));
}

// One generator per logical stream; cheap to construct and copy.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : key_(stream_key(seed, stream)), stream_(stream) {}

    std::uint64_t next_u64() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const detail::PhiloxBlock b = detail::philox4x32(key_, stream_, counter_++);
        spare_ = (static_cast<std::uint64_t>(b.v[2]) << 32) | b.v[3];
        have_spare_ = true;
        return (static_cast<std::uint64_t>(b.v[0]) << 32) | b.v[1];
    }

    // Uniform on (0,1); never returns an exact endpoint.
    double uniform() {
        const std::uint64_t u = next_u64() >> 11;
        return (static_cast<double>(u) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (pair cached).
    double normal() {
        if (have_normal_) {
            have_normal_ = false;
            return spare_normal_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586 * u2;
        spare_normal_ = r * std::sin(a);
        have_normal_ = true;
        return r * std::cos(a);
    }

    // Uniform integer in [0, bound) by rejection-free scaling (bound << 2^64,
    // so the modulo bias is negligible for simulation purposes but we reject
    // anyway to keep draws exact).
    std::uint64_t uniform_int(std::uint64_t bound) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t u;
        do {
            u = next_u64();
        } while (u >= limit);
        return u % bound;
    }

private:
    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::uint64_t spare_ = 0;
    bool have_spare_ = false;
    double spare_normal_ = 0.0;
    bool have_normal_ = false;
};

// Deterministic substream labels: hash a few integers into a stream id.
inline std::uint64_t substream(std::uint64_t a, std::uint64_t b = 0,
                               std::uint64_t c = 0) {
    return detail::mix64(a + 0x517CC1B727220A95ULL * detail::mix64(b + detail::mix64(c)));
}

}  // namespace ggof
