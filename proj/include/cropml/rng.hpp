#ifndef CROPML_RNG_HPP
#define CROPML_RNG_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <string_view>
#include <vector>

namespace cropml::rng {

// 64-bit FNV-1a. Used for child-seed derivation, dataset hashes and model
// file checksums.
inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = kFnvOffset) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = kFnvOffset) {
    return fnv1a64(s.data(), s.size(), h);
}

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// xoshiro256** seeded through splitmix64. Every random decision in the
// library flows through this generator so that runs are reproducible
// across platforms and thread counts.
class Xoshiro256ss {
public:
    explicit Xoshiro256ss(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64_next(sm);
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform draw in [0, n). Plain modulo; the bias is negligible for the
    // dataset sizes this library handles (n << 2^64).
    std::uint64_t uniform(std::uint64_t n) { return next() % n; }

    // Uniform double in [0, 1) with 53 bits of precision.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

// Named child seed: seed ^ hash(purpose, index). Independent streams for
// "split", "boot", "feat", ... derive from one user seed, so serial and
// parallel runs agree.
inline std::uint64_t child_seed(std::uint64_t seed, std::string_view purpose,
                                std::uint64_t index) {
    std::uint64_t h = fnv1a64(purpose);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i)
        bytes[i] = static_cast<unsigned char>((index >> (8 * i)) & 0xff);
    h = fnv1a64(bytes, 8, h);
    return seed ^ h;
}

// In-place Fisher-Yates shuffle.
template <typename T>
void fisher_yates(std::vector<T>& items, Xoshiro256ss& gen) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(gen.uniform(i));
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace cropml::rng

#endif
