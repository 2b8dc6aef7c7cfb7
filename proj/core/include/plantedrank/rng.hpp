#pragma once

#include <algorithm>
#include <cstdint>
#include <string_view>
#include <vector>

namespace plantedrank {

// SplitMix64 avalanche. All randomness in the library flows through this
// generator so that results are bit-reproducible across platforms; the
// standard library distributions are implementation-defined and are not used.
constexpr std::uint64_t splitmix_fmix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

// Child-stream seed for (master, replicate index, purpose tag). The exact
// formula is part of the output format contract (see README):
//   fmix(fmix(fmix(master ^ 0x9E3779B97F4A7C15) + index) ^ fnv1a64(tag))
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                    std::string_view tag) {
    std::uint64_t z = splitmix_fmix(master ^ 0x9E3779B97F4A7C15ull);
    z = splitmix_fmix(z + index);
    return splitmix_fmix(z ^ fnv1a64(tag));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return splitmix_fmix(state_);
    }

    // Uniform in [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // Unbiased integer in [0, bound) by rejection.
    std::uint64_t uniform_int(std::uint64_t bound) {
        if (bound == 0) return 0;
        const std::uint64_t threshold = (-bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Fisher-Yates permutation of 0..n-1.
    std::vector<int> permutation(int n) {
        std::vector<int> p(n);
        for (int i = 0; i < n; ++i) p[i] = i;
        for (int i = n - 1; i > 0; --i) {
            const int j = static_cast<int>(uniform_int(static_cast<std::uint64_t>(i) + 1));
            std::swap(p[i], p[j]);
        }
        return p;
    }

    // k distinct values from 0..n-1, returned sorted ascending.
    std::vector<int> subset(int n, int k);

private:
    std::uint64_t state_;
};

inline std::vector<int> Rng::subset(int n, int k) {
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(uniform_int(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace plantedrank
