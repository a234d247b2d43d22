#pragma once

#include <cstdint>
#include <cstring>
#include <random>
#include <string_view>
#include <vector>

namespace emir {

// mt19937_64 with hand-rolled draws. std::*_distribution is avoided on
// purpose: its output may change between standard library versions, and
// seeded artifacts here must be reproducible from the recorded seed alone.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // unbiased integer in [0, n), n > 0
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        std::uint64_t x;
        do {
            x = bits();
        } while (x >= limit);
        return x % n;
    }

    int uniform_int(int lo, int hi) { // inclusive range
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
};

inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s) { return fnv1a64(s.data(), s.size()); }

// Derives an independent named sub-stream seed, so e.g. placement and cap-map
// randomness do not interact.
inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = fnv1a64(&seed, sizeof(seed));
    return fnv1a64(tag.data(), tag.size(), h);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t h = fnv1a64(&seed, sizeof(seed));
    return fnv1a64(&salt, sizeof(salt), h);
}

} // namespace emir
