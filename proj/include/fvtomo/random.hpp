#pragma once

#include <bit>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>

namespace fvtomo {

/// Anything that yields uniform doubles in [0, 1). Optimizers draw only through this.
template <typename R>
concept UnitSource = requires(R& r) {
    { r.uniform() } -> std::convertible_to<double>;
};

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ seeded through splitmix64.
class Xoshiro256pp {
  public:
    using result_type = std::uint64_t;

    explicit Xoshiro256pp(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& s : s_) s = splitmix64(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = std::rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = std::rotl(s_[3], 45);
        return result;
    }

    /// 53-bit uniform double in [0, 1).
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t s_[4];
};

/// Index in [0, n) from one unit draw.
template <UnitSource R>
std::size_t draw_index(R& rng, std::size_t n) {
    auto k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
    return k < n ? k : n - 1;
}

/// 64-bit FNV-1a; stable across platforms.
inline constexpr std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Seed of one experiment cell: hash(base_seed, problem id, algorithm id, repetition).
inline constexpr std::uint64_t cell_seed(std::uint64_t base_seed, std::string_view problem_id,
                                         std::string_view algorithm_id, std::uint64_t repetition) {
    std::uint64_t state = base_seed;
    std::uint64_t h = splitmix64(state);
    for (std::uint64_t part : {fnv1a(problem_id), fnv1a(algorithm_id), repetition}) {
        state = h ^ part;
        h = splitmix64(state);
    }
    return h;
}

}  // namespace fvtomo
