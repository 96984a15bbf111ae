#ifndef KOSZUL_RANDOM_HPP
#define KOSZUL_RANDOM_HPP

#include <complex>
#include <cstdint>
#include <limits>
#include <random>

namespace koszul {

/// SplitMix64 finalizer; used to derive independent per-item seeds from
/// (master seed, item index) so batch results do not depend on scheduling.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Small counter-based engine satisfying UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Uniform on [0, 1) with 53 random bits; identical on every platform.
template <typename Engine>
double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform on the square [-1, 1] x [-1, 1] of the complex plane.
template <typename Engine>
std::complex<double> uniform_complex_square(Engine& eng) {
    double re = 2.0 * uniform01(eng) - 1.0;
    double im = 2.0 * uniform01(eng) - 1.0;
    return {re, im};
}

}  // namespace koszul

#endif  // KOSZUL_RANDOM_HPP
