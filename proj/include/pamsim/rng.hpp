#ifndef PAMSIM_RNG_HPP
#define PAMSIM_RNG_HPP

#include <cstdint>
#include <cmath>

namespace pamsim {

// splitmix64 finalizer (Steele/Lea/Flood). Used both as the stream generator
// and as the hash for deriving independent per-stage / per-grid-point seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based uniform/Gaussian stream: output i depends only on (seed, i),
// so sequences are reproducible bit-exactly across platforms and runs.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    // uniform in [0, 1), 53-bit resolution
    double uniform() {
        const std::uint64_t bits = splitmix64(seed_ + 0x9e3779b97f4a7c15ULL * ++counter_);
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; consumes two uniforms per call
    double gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // independent child stream (per pipeline stage, per sweep point, ...)
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        return splitmix64(seed ^ splitmix64(stream));
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

} // namespace pamsim

#endif
