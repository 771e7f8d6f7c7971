#include "hcmab/rng.hpp"

#include "hcmab/errors.hpp"

namespace hcmab {

namespace {
constexpr double kTwo53 = 9007199254740992.0;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t replication,
                          StreamPurpose purpose) noexcept {
    std::uint64_t h = splitmix64(base_seed);
    h = splitmix64(h ^ splitmix64(replication + 0x632BE59BD9B4E019ULL));
    h = splitmix64(h ^ splitmix64(static_cast<std::uint64_t>(purpose) * 0x8CB92BA72F3D8DD7ULL));
    return h;
}

double RngStream::uniform01() {
    return static_cast<double>(next_u53()) / kTwo53;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double RngStream::uniform_open(double lo, double hi) {
    for (;;) {
        double x = uniform(lo, hi);
        if (x > lo && x < hi) return x;
    }
}

bool RngStream::bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("bernoulli probability outside [0,1]");
    // p * 2^53 is exact; so is the u53 -> double conversion.
    return static_cast<double>(next_u53()) < p * kTwo53;
}

std::uint64_t RngStream::index(std::uint64_t n) {
    if (n == 0) throw DomainError("index() over an empty range");
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
    for (;;) {
        std::uint64_t x = next_u64();
        if (x < limit) return x % n;
    }
}

}  // namespace hcmab
