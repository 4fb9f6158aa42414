#include "dendro/rng.hpp"

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace dendro {

namespace {

constexpr std::uint64_t fnv1a(std::string_view text) noexcept {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : key_{seed}, engine_{mix64(seed)} {}

Rng Rng::split(std::string_view label, std::uint64_t index) const {
    const std::uint64_t child = mix64(mix64(key_ ^ fnv1a(label)) + mix64(index + 1));
    return Rng{child};
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

// Boost distributions use fixed, documented algorithms, so the sequences are
// identical across standard library implementations.
double Rng::normal() {
    return boost::random::normal_distribution<double>{}(engine_);
}

double Rng::exponential() {
    return boost::random::exponential_distribution<double>{}(engine_);
}

std::uint64_t Rng::below(std::uint64_t bound) {
    return boost::random::uniform_int_distribution<std::uint64_t>{0, bound - 1}(engine_);
}

}  // namespace dendro
