#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dendro {

/// Seeded random stream with named, reproducible sub-streams.
///
/// Every stream is identified by a 64-bit key. `split(label, index)` derives a
/// child key from the parent key alone (never from the engine state), so the
/// child sequence does not depend on how many numbers the parent has already
/// produced. This is what lets parallel and serial runs agree bit for bit.
class Rng {
  public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed);

    Rng split(std::string_view label, std::uint64_t index = 0) const;

    std::uint64_t key() const noexcept { return key_; }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform();
    double uniform(double lo, double hi);
    double normal();
    double exponential();
    /// Uniform integer on [0, bound).
    std::uint64_t below(std::uint64_t bound);

    engine_type& engine() noexcept { return engine_; }

  private:
    std::uint64_t key_;
    engine_type engine_;
};

/// SplitMix64 finalizer; used to derive stream keys.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace dendro
