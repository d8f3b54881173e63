#pragma once

#include <array>
#include <cstdint>

namespace abcid::rng {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A block of
/// four 32-bit outputs is a pure function of (counter, key), so any draw can
/// be reproduced without replaying the draws before it.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter counter, Key key) noexcept;
};

/// Separates independent uses of one seed. The tag occupies the top byte of
/// the counter, so streams with different purposes never overlap.
enum class Purpose : std::uint8_t {
    prior = 1,
    simulate = 2,
    observed = 3,
    accept = 4,
    noise = 5,
    binding = 6,
    sweep = 7,
};

/// Sequential view over one (seed, purpose, index) stream.
///
/// Draw k of stream (seed, purpose, index) depends on nothing else, which is
/// what makes batch results independent of how work is split across threads.
class Stream {
public:
    Stream(std::uint64_t seed, Purpose purpose, std::uint64_t index) noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform on the open interval (0, 1) with 53 bits of resolution.
    double uniform() noexcept;

    /// Standard normal via Box-Muller; pairs are cached.
    double normal() noexcept;

private:
    void refill() noexcept;

    Philox4x32::Key key_{};
    Philox4x32::Counter counter_{};
    std::uint64_t position_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// A fresh 64-bit seed derived from one stream, for sub-experiments that
/// need a whole seed of their own (e.g. one observed data set per sample size).
std::uint64_t derive_seed(std::uint64_t seed, Purpose purpose, std::uint64_t index) noexcept;

} // namespace abcid::rng
