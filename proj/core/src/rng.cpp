#include "abcid/rng.hpp"

#include <cmath>
#include <numbers>

namespace abcid::rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

} // namespace

Philox4x32::Counter Philox4x32::generate(Counter c, Key k) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return c;
}

Stream::Stream(std::uint64_t seed, Purpose purpose, std::uint64_t index) noexcept {
    key_ = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    counter_[2] = static_cast<std::uint32_t>(index);
    counter_[3] = static_cast<std::uint32_t>((index >> 32) & 0x00FFFFFFu) |
                  (static_cast<std::uint32_t>(purpose) << 24);
}

void Stream::refill() noexcept {
    counter_[0] = static_cast<std::uint32_t>(position_);
    counter_[1] = static_cast<std::uint32_t>(position_ >> 32);
    ++position_;
    block_ = Philox4x32::generate(counter_, key_);
    used_ = 0;
}

std::uint64_t Stream::next_u64() noexcept {
    if (used_ > 2) {
        refill();
    }
    const std::uint64_t hi = block_[used_];
    const std::uint64_t lo = block_[used_ + 1];
    used_ += 2;
    return (hi << 32) | lo;
}

double Stream::uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
}

std::uint64_t derive_seed(std::uint64_t seed, Purpose purpose, std::uint64_t index) noexcept {
    return Stream(seed, purpose, index).next_u64();
}

} // namespace abcid::rng
