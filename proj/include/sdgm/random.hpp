#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace sdgm {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A pure
/// function of (key, counter), so any substream can be produced
/// independently of every other one.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) noexcept
    {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

/// Reproducible standard normal substreams keyed by (seed, step, element,
/// stream). Values for a given key never depend on which thread asks or
/// in which order.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) noexcept
        : seed_(seed), key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}
    {
    }

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

    /// Fills out with i.i.d. N(0, 1) variates. Steps use 48 bits of the
    /// counter and streams 16.
    template <typename Derived>
    void fill(std::uint64_t step, std::uint32_t element, std::uint32_t stream,
              Eigen::DenseBase<Derived>& out) const noexcept
    {
        const Eigen::Index n = out.size();
        const auto hi = static_cast<std::uint32_t>((step >> 32) & 0xFFFFu) | (stream << 16);
        for (Eigen::Index i = 0; i < n; i += 2) {
            const auto r = Philox4x32::generate(
                {static_cast<std::uint32_t>(i / 2), element, static_cast<std::uint32_t>(step), hi}, key_);
            const double u1 = to_unit(r[0], r[1]);
            const double u2 = to_unit(r[2], r[3]);
            const double radius = std::sqrt(-2.0 * std::log(u1));
            const double angle = 2.0 * std::numbers::pi * u2;
            out(i) = radius * std::cos(angle);
            if (i + 1 < n) {
                out(i + 1) = radius * std::sin(angle);
            }
        }
    }

    template <typename Derived>
    void fill(std::uint64_t step, std::uint32_t element, std::uint32_t stream,
              Eigen::DenseBase<Derived>&& out) const noexcept
    {
        fill(step, element, stream, out);
    }

private:
    // 53 random bits mapped to the open interval (0, 1).
    static double to_unit(std::uint32_t a, std::uint32_t b) noexcept
    {
        const std::uint64_t bits = ((std::uint64_t{a} << 32) | b) >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t seed_;
    Philox4x32::Key key_;
};

} // namespace sdgm
