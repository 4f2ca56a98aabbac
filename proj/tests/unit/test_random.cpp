#include <gtest/gtest.h>

#include <cmath>

#include "sdgm/random.hpp"

using namespace sdgm;

// Known-answer vectors published with the reference Philox implementation.
TEST(Philox, KnownAnswers)
{
    using C = Philox4x32::Counter;
    EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    EXPECT_EQ(Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
              (C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
    EXPECT_EQ(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
              (C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(GaussianStream, Deterministic)
{
    const GaussianStream a(42);
    const GaussianStream b(42);
    Eigen::VectorXd x(7);
    Eigen::VectorXd y(7);
    a.fill(123, 5, 0, x);
    b.fill(123, 5, 0, y);
    EXPECT_EQ(x, y);
    // Any change of key component gives a different draw.
    b.fill(124, 5, 0, y);
    EXPECT_NE(x, y);
    b.fill(123, 6, 0, y);
    EXPECT_NE(x, y);
    b.fill(123, 5, 1, y);
    EXPECT_NE(x, y);
    GaussianStream(43).fill(123, 5, 0, y);
    EXPECT_NE(x, y);
    // Steps above 2^32 use the high counter word.
    b.fill(123 + (std::uint64_t{1} << 32), 5, 0, y);
    EXPECT_NE(x, y);
}

TEST(GaussianStream, PrefixStable)
{
    // A shorter request is a prefix of a longer one.
    const GaussianStream s(9);
    Eigen::VectorXd longer(9);
    Eigen::VectorXd shorter(4);
    s.fill(3, 2, 0, longer);
    s.fill(3, 2, 0, shorter);
    EXPECT_EQ(shorter, longer.head(4));
}

TEST(GaussianStream, Moments)
{
    const GaussianStream s(2024);
    Eigen::VectorXd x(100);
    double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
    const int steps = 10000;
    for (int k = 0; k < steps; ++k) {
        s.fill(k, 0, 0, x);
        m1 += x.sum();
        m2 += x.squaredNorm();
        m3 += x.array().cube().sum();
        m4 += x.array().square().square().sum();
    }
    const double n = 100.0 * steps;
    // Standard errors: 1, sqrt 2, sqrt 15, sqrt 96 over sqrt n.
    EXPECT_LE(std::abs(m1 / n), 5 / std::sqrt(n));
    EXPECT_LE(std::abs(m2 / n - 1), 5 * std::sqrt(2.0 / n));
    EXPECT_LE(std::abs(m3 / n), 5 * std::sqrt(15.0 / n));
    EXPECT_LE(std::abs(m4 / n - 3), 5 * std::sqrt(96.0 / n));
}
