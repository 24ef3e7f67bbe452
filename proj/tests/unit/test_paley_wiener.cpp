#include <gtest/gtest.h>

#include <cmath>

#include "rktlab/paley_wiener.hpp"

using namespace rktlab;
using namespace rktlab::paley_wiener;

namespace {

// Closed form of the generating product for the sequence n + 1/8 (n even),
// n - 1/8 (n odd), origin removed.
Complex witness_oracle(Complex z) {
    const Complex a = std::sin(kPi * (7.0 / 16.0 - 0.5 * z)) / std::sin(7.0 * kPi / 16.0);
    const Complex b = std::sin(kPi * (1.0 / 16.0 - 0.5 * z)) / (std::sin(kPi / 16.0) * (1.0 - 8.0 * z));
    return a * b;
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

}  // namespace

TEST(Kadets, Points) {
    EXPECT_EQ(kadets_point(2), 2.125);
    EXPECT_EQ(kadets_point(1), 0.875);
    EXPECT_EQ(kadets_point(-3), -3.125);
    EXPECT_EQ(kadets_point(-2), -1.875);
    EXPECT_THROW(kadets_point(0), DomainError);
    const auto s = SamplingSequence::kadets(4);
    EXPECT_EQ(s.points().size(), 8u);
    EXPECT_EQ(s.max_perturbation(), 0.125);
}

TEST(KernelNorm, ClosedFormAgainstQuadrature) {
    EXPECT_NEAR(pw_kernel_norm_sq(Complex(3.0, 1.0)), std::sinh(kTwoPi) / kTwoPi, 1e-12);
    EXPECT_NEAR(pw_kernel_norm_sq(Complex(0.0, 1.0)), 42.6124, 1e-3);
    EXPECT_NEAR(pw_kernel_norm_sq(0.5), 1.0, 1e-15);
    // Oracle: midpoint rule for int |sinc(pi(x - i))|^2 dx on [-L, L] plus the averaged tail.
    const double L = 2000.0, dx = 1e-3;
    const double sh2 = std::sinh(kPi) * std::sinh(kPi);
    double s = 0.0;
    for (double x = -L + 0.5 * dx; x < L; x += dx) {
        const double sn = std::sin(kPi * x);
        s += (sn * sn + sh2) / (kPi * kPi * (x * x + 1.0));
    }
    s *= dx;
    s += (0.5 + sh2) / (kPi * kPi) * 2.0 / L;
    EXPECT_NEAR(pw_kernel_norm_sq(Complex(0.0, 1.0)), s, 1e-4 * s);
}

TEST(RktSum, LatticeSamplingIdentityInsideBracket) {
    // Integer samples of a PW function carry its full norm, so the punctured
    // lattice sum is 1 - |K_lambda(0)|^2.
    const auto lat = SamplingSequence::lattice(1024);
    for (Complex l : {Complex(0.3, 0.0), Complex(0.5, 0.5), Complex(2.7, -1.0), Complex(0.0, 2.0)}) {
        const PWKernel k(l);
        const double exact = 1.0 - k.abs_sq(0.0);
        const auto v = rkt_sum(l, lat);
        EXPECT_LE(v.low, exact + 1e-12) << l;
        EXPECT_GE(v.high, exact - 1e-12) << l;
        EXPECT_LT(v.high - v.low, 2e-3) << l;
    }
    EXPECT_NEAR(rkt_sum(0.3, lat).low, 1.0 - sinc(0.3) * sinc(0.3), 1e-3);
}

TEST(RktSum, OwnNodeAndBracketOrder) {
    const auto s = SamplingSequence::kadets(1024);
    EXPECT_GE(rkt_sum(kadets_point(5), s).low, 1.0);
    const auto v = rkt_sum(Complex(0.0, 2.0), s);
    EXPECT_LT(v.low, v.high);
    EXPECT_GT(v.low, 0.0);
    EXPECT_THROW(rkt_sum(0.5, SamplingSequence::kadets(32)), DomainError);
    EXPECT_THROW(rkt_sum(0.5, SamplingSequence::explicit_points({1.0, 2.0})), DomainError);
}

TEST(RktSum, TruncationStability) {
    const auto a = rkt_sum(Complex(0.5, 0.3), SamplingSequence::kadets(512));
    const auto b = rkt_sum(Complex(0.5, 0.3), SamplingSequence::kadets(1024));
    EXPECT_GE(b.low, a.low);
    EXPECT_LE(b.high, a.high);
    EXPECT_LE(b.low - a.low, a.high - a.low);
}

TEST(Scan, PositiveLowerBoundOnDefaultRegion) {
    const auto scan = rkt_lower_bound_scan(SamplingSequence::kadets(1024), Region{}, 64, 64);
    EXPECT_GT(scan.delta, 0.04);
    EXPECT_LT(scan.delta, 0.1);
    EXPECT_EQ(scan.nodes.size(), 64u * 64u);
    EXPECT_THROW(rkt_lower_bound_scan(SamplingSequence::kadets(1024), Region{}, 32, 64), DomainError);
}

TEST(Witness, MatchesClosedFormAndVanishesOnSequence) {
    const auto seq = SamplingSequence::kadets(1024);
    const std::vector<Complex> zs{0.0, 0.5, Complex(1.3, 0.7), Complex(-4.2, -1.5), 10.5, kadets_point(3), kadets_point(-8), -127.5};
    const auto w = generating_witness(seq, zs);
    EXPECT_NEAR(std::abs(w.values[0] - 1.0), 0.0, 1e-12);
    EXPECT_EQ(w.values[5], Complex(0.0));
    EXPECT_EQ(w.values[6], Complex(0.0));
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const Complex o = witness_oracle(zs[i]);
        EXPECT_NEAR(std::abs(w.values[i] - o), 0.0, 1e-8 * std::max(1.0, std::abs(o))) << zs[i];
    }
    EXPECT_LT(w.max_error_estimate, 1e-6);
    EXPECT_THROW(generating_witness(SamplingSequence::kadets(256), zs), DomainError);
}

TEST(Bandlimit, SincPassesAndDoubledBandFails) {
    const double length = 256.0, rate = 8.0;
    const auto m = static_cast<std::size_t>(length * rate);
    CVector in(m), out(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double x = -0.5 * length + static_cast<double>(j) / rate;
        in[j] = sinc(x);
        out[j] = sinc(2.0 * x);
    }
    EXPECT_LT(bandlimit_check(in, length, rate), 0.02);
    EXPECT_GT(bandlimit_check(out, length, rate), 0.4);
    EXPECT_THROW(bandlimit_check(in, 128.0, rate), DomainError);
}

TEST(CarlesonSanity, Separation) {
    EXPECT_EQ(carleson_sanity(SamplingSequence::lattice(64)).separation, 1.0);
    EXPECT_EQ(carleson_sanity(SamplingSequence::kadets(64)).separation, 0.75);
    EXPECT_EQ(carleson_sanity(SamplingSequence::kadets(64)).strip_width, 0.0);
    EXPECT_TRUE(std::isinf(carleson_sanity(SamplingSequence::explicit_points({1.0})).separation));
}

TEST(FrameGram, LatticeIsOrthonormalAndKadetsStaysPositive) {
    EXPECT_NEAR(frame_gram_min_eigenvalue(SamplingSequence::lattice(64), 16), 1.0, 1e-12);
    const double k = frame_gram_min_eigenvalue(SamplingSequence::kadets(64), 32);
    EXPECT_GT(k, 0.5);
    EXPECT_LT(k, 1.0);
}
