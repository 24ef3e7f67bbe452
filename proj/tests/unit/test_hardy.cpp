#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rktlab/hardy.hpp"

using namespace rktlab;
using namespace rktlab::hardy;
using measures::Arc;
using measures::AreaDensity;
using measures::BoundaryDensity;
using measures::Measure;

namespace {

template <class F>
double riemann_circle(F&& f, std::size_t n) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += f(kTwoPi * static_cast<double>(k) / static_cast<double>(n));
    return s * kTwoPi / static_cast<double>(n);
}

Measure half_circle() { return Measure::boundary(BoundaryDensity({0.0, kPi, kTwoPi}, {1.0, 0.0})); }

// Midpoint rule over S_{I,h} in polar coordinates.
double phi_h_brute(Complex z, const Arc& arc, double h, double p, std::size_t nr, std::size_t nt) {
    double s = 0.0;
    const double start = arc.center() - 0.5 * arc.length();
    for (std::size_t i = 0; i < nr; ++i) {
        const double r = 1.0 - h + h * (static_cast<double>(i) + 0.5) / static_cast<double>(nr);
        for (std::size_t j = 0; j < nt; ++j) {
            const double t = start + arc.length() * (static_cast<double>(j) + 0.5) / static_cast<double>(nt);
            const Complex l = std::polar(r, t);
            s += std::pow(1.0 - r * r, p - 1.0) / std::pow(std::abs(1.0 - std::conj(l) * z), p) * r;
        }
    }
    return s * (h / static_cast<double>(nr)) * (arc.length() / static_cast<double>(nt)) / h;
}

}  // namespace

TEST(HardyConfig, ConjugateExponent) {
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        const auto c = HardyConfig::make(p);
        EXPECT_NEAR(1.0 / c.p + 1.0 / c.p_conj, 1.0, 1e-14);
    }
    EXPECT_THROW(HardyConfig::make(1.0), DomainError);
}

TEST(HpNorm, Examples) {
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        const auto cfg = HardyConfig::make(p);
        EXPECT_NEAR(hp_norm({{1.0}}, cfg), 1.0, 1e-13);
        EXPECT_NEAR(hp_norm({{0.0, 0.0, 0.0, 1.0}}, cfg), 1.0, 1e-13);
    }
    EXPECT_NEAR(hp_norm({{1.0, 1.0}}, HardyConfig::make(2.0)), std::sqrt(2.0), 1e-13);
}

TEST(HpNorm, ParsevalForRandomPolynomials) {
    const auto cfg = HardyConfig::make(2.0);
    for (const auto& f : random_polynomials(20, 32, 99)) {
        double l2 = 0.0;
        for (const Complex& c : f.coeffs) l2 += std::norm(c);
        EXPECT_NEAR(hp_norm(f, cfg), std::sqrt(l2), 1e-12 * std::sqrt(l2));
    }
}

TEST(RandomPolynomials, DeterministicPerSeed) {
    const auto a = random_polynomials(5, 32, 0xC0FFEE);
    const auto b = random_polynomials(5, 32, 0xC0FFEE);
    const auto c = random_polynomials(5, 32, 1);
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].coeffs, b[k].coeffs);
    EXPECT_NE(a[0].coeffs, c[0].coeffs);
}

TEST(Kernel, Examples) {
    EXPECT_EQ(kernel(0.0)(Complex(0.3, 0.2)), Complex(1.0));
    EXPECT_NEAR(std::abs(kernel(0.5)(1.0) - 2.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(kernel(Complex(0.0, 0.9))(Complex(0.0, 1.0)) - 10.0), 0.0, 1e-13);
    EXPECT_THROW(kernel(1.0), DomainError);
    EXPECT_THROW(kernel(Complex(0.8, 0.8)), DomainError);
}

TEST(KernelNorm, ClosedFormsForP2) {
    const auto cfg = HardyConfig::make(2.0);
    EXPECT_NEAR(kernel_norm(0.0, cfg), 1.0, 1e-13);
    EXPECT_NEAR(kernel_norm(0.8, cfg), 1.0 / 0.6, 1e-12);
    for (int j = 1; j <= 20; ++j) {
        const double r = 1.0 - std::ldexp(1.0, -j);
        const double exact = 1.0 / std::sqrt((1.0 - r) * (1.0 + r));
        EXPECT_NEAR(kernel_norm(std::polar(r, 0.7 * j), cfg), exact, 1e-9 * exact) << j;
    }
}

TEST(KernelNorm, P4BracketAgainstBruteForceAndClosedForm) {
    const auto cfg = HardyConfig::make(4.0);
    double lo = 1e300, hi = 0.0;
    for (int j = 4; j <= 12; ++j) {
        const double r = 1.0 - std::ldexp(1.0, -j);
        auto f = [r](double t) { return std::pow(std::norm(1.0 - r * unit(t)), -2.0); };
        const double a = riemann_circle(f, std::size_t{1} << 18) / kTwoPi;
        const double b = riemann_circle(f, std::size_t{1} << 19) / kTwoPi;
        ASSERT_NEAR(a, b, 1e-10 * b);
        const double closed = (1.0 + r * r) / std::pow(1.0 - r * r, 3.0);
        EXPECT_NEAR(b, closed, 1e-9 * closed);
        const double v = kernel_norm(r, cfg);
        EXPECT_NEAR(std::pow(v, 4.0), b, 1e-9 * b) << j;
        const double ratio = v / std::pow(1.0 - r, -1.0 / cfg.p_conj);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    EXPECT_GT(lo, 0.6);
    EXPECT_LT(hi, 0.8);
}

TEST(KernelNorm, BeyondCapThrows) {
    EXPECT_THROW(kernel_norm(1.0 - 0x1p-22, HardyConfig::make(2.0)), NumericalError);
}

TEST(RktFunctional, NormalizedArclengthIsOneForP2) {
    const auto cfg = HardyConfig::make(2.0);
    const auto mu = Measure::normalized_arclength();
    for (int j = 0; j <= 20; ++j) {
        const Complex l = std::polar(1.0 - std::ldexp(1.0, -j), 1.3 * j);
        EXPECT_NEAR(rkt_functional(mu, l, cfg), 1.0, 1e-9) << j;
    }
    EXPECT_NEAR(rkt_functional(Measure::normalized_arclength(0.3), Complex(0.4, 0.5), cfg), 0.3, 1e-10);
}

TEST(RktFunctional, AtomAtOriginAndLambdaZero) {
    const auto mu = Measure::atoms({{0.0, 1.0}});
    for (double p : {1.5, 2.0, 3.0, 4.0}) EXPECT_NEAR(rkt_functional(mu, 0.0, HardyConfig::make(p)), 1.0, 1e-13);
}

TEST(RktFunctional, AreaMeasureClosedForm) {
    // int_D |k_l|^2 dA = -pi log(1 - |l|^2)/|l|^2
    const Measure mu({}, {}, AreaDensity::constant(1.0));
    const auto cfg = HardyConfig::make(2.0);
    for (double r : {0.3, 0.9, 0.99, 0.999}) {
        const double s = r * r;
        const double exact = (1.0 - s) * (-kPi * std::log1p(-s) / s);
        EXPECT_NEAR(rkt_functional(mu, std::polar(r, 2.0), cfg), exact, 1e-8 * exact) << r;
    }
}

TEST(RktFunctional, HalfCircleDecaysTowardStarvedArc) {
    const auto mu = half_circle();
    for (double p : {2.0, 3.0}) {
        const auto cfg = HardyConfig::make(p);
        double prev = 1e300;
        for (int j = 2; j <= 10; ++j) {
            const double r = 1.0 - std::ldexp(1.0, -j);
            const Complex l = std::polar(r, -0.5 * kPi);
            const double v = rkt_functional(mu, l, cfg);
            // Oracle: direct Riemann sum over the upper half circle.
            const HardyKernel k(l);
            const double kn = std::pow(kernel_norm(l, cfg), p);
            const double brute = riemann_circle([&](double t) { return t < kPi ? std::pow(k.abs_sq(unit(t)), 0.5 * p) : 0.0; }, 1 << 20) / kn;
            EXPECT_NEAR(v, brute, 1e-6 * std::max(brute, 1e-3)) << j;
            EXPECT_LT(v, prev);
            prev = v;
        }
        EXPECT_LT(prev, 0.01);
    }
}

TEST(RktScan, NormalizedArclengthConstantOnGrid) {
    const auto scan = rkt_infimum_scan(Measure::normalized_arclength(), HardyConfig::make(2.0), DiskGrid::dyadic(20, 16));
    for (double v : scan.values) EXPECT_NEAR(v, 1.0, 1e-9);
}

TEST(RktScan, HalfCircleGoesToZeroWithWitnessInLowerHalf) {
    double prev = 1e300;
    for (int levels : {4, 8, 12, 16}) {
        const auto scan = rkt_infimum_scan(half_circle(), HardyConfig::make(2.0), DiskGrid::dyadic(levels, 32));
        EXPECT_LT(scan.value, prev);
        prev = scan.value;
        EXPECT_LT(scan.witness.imag(), 0.0);
    }
    EXPECT_LT(prev, 1e-3);
}

TEST(ReverseEmbedding, PositiveDirection) {
    const auto fs = random_polynomials(30, 32, 5);
    const auto dens = Measure::boundary(BoundaryDensity::sampled([](double t) { return 0.2 + std::sin(t) * std::sin(t); }, 16));
    const double c = measures::boundary_rn_lower_bound(dens).value;
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        const auto cfg = HardyConfig::make(p);
        for (const auto& f : fs) {
            EXPECT_NEAR(reverse_embedding_ratio(Measure::normalized_arclength(), f, cfg), 1.0, 1e-9);
            EXPECT_GE(reverse_embedding_ratio(dens, f, cfg), kTwoPi * c - 1e-6);
        }
        EXPECT_GE(rkt_infimum_scan(dens, cfg, DiskGrid::dyadic(12, 16)).value, kTwoPi * c - 1e-6);
    }
}

TEST(ReverseEmbedding, ZeroCarryingProductOnAtomsVanishes) {
    const std::vector<Complex> pts{std::polar(0.5, 0.1), std::polar(0.7, 2.0), std::polar(0.2, 4.0)};
    std::vector<measures::Atom> atoms;
    for (const Complex& z : pts) atoms.push_back({z, 1.0});
    const auto f = HardyFunction::from_roots(pts);
    EXPECT_NEAR(reverse_embedding_ratio(Measure::atoms(atoms), f, HardyConfig::make(2.0)), 0.0, 1e-28);
    EXPECT_THROW(reverse_embedding_ratio(Measure::normalized_arclength(), {{0.0, 0.0}}, HardyConfig::make(2.0)), DomainError);
}

TEST(PhiH, OppositePointAgainstBruteForceAndDecay) {
    const Arc arc(0.0, 0.5);
    const auto cfg = HardyConfig::make(2.0);
    const double v = phi_h(-1.0, arc, 0.125, cfg);
    EXPECT_NEAR(v, phi_h_brute(-1.0, arc, 0.125, 2.0, 400, 400), 1e-6 * v);
    for (double p : {1.5, 2.0, 3.0}) {
        const auto c = HardyConfig::make(p);
        double worst = 0.0;
        for (int k = 3; k <= 10; ++k) {
            const double h = std::ldexp(1.0, -k);
            worst = std::max(worst, phi_h(-1.0, arc, h, c) / std::pow(h, p - 1.0));
        }
        EXPECT_LT(worst, 1.0) << p;
    }
}

TEST(PhiH, MidpointOnArcStaysInBracket) {
    const Arc arc(0.0, 0.5);
    const auto cfg = HardyConfig::make(2.0);
    const double v = phi_h(1.0, arc, 0.25, cfg);
    EXPECT_NEAR(v, phi_h_brute(1.0, arc, 0.25, 2.0, 3000, 3000), 2e-3 * v);
    double lo = 1e300, hi = 0.0;
    for (int k = 2; k <= 10; ++k) {
        const double val = phi_h(1.0, arc, std::ldexp(1.0, -k), cfg);
        lo = std::min(lo, val);
        hi = std::max(hi, val);
    }
    EXPECT_GT(lo, 1.0);
    EXPECT_LT(hi / lo, 50.0);
}

TEST(PhiH, UniformGridBound) {
    const Arc arc(1.0, 0.5);
    const auto cfg = HardyConfig::make(2.0);
    double sup = 0.0;
    for (int k = 3; k <= 8; ++k) {
        for (const auto& g : DiskGrid::geometric(8, 32).points()) sup = std::max(sup, phi_h(g.z(), arc, std::ldexp(1.0, -k), cfg));
        for (int a = 0; a < 64; ++a) sup = std::max(sup, phi_h(unit(kTwoPi * a / 64.0), arc, std::ldexp(1.0, -k), cfg));
    }
    EXPECT_LT(sup, kTwoPi + 1e-9);
}

TEST(PhiH, IntegralAgainstArclengthClosedForm) {
    // p = 2: int phi_h d(theta) = (1/h) int_S (1-|l|^2) 2pi ||k_l||_2^2 dA = 2pi |I| (1 - h/2).
    const Arc arc(2.0, 0.5);
    const auto cfg = HardyConfig::make(2.0);
    for (double h : {0.25, 0.0625, 0.015625}) {
        const double exact = kTwoPi * arc.length() * (1.0 - 0.5 * h);
        EXPECT_NEAR(phi_h_integral(Measure::arclength(), arc, h, cfg), exact, 1e-6 * exact) << h;
    }
}

TEST(PhiH, RejectsBadDepth) {
    const Arc arc(0.0, 0.5);
    EXPECT_THROW(phi_h(0.0, arc, 0.0, HardyConfig::make(2.0)), DomainError);
    EXPECT_THROW(phi_h(0.0, arc, 0.6, HardyConfig::make(2.0)), DomainError);
}

TEST(PhiHProfile, ClassifiesAgainstArcIndicator) {
    const Arc arc(0.0, 0.5);
    const auto cfg = HardyConfig::make(2.0);
    std::vector<double> hs;
    for (int k = 3; k <= 10; ++k) hs.push_back(std::ldexp(1.0, -k));
    const std::vector<Complex> zs{-1.0, Complex(0.0, 1.0), 0.5, 1.0, unit(0.1), unit(0.25), unit(-0.25)};
    const auto prof = phi_h_limit_profile(arc, hs, zs, cfg);
    EXPECT_EQ(prof[0].classification, LimitClass::Vanishing);
    EXPECT_EQ(prof[1].classification, LimitClass::Vanishing);
    EXPECT_EQ(prof[2].classification, LimitClass::Vanishing);
    EXPECT_EQ(prof[3].classification, LimitClass::BoundedAway);
    EXPECT_EQ(prof[4].classification, LimitClass::BoundedAway);
    EXPECT_EQ(prof[5].classification, LimitClass::Indeterminate);
    EXPECT_EQ(prof[6].classification, LimitClass::Indeterminate);
    for (int i : {0, 1, 2}) EXPECT_GE(prof[i].decay_exponent, 1.0 - 0.1);
    // Successive values off the arc shrink like h^(p-1).
    for (std::size_t k = 1; k < hs.size(); ++k) EXPECT_NEAR(prof[0].values[k] / prof[0].values[k - 1], 0.5, 0.05);
    const std::vector<double> increasing{0.1, 0.2};
    EXPECT_THROW(phi_h_limit_profile(arc, increasing, zs, cfg), DomainError);
}
