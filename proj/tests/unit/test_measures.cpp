#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rktlab/measures.hpp"

using namespace rktlab;
using namespace rktlab::measures;

namespace {

Measure half_circle() { return Measure::boundary(BoundaryDensity({0.0, kPi, kTwoPi}, {1.0, 0.0})); }

// Mixed measure used by the additivity and monotonicity properties.
Measure mixed() {
    std::vector<Atom> atoms{{std::polar(0.97, 0.2), 0.3}, {std::polar(1.0, 1.1), 0.2}, {std::polar(0.5, 4.0), 1.0}};
    BoundaryDensity b({0.0, 1.0, 3.0, kTwoPi}, {0.5, 2.0, 1.0});
    AreaDensity a({0.0, 0.5, 0.9, 1.0}, {0.0, kPi, kTwoPi}, {{0.1, 0.2}, {0.3, 0.0}, {1.5, 0.7}});
    return Measure(std::move(atoms), std::move(b), std::move(a));
}

}  // namespace

TEST(Arc, GeometryAndWrapping) {
    const Arc a(0.0, 0.5);
    EXPECT_NEAR(a.start(), kTwoPi - 0.25, 1e-15);
    EXPECT_NEAR(a.end_angle(), 0.25, 1e-15);
    EXPECT_TRUE(a.contains(0.1));
    EXPECT_TRUE(a.contains(kTwoPi - 0.2));
    EXPECT_TRUE(a.contains(0.25));   // closed
    EXPECT_FALSE(a.contains(0.3));
    EXPECT_NEAR(a.overlap(0.0, kTwoPi), 0.5, 1e-15);
    EXPECT_NEAR(a.overlap(0.0, 0.1), 0.1, 1e-15);
    EXPECT_THROW(Arc(0.0, 0.0), DomainError);
    EXPECT_THROW(Arc(0.0, 7.0), DomainError);
}

TEST(WindowMass, Examples) {
    const auto leb = Measure::arclength();
    for (double len : {0.01, 0.5, 2.0, kTwoPi}) {
        for (double h : {0.01, 0.3, 1.0}) EXPECT_NEAR(window_mass(leb, CarlesonWindow(Arc(1.3, len), h)), len, 1e-14);
    }
    const auto delta = Measure::atoms({{0.5, 1.0}});
    EXPECT_EQ(window_mass(delta, CarlesonWindow(Arc(0.0, 0.2), 0.3)), 0.0);
    EXPECT_EQ(window_mass(delta, CarlesonWindow(Arc(0.0, 0.2), 0.6)), 1.0);
}

TEST(WindowMass, AdditiveOverSplitArcs) {
    const auto mu = mixed();
    const Arc arc(0.9, 2.4);
    for (std::size_t n : {2u, 3u, 8u, 32u}) {
        const double h = std::min(1.0, arc.length() / static_cast<double>(n));
        double parts = 0.0;
        for (const Arc& part : arc.split(n)) parts += window_mass(mu, CarlesonWindow(part, h));
        EXPECT_NEAR(parts, window_mass(mu, CarlesonWindow(arc, h)), 1e-12) << n;
    }
}

TEST(WindowMass, MonotoneInDepthAndArc) {
    const auto mu = mixed();
    const Arc small(0.5, 0.4), big(0.5, 1.2);
    double prev = 0.0;
    for (double h : {0.01, 0.05, 0.1, 0.3, 0.6, 1.0}) {
        const double m = window_mass(mu, CarlesonWindow(small, h));
        EXPECT_GE(m, prev - 1e-15);
        prev = m;
        EXPECT_LE(m, window_mass(mu, CarlesonWindow(big, h)) + 1e-15);
    }
}

TEST(WindowScan, LebesgueIsOneAtEveryDepth) {
    const auto r = window_infimum_scan(Measure::arclength(), 12);
    EXPECT_EQ(r.ratio, 1.0);
    for (double g : r.generation_minima) EXPECT_EQ(g, 1.0);
}

TEST(WindowScan, HalfCircleStarvesInTheLowerHalf) {
    double prev = 1.0;
    for (int depth : {2, 4, 8, 12}) {
        const auto r = window_infimum_scan(half_circle(), depth);
        EXPECT_LE(r.ratio, prev);
        prev = r.ratio;
        if (depth >= 2) {
            EXPECT_EQ(r.ratio, 0.0);
            const double c = r.witness.center();
            EXPECT_GE(c, kPi);
            EXPECT_LT(c, kTwoPi);
        }
    }
}

TEST(WindowScan, HalfArclengthPlusInteriorAtomsMatchesBruteForce) {
    std::vector<Atom> atoms;
    for (int k = 0; k < 16; ++k) atoms.push_back({std::polar(0.5, kTwoPi * k / 16.0), 0.1});
    const Measure mu(atoms, BoundaryDensity::constant(0.5), {});
    const int depth = 10;
    const auto r = window_infimum_scan(mu, depth);
    // Oracle: same arc family, masses summed directly.
    for (int g = 1; g <= depth; ++g) {
        const double len = kTwoPi / std::pow(2.0, g);
        const double h = std::min(len, 1.0);
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < (2 << g); ++k) {
            const double c = 0.5 * len * (k + 1);
            double m = 0.5 * len;
            for (const Atom& a : atoms) {
                const double rr = std::abs(a.point);
                double d = std::remainder(std::arg(a.point) - c, kTwoPi);
                if (rr >= 1.0 - h && std::abs(d) <= 0.5 * len + 1e-13) m += a.mass;
            }
            best = std::min(best, m / len);
        }
        EXPECT_NEAR(r.generation_minima[g - 1], best, 1e-12) << g;
        if (g >= 4) {
            EXPECT_NEAR(r.generation_minima[g - 1], 0.5, 1e-12);
        }
    }
}

TEST(BoundaryBound, Examples) {
    EXPECT_EQ(boundary_rn_lower_bound(Measure::arclength()).value, 1.0);
    const auto two = Measure::boundary(BoundaryDensity({0.0, kPi, kTwoPi}, {2.0, 0.5}));
    EXPECT_EQ(boundary_rn_lower_bound(two).value, 0.5);
    const auto atoms = Measure::atoms({{1.0, 1.0}});
    const auto b = boundary_rn_lower_bound(atoms);
    EXPECT_EQ(b.value, 0.0);
    EXPECT_TRUE(b.atoms_on_boundary);
}

TEST(BoundaryBound, SampledDensityAgainstWindowScan) {
    const auto d = BoundaryDensity::sampled([](double t) { return 1.2 + std::sin(3.0 * t); }, 64);
    const auto mu = Measure::boundary(d);
    const double c4 = boundary_rn_lower_bound(mu).value;
    const auto scan = window_infimum_scan(mu, 12);
    for (double g : scan.generation_minima) EXPECT_GE(g, c4 - 1e-12);
    // Deep windows fit inside the minimal piece.
    EXPECT_NEAR(scan.generation_minima.back(), c4, 1e-12);
}

TEST(BoundaryBound, DensityFloorImpliesWindowFloorOnRandomArcs) {
    const auto mu = Measure::boundary(BoundaryDensity::sampled([](double t) { return 0.3 + std::cos(t) * std::cos(t); }, 40));
    const double c = boundary_rn_lower_bound(mu).value;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ang(0.0, kTwoPi), len(1e-4, kTwoPi);
    for (int k = 0; k < 2000; ++k) {
        const Arc arc(ang(rng), len(rng));
        EXPECT_GE(window_mass(mu, CarlesonWindow::standard(arc)) / arc.length(), c - 1e-12);
    }
}

TEST(RefineWindow, Examples) {
    const double depths[] = {0.5, 0.25, 0.1, 0.01, 0.001};
    for (double m : refine_window_to_arc(Measure::arclength(), Arc(2.0, 0.7), depths)) EXPECT_NEAR(m, 0.7, 1e-15);

    const Measure area({}, {}, AreaDensity::constant(1.0));
    const auto masses = refine_window_to_arc(area, Arc(1.0, 1.0), depths);
    for (std::size_t k = 0; k < masses.size(); ++k) {
        const double h = depths[k];
        EXPECT_NEAR(masses[k], h * (1.0 - 0.5 * h), 1e-14);
    }

    const Measure with_atom({{unit(1.0), 0.25}}, BoundaryDensity::constant(0.5), AreaDensity::constant(1.0));
    const auto m2 = refine_window_to_arc(with_atom, Arc(1.0, 1.0), depths);
    EXPECT_NEAR(m2.back(), 0.25 + 0.5, 2e-3);
    for (std::size_t k = 1; k < m2.size(); ++k) EXPECT_LE(m2[k], m2[k - 1]);

    const double bad[] = {0.1, 0.2};
    EXPECT_THROW(refine_window_to_arc(area, Arc(1.0, 1.0), bad), DomainError);
}

TEST(MeasureJson, RoundTripAndSchemaErrors) {
    const auto mu = mixed();
    const auto back = measure_from_json(to_json(mu));
    EXPECT_NEAR(back.total_mass(), mu.total_mass(), 1e-14);
    const Arc arc(0.4, 1.0);
    EXPECT_NEAR(window_mass(back, CarlesonWindow::standard(arc)), window_mass(mu, CarlesonWindow::standard(arc)), 1e-14);

    auto j = to_json(mu);
    j["atoms"][1]["weight"] = 1.0;
    try {
        measure_from_json(j, "/measure");
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.path(), "/measure/atoms/1/weight");
    }
    auto k = to_json(mu);
    k["boundary_density"]["values"][0] = -1.0;
    EXPECT_THROW(measure_from_json(k), SchemaError);
    auto a = to_json(mu);
    a["atoms"][0]["re"] = 2.0;
    EXPECT_THROW(measure_from_json(a), SchemaError);
}
