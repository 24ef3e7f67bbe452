#ifndef RKTLAB_HARDY_HPP
#define RKTLAB_HARDY_HPP

// H^p reproducing kernels and norms, the kernel and test-function testers of
// the reverse embedding, and the window-averaged kernel function phi_h.
//
// Norm convention: ||f||_p uses d(theta)/2pi. Measures keep plain radians, so
// arclength d(theta) reproduces 2pi ||f||_p^p and d(theta)/2pi reproduces it exactly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rktlab/measures.hpp"
#include "rktlab/numerics.hpp"

namespace rktlab::hardy {

using measures::Arc;
using measures::Measure;

struct HardyConfig {
    double p = 2.0;
    double p_conj = 2.0;
    CircleQuadrature quadrature = CircleQuadrature::uniform(64, 16);
    std::size_t kernel_order = 16;     // per-panel nodes for kernel integrals
    std::size_t area_order = 8;        // per-direction nodes for area cells and phi_h
    double tolerance = 1e-10;
    unsigned threads = 1;

    static HardyConfig make(double p, unsigned threads = 1) {
        if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("HardyConfig: p must lie in (1, inf)");
        HardyConfig cfg;
        cfg.p = p;
        cfg.p_conj = p / (p - 1.0);
        cfg.threads = threads;
        return cfg;
    }
};

/// Polynomial in the monomial basis; lives in H^p and is continuous on the closed disk.
struct HardyFunction {
    CVector coeffs;

    Complex operator()(Complex z) const { return polyval(coeffs, z); }
    bool is_zero() const {
        return std::all_of(coeffs.begin(), coeffs.end(), [](const Complex& c) { return c == Complex{}; });
    }

    static HardyFunction from_roots(std::span<const Complex> roots) { return {poly_from_roots(roots)}; }
};

/// Seeded family of polynomials with standard complex Gaussian coefficients and
/// degrees drawn uniformly from [0, max_degree].
inline std::vector<HardyFunction> random_polynomials(std::size_t count, std::size_t max_degree, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> degree(0, max_degree);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<HardyFunction> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        HardyFunction f;
        const std::size_t d = degree(rng);
        for (std::size_t i = 0; i <= d; ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            f.coeffs.emplace_back(re, im);
        }
        out.push_back(std::move(f));
    }
    return out;
}

/// (1/2pi int |f(e^{it})|^p dt)^{1/p}
inline double hp_norm(const HardyFunction& f, const HardyConfig& cfg) {
    const double p = cfg.p;
    const double s = integrate_circle([&](double t) { return std::pow(std::abs(f(unit(t))), p); }, cfg.quadrature);
    return std::pow(s / kTwoPi, 1.0 / p);
}

/// k_lambda(z) = 1/(1 - conj(lambda) z)
class HardyKernel {
public:
    explicit HardyKernel(Complex lambda) : lambda_(require_finite(lambda, "kernel")) {
        if (!(std::abs(lambda) < 1.0)) throw DomainError("kernel: |lambda| must be < 1");
    }

    Complex lambda() const { return lambda_; }
    Complex operator()(Complex z) const { return 1.0 / (1.0 - std::conj(lambda_) * z); }

    /// |k_lambda(z)|^2 without cancellation when z is on or near the circle.
    double abs_sq(Complex z) const {
        const double rho = std::abs(z);
        const double q = std::abs(lambda_) * rho;
        const double phi = std::arg(z) - std::arg(lambda_);
        const double s = std::sin(0.5 * phi);
        const double gap = (1.0 - std::abs(lambda_)) + std::abs(lambda_) * (1.0 - rho);
        const double d2 = gap * gap + 4.0 * q * s * s;
        return 1.0 / d2;
    }

private:
    Complex lambda_;
};

inline HardyKernel kernel(Complex lambda) { return HardyKernel(lambda); }

namespace detail {

inline double peak_width(Complex lambda) { return std::max(0.125 * (1.0 - std::abs(lambda)), 1e-12); }

/// (1/2pi) int |1 - r e^{it}|^{-p} dt on a quadrature refined toward t = 0.
inline double kernel_norm_pow(double r, double p, std::size_t order) {
    const double peaks[] = {0.0};
    const double width = std::max(0.125 * (1.0 - r), 1e-12);
    const auto quad = CircleQuadrature::refined(peaks, width, order);
    const double gap = 1.0 - r;
    return integrate_circle(
               [&](double t) {
                   const double s = std::sin(0.5 * t);
                   return std::pow(gap * gap + 4.0 * r * s * s, -0.5 * p);
               },
               quad) /
           kTwoPi;
}

/// Circle quadrature refined toward `peaks` and split at the density jumps of mu.
inline CircleQuadrature boundary_quadrature(const Measure& mu, std::span<const double> peaks, double min_width, std::size_t order,
                                            std::size_t base_panels) {
    const auto br = mu.boundary_density().breakpoints();
    return CircleQuadrature::refined(peaks, min_width, order, br, base_panels);
}

/// int F dmu where F(z) is given; area cells use tensor rules graded toward the
/// boundary and toward `peak_angle` when supplied.
template <class F>
double integrate_measure(const Measure& mu, F&& f, const CircleQuadrature& boundary_quad, std::size_t area_order,
                         std::optional<double> peak_angle, double min_width) {
    double s = 0.0;
    for (const auto& a : mu.atom_list()) s += a.mass * f(a.point);
    const auto& b = mu.boundary_density();
    if (!b.empty()) s += integrate_circle([&](double t) { return b.at(t) * f(unit(t)); }, boundary_quad);
    const auto& area = mu.area_density();
    if (!area.empty()) {
        const auto rb = area.radial_breaks();
        const auto ab = area.angular_breaks();
        for (std::size_t i = 0; i + 1 < rb.size(); ++i) {
            const auto rq = composite_gauss(graded_breaks(rb[i], rb[i + 1], 1.0, min_width), area_order);
            for (std::size_t j = 0; j + 1 < ab.size(); ++j) {
                const double v = area.values()[i][j];
                if (v == 0.0) continue;
                std::vector<double> tb;
                if (peak_angle) {
                    // Closest representative of the peak angle relative to the sector.
                    double target = *peak_angle;
                    while (target < ab[j] - kPi) target += kTwoPi;
                    while (target > ab[j + 1] + kPi) target -= kTwoPi;
                    tb = graded_breaks(ab[j], ab[j + 1], target, min_width);
                } else {
                    tb = graded_breaks(ab[j], ab[j + 1], ab[j], 0.25 * (ab[j + 1] - ab[j]));
                }
                const auto tq = composite_gauss(tb, area_order);
                double cell = 0.0;
                for (std::size_t a = 0; a < rq.nodes.size(); ++a) {
                    const double r = rq.nodes[a];
                    double ring = 0.0;
                    for (std::size_t c = 0; c < tq.nodes.size(); ++c) ring += tq.weights[c] * f(std::polar(r, tq.nodes[c]));
                    cell += rq.weights[a] * r * ring;
                }
                s += v * cell;
            }
        }
    }
    return s;
}

}  // namespace detail

/// ||k_lambda||_p by refined quadrature, cross-checked against a higher-order rule.
inline double kernel_norm(Complex lambda, const HardyConfig& cfg) {
    const HardyKernel k(lambda);
    const double r = std::abs(k.lambda());
    if (1.0 - r < kBoundaryCap * (1.0 - 1e-12)) {
        throw NumericalError("kernel_norm: |lambda| beyond the grid cap 1 - 2^-20");
    }
    const double a = detail::kernel_norm_pow(r, cfg.p, cfg.kernel_order);
    const double b = detail::kernel_norm_pow(r, cfg.p, cfg.kernel_order + 8);
    if (std::abs(a - b) > cfg.tolerance * std::abs(b)) {
        throw NumericalError("kernel_norm: quadrature did not converge at |lambda| = " + std::to_string(r));
    }
    return std::pow(b, 1.0 / cfg.p);
}

/// int |K_lambda|^p dmu with K_lambda = k_lambda / ||k_lambda||_p.
inline double rkt_functional(const Measure& mu, Complex lambda, const HardyConfig& cfg) {
    const HardyKernel k(lambda);
    const double r = std::abs(lambda);
    const double norm_pow = detail::kernel_norm_pow(r, cfg.p, cfg.kernel_order);
    const double width = detail::peak_width(lambda);
    const double peaks[] = {std::arg(lambda)};
    const auto quad = detail::boundary_quadrature(mu, r > 0.0 ? std::span<const double>(peaks) : std::span<const double>{}, width,
                                                  cfg.kernel_order, 8);
    const double half_p = 0.5 * cfg.p;
    const double integral = detail::integrate_measure(
        mu, [&](Complex z) { return std::pow(k.abs_sq(z), half_p); }, quad, cfg.area_order,
        r > 0.0 ? std::optional<double>(std::arg(lambda)) : std::nullopt, width);
    return integral / norm_pow;
}

struct RktScanResult {
    double value = std::numeric_limits<double>::infinity();
    Complex witness{};
    std::vector<double> ring_minima;   // minimum over each ring of the grid
    std::vector<double> values;        // one per grid point, in DiskGrid::points() order
};

/// min over the grid of rkt_functional; estimates the best kernel constant.
inline RktScanResult rkt_infimum_scan(const Measure& mu, const HardyConfig& cfg, const DiskGrid& grid) {
    const auto pts = grid.points();
    RktScanResult out;
    out.values.resize(pts.size());
    parallel_for(pts.size(), cfg.threads, [&](std::size_t i) { out.values[i] = rkt_functional(mu, pts[i].z(), cfg); });
    out.ring_minima.assign(grid.radii().size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        out.ring_minima[pts[i].ring] = std::min(out.ring_minima[pts[i].ring], out.values[i]);
        if (out.values[i] < out.value) {
            out.value = out.values[i];
            out.witness = pts[i].z();
        }
    }
    return out;
}

/// int |f|^p dmu / ||f||_p^p
inline double reverse_embedding_ratio(const Measure& mu, const HardyFunction& f, const HardyConfig& cfg) {
    if (f.is_zero()) throw DomainError("reverse_embedding_ratio: zero function");
    const double norm = hp_norm(f, cfg);
    if (!(norm > 0.0)) throw DomainError("reverse_embedding_ratio: zero function");
    std::vector<double> br;
    for (const Panel& panel : cfg.quadrature.panels()) br.push_back(panel.begin);
    const auto db = mu.boundary_density().breakpoints();
    br.insert(br.end(), db.begin(), db.end());
    for (double& x : br) x = wrap_angle(x);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end(), [](double x, double y) { return std::abs(x - y) < 1e-15; }), br.end());
    br.push_back(br.front() + kTwoPi);
    const std::size_t order = cfg.quadrature.panels().empty() ? 16 : cfg.quadrature.size() / cfg.quadrature.panels().size();
    const auto quad = CircleQuadrature::from_breaks(br, order);
    const double p = cfg.p;
    const double integral = detail::integrate_measure(
        mu, [&](Complex z) { return std::pow(std::abs(f(z)), p); }, quad, cfg.area_order, std::nullopt, 1e-3);
    return integral / std::pow(norm, p);
}

// ---------------------------------------------------------------------------
// phi_h

/// (1/h) int_{S_{I,h}} (1-|l|^2)^{p-1} / |1 - conj(l) z|^p dA(l)
inline double phi_h(Complex z, const Arc& arc, double h, const HardyConfig& cfg) {
    require_finite(z, "phi_h");
    if (!(h > 0.0) || h > arc.length() + 1e-15 || h > 1.0) throw DomainError("phi_h: need 0 < h <= min(|I|, 1)");
    const double rho = std::abs(z);
    if (rho > 1.0 + 1e-12) throw DomainError("phi_h: z must lie in the closed disk");
    const double gap_z = std::max(0.0, 1.0 - rho);
    const double p = cfg.p;
    const double len = arc.length();
    const double start = arc.center() - 0.5 * len;
    // Offset of arg z from the arc start, in (len/2 - pi, len/2 + pi].
    double d = rho > 0.0 ? wrap_angle(std::arg(z) - start) : 0.0;
    if (d > 0.5 * len + kPi) d -= kTwoPi;
    const double target = std::clamp(d, 0.0, len);
    const double outside = std::abs(d - target);

    const auto tq = composite_gauss(graded_breaks(0.0, h, 0.0, h * 0x1p-30), cfg.area_order);
    double total = 0.0;
    for (std::size_t a = 0; a < tq.nodes.size(); ++a) {
        const double t = tq.nodes[a];
        const double r = 1.0 - t;
        const double q = r * rho;
        const double gap = gap_z + t * rho;   // 1 - r rho
        const double scale = std::max(gap + outside, 1e-15);
        const auto uq = composite_gauss(graded_breaks(0.0, len, target, 0.25 * scale), cfg.area_order);
        double inner = 0.0;
        for (std::size_t c = 0; c < uq.nodes.size(); ++c) {
            const double s = std::sin(0.5 * (d - uq.nodes[c]));
            const double d2 = gap * gap + 4.0 * q * s * s;
            inner += uq.weights[c] * std::pow(d2, -0.5 * p);
        }
        total += tq.weights[a] * std::pow(t * (2.0 - t), p - 1.0) * r * inner;
    }
    return total / h;
}

/// int phi_h dmu; the averaged kernel inequality integrated against mu.
inline double phi_h_integral(const Measure& mu, const Arc& arc, double h, const HardyConfig& cfg) {
    const double peaks[] = {arc.start(), arc.end_angle()};
    const auto quad = detail::boundary_quadrature(mu, peaks, 0.0625 * h, cfg.area_order, 32);
    return detail::integrate_measure(
        mu, [&](Complex z) { return phi_h(z, arc, h, cfg); }, quad, std::min<std::size_t>(cfg.area_order, 4), arc.center(), 0.25 * h);
}

enum class LimitClass { Vanishing, BoundedAway, Indeterminate };

inline const char* to_string(LimitClass c) {
    switch (c) {
        case LimitClass::Vanishing: return "vanishing";
        case LimitClass::BoundedAway: return "bounded-away";
        case LimitClass::Indeterminate: return "boundary-indeterminate";
    }
    return "?";
}

struct PhiProfileEntry {
    Complex z;
    std::vector<double> values;     // phi_h(z) for each h
    double decay_exponent = 0.0;    // log-log slope over the last two h values
    LimitClass classification = LimitClass::Indeterminate;
};

/// Empirical h -> 0 limit of phi_h on a set of points. Points on the circle at
/// an endpoint of I are excluded as boundary-indeterminate.
inline std::vector<PhiProfileEntry> phi_h_limit_profile(const Arc& arc, std::span<const double> hs, std::span<const Complex> zs,
                                                        const HardyConfig& cfg, double endpoint_slack = 1e-9) {
    if (hs.size() < 2) throw DomainError("phi_h_limit_profile: need at least two h values");
    for (std::size_t k = 1; k < hs.size(); ++k) {
        if (!(hs[k] < hs[k - 1])) throw DomainError("phi_h_limit_profile: h sequence must decrease");
    }
    std::vector<PhiProfileEntry> out(zs.size());
    parallel_for(zs.size(), cfg.threads, [&](std::size_t i) {
        PhiProfileEntry e;
        e.z = zs[i];
        const bool on_circle = std::abs(zs[i]) >= 1.0 - 1e-12;
        if (on_circle) {
            const double th = std::arg(zs[i]);
            const double ds = std::abs(std::remainder(th - arc.start(), kTwoPi));
            const double de = std::abs(std::remainder(th - arc.end_angle(), kTwoPi));
            if (std::min(ds, de) <= endpoint_slack) {
                out[i] = std::move(e);
                return;
            }
        }
        for (double h : hs) e.values.push_back(phi_h(zs[i], arc, h, cfg));
        const std::size_t n = e.values.size();
        const double v1 = e.values[n - 2];
        const double v2 = e.values[n - 1];
        if (v2 <= 0.0) {
            e.decay_exponent = std::numeric_limits<double>::infinity();
        } else {
            e.decay_exponent = std::log(v2 / v1) / std::log(hs[n - 1] / hs[n - 2]);
        }
        e.classification = e.decay_exponent >= 0.5 * (cfg.p - 1.0) ? LimitClass::Vanishing : LimitClass::BoundedAway;
        out[i] = std::move(e);
    });
    return out;
}

}  // namespace rktlab::hardy

#endif  // RKTLAB_HARDY_HPP
