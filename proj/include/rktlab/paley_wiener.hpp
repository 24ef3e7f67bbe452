#ifndef RKTLAB_PALEY_WIENER_HPP
#define RKTLAB_PALEY_WIENER_HPP

// Paley-Wiener space PW_pi: the Kadets-perturbed integer sequence with the
// origin removed, normalized sinc kernels and the discrete measure on the
// sequence. Kernels see the measure uniformly from below, while the generating
// function of the sequence vanishes on all of it.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "rktlab/numerics.hpp"

namespace rktlab::paley_wiener {

/// x_n = n + 1/8 for even n, n - 1/8 for odd n (n != 0).
inline double kadets_point(long n) {
    if (n == 0) throw DomainError("kadets_point: n = 0 is the deleted point");
    return (n % 2 == 0) ? static_cast<double>(n) + 0.125 : static_cast<double>(n) - 0.125;
}

/// Real sequence indexed by n in [-N, N] \ {0}. Rule-based sequences can be
/// extended past the truncation; explicit point lists cannot.
class SamplingSequence {
public:
    enum class Rule { Kadets, Lattice, Explicit };

    static SamplingSequence kadets(long truncation) { return SamplingSequence(Rule::Kadets, truncation, 0.125); }
    static SamplingSequence lattice(long truncation) { return SamplingSequence(Rule::Lattice, truncation, 0.0); }

    static SamplingSequence explicit_points(std::vector<double> points) {
        SamplingSequence s(Rule::Explicit, 0, 0.0);
        for (double x : points) {
            if (!std::isfinite(x)) throw DomainError("SamplingSequence: non-finite point");
        }
        s.points_ = std::move(points);
        return s;
    }

    Rule rule() const { return rule_; }
    long truncation() const { return truncation_; }
    /// sup_n |x_n - n| for rule-based sequences.
    double max_perturbation() const { return perturbation_; }
    bool extendable() const { return rule_ != Rule::Explicit; }

    double point(long n) const {
        switch (rule_) {
            case Rule::Kadets: return kadets_point(n);
            case Rule::Lattice:
                if (n == 0) throw DomainError("SamplingSequence: n = 0 is excluded");
                return static_cast<double>(n);
            case Rule::Explicit: break;
        }
        throw DomainError("SamplingSequence: explicit sequences have no index rule");
    }

    /// Points in index order (-N..-1, 1..N) or the explicit list.
    const std::vector<double>& points() const { return points_; }

private:
    SamplingSequence(Rule rule, long truncation, double perturbation)
        : rule_(rule), truncation_(truncation), perturbation_(perturbation) {
        if (rule != Rule::Explicit) {
            if (truncation < 1) throw DomainError("SamplingSequence: truncation must be >= 1");
            for (long n = -truncation; n <= truncation; ++n) {
                if (n != 0) points_.push_back(point(n));
            }
        }
    }

    Rule rule_;
    long truncation_;
    double perturbation_;
    std::vector<double> points_;
};

/// |sin(pi w) / (pi w)|^2, series near w = 0.
inline double sinc_abs_sq(Complex w) {
    if (std::abs(w) < 1e-3) {
        const Complex u = kPi * w;
        const Complex u2 = u * u;
        return std::norm(1.0 - u2 / 6.0 + u2 * u2 / 120.0);
    }
    const double a = std::sin(kPi * w.real());
    const double b = std::sinh(kPi * w.imag());
    return (a * a + b * b) / (kPi * kPi * std::norm(w));
}

/// ||sinc(pi(. - lambda))||^2_{L^2(R)} = sinh(2 pi t)/(2 pi t), t = |Im lambda|.
inline double pw_kernel_norm_sq(Complex lambda) {
    require_finite(lambda, "pw_kernel_norm_sq");
    const double x = kTwoPi * std::abs(lambda.imag());
    if (x < 1e-3) {
        const double x2 = x * x;
        return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sinh(x) / x;
}

/// Normalized kernel K_lambda(z) = c_lambda sinc(pi(z - lambda)).
struct PWKernel {
    Complex lambda;
    double c;   // c_lambda = pw_kernel_norm_sq(lambda)^{-1/2}

    explicit PWKernel(Complex l) : lambda(require_finite(l, "PWKernel")), c(1.0 / std::sqrt(pw_kernel_norm_sq(l))) {}

    double abs_sq(Complex z) const { return c * c * sinc_abs_sq(z - lambda); }
};

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

/// sum_n |K_lambda(x_n)|^2 over the truncation; `high` adds an analytic bound
/// on the tail |n| > N.
inline Interval rkt_sum(Complex lambda, const SamplingSequence& seq) {
    if (!seq.extendable() || seq.truncation() < 64) throw DomainError("rkt_sum: rule-based sequence with truncation >= 64 required");
    const PWKernel k(lambda);
    double s = 0.0;
    for (double x : seq.points()) s += k.abs_sq(Complex(x, 0.0));
    const double a = seq.max_perturbation() + std::abs(lambda.real());
    const double n = static_cast<double>(seq.truncation());
    if (!(n > a + 1.0)) throw DomainError("rkt_sum: truncation too small for Re(lambda)");
    // c^2 cosh^2(pi t) = pi t / tanh(pi t) bounds c^2 |sin(pi(x - lambda))|^2.
    const double pt = kPi * std::abs(lambda.imag());
    const double numerator = pt < 1e-8 ? 1.0 : pt / std::tanh(pt);
    const double tail = numerator / (kPi * kPi) * 2.0 / (n - a);
    return {s, s + tail};
}

struct Region {
    double re_min = 0.0;
    double re_max = 4.0;
    double im_min = -2.0;
    double im_max = 2.0;
};

struct ScanNode {
    Complex lambda;
    Interval value;
};

struct LowerBoundScan {
    double delta = std::numeric_limits<double>::infinity();
    Complex witness{};
    std::vector<ScanNode> nodes;   // real part outer, imaginary part inner
};

/// min over a uniform grid (endpoints included) of the lower rkt_sum values.
inline LowerBoundScan rkt_lower_bound_scan(const SamplingSequence& seq, const Region& region, std::size_t nre, std::size_t nim,
                                           unsigned threads = 1, bool enforce_resolution = true) {
    if (enforce_resolution && (nre < 64 || nim < 64)) throw DomainError("rkt_lower_bound_scan: resolution must be >= 64x64");
    if (nre < 2 || nim < 2) throw DomainError("rkt_lower_bound_scan: resolution must be >= 2x2");
    LowerBoundScan out;
    out.nodes.resize(nre * nim);
    parallel_for(nre, threads, [&](std::size_t i) {
        const double re = region.re_min + (region.re_max - region.re_min) * static_cast<double>(i) / static_cast<double>(nre - 1);
        for (std::size_t j = 0; j < nim; ++j) {
            const double im = region.im_min + (region.im_max - region.im_min) * static_cast<double>(j) / static_cast<double>(nim - 1);
            const Complex l(re, im);
            out.nodes[i * nim + j] = {l, rkt_sum(l, seq)};
        }
    });
    for (const ScanNode& node : out.nodes) {
        if (node.value.low < out.delta) {
            out.delta = node.value.low;
            out.witness = node.lambda;
        }
    }
    return out;
}

struct WitnessValues {
    CVector values;
    double max_error_estimate = 0.0;
};

/// f(z) = prod_{n != 0} (1 - z/x_n), pairing n with -n; f vanishes on the whole
/// sequence and f(0) = 1. The infinite product is the log-space Richardson limit
/// of the partial products at N, 2N, ..., 16N pairs.
inline WitnessValues generating_witness(const SamplingSequence& seq, std::span<const Complex> zs, double tol = 1e-6, unsigned threads = 1) {
    if (!seq.extendable() || seq.truncation() < 512) {
        throw DomainError("generating_witness: rule-based sequence with truncation >= 512 required");
    }
    constexpr int kLevels = 5;
    const long n0 = seq.truncation();
    WitnessValues out;
    out.values.resize(zs.size());
    std::vector<double> errors(zs.size(), 0.0);
    parallel_for(zs.size(), threads, [&](std::size_t i) {
        const Complex z = require_finite(zs[i], "generating_witness");
        Complex log_levels[kLevels];
        Complex running_log{};
        Complex block{1.0, 0.0};
        long n = 1;
        for (int level = 0; level < kLevels; ++level) {
            const long upto = n0 << level;
            for (; n <= upto; ++n) {
                block *= (1.0 - z / seq.point(n)) * (1.0 - z / seq.point(-n));
                // Renormalize periodically so the running product never over- or underflows.
                if ((n & 63) == 0) {
                    if (block == Complex{}) break;
                    running_log += std::log(block);
                    block = 1.0;
                }
            }
            if (block == Complex{} || n <= upto) {
                out.values[i] = 0.0;
                return;
            }
            running_log += std::log(block);
            block = 1.0;
            log_levels[level] = running_log;
        }
        // Richardson tableau in h = 1/N.
        Complex t[kLevels][kLevels];
        for (int k = 0; k < kLevels; ++k) {
            t[k][0] = log_levels[k];
            for (int j = 1; j <= k; ++j) {
                const double f = std::ldexp(1.0, j);
                t[k][j] = (f * t[k][j - 1] - t[k - 1][j - 1]) / (f - 1.0);
            }
        }
        const Complex best = std::exp(t[kLevels - 1][kLevels - 1]);
        const Complex previous = std::exp(t[kLevels - 1][kLevels - 2]);
        out.values[i] = best;
        errors[i] = std::abs(best - previous);
    });
    for (std::size_t i = 0; i < zs.size(); ++i) {
        out.max_error_estimate = std::max(out.max_error_estimate, errors[i]);
        if (errors[i] > tol * std::max(1.0, std::abs(out.values[i]))) {
            std::ostringstream os;
            os << "generating_witness: product extrapolation did not converge at z = " << zs[i] << " (error estimate " << errors[i]
               << ", truncation " << n0 << ")";
            throw NumericalError(os.str());
        }
    }
    return out;
}

/// Fraction of discrete-Fourier energy outside [-pi, pi] for samples taken at
/// `rate` points per unit over an interval of length `length`.
inline double bandlimit_check(std::span<const Complex> samples, double length, double rate) {
    if (length < 256.0 || rate < 8.0) throw DomainError("bandlimit_check: need length >= 256 and rate >= 8");
    const std::size_t m = samples.size();
    if (std::abs(static_cast<double>(m) - length * rate) > 0.5) throw DomainError("bandlimit_check: sample count must equal length * rate");
    CVector twiddle(m);
    for (std::size_t k = 0; k < m; ++k) twiddle[k] = unit(-kTwoPi * static_cast<double>(k) / static_cast<double>(m));
    double in_band = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        Complex acc{};
        std::size_t idx = 0;
        for (std::size_t j = 0; j < m; ++j) {
            acc += samples[j] * twiddle[idx];
            idx += k;
            if (idx >= m) idx -= m;
        }
        const double e = std::norm(acc);
        const long signed_k = (k <= m / 2) ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(m);
        const double omega = kTwoPi * rate * static_cast<double>(std::labs(signed_k)) / static_cast<double>(m);
        total += e;
        if (omega <= kPi * (1.0 + 1e-12)) in_band += e;
    }
    if (total == 0.0) return 0.0;
    return (total - in_band) / total;
}

struct CarlesonSanity {
    double separation = std::numeric_limits<double>::infinity();
    double strip_width = 0.0;
};

/// Minimal gap between distinct points (infinite for fewer than two points) and
/// the largest |Im| (zero for real sequences).
inline CarlesonSanity carleson_sanity(const SamplingSequence& seq) {
    std::vector<double> pts = seq.points();
    std::sort(pts.begin(), pts.end());
    CarlesonSanity out;
    for (std::size_t k = 1; k < pts.size(); ++k) out.separation = std::min(out.separation, pts[k] - pts[k - 1]);
    return out;
}

/// Smallest eigenvalue of the Gram matrix of normalized kernels at
/// {x_n : 0 < |n| <= m} together with the origin.
inline double frame_gram_min_eigenvalue(const SamplingSequence& seq, long m) {
    std::vector<double> pts{0.0};
    for (long n = -m; n <= m; ++n) {
        if (n != 0) pts.push_back(seq.point(n));
    }
    HermitianMatrix g(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i; j < pts.size(); ++j) {
            const double w = pts[i] - pts[j];
            g.set(i, j, w == 0.0 ? 1.0 : std::sin(kPi * w) / (kPi * w));
        }
    }
    return eigen_hermitian(g).values.front();
}

}  // namespace rktlab::paley_wiener

#endif  // RKTLAB_PALEY_WIENER_HPP
