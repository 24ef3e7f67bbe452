#ifndef RKTLAB_NUMERICS_HPP
#define RKTLAB_NUMERICS_HPP

// Shared numerical kernels: errors, complex helpers, Gauss-Legendre panel
// quadrature on the circle and on intervals, evaluation grids in the disk,
// a cyclic Jacobi eigensolver for small Hermitian matrices and a few dense
// linear-algebra helpers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace rktlab {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Closest approach to the unit circle used by every near-boundary grid.
inline constexpr double kBoundaryCap = 0x1p-20;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A computation could not reach its stated precision.
class NumericalError : public Error {
public:
    using Error::Error;
};

class EvaluationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateSystemError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

struct Tolerances {
    double quadrature = 1e-10;
    double linear_algebra = 1e-10;
    double experiment = 1e-6;
};

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline Complex require_finite(Complex z, const char* what) {
    if (!is_finite(z)) {
        throw DomainError(std::string(what) + ": non-finite complex point");
    }
    return z;
}

/// Angle reduced to [0, 2pi).
inline double wrap_angle(double theta) {
    double r = std::fmod(theta, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

inline double arg_0_2pi(Complex z) { return wrap_angle(std::arg(z)); }

inline Complex unit(double theta) { return {std::cos(theta), std::sin(theta)}; }

// ---------------------------------------------------------------------------
// Gauss-Legendre rules

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule by Newton iteration on P_n.
inline GaussRule gauss_legendre(std::size_t n) {
    if (n == 0) throw DomainError("gauss_legendre: order must be positive");
    if (n == 1) return {{0.0}, {2.0}};
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = pk;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // One more derivative evaluation at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = pk;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

/// Nodes and weights of a composite rule on a line.
struct LineQuadrature {
    std::vector<double> nodes;
    std::vector<double> weights;

    template <class F>
    double integrate(F&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
        return s;
    }
};

/// Composite Gauss-Legendre over consecutive breakpoints (must be sorted).
inline LineQuadrature composite_gauss(std::span<const double> breaks, std::size_t order) {
    const GaussRule rule = gauss_legendre(order);
    LineQuadrature q;
    q.nodes.reserve(breaks.size() * order);
    q.weights.reserve(breaks.size() * order);
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double a = breaks[k];
        const double b = breaks[k + 1];
        if (!(b > a)) continue;
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        for (std::size_t i = 0; i < order; ++i) {
            q.nodes.push_back(mid + half * rule.nodes[i]);
            q.weights.push_back(half * rule.weights[i]);
        }
    }
    return q;
}

/// Breakpoints of [a, b] with dyadic refinement toward `target` (clamped into
/// [a, b]), stopping once the smallest panel is below `min_width`.
inline std::vector<double> graded_breaks(double a, double b, double target, double min_width) {
    std::vector<double> br{a, b};
    const double t = std::clamp(target, a, b);
    if (t > a) {
        for (double d = 0.5 * (t - a); d > min_width; d *= 0.5) br.push_back(t - d);
    }
    if (t < b) {
        for (double d = 0.5 * (b - t); d > min_width; d *= 0.5) br.push_back(t + d);
    }
    br.push_back(t);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end(), [](double x, double y) { return std::abs(x - y) <= 1e-300 + 1e-15 * std::abs(x); }),
             br.end());
    return br;
}

// ---------------------------------------------------------------------------
// Circle quadrature

struct Panel {
    double begin;
    double end;
};

/// Composite Gauss-Legendre rule on [0, 2pi). Panels partition the circle
/// (the first panel may start at a negative angle; nodes are wrapped).
class CircleQuadrature {
public:
    CircleQuadrature() = default;

    /// `panels` equal panels of `order` nodes each.
    static CircleQuadrature uniform(std::size_t panels, std::size_t order = 16, double target_tol = 1e-10) {
        std::vector<double> br(panels + 1);
        for (std::size_t k = 0; k <= panels; ++k) br[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(panels);
        return from_breaks(br, order, target_tol);
    }

    /// Panels refined dyadically toward each peak angle (down to width
    /// `min_width`) and split at every extra breakpoint (e.g. density jumps).
    static CircleQuadrature refined(std::span<const double> peaks, double min_width, std::size_t order = 16,
                                    std::span<const double> breakpoints = {}, std::size_t base_panels = 8,
                                    double target_tol = 1e-10) {
        std::vector<double> br;
        for (std::size_t k = 0; k < base_panels; ++k) br.push_back(kTwoPi * static_cast<double>(k) / static_cast<double>(base_panels));
        for (double b : breakpoints) br.push_back(wrap_angle(b));
        for (double peak : peaks) {
            const double c = wrap_angle(peak);
            br.push_back(c);
            br.push_back(wrap_angle(c + kPi));
            for (double d = 0.5 * kPi; d > min_width; d *= 0.5) {
                br.push_back(wrap_angle(c + d));
                br.push_back(wrap_angle(c - d));
            }
        }
        std::sort(br.begin(), br.end());
        br.erase(std::unique(br.begin(), br.end(), [](double x, double y) { return std::abs(x - y) < 1e-15; }), br.end());
        br.push_back(br.front() + kTwoPi);
        return from_breaks(br, order, target_tol);
    }

    /// Breakpoints spanning exactly one turn (last = first + 2pi).
    static CircleQuadrature from_breaks(std::span<const double> breaks, std::size_t order, double target_tol = 1e-10) {
        if (breaks.size() < 2 || std::abs(breaks.back() - breaks.front() - kTwoPi) > 1e-12) {
            throw DomainError("CircleQuadrature: breakpoints must span one full turn");
        }
        CircleQuadrature q;
        q.target_tol_ = target_tol;
        const LineQuadrature line = composite_gauss(breaks, order);
        q.angles_.reserve(line.nodes.size());
        for (double x : line.nodes) q.angles_.push_back(wrap_angle(x));
        q.weights_ = line.weights;
        for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
            if (breaks[k + 1] > breaks[k]) q.panels_.push_back({breaks[k], breaks[k + 1]});
        }
        return q;
    }

    std::span<const double> angles() const { return angles_; }
    std::span<const double> weights() const { return weights_; }
    std::span<const Panel> panels() const { return panels_; }
    std::size_t size() const { return angles_.size(); }
    double target_tol() const { return target_tol_; }

private:
    std::vector<double> angles_;
    std::vector<double> weights_;
    std::vector<Panel> panels_;
    double target_tol_ = 1e-10;
};

/// Sum of w_i f(theta_i). Throws EvaluationError on a non-finite value.
template <class F>
double integrate_circle(F&& f, const CircleQuadrature& quad) {
    double s = 0.0;
    const auto angles = quad.angles();
    const auto weights = quad.weights();
    for (std::size_t i = 0; i < angles.size(); ++i) {
        const double v = f(angles[i]);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "integrate_circle: non-finite integrand at node " << i << " (theta = " << angles[i] << ")";
            throw EvaluationError(os.str());
        }
        s += weights[i] * v;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Disk grids

struct GridPoint {
    std::size_t ring;
    double radius;
    double angle;
    Complex z() const { return std::polar(radius, angle); }
};

/// Polar evaluation grid: increasing radii in (0, 1), uniform angles per ring.
class DiskGrid {
public:
    DiskGrid(std::vector<double> radii, std::vector<std::size_t> angles_per_ring, double angle_offset = 0.0)
        : radii_(std::move(radii)), angles_(std::move(angles_per_ring)), offset_(angle_offset) {
        if (radii_.empty() || radii_.size() != angles_.size()) throw DomainError("DiskGrid: one angle count per ring required");
        for (std::size_t j = 0; j < radii_.size(); ++j) {
            if (!(radii_[j] > 0.0 && radii_[j] < 1.0)) throw DomainError("DiskGrid: radii must lie in (0, 1)");
            if (j > 0 && !(radii_[j] > radii_[j - 1])) throw DomainError("DiskGrid: radii must increase");
            if (angles_[j] == 0) throw DomainError("DiskGrid: angle counts must be positive");
        }
    }

    /// Rings r_j = 1 - 2^-j for j = 1..levels (1 - r halves every level).
    static DiskGrid dyadic(int levels, std::size_t angles, double angle_offset = 0.0) {
        if (levels < 1) throw DomainError("DiskGrid::dyadic: levels must be >= 1");
        std::vector<double> radii;
        for (int j = 1; j <= levels; ++j) {
            const double gap = std::ldexp(1.0, -j);
            if (gap < kBoundaryCap) break;
            radii.push_back(1.0 - gap);
        }
        const std::size_t rings = radii.size();
        return DiskGrid(std::move(radii), std::vector<std::size_t>(rings, angles), angle_offset);
    }

    /// `rings` rings with geometric spacing of 1 - r from 2^{-20/rings} down to `cap`.
    static DiskGrid geometric(std::size_t rings, std::size_t angles, double cap = kBoundaryCap, double angle_offset = 0.0) {
        if (rings == 0) throw DomainError("DiskGrid::geometric: rings must be positive");
        std::vector<double> radii(rings);
        const double log_cap = std::log2(cap);
        for (std::size_t j = 0; j < rings; ++j) {
            radii[j] = 1.0 - std::exp2(log_cap * static_cast<double>(j + 1) / static_cast<double>(rings));
        }
        return DiskGrid(std::move(radii), std::vector<std::size_t>(rings, angles), angle_offset);
    }

    std::span<const double> radii() const { return radii_; }
    std::span<const std::size_t> angles_per_ring() const { return angles_; }

    std::vector<GridPoint> points() const {
        std::vector<GridPoint> pts;
        for (std::size_t j = 0; j < radii_.size(); ++j) {
            for (std::size_t k = 0; k < angles_[j]; ++k) {
                pts.push_back({j, radii_[j], wrap_angle(offset_ + kTwoPi * static_cast<double>(k) / static_cast<double>(angles_[j]))});
            }
        }
        return pts;
    }

private:
    std::vector<double> radii_;
    std::vector<std::size_t> angles_;
    double offset_ = 0.0;
};

// ---------------------------------------------------------------------------
// Parallel sweeps

/// Calls fn(i) for i in [0, count). Result order is independent of `threads`.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& fn) {
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(count));
        for (unsigned t = 0; t < n; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = count;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// Dense complex linear algebra

using CVector = std::vector<Complex>;

inline double norm2(std::span<const Complex> v) {
    double s = 0.0;
    for (const Complex& x : v) s += std::norm(x);
    return std::sqrt(s);
}

/// sum_i a_i conj(b_i)
inline Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
    Complex s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
    return s;
}

/// Row-major dense complex matrix.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::span<const Complex> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    CVector apply(std::span<const Complex> x) const {
        CVector y(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            Complex s{};
            for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    double frobenius() const {
        double s = 0.0;
        for (const Complex& x : data_) s += std::norm(x);
        return std::sqrt(s);
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

/// Hermitian matrix; only the upper triangle is supplied, the lower one is
/// its exact conjugate and the diagonal is real.
class HermitianMatrix {
public:
    explicit HermitianMatrix(std::size_t n) : m_(n, n) {
        if (n == 0) throw DomainError("HermitianMatrix: dimension must be >= 1");
    }

    std::size_t size() const { return m_.rows(); }

    void set(std::size_t i, std::size_t j, Complex v) {
        if (i == j) {
            m_(i, i) = Complex(v.real(), 0.0);
        } else {
            m_(i, j) = v;
            m_(j, i) = std::conj(v);
        }
    }

    Complex operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    const CMatrix& dense() const { return m_; }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < size(); ++i) t += m_(i, i).real();
        return t;
    }

private:
    CMatrix m_;
};

/// Gram matrix G(i, j) = <v_j, v_i> of coordinate vectors in an orthonormal basis.
inline HermitianMatrix gram_matrix(std::span<const CVector> vectors) {
    HermitianMatrix g(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = i; j < vectors.size(); ++j) g.set(i, j, inner(vectors[j], vectors[i]));
    }
    return g;
}

struct EigenDecomposition {
    std::vector<double> values;     // ascending
    std::vector<CVector> vectors;   // vectors[k] pairs with values[k]
};

/// Cyclic Jacobi eigensolver for Hermitian matrices.
inline EigenDecomposition eigen_hermitian(const HermitianMatrix& m, double tol = 1e-14, int max_sweeps = 100) {
    const std::size_t n = m.size();
    CMatrix a = m.dense();
    CMatrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
    const double scale = std::max(a.frobenius(), 1e-300);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        }
        if (std::sqrt(2.0 * off) <= tol * scale) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag <= 1e-300 || mag <= 1e-18 * scale) continue;
                const Complex e = a(p, q) / mag;
                const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // G = [[c, s e], [-s conj(e), c]] on (p, q); A <- G^H A G.
                const Complex gpq = s * e;
                const Complex gqp = -s * std::conj(e);
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = akp * c + akq * gqp;
                    a(k, q) = akp * gpq + akq * c;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = c * apk + std::conj(gqp) * aqk;
                    a(q, k) = std::conj(gpq) * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = vkp * c + vkq * gqp;
                    v(k, q) = vkp * gpq + vkq * c;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
    EigenDecomposition out;
    for (std::size_t k : order) {
        out.values.push_back(a(k, k).real());
        CVector col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = v(i, k);
        out.vectors.push_back(std::move(col));
    }
    return out;
}

/// Unit vector annihilated by every row (row . x = 0), for n-1 independent rows of length n.
inline CVector null_vector(std::span<const CVector> rows, double rank_tol = 1e-12) {
    if (rows.empty()) throw DomainError("null_vector: at least one row required");
    const std::size_t n = rows.front().size();
    if (rows.size() + 1 != n) throw DomainError("null_vector: expected n-1 rows of length n");
    // row . x = <x, conj(row)>, so the null space is the orthogonal complement of conj(rows).
    std::vector<CVector> basis;
    for (const CVector& r : rows) {
        if (r.size() != n) throw DomainError("null_vector: ragged rows");
        CVector u(n);
        for (std::size_t j = 0; j < n; ++j) u[j] = std::conj(r[j]);
        const double original = norm2(u);
        if (original == 0.0) throw DegenerateSystemError("null_vector: zero row");
        for (int pass = 0; pass < 2; ++pass) {
            for (const CVector& b : basis) {
                const Complex c = inner(u, b);
                for (std::size_t j = 0; j < n; ++j) u[j] -= c * b[j];
            }
        }
        const double len = norm2(u);
        if (len <= rank_tol * original) throw DegenerateSystemError("null_vector: rows are linearly dependent");
        for (Complex& x : u) x /= len;
        basis.push_back(std::move(u));
    }
    CVector best;
    double best_len = -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        CVector x(n);
        x[k] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (const CVector& b : basis) {
                const Complex c = inner(x, b);
                for (std::size_t j = 0; j < n; ++j) x[j] -= c * b[j];
            }
        }
        const double len = norm2(x);
        if (len > best_len) {
            best_len = len;
            best = std::move(x);
        }
    }
    for (Complex& x : best) x /= best_len;
    return best;
}

/// Solves A x = b by LU with partial pivoting.
inline CVector lu_solve(CMatrix a, CVector b, double pivot_tol = 1e-14) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw DomainError("lu_solve: dimension mismatch");
    const double scale = std::max(a.frobenius(), 1e-300);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        }
        if (std::abs(a(piv, k)) <= pivot_tol * scale) throw DegenerateSystemError("lu_solve: singular matrix");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const Complex f = a(i, k) / a(k, k);
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    CVector x(n);
    for (std::size_t i = n; i-- > 0;) {
        Complex s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

// ---------------------------------------------------------------------------
// Polynomials in the monomial basis

/// Horner evaluation of sum_k c_k z^k.
inline Complex polyval(std::span<const Complex> coeffs, Complex z) {
    Complex s{};
    for (std::size_t k = coeffs.size(); k-- > 0;) s = s * z + coeffs[k];
    return s;
}

/// Coefficients (ascending) of prod (z - root).
inline CVector poly_from_roots(std::span<const Complex> roots) {
    CVector c{1.0};
    for (const Complex& r : roots) {
        CVector next(c.size() + 1);
        for (std::size_t k = 0; k < c.size(); ++k) {
            next[k + 1] += c[k];
            next[k] -= r * c[k];
        }
        c = std::move(next);
    }
    return c;
}

inline CVector poly_mul(std::span<const Complex> a, std::span<const Complex> b) {
    CVector c(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

}  // namespace rktlab

#endif  // RKTLAB_NUMERICS_HPP
