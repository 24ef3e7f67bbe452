#ifndef RKTLAB_MODEL_SPACE_HPP
#define RKTLAB_MODEL_SPACE_HPP

// Model spaces K_Theta = H^2 (-) Theta H^2 for finite Blaschke products Theta.
//
// Elements are stored as coordinates in the Takenaka-Malmquist orthonormal
// basis built from the zeros of Theta. Boundary points are never in the
// spectrum of a finite Blaschke product, so every Clark level set is finite
// and the normalized boundary kernels form an orthonormal basis.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rktlab/measures.hpp"
#include "rktlab/numerics.hpp"

namespace rktlab::model_space {

/// Theta(z) = c prod_j (z - a_j)/(1 - conj(a_j) z), |c| = 1, |a_j| < 1.
class BlaschkeProduct {
public:
    explicit BlaschkeProduct(std::vector<Complex> zeros, Complex front = 1.0) : zeros_(std::move(zeros)), front_(front) {
        if (zeros_.empty()) throw DomainError("BlaschkeProduct: at least one zero required");
        for (const Complex& a : zeros_) {
            require_finite(a, "BlaschkeProduct zero");
            if (!(std::abs(a) < 1.0)) throw DomainError("BlaschkeProduct: zeros must lie in the open disk");
        }
        if (std::abs(std::abs(front_) - 1.0) > 1e-12) throw DomainError("BlaschkeProduct: front constant must be unimodular");
    }

    /// z^n
    static BlaschkeProduct monomial(std::size_t n) { return BlaschkeProduct(std::vector<Complex>(n, Complex{})); }

    std::size_t degree() const { return zeros_.size(); }
    std::span<const Complex> zeros() const { return zeros_; }
    Complex front() const { return front_; }

    static Complex factor(Complex a, Complex z) { return (z - a) / (1.0 - std::conj(a) * z); }

    Complex operator()(Complex z) const {
        Complex v = front_;
        for (const Complex& a : zeros_) v *= factor(a, z);
        return v;
    }

    /// ||k_z||^2 = (1 - |Theta(z)|^2)/(1 - |z|^2), evaluated without cancellation;
    /// on the circle it equals |Theta'(z)|.
    double kernel_diag(Complex z) const {
        double s = 0.0;
        double prefix = 1.0;
        for (const Complex& a : zeros_) {
            const double d = std::norm(1.0 - std::conj(a) * z);
            s += prefix * (1.0 - std::norm(a)) / d;
            prefix *= std::norm(factor(a, z));
        }
        return s;
    }

    /// (Theta(w) - Theta(z))/(w - z), equal to Theta'(z) when w = z.
    Complex divided_difference(Complex w, Complex z) const {
        const std::size_t n = zeros_.size();
        // suffix[j] = prod_{i >= j} b_i(z)
        std::vector<Complex> suffix(n + 1, 1.0);
        for (std::size_t j = n; j-- > 0;) suffix[j] = suffix[j + 1] * factor(zeros_[j], z);
        Complex s{};
        Complex prefix = 1.0;   // prod_{i < j} b_i(w)
        for (std::size_t j = 0; j < n; ++j) {
            const Complex a = zeros_[j];
            const Complex dd = (1.0 - std::norm(a)) / ((1.0 - std::conj(a) * w) * (1.0 - std::conj(a) * z));
            s += prefix * dd * suffix[j + 1];
            prefix *= factor(a, w);
        }
        return front_ * s;
    }

    Complex derivative(Complex z) const { return divided_difference(z, z); }

    /// |Theta'(e^{it})| = sum_j (1 - |a_j|^2)/|e^{it} - a_j|^2
    double boundary_derivative_abs(double t) const {
        const Complex z = unit(t);
        double s = 0.0;
        for (const Complex& a : zeros_) s += (1.0 - std::norm(a)) / std::norm(z - a);
        return s;
    }

    /// Continuous lift of arg Theta(e^{it}); increases by 2 pi degree() over [0, 2pi].
    double boundary_phase(double t) const {
        double phase = std::arg(front_);
        for (const Complex& a : zeros_) {
            const Complex w = 1.0 - a * unit(-t);
            phase += t + 2.0 * std::atan2(w.imag(), w.real());
        }
        return phase;
    }

private:
    std::vector<Complex> zeros_;
    Complex front_;
};

/// K_Theta with its Takenaka-Malmquist basis
/// e_k(z) = sqrt(1 - |a_k|^2)/(1 - conj(a_k) z) prod_{j<k} b_{a_j}(z).
class ModelSpace {
public:
    explicit ModelSpace(BlaschkeProduct theta) : theta_(std::move(theta)) { build_numerators(); }

    const BlaschkeProduct& theta() const { return theta_; }
    std::size_t dim() const { return theta_.degree(); }

    CVector basis_values(Complex z) const {
        const auto zs = theta_.zeros();
        CVector e(zs.size());
        Complex prefix = 1.0;
        for (std::size_t k = 0; k < zs.size(); ++k) {
            e[k] = prefix * std::sqrt(1.0 - std::norm(zs[k])) / (1.0 - std::conj(zs[k]) * z);
            prefix *= BlaschkeProduct::factor(zs[k], z);
        }
        return e;
    }

    Complex eval(std::span<const Complex> coords, Complex z) const {
        const CVector e = basis_values(z);
        Complex s{};
        for (std::size_t k = 0; k < e.size(); ++k) s += coords[k] * e[k];
        return s;
    }

    /// Coordinates of k_lambda: conj(e_k(lambda)).
    CVector kernel_coords(Complex lambda) const {
        CVector c = basis_values(lambda);
        for (Complex& x : c) x = std::conj(x);
        return c;
    }

    /// Coordinates of K_lambda = k_lambda / ||k_lambda||.
    CVector normalized_kernel_coords(Complex lambda) const {
        CVector c = kernel_coords(lambda);
        const double n = std::sqrt(theta_.kernel_diag(lambda));
        for (Complex& x : c) x /= n;
        return c;
    }

    /// Coordinates of S* f = (f - f(0))/z.
    CVector backward_shift(std::span<const Complex> coords) const {
        const std::size_t n = dim();
        // Rational form f = p/q with q(z) = prod (1 - conj(a_j) z), deg p < n.
        const CVector p = numerator_matrix_.apply(coords);
        const Complex p0 = p[0];
        CVector shifted(n);
        for (std::size_t k = 0; k < n; ++k) {
            const Complex pk1 = (k + 1 < n) ? p[k + 1] : Complex{};
            shifted[k] = pk1 - p0 * denominator_[k + 1];
        }
        return lu_solve(numerator_matrix_, shifted);
    }

private:
    void build_numerators() {
        const auto zs = theta_.zeros();
        const std::size_t n = zs.size();
        numerator_matrix_ = CMatrix(n, n);
        CVector q{1.0};
        for (const Complex& a : zs) {
            const CVector lin{1.0, -std::conj(a)};
            q = poly_mul(q, lin);
        }
        denominator_ = q;
        for (std::size_t k = 0; k < n; ++k) {
            CVector num{std::sqrt(1.0 - std::norm(zs[k]))};
            for (std::size_t j = 0; j < n; ++j) {
                if (j == k) continue;
                const CVector lin = j < k ? CVector{-zs[j], 1.0} : CVector{1.0, -std::conj(zs[j])};
                num = poly_mul(num, lin);
            }
            for (std::size_t i = 0; i < n; ++i) numerator_matrix_(i, k) = num[i];
        }
    }

    BlaschkeProduct theta_;
    CMatrix numerator_matrix_;   // column k: numerator coefficients of e_k
    CVector denominator_;
};

/// Reproducing kernel k^Theta_lambda of K_Theta at lambda in the closed disk.
class ModelKernel {
public:
    ModelKernel(const BlaschkeProduct& theta, Complex lambda) : theta_(&theta), lambda_(require_finite(lambda, "model_kernel")) {
        const double r = std::abs(lambda);
        if (r > 1.0 + 1e-12) throw DomainError("model_kernel: lambda must lie in the closed disk");
        boundary_ = r >= 1.0 - 1e-14;
        theta_lambda_ = theta(lambda);
        norm_sq_ = theta.kernel_diag(lambda);
    }

    bool on_boundary() const { return boundary_; }
    double norm_sq() const { return norm_sq_; }

    Complex operator()(Complex z) const {
        if (boundary_) return lambda_ * std::conj(theta_lambda_) * theta_->divided_difference(lambda_, z);
        if (z == lambda_) return norm_sq_;
        return (1.0 - std::conj(theta_lambda_) * (*theta_)(z)) / (1.0 - std::conj(lambda_) * z);
    }

private:
    const BlaschkeProduct* theta_;
    Complex lambda_;
    Complex theta_lambda_;
    double norm_sq_ = 0.0;
    bool boundary_ = false;
};

inline ModelKernel model_kernel(const BlaschkeProduct& theta, Complex lambda) { return ModelKernel(theta, lambda); }

// ---------------------------------------------------------------------------
// Clark systems

struct ClarkSystem {
    Complex alpha;
    std::vector<double> angles;    // ascending in [0, 2pi)
    std::vector<Complex> points;   // Theta(points[n]) = alpha
    std::vector<double> weights;   // |Theta'(points[n])| = ||k_points[n]||^2
};

/// Level set {zeta on the circle : Theta(zeta) = alpha} by bisection on the boundary phase.
inline ClarkSystem clark_points(const BlaschkeProduct& theta, Complex alpha) {
    require_finite(alpha, "clark_points");
    if (std::abs(std::abs(alpha) - 1.0) > 1e-12) throw DomainError("clark_points: |alpha| must be 1");
    const std::size_t n = theta.degree();
    const double phase0 = theta.boundary_phase(0.0);
    const double arg_alpha = std::arg(alpha);
    double first = arg_alpha + kTwoPi * std::ceil((phase0 - arg_alpha) / kTwoPi);
    if (first - phase0 >= kTwoPi) first -= kTwoPi;
    ClarkSystem out;
    out.alpha = alpha;
    for (std::size_t k = 0; k < n; ++k) {
        const double target = first + kTwoPi * static_cast<double>(k);
        double lo = 0.0;
        double hi = kTwoPi;
        if (theta.boundary_phase(lo) > target || theta.boundary_phase(hi) < target) {
            std::ostringstream os;
            os << "clark_points: bisection bracket failure for target phase " << target << " on [0, 2pi]";
            throw NumericalError(os.str());
        }
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (theta.boundary_phase(mid) < target) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        const double t_lo = lo;
        const double t_hi = hi;
        const double t = std::abs(theta.boundary_phase(t_lo) - target) <= std::abs(theta.boundary_phase(t_hi) - target) ? t_lo : t_hi;
        const double angle = wrap_angle(t);
        const Complex zeta = unit(angle);
        if (std::abs(theta(zeta) - alpha) > 1e-12 * std::max(1.0, theta.boundary_derivative_abs(angle))) {
            std::ostringstream os;
            os << "clark_points: level-set residual " << std::abs(theta(zeta) - alpha) << " at angle " << angle;
            throw NumericalError(os.str());
        }
        out.angles.push_back(angle);
        out.points.push_back(zeta);
        out.weights.push_back(theta.boundary_derivative_abs(angle));
    }
    // Wrapping can move a root at 2pi - tiny to the front.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return out.angles[a] < out.angles[b]; });
    ClarkSystem sorted{alpha, {}, {}, {}};
    for (std::size_t i : order) {
        sorted.angles.push_back(out.angles[i]);
        sorted.points.push_back(out.points[i]);
        sorted.weights.push_back(out.weights[i]);
    }
    return sorted;
}

/// Gram matrix of normalized kernels at the given points.
inline HermitianMatrix kernel_gram(const ModelSpace& space, std::span<const Complex> points) {
    std::vector<CVector> coords;
    coords.reserve(points.size());
    for (const Complex& z : points) coords.push_back(space.normalized_kernel_coords(z));
    return gram_matrix(coords);
}

/// <K_x, K_y> for points in the closed disk.
inline Complex kernel_inner(const ModelSpace& space, Complex x, Complex y) {
    return inner(space.normalized_kernel_coords(x), space.normalized_kernel_coords(y));
}

// ---------------------------------------------------------------------------
// Perturbed system and its measure

struct PerturbedSystem {
    ClarkSystem base;
    double epsilon = 0.0;
    std::vector<Complex> xi;        // xi[0] = zeta_0 (deleted from mu), xi[1] perturbed, xi[n] = zeta_n otherwise
    std::vector<double> xi_weights; // |Theta'(xi_n)|
    double margin = 0.0;            // min_n |<K_{xi_1}, K_{zeta_n}>|

    std::size_t size() const { return xi.size(); }

    /// mu = sum_{n >= 1} |Theta'(xi_n)|^{-1} delta_{xi_n}, as boundary atoms.
    measures::Measure to_measure() const {
        std::vector<measures::Atom> atoms;
        for (std::size_t n = 1; n < xi.size(); ++n) atoms.push_back({xi[n], 1.0 / xi_weights[n]});
        return measures::Measure::atoms(std::move(atoms));
    }
};

/// Cyclic angular gap from zeta_1 to its neighbours, (to zeta_0 going down, to zeta_2 going up).
inline std::pair<double, double> phase_cell(const ClarkSystem& clark) {
    const std::size_t n = clark.points.size();
    if (n < 2) throw DomainError("phase_cell: need at least two Clark points");
    const double below = clark.angles[1] - clark.angles[0];
    const double above = (n > 2 ? clark.angles[2] : clark.angles[0] + kTwoPi) - clark.angles[1];
    return {below, above};
}

/// 5% of the smaller gap between zeta_1 and its neighbours.
inline double default_epsilon(const ClarkSystem& clark) {
    const auto [below, above] = phase_cell(clark);
    return 0.05 * std::min(below, above);
}

inline PerturbedSystem build_theorem2_measure(const ModelSpace& space, Complex alpha, double epsilon) {
    if (space.dim() < 2) throw DomainError("build_theorem2_measure: dimension must be >= 2");
    if (!std::isfinite(epsilon) || epsilon == 0.0) throw DomainError("build_theorem2_measure: epsilon must be nonzero (xi_1 != zeta_1)");
    PerturbedSystem sys;
    sys.base = clark_points(space.theta(), alpha);
    const auto [below, above] = phase_cell(sys.base);
    if (epsilon >= above || -epsilon >= below) {
        throw DomainError("build_theorem2_measure: epsilon moves xi_1 onto or past a neighbouring Clark point");
    }
    sys.epsilon = epsilon;
    sys.xi = sys.base.points;
    sys.xi_weights = sys.base.weights;
    const double angle = sys.base.angles[1] + epsilon;
    sys.xi[1] = unit(angle);
    sys.xi_weights[1] = space.theta().boundary_derivative_abs(angle);
    sys.margin = std::numeric_limits<double>::infinity();
    for (const Complex& zeta : sys.base.points) sys.margin = std::min(sys.margin, std::abs(kernel_inner(space, sys.xi[1], zeta)));
    return sys;
}

struct WitnessFunction {
    CVector coords;             // unit norm in K_Theta
    Complex value_at_xi0;
    double mu_norm_sq = 0.0;    // int |f|^2 dmu
};

/// Unit-norm f in K_Theta vanishing at xi_n for every n >= 1.
inline WitnessFunction witness_function(const ModelSpace& space, const PerturbedSystem& sys) {
    if (sys.size() < 2) throw DomainError("witness_function: need N >= 2");
    std::vector<CVector> rows;
    for (std::size_t n = 1; n < sys.size(); ++n) rows.push_back(space.basis_values(sys.xi[n]));
    WitnessFunction w;
    w.coords = null_vector(rows);
    w.value_at_xi0 = space.eval(w.coords, sys.xi[0]);
    for (std::size_t n = 1; n < sys.size(); ++n) w.mu_norm_sq += std::norm(space.eval(w.coords, sys.xi[n])) / sys.xi_weights[n];
    if (std::abs(w.value_at_xi0) <= 1e-10) throw DegenerateSystemError("witness_function: witness also vanishes at xi_0");
    return w;
}

// ---------------------------------------------------------------------------
// phi, psi and the kernel scans

/// phi(z) = |<K_{zeta_0}, K_z>|^2 in closed form.
inline double phi(const ModelSpace& space, const PerturbedSystem& sys, Complex z) {
    if (!(std::abs(z) < 1.0)) throw DomainError("phi: z must lie in the open disk");
    const auto& theta = space.theta();
    const Complex z0 = sys.xi[0];
    return std::norm(theta.divided_difference(z0, z)) / sys.xi_weights[0] / theta.kernel_diag(z);
}

/// phi(z) through basis coordinates (independent route).
inline double phi_via_basis(const ModelSpace& space, const PerturbedSystem& sys, Complex z) {
    return std::norm(kernel_inner(space, sys.xi[0], z));
}

/// |<K_z, K_w>|^2 for boundary w, in closed form.
inline double boundary_overlap(const BlaschkeProduct& theta, Complex w, double w_weight, Complex z) {
    return std::norm(theta.divided_difference(w, z)) / w_weight / theta.kernel_diag(z);
}

/// ||K_z||^2_{L^2(mu)} = sum_{n>=1} mass_n |K_z(xi_n)|^2
inline double mu_norm_sq(const ModelSpace& space, const PerturbedSystem& sys, Complex z) {
    double s = 0.0;
    for (std::size_t n = 1; n < sys.size(); ++n) s += boundary_overlap(space.theta(), sys.xi[n], sys.xi_weights[n], z);
    return s;
}

struct GridSup {
    double value = -std::numeric_limits<double>::infinity();
    Complex witness{};
};

/// sup of phi over grid points outside U_delta = {|z - zeta_0| < delta}.
inline GridSup psi(const ModelSpace& space, const PerturbedSystem& sys, double delta, const DiskGrid& grid) {
    if (!(delta > 0.0)) throw DomainError("psi: delta must be positive");
    GridSup out;
    for (const GridPoint& g : grid.points()) {
        const Complex z = g.z();
        if (std::abs(z - sys.xi[0]) < delta) continue;
        const double v = phi(space, sys, z);
        if (v > out.value) {
            out.value = v;
            out.witness = z;
        }
    }
    return out;
}

struct RieszBounds {
    double lower = 1.0;
    double upper = 1.0;
    double eta = 0.0;
};

inline RieszBounds riesz_bounds(const ModelSpace& space, std::span<const Complex> points) {
    const auto eig = eigen_hermitian(kernel_gram(space, points));
    RieszBounds b{eig.values.front(), eig.values.back(), 0.0};
    b.eta = std::max(1.0 - b.lower, b.upper - 1.0);
    return b;
}

/// Frame bounds of {K_{zeta_0}} u {K_{xi_n}}_{n>=1}.
inline RieszBounds riesz_bounds(const ModelSpace& space, const PerturbedSystem& sys) { return riesz_bounds(space, sys.xi); }

struct ModelScanNode {
    Complex z;
    double phi = 0.0;
    double mu_norm_sq = 0.0;   // measure route
    double full_sum = 0.0;     // sum over {zeta_0} u {xi_n}, basis route
};

struct ModelScan {
    double delta = std::numeric_limits<double>::infinity();
    Complex witness{};
    double decomposition_error = 0.0;   // max |mu_norm_sq - (full_sum - phi)|
    std::vector<ModelScanNode> nodes;
};

/// min over the grid of ||K_z||^2_{L^2(mu)}, with the pointwise decomposition
/// ||K_z||^2_{L^2(mu)} = sum_{n>=0} |<K_z, K_{xi_n}>|^2 - phi(z).
inline ModelScan rkt_model_scan(const ModelSpace& space, const PerturbedSystem& sys, const DiskGrid& grid, unsigned threads = 1) {
    const auto pts = grid.points();
    ModelScan out;
    out.nodes.resize(pts.size());
    std::vector<CVector> system_coords;
    for (const Complex& x : sys.xi) system_coords.push_back(space.normalized_kernel_coords(x));
    parallel_for(pts.size(), threads, [&](std::size_t i) {
        const Complex z = pts[i].z();
        ModelScanNode node;
        node.z = z;
        node.phi = phi(space, sys, z);
        node.mu_norm_sq = mu_norm_sq(space, sys, z);
        const CVector kz = space.normalized_kernel_coords(z);
        for (const CVector& c : system_coords) node.full_sum += std::norm(inner(kz, c));
        out.nodes[i] = node;
    });
    for (const ModelScanNode& node : out.nodes) {
        out.decomposition_error = std::max(out.decomposition_error, std::abs(node.mu_norm_sq - (node.full_sum - node.phi)));
        if (node.mu_norm_sq < out.delta) {
            out.delta = node.mu_norm_sq;
            out.witness = node.z;
        }
    }
    return out;
}

struct TwoTermBound {
    double value = std::numeric_limits<double>::infinity();
    Complex witness{};
    std::size_t points = 0;
};

/// min over grid points in the closure of U_delta of phi_1 + phi_2, where
/// phi_1 = |<K_z, K_{xi_1}>|^2 and phi_2 = |<K_z, K_{zeta_2}>|^2 (omitted when N = 2).
inline TwoTermBound two_term_bound(const ModelSpace& space, const PerturbedSystem& sys, double delta, const DiskGrid& grid) {
    TwoTermBound out;
    const auto& theta = space.theta();
    for (const GridPoint& g : grid.points()) {
        const Complex z = g.z();
        if (std::abs(z - sys.xi[0]) > delta) continue;
        double v = boundary_overlap(theta, sys.xi[1], sys.xi_weights[1], z);
        if (sys.size() > 2) v += boundary_overlap(theta, sys.xi[2], sys.xi_weights[2], z);
        ++out.points;
        if (v < out.value) {
            out.value = v;
            out.witness = z;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Backward shift and separating pairs

/// Largest deviation between S* f evaluated pointwise, (f(z) - f(0))/z, and the
/// returned coordinates, over `samples` points on the circle.
inline double backward_shift_residual(const ModelSpace& space, std::span<const Complex> f, std::span<const Complex> shifted,
                                      std::size_t samples = 64) {
    const Complex f0 = space.eval(f, 0.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const Complex z = unit(kTwoPi * (static_cast<double>(k) + 0.5) / static_cast<double>(samples));
        const Complex direct = (space.eval(f, z) - f0) / z;
        worst = std::max(worst, std::abs(direct - space.eval(shifted, z)));
    }
    return worst;
}

inline CVector backward_shift(const ModelSpace& space, std::span<const Complex> f) { return space.backward_shift(f); }

struct SeparatingPair {
    CVector f1;
    CVector f2;
    Complex determinant;      // f1(zeta) f2(zeta0) - f1(zeta0) f2(zeta)
    bool used_shift = false;  // the starting pair was dependent at (zeta, zeta0)
    std::size_t leading_zero_shifts = 0;
    bool degenerate = false;  // no independent pair found: forces zeta = zeta0
};

namespace detail {
inline Complex det2(const ModelSpace& space, std::span<const Complex> a, std::span<const Complex> b, Complex zeta, Complex zeta0) {
    return space.eval(a, zeta) * space.eval(b, zeta0) - space.eval(a, zeta0) * space.eval(b, zeta);
}
}  // namespace detail

/// Two elements whose value vectors at (zeta, zeta0) are linearly independent.
/// If the starting pair is dependent, the combination vanishing at both points
/// is stripped of leading zeros with S*, normalized to f(0) = 1, and the pair
/// (S* f, S*^2 f) is returned.
inline SeparatingPair separating_pair(const ModelSpace& space, Complex zeta, Complex zeta0, std::optional<CVector> h1 = std::nullopt,
                                      std::optional<CVector> h2 = std::nullopt, double tol = 1e-10) {
    const std::size_t n = space.dim();
    if (n < 2) throw DomainError("separating_pair: dimension must be >= 2");
    if (std::abs(zeta - zeta0) == 0.0) throw DomainError("separating_pair: points must differ");
    if (!h1) {
        h1 = CVector(n);
        (*h1)[0] = 1.0;
    }
    if (!h2) {
        h2 = CVector(n);
        (*h2)[1] = 1.0;
    }
    SeparatingPair out;
    const Complex v1a = space.eval(*h1, zeta);
    const Complex v1b = space.eval(*h1, zeta0);
    const Complex v2a = space.eval(*h2, zeta);
    const Complex v2b = space.eval(*h2, zeta0);
    // |h(w)| <= ||h|| ||k_w||, so values below tol of that bound count as zeros.
    const double kz = std::sqrt(std::max(space.theta().kernel_diag(zeta), space.theta().kernel_diag(zeta0)));
    const Complex det = v1a * v2b - v1b * v2a;
    if (std::abs(det) > tol * norm2(*h1) * norm2(*h2) * kz * kz) {
        out.f1 = *h1;
        out.f2 = *h2;
        out.determinant = det;
        return out;
    }
    out.used_shift = true;
    // Combination vanishing at zeta and zeta0.
    auto vanishes = [&](const CVector& h, Complex a, Complex b) { return std::hypot(std::abs(a), std::abs(b)) <= tol * norm2(h) * kz; };
    CVector f(n);
    if (vanishes(*h1, v1a, v1b)) {
        f = *h1;
    } else if (vanishes(*h2, v2a, v2b)) {
        f = *h2;
    } else {
        const Complex kappa = std::abs(v1a) >= std::abs(v1b) ? v2a / v1a : v2b / v1b;
        for (std::size_t k = 0; k < n; ++k) f[k] = (*h2)[k] - kappa * (*h1)[k];
    }
    if (norm2(f) == 0.0) throw DomainError("separating_pair: starting functions are linearly dependent");
    while (std::abs(space.eval(f, 0.0)) <= tol * norm2(f)) {
        if (out.leading_zero_shifts > n) throw NumericalError("separating_pair: backward shift did not clear the zero at the origin");
        f = space.backward_shift(f);
        ++out.leading_zero_shifts;
    }
    const Complex f0 = space.eval(f, 0.0);
    for (Complex& c : f) c /= f0;
    out.f1 = space.backward_shift(f);
    out.f2 = space.backward_shift(out.f1);
    out.determinant = detail::det2(space, out.f1, out.f2, zeta, zeta0);
    out.degenerate = !(std::abs(out.determinant) > tol);
    return out;
}

// ---------------------------------------------------------------------------
// One-component sanity

/// Number of 4-connected components of {|Theta| < level} on a square grid of
/// the disk with `resolution` cells per side.
inline std::size_t sublevel_components(const BlaschkeProduct& theta, double level, std::size_t resolution = 401) {
    std::vector<char> inside(resolution * resolution, 0);
    auto coord = [&](std::size_t i) { return -1.0 + 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(resolution); };
    for (std::size_t i = 0; i < resolution; ++i) {
        for (std::size_t j = 0; j < resolution; ++j) {
            const Complex z(coord(i), coord(j));
            if (std::abs(z) < 1.0 && std::abs(theta(z)) < level) inside[i * resolution + j] = 1;
        }
    }
    std::size_t components = 0;
    std::vector<char> seen(inside.size(), 0);
    for (std::size_t s = 0; s < inside.size(); ++s) {
        if (!inside[s] || seen[s]) continue;
        ++components;
        std::queue<std::size_t> q;
        q.push(s);
        seen[s] = 1;
        while (!q.empty()) {
            const std::size_t c = q.front();
            q.pop();
            const std::size_t i = c / resolution;
            const std::size_t j = c % resolution;
            const std::size_t nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
            for (const auto& [a, b] : nb) {
                if (a >= resolution || b >= resolution) continue;
                const std::size_t idx = a * resolution + b;
                if (inside[idx] && !seen[idx]) {
                    seen[idx] = 1;
                    q.push(idx);
                }
            }
        }
    }
    return components;
}

}  // namespace rktlab::model_space

#endif  // RKTLAB_MODEL_SPACE_HPP
