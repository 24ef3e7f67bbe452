#ifndef RKTLAB_MEASURES_HPP
#define RKTLAB_MEASURES_HPP

// Positive finite measures on the closed unit disk, Carleson windows and the
// window-based lower-bound scans.
//
// Conventions: arc lengths and boundary densities are in plain radians (the
// density is taken against d(theta)), area densities against dA = r dr dtheta.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rktlab/numerics.hpp"

namespace rktlab::measures {

/// Closed boundary arc, centered at `center` with length in (0, 2pi].
class Arc {
public:
    Arc(double center, double length) : center_(wrap_angle(center)), length_(length) {
        if (!std::isfinite(center) || !(length > 0.0) || length > kTwoPi + 1e-12) {
            throw DomainError("Arc: length must lie in (0, 2pi]");
        }
        length_ = std::min(length_, kTwoPi);
    }

    static Arc from_start(double start, double length) { return Arc(start + 0.5 * length, length); }

    double center() const { return center_; }
    double length() const { return length_; }
    double start() const { return wrap_angle(center_ - 0.5 * length_); }
    double end_angle() const { return wrap_angle(center_ + 0.5 * length_); }

    /// Offset of `theta` from the start of the arc, in [0, 2pi).
    double offset(double theta) const { return wrap_angle(theta - (center_ - 0.5 * length_)); }

    bool contains(double theta, double slack = 1e-13) const {
        if (length_ >= kTwoPi) return true;
        const double d = offset(theta);
        return d <= length_ + slack || d >= kTwoPi - slack;
    }

    /// Length of the intersection with the angle interval [a, b] (0 <= a <= b <= 2pi).
    double overlap(double a, double b) const {
        const double s = center_ - 0.5 * length_;
        const double s0 = s < 0.0 ? s + kTwoPi : s;
        // Work in offsets from the arc start so full coverage returns length_ exactly.
        auto seg = [&](double x, double y) { return std::max(0.0, std::min(length_, y - s0) - std::max(0.0, x - s0)); };
        return seg(a, b) + seg(a + kTwoPi, b + kTwoPi);
    }

    /// N equal consecutive sub-arcs.
    std::vector<Arc> split(std::size_t n) const {
        std::vector<Arc> parts;
        const double step = length_ / static_cast<double>(n);
        const double s = center_ - 0.5 * length_;
        for (std::size_t k = 0; k < n; ++k) parts.emplace_back(s + (static_cast<double>(k) + 0.5) * step, step);
        return parts;
    }

private:
    double center_;
    double length_;
};

/// S_{I,h} = {z : 1 - h <= |z| <= 1, z/|z| in I}. With h = |I| this is S_I.
class CarlesonWindow {
public:
    CarlesonWindow(Arc arc, double depth) : arc_(arc), depth_(depth) {
        if (!(depth > 0.0 && depth <= 1.0)) throw DomainError("CarlesonWindow: depth must lie in (0, 1]");
    }

    /// Standard window S_I; the depth is capped at 1 for arcs longer than one radian.
    static CarlesonWindow standard(const Arc& arc) { return CarlesonWindow(arc, std::min(arc.length(), 1.0)); }

    const Arc& arc() const { return arc_; }
    double depth() const { return depth_; }

    bool contains(Complex z, double slack = 1e-13) const {
        const double r = std::abs(z);
        if (r > 1.0 + slack || r < 1.0 - depth_ - slack) return false;
        if (r == 0.0) return arc_.contains(0.0, slack);
        return arc_.contains(std::arg(z), slack);
    }

private:
    Arc arc_;
    double depth_;
};

struct Atom {
    Complex point;
    double mass;
};

/// Piecewise-constant density in angle: values[k] on [breakpoints[k], breakpoints[k+1]).
/// Breakpoints run from 0 to 2pi.
class BoundaryDensity {
public:
    BoundaryDensity() = default;

    BoundaryDensity(std::vector<double> breakpoints, std::vector<double> values)
        : breaks_(std::move(breakpoints)), values_(std::move(values)) {
        if (breaks_.empty() && values_.empty()) return;
        if (breaks_.size() != values_.size() + 1 || breaks_.size() < 2) {
            throw DomainError("BoundaryDensity: need one more breakpoint than values");
        }
        if (std::abs(breaks_.front()) > 1e-12 || std::abs(breaks_.back() - kTwoPi) > 1e-9) {
            throw DomainError("BoundaryDensity: breakpoints must run from 0 to 2pi");
        }
        breaks_.front() = 0.0;
        breaks_.back() = kTwoPi;
        for (std::size_t k = 0; k + 1 < breaks_.size(); ++k) {
            if (!(breaks_[k + 1] > breaks_[k])) throw DomainError("BoundaryDensity: breakpoints must increase");
        }
        for (double v : values_) {
            if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("BoundaryDensity: values must be finite and >= 0");
        }
    }

    static BoundaryDensity constant(double value) { return {{0.0, kTwoPi}, {value}}; }

    /// Midpoint sampling of an arbitrary density onto `pieces` equal pieces.
    template <class F>
    static BoundaryDensity sampled(F&& density, std::size_t pieces) {
        std::vector<double> br(pieces + 1);
        std::vector<double> vals(pieces);
        for (std::size_t k = 0; k <= pieces; ++k) br[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(pieces);
        for (std::size_t k = 0; k < pieces; ++k) vals[k] = density(0.5 * (br[k] + br[k + 1]));
        return {std::move(br), std::move(vals)};
    }

    bool empty() const { return values_.empty(); }
    std::span<const double> breakpoints() const { return breaks_; }
    std::span<const double> values() const { return values_; }

    double at(double theta) const {
        if (empty()) return 0.0;
        const double t = wrap_angle(theta);
        const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - breaks_.begin()) - 1, values_.size() - 1);
        return values_[k];
    }

    double integral_over(const Arc& arc) const {
        double s = 0.0;
        for (std::size_t k = 0; k < values_.size(); ++k) s += values_[k] * arc.overlap(breaks_[k], breaks_[k + 1]);
        return s;
    }

    double total() const {
        double s = 0.0;
        for (std::size_t k = 0; k < values_.size(); ++k) s += values_[k] * (breaks_[k + 1] - breaks_[k]);
        return s;
    }

    double minimum() const { return empty() ? 0.0 : *std::min_element(values_.begin(), values_.end()); }

private:
    std::vector<double> breaks_;
    std::vector<double> values_;
};

/// Piecewise-constant density on a polar partition of the disk, against dA = r dr dtheta.
/// values[i][j] lives on [radial_breaks[i], radial_breaks[i+1]) x [angular_breaks[j], angular_breaks[j+1]).
class AreaDensity {
public:
    AreaDensity() = default;

    AreaDensity(std::vector<double> radial_breaks, std::vector<double> angular_breaks, std::vector<std::vector<double>> values)
        : radial_(std::move(radial_breaks)), angular_(std::move(angular_breaks)), values_(std::move(values)) {
        if (radial_.empty() && angular_.empty() && values_.empty()) return;
        if (radial_.size() < 2 || angular_.size() < 2 || values_.size() + 1 != radial_.size()) {
            throw DomainError("AreaDensity: need one value row per radial band");
        }
        if (std::abs(radial_.front()) > 1e-12 || std::abs(radial_.back() - 1.0) > 1e-12) {
            throw DomainError("AreaDensity: radial breaks must run from 0 to 1");
        }
        if (std::abs(angular_.front()) > 1e-12 || std::abs(angular_.back() - kTwoPi) > 1e-9) {
            throw DomainError("AreaDensity: angular breaks must run from 0 to 2pi");
        }
        radial_.back() = 1.0;
        angular_.back() = kTwoPi;
        for (std::size_t i = 0; i + 1 < radial_.size(); ++i) {
            if (!(radial_[i + 1] > radial_[i])) throw DomainError("AreaDensity: radial breaks must increase");
        }
        for (std::size_t j = 0; j + 1 < angular_.size(); ++j) {
            if (!(angular_[j + 1] > angular_[j])) throw DomainError("AreaDensity: angular breaks must increase");
        }
        for (const auto& row : values_) {
            if (row.size() + 1 != angular_.size()) throw DomainError("AreaDensity: one value per angular sector required");
            for (double v : row) {
                if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("AreaDensity: values must be finite and >= 0");
            }
        }
    }

    static AreaDensity constant(double value) { return {{0.0, 1.0}, {0.0, kTwoPi}, {{value}}}; }

    bool empty() const { return values_.empty(); }
    std::span<const double> radial_breaks() const { return radial_; }
    std::span<const double> angular_breaks() const { return angular_; }
    const std::vector<std::vector<double>>& values() const { return values_; }

    /// Mass of the annular sector {r_lo <= r <= 1, theta in arc}.
    double sector_mass(const Arc& arc, double r_lo) const {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < radial_.size(); ++i) {
            const double a = std::max(radial_[i], r_lo);
            const double b = radial_[i + 1];
            if (b <= a) continue;
            const double radial = 0.5 * (b * b - a * a);
            for (std::size_t j = 0; j + 1 < angular_.size(); ++j) {
                if (values_[i][j] == 0.0) continue;
                s += values_[i][j] * radial * arc.overlap(angular_[j], angular_[j + 1]);
            }
        }
        return s;
    }

    double total() const { return sector_mass(Arc(kPi, kTwoPi), 0.0); }

private:
    std::vector<double> radial_;
    std::vector<double> angular_;
    std::vector<std::vector<double>> values_;
};

/// mu in M_+(closed disk): atoms + boundary density + area density.
class Measure {
public:
    Measure() = default;

    Measure(std::vector<Atom> atoms, BoundaryDensity boundary, AreaDensity area)
        : atoms_(std::move(atoms)), boundary_(std::move(boundary)), area_(std::move(area)) {
        for (const Atom& a : atoms_) {
            require_finite(a.point, "Measure atom");
            if (std::abs(a.point) > 1.0 + 1e-12) throw DomainError("Measure: atom outside the closed disk");
            if (!(a.mass > 0.0) || !std::isfinite(a.mass)) throw DomainError("Measure: atom masses must be positive");
        }
    }

    /// Arclength d(theta) on the circle times `scale`.
    static Measure arclength(double scale = 1.0) { return {{}, BoundaryDensity::constant(scale), {}}; }

    /// d(theta)/2pi: the measure that reproduces the H^p norm.
    static Measure normalized_arclength(double scale = 1.0) { return arclength(scale / kTwoPi); }

    static Measure boundary(BoundaryDensity d) { return {{}, std::move(d), {}}; }

    static Measure atoms(std::vector<Atom> atoms) { return {std::move(atoms), {}, {}}; }

    const std::vector<Atom>& atom_list() const { return atoms_; }
    const BoundaryDensity& boundary_density() const { return boundary_; }
    const AreaDensity& area_density() const { return area_; }

    bool has_boundary_atoms(double slack = 1e-12) const {
        return std::any_of(atoms_.begin(), atoms_.end(), [&](const Atom& a) { return std::abs(a.point) >= 1.0 - slack; });
    }

    double total_mass() const {
        double s = boundary_.total() + area_.total();
        for (const Atom& a : atoms_) s += a.mass;
        return s;
    }

    Measure plus(const Measure& other) const {
        // Sum is only representable when densities share a partition or one side is empty.
        std::vector<Atom> atoms = atoms_;
        atoms.insert(atoms.end(), other.atoms_.begin(), other.atoms_.end());
        BoundaryDensity b = merge_boundary(boundary_, other.boundary_);
        if (!area_.empty() && !other.area_.empty()) throw DomainError("Measure::plus: cannot add two area densities");
        return {std::move(atoms), std::move(b), area_.empty() ? other.area_ : area_};
    }

private:
    static BoundaryDensity merge_boundary(const BoundaryDensity& a, const BoundaryDensity& b) {
        if (a.empty()) return b;
        if (b.empty()) return a;
        std::vector<double> br(a.breakpoints().begin(), a.breakpoints().end());
        br.insert(br.end(), b.breakpoints().begin(), b.breakpoints().end());
        std::sort(br.begin(), br.end());
        br.erase(std::unique(br.begin(), br.end(), [](double x, double y) { return std::abs(x - y) < 1e-14; }), br.end());
        std::vector<double> vals;
        for (std::size_t k = 0; k + 1 < br.size(); ++k) {
            const double mid = 0.5 * (br[k] + br[k + 1]);
            vals.push_back(a.at(mid) + b.at(mid));
        }
        return {std::move(br), std::move(vals)};
    }

    std::vector<Atom> atoms_;
    BoundaryDensity boundary_;
    AreaDensity area_;
};

// ---------------------------------------------------------------------------
// Operations

/// mu(S_{I,h}): atoms in the closed window + boundary density over I + area
/// density over the annular sector.
inline double window_mass(const Measure& mu, const CarlesonWindow& w) {
    double s = 0.0;
    for (const Atom& a : mu.atom_list()) {
        if (w.contains(a.point)) s += a.mass;
    }
    s += mu.boundary_density().integral_over(w.arc());
    s += mu.area_density().sector_mass(w.arc(), 1.0 - w.depth());
    return s;
}

struct WindowScanResult {
    double ratio = std::numeric_limits<double>::infinity();
    Arc witness{0.0, kTwoPi};
    std::vector<double> generation_minima;   // index g-1 holds the minimum over generation g
};

/// min over dyadic arcs (length 2pi 2^-g, g = 1..max_depth, every rotation plus
/// half-shifted copies) of mu(S_I)/|I|. Estimates the best lower window constant.
inline WindowScanResult window_infimum_scan(const Measure& mu, int max_depth) {
    if (max_depth < 1) throw DomainError("window_infimum_scan: max_depth must be >= 1");
    WindowScanResult out;
    for (int g = 1; g <= max_depth; ++g) {
        const double len = std::ldexp(kTwoPi, -g);
        const std::size_t count = std::size_t{1} << (g + 1);
        double gen_min = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < count; ++k) {
            const Arc arc(0.5 * len * (static_cast<double>(k) + 1.0), len);
            const double ratio = window_mass(mu, CarlesonWindow::standard(arc)) / len;
            gen_min = std::min(gen_min, ratio);
            if (ratio < out.ratio) {
                out.ratio = ratio;
                out.witness = arc;
            }
        }
        out.generation_minima.push_back(gen_min);
    }
    return out;
}

struct BoundaryBound {
    double value = 0.0;
    bool atoms_on_boundary = false;
};

/// Essential infimum of the stored boundary density, with a flag when part of
/// the boundary mass is carried by atoms (singular, never helps the bound).
inline BoundaryBound boundary_rn_lower_bound(const Measure& mu) {
    return {mu.boundary_density().minimum(), mu.has_boundary_atoms()};
}

/// Window masses mu(S_{I,h}) along a strictly decreasing depth list.
inline std::vector<double> refine_window_to_arc(const Measure& mu, const Arc& arc, std::span<const double> depths) {
    std::vector<double> masses;
    masses.reserve(depths.size());
    for (std::size_t k = 0; k < depths.size(); ++k) {
        if (k > 0 && !(depths[k] < depths[k - 1])) throw DomainError("refine_window_to_arc: depths must decrease");
        masses.push_back(window_mass(mu, CarlesonWindow(arc, depths[k])));
    }
    return masses;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const Measure& mu) {
    nlohmann::json j;
    j["atoms"] = nlohmann::json::array();
    for (const Atom& a : mu.atom_list()) j["atoms"].push_back({{"re", a.point.real()}, {"im", a.point.imag()}, {"mass", a.mass}});
    const auto& b = mu.boundary_density();
    j["boundary_density"] = {{"breakpoints", std::vector<double>(b.breakpoints().begin(), b.breakpoints().end())},
                             {"values", std::vector<double>(b.values().begin(), b.values().end())}};
    const auto& a = mu.area_density();
    j["area_density"] = {{"radial_breaks", std::vector<double>(a.radial_breaks().begin(), a.radial_breaks().end())},
                         {"angular_breaks", std::vector<double>(a.angular_breaks().begin(), a.angular_breaks().end())},
                         {"values", a.values()}};
    return j;
}

/// Thrown for schema violations; `path` is a JSON pointer to the offending field.
class SchemaError : public Error {
public:
    SchemaError(std::string path, const std::string& what) : Error((path.empty() ? "/" : path) + ": " + what), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw SchemaError(path + "/" + key, "unknown field");
        }
    }
}

inline double number(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    return j.get<double>();
}

inline std::vector<double> numbers(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], path + "/" + std::to_string(k)));
    return out;
}

}  // namespace detail

inline Measure measure_from_json(const nlohmann::json& j, const std::string& path = "") {
    detail::reject_unknown(j, path, {"atoms", "boundary_density", "area_density"});
    std::vector<Atom> atoms;
    if (j.contains("atoms")) {
        const auto& arr = j.at("atoms");
        if (!arr.is_array()) throw SchemaError(path + "/atoms", "expected an array");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string p = path + "/atoms/" + std::to_string(k);
            detail::reject_unknown(arr[k], p, {"re", "im", "mass"});
            for (const char* key : {"re", "im", "mass"}) {
                if (!arr[k].contains(key)) throw SchemaError(p + "/" + key, "missing field");
            }
            atoms.push_back({{detail::number(arr[k]["re"], p + "/re"), detail::number(arr[k]["im"], p + "/im")},
                             detail::number(arr[k]["mass"], p + "/mass")});
        }
    }
    BoundaryDensity boundary;
    if (j.contains("boundary_density")) {
        const std::string p = path + "/boundary_density";
        const auto& b = j.at("boundary_density");
        detail::reject_unknown(b, p, {"breakpoints", "values"});
        if (!b.contains("breakpoints") || !b.contains("values")) throw SchemaError(p, "breakpoints and values required");
        try {
            boundary = BoundaryDensity(detail::numbers(b["breakpoints"], p + "/breakpoints"), detail::numbers(b["values"], p + "/values"));
        } catch (const DomainError& e) {
            throw SchemaError(p, e.what());
        }
    }
    AreaDensity area;
    if (j.contains("area_density")) {
        const std::string p = path + "/area_density";
        const auto& a = j.at("area_density");
        detail::reject_unknown(a, p, {"radial_breaks", "angular_breaks", "values"});
        if (!a.contains("radial_breaks") || !a.contains("angular_breaks") || !a.contains("values")) {
            throw SchemaError(p, "radial_breaks, angular_breaks and values required");
        }
        std::vector<std::vector<double>> rows;
        if (!a["values"].is_array()) throw SchemaError(p + "/values", "expected an array of rows");
        for (std::size_t k = 0; k < a["values"].size(); ++k) rows.push_back(detail::numbers(a["values"][k], p + "/values/" + std::to_string(k)));
        try {
            area = AreaDensity(detail::numbers(a["radial_breaks"], p + "/radial_breaks"),
                               detail::numbers(a["angular_breaks"], p + "/angular_breaks"), std::move(rows));
        } catch (const DomainError& e) {
            throw SchemaError(p, e.what());
        }
    }
    try {
        return Measure(std::move(atoms), std::move(boundary), std::move(area));
    } catch (const DomainError& e) {
        throw SchemaError(path + "/atoms", e.what());
    }
}

}  // namespace rktlab::measures

#endif  // RKTLAB_MEASURES_HPP
