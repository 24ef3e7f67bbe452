#ifndef RKTLAB_EXPERIMENTS_HPP
#define RKTLAB_EXPERIMENTS_HPP

// Batch experiment runner behind the rktlab CLI: schema-checked JSON configs,
// deterministic CSV output, a JSON summary of every computed constant and a
// Markdown report.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 config/schema error,
// 3 numerical failure, 4 output could not be written.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rktlab/hardy.hpp"
#include "rktlab/measures.hpp"
#include "rktlab/model_space.hpp"
#include "rktlab/numerics.hpp"
#include "rktlab/paley_wiener.hpp"

namespace rktlab::experiments {

using json = nlohmann::json;
using measures::SchemaError;

inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kSchema = 2, kNumerical = 3, kOutput = 4 };

// ---------------------------------------------------------------------------
// Logging (RKTLAB_LOG = error | info | debug)

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

inline LogLevel log_level() {
    const char* v = std::getenv("RKTLAB_LOG");
    if (v == nullptr) return LogLevel::Error;
    const std::string s(v);
    if (s == "debug") return LogLevel::Debug;
    if (s == "info") return LogLevel::Info;
    return LogLevel::Error;
}

inline void log(LogLevel level, const std::string& msg) {
    static const LogLevel threshold = log_level();
    if (static_cast<int>(level) > static_cast<int>(threshold)) return;
    static const char* names[] = {"error", "info", "debug"};
    std::cerr << "[rktlab " << names[static_cast<int>(level)] << "] " << msg << '\n';
}

// ---------------------------------------------------------------------------
// Results

struct RunOptions {
    std::optional<std::uint64_t> seed;   // command-line override
    unsigned threads = 1;
    bool quick = false;
};

/// One row of the report. `pass` is empty for purely reported constants.
struct Claim {
    std::string claim;
    std::string anchor;
    json value;
    std::optional<bool> pass;
};

struct RunResult {
    std::string kind;
    json summary;
    std::string csv_name;
    std::string csv;
    std::vector<Claim> claims;

    bool passed() const {
        return std::all_of(claims.begin(), claims.end(), [](const Claim& c) { return c.pass.value_or(true); });
    }
};

inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline json point_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

inline const char* kConventions =
    "||f||_p uses d(theta)/2pi; arcs |I| and measures are in radians. A boundary density c (against d(theta)) gives "
    "reverse ratios >= 2pi c. C3 is min mu(S_I)/|I| over scanned dyadic and half-shifted arcs; window depth is min(|I|, 1).";

// ---------------------------------------------------------------------------
// Schema helpers

namespace detail {

using measures::detail::number;
using measures::detail::numbers;
using measures::detail::reject_unknown;

inline const json& require(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) throw SchemaError(path + "/" + key, "missing field");
    return j.at(key);
}

inline long integer(const json& j, const std::string& path, long lo, long hi) {
    if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
    const long v = j.get<long>();
    if (v < lo || v > hi) throw SchemaError(path, "out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
}

inline double number_in(const json& j, const std::string& path, double lo, double hi) {
    const double v = number(j, path);
    if (!(v >= lo && v <= hi)) throw SchemaError(path, "out of range [" + fmt(lo) + ", " + fmt(hi) + "]");
    return v;
}

inline Complex complex_point(const json& j, const std::string& path) {
    reject_unknown(j, path, {"re", "im"});
    return {number(require(j, "re", path), path + "/re"), number(require(j, "im", path), path + "/im")};
}

inline std::vector<Complex> complex_points(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array of {re, im}");
    std::vector<Complex> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(complex_point(j[k], path + "/" + std::to_string(k)));
    return out;
}

inline measures::Arc arc(const json& j, const std::string& path) {
    reject_unknown(j, path, {"center", "length"});
    const double c = number(require(j, "center", path), path + "/center");
    const double l = number_in(require(j, "length", path), path + "/length", 1e-12, kTwoPi);
    return measures::Arc(c, l);
}

inline std::uint64_t seed_of(const json& j, const RunOptions& opt) {
    if (opt.seed) return *opt.seed;
    if (j.contains("seed")) {
        const json& v = j["seed"];
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            throw SchemaError("/seed", "expected a non-negative integer");
        }
        return j["seed"].get<std::uint64_t>();
    }
    return kDefaultSeed;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// windows

inline RunResult run_windows(const json& j, const RunOptions&) {
    detail::reject_unknown(j, "", {"kind", "measure", "max_depth", "refine"});
    const auto mu = measures::measure_from_json(detail::require(j, "measure", ""), "/measure");
    const int depth = static_cast<int>(j.contains("max_depth") ? detail::integer(j["max_depth"], "/max_depth", 1, 24) : 12);

    const auto scan = measures::window_infimum_scan(mu, depth);
    const auto rn = measures::boundary_rn_lower_bound(mu);

    RunResult r;
    r.kind = "windows";
    r.csv_name = "windows.csv";
    std::ostringstream csv;
    csv << "generation,arc_length,min_ratio\n";
    for (std::size_t g = 0; g < scan.generation_minima.size(); ++g) {
        csv << g + 1 << ',' << fmt(std::ldexp(kTwoPi, -static_cast<int>(g + 1))) << ',' << fmt(scan.generation_minima[g]) << '\n';
    }
    r.csv = csv.str();

    json& s = r.summary;
    s["max_depth"] = depth;
    s["c3_estimate"] = scan.ratio;
    s["c3_witness_arc"] = {{"center", scan.witness.center()}, {"length", scan.witness.length()}};
    s["generation_minima"] = scan.generation_minima;
    s["c4_estimate"] = rn.value;
    s["atoms_on_boundary"] = rn.atoms_on_boundary;
    s["total_mass"] = mu.total_mass();

    r.claims.push_back({"window lower constant C3 (scan estimate)", "mu(S_I) >= C3 |I|", scan.ratio, std::nullopt});
    r.claims.push_back({"boundary density lower bound C4", "d mu|_T / d theta >= C4", rn.value, std::nullopt});
    r.claims.push_back({"density floor => window floor: every scanned window ratio >= C4", "mu(S_I) >= C3 |I|", scan.ratio,
                        scan.ratio >= rn.value - 1e-12});

    if (j.contains("refine")) {
        const json& rf = j["refine"];
        detail::reject_unknown(rf, "/refine", {"arc", "depths"});
        const auto arc = detail::arc(detail::require(rf, "arc", "/refine"), "/refine/arc");
        const auto depths = detail::numbers(detail::require(rf, "depths", "/refine"), "/refine/depths");
        std::vector<double> masses;
        try {
            masses = measures::refine_window_to_arc(mu, arc, depths);
        } catch (const DomainError& e) {
            throw SchemaError("/refine/depths", e.what());
        }
        bool monotone = true;
        for (std::size_t k = 1; k < masses.size(); ++k) monotone = monotone && masses[k] <= masses[k - 1] + 1e-12;
        s["refine"] = {{"arc", {{"center", arc.center()}, {"length", arc.length()}}}, {"depths", depths}, {"masses", masses}};
        r.claims.push_back({"Monotonicity: window mass nondecreasing in h", "mu(S_{I,h}) as h decreases", masses, monotone});
        if (!masses.empty()) {
            r.claims.push_back({"window => density at finite scale: refined mass >= C4 |I|", "mu(I) >= inf_h mu(S_{I,h})", masses.back(),
                                masses.back() >= rn.value * arc.length() - 1e-12});
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// rkt-hardy

inline RunResult run_rkt_hardy(const json& j, const RunOptions& opt) {
    detail::reject_unknown(j, "", {"kind", "measure", "p", "grid", "polynomials", "seed", "window_depth"});
    const auto mu = measures::measure_from_json(detail::require(j, "measure", ""), "/measure");
    const double p = j.contains("p") ? detail::number_in(j["p"], "/p", 1.0 + 1e-9, 64.0) : 2.0;
    int levels = 20;
    std::size_t angles = 64;
    if (j.contains("grid")) {
        detail::reject_unknown(j["grid"], "/grid", {"levels", "angles"});
        if (j["grid"].contains("levels")) levels = static_cast<int>(detail::integer(j["grid"]["levels"], "/grid/levels", 1, 20));
        if (j["grid"].contains("angles")) angles = static_cast<std::size_t>(detail::integer(j["grid"]["angles"], "/grid/angles", 1, 1 << 16));
    }
    std::size_t count = 200;
    std::size_t degree = 32;
    if (j.contains("polynomials")) {
        detail::reject_unknown(j["polynomials"], "/polynomials", {"count", "max_degree"});
        if (j["polynomials"].contains("count")) count = static_cast<std::size_t>(detail::integer(j["polynomials"]["count"], "/polynomials/count", 1, 100000));
        if (j["polynomials"].contains("max_degree")) {
            degree = static_cast<std::size_t>(detail::integer(j["polynomials"]["max_degree"], "/polynomials/max_degree", 0, 256));
        }
    }
    const int window_depth = static_cast<int>(j.contains("window_depth") ? detail::integer(j["window_depth"], "/window_depth", 1, 24) : 12);
    if (opt.quick) {
        levels = std::min(levels, 10);
        angles = std::min<std::size_t>(angles, 32);
        count = std::min<std::size_t>(count, 50);
    }
    const std::uint64_t seed = detail::seed_of(j, opt);

    const auto cfg = hardy::HardyConfig::make(p, opt.threads);
    const auto fs = hardy::random_polynomials(count, degree, seed);
    double c1 = std::numeric_limits<double>::infinity();
    for (const auto& f : fs) {
        if (f.is_zero()) continue;
        c1 = std::min(c1, hardy::reverse_embedding_ratio(mu, f, cfg));
    }
    log(LogLevel::Info, "rkt-hardy: reverse ratios done over " + std::to_string(fs.size()) + " polynomials");
    const auto grid = DiskGrid::dyadic(levels, angles);
    const auto scan = hardy::rkt_infimum_scan(mu, cfg, grid);
    log(LogLevel::Info, "rkt-hardy: kernel scan done over " + std::to_string(grid.points().size()) + " points");
    const auto windows = measures::window_infimum_scan(mu, window_depth);
    const auto rn = measures::boundary_rn_lower_bound(mu);

    RunResult r;
    r.kind = "rkt-hardy";
    r.csv_name = "rkt_scan.csv";
    std::ostringstream csv;
    csv << "ring,radius,angle,re_lambda,im_lambda,rkt_value\n";
    const auto pts = grid.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Complex z = pts[i].z();
        csv << pts[i].ring << ',' << fmt(pts[i].radius) << ',' << fmt(pts[i].angle) << ',' << fmt(z.real()) << ',' << fmt(z.imag()) << ','
            << fmt(scan.values[i]) << '\n';
    }
    r.csv = csv.str();

    json& s = r.summary;
    s["p"] = p;
    s["p_conj"] = cfg.p_conj;
    s["seed"] = seed;
    s["polynomial_count"] = fs.size();
    s["c1_estimate"] = c1;
    s["c2_estimate"] = scan.value;
    s["c2_witness"] = point_json(scan.witness);
    s["c2_ring_minima"] = scan.ring_minima;
    s["c3_estimate"] = windows.ratio;
    s["c4_estimate"] = rn.value;
    s["atoms_on_boundary"] = rn.atoms_on_boundary;
    s["grid"] = {{"levels", levels}, {"angles", angles}};

    const double floor = kTwoPi * rn.value;
    r.claims.push_back({"reverse embedding constant C1 (min over random polynomials)", "int |f|^p dmu >= C1 ||f||_p^p", c1,
                        std::nullopt});
    r.claims.push_back({"kernel constant C2 (grid minimum)", "int |K_lambda|^p dmu >= C2", scan.value, std::nullopt});
    r.claims.push_back({"window constant C3 (scan estimate)", "mu(S_I) >= C3 |I|", windows.ratio, std::nullopt});
    r.claims.push_back({"boundary density bound C4", "d mu|_T / d theta >= C4", rn.value, std::nullopt});
    r.claims.push_back({"density floor => reverse embedding: C1 >= 2pi C4", "int |f|^p dmu >= 2pi C4 ||f||_p^p", c1, c1 >= floor - 1e-6});
    r.claims.push_back({"density floor => kernel bound: C2 >= 2pi C4", "int |K_lambda|^p dmu >= 2pi C4", scan.value, scan.value >= floor - 1e-6});
    return r;
}

// ---------------------------------------------------------------------------
// phi-h

inline RunResult run_phi_h(const json& j, const RunOptions& opt) {
    detail::reject_unknown(j, "", {"kind", "p", "arc", "h", "points", "grid"});
    const double p = j.contains("p") ? detail::number_in(j["p"], "/p", 1.0 + 1e-9, 64.0) : 2.0;
    const auto arc = detail::arc(detail::require(j, "arc", ""), "/arc");
    auto hs = detail::numbers(detail::require(j, "h", ""), "/h");
    const auto zs = detail::complex_points(detail::require(j, "points", ""), "/points");
    std::size_t rings = 16;
    std::size_t angles = 64;
    if (j.contains("grid")) {
        detail::reject_unknown(j["grid"], "/grid", {"rings", "angles"});
        if (j["grid"].contains("rings")) rings = static_cast<std::size_t>(detail::integer(j["grid"]["rings"], "/grid/rings", 1, 256));
        if (j["grid"].contains("angles")) angles = static_cast<std::size_t>(detail::integer(j["grid"]["angles"], "/grid/angles", 1, 4096));
    }
    if (opt.quick) {
        rings = std::min<std::size_t>(rings, 8);
        angles = std::min<std::size_t>(angles, 32);
    }
    if (hs.size() < 2) throw SchemaError("/h", "need at least two values");
    for (std::size_t k = 0; k < hs.size(); ++k) {
        if (!(hs[k] > 0.0 && hs[k] <= std::min(arc.length(), 1.0))) throw SchemaError("/h/" + std::to_string(k), "need 0 < h <= min(|I|, 1)");
        if (k > 0 && !(hs[k] < hs[k - 1])) throw SchemaError("/h/" + std::to_string(k), "h values must decrease");
    }
    for (std::size_t k = 0; k < zs.size(); ++k) {
        if (std::abs(zs[k]) > 1.0 + 1e-12) throw SchemaError("/points/" + std::to_string(k), "point outside the closed disk");
    }

    auto cfg = hardy::HardyConfig::make(p, opt.threads);
    const double slack = 1e-9;
    const auto profile = hardy::phi_h_limit_profile(arc, hs, zs, cfg, slack);

    // Expected limit from the indicator of the closed arc.
    auto expected = [&](Complex z) {
        if (std::abs(z) < 1.0 - 1e-12) return hardy::LimitClass::Vanishing;
        const double th = std::arg(z);
        const double ds = std::abs(std::remainder(th - arc.start(), kTwoPi));
        const double de = std::abs(std::remainder(th - arc.end_angle(), kTwoPi));
        if (std::min(ds, de) <= slack) return hardy::LimitClass::Indeterminate;
        return arc.contains(th) ? hardy::LimitClass::BoundedAway : hardy::LimitClass::Vanishing;
    };

    // Grid sup per h: disk grid plus the circle itself.
    std::vector<Complex> sup_points;
    for (const GridPoint& g : DiskGrid::geometric(rings, angles).points()) sup_points.push_back(g.z());
    for (std::size_t k = 0; k < angles; ++k) sup_points.push_back(unit(kTwoPi * static_cast<double>(k) / static_cast<double>(angles)));
    std::vector<double> sups(hs.size(), 0.0);
    std::vector<double> values(hs.size() * sup_points.size());
    parallel_for(values.size(), opt.threads, [&](std::size_t idx) {
        values[idx] = hardy::phi_h(sup_points[idx % sup_points.size()], arc, hs[idx / sup_points.size()], cfg);
    });
    for (std::size_t k = 0; k < hs.size(); ++k) {
        for (std::size_t i = 0; i < sup_points.size(); ++i) sups[k] = std::max(sups[k], values[k * sup_points.size() + i]);
    }

    RunResult r;
    r.kind = "phi-h";
    r.csv_name = "phi_h.csv";
    std::ostringstream csv;
    csv << "re_z,im_z,h,phi_h\n";
    json pts = json::array();
    bool classes_match = true;
    bool decay_ok = true;
    bool bracket_ok = true;
    double worst_exponent = std::numeric_limits<double>::infinity();
    double worst_bracket = 1.0;
    for (const auto& e : profile) {
        const auto want = expected(e.z);
        for (std::size_t k = 0; k < e.values.size(); ++k) {
            csv << fmt(e.z.real()) << ',' << fmt(e.z.imag()) << ',' << fmt(hs[k]) << ',' << fmt(e.values[k]) << '\n';
        }
        classes_match = classes_match && e.classification == want;
        json pj = {{"re", e.z.real()}, {"im", e.z.imag()}, {"classification", hardy::to_string(e.classification)},
                   {"expected", hardy::to_string(want)}, {"values", e.values}};
        if (want == hardy::LimitClass::Vanishing) {
            pj["decay_exponent"] = e.decay_exponent;
            worst_exponent = std::min(worst_exponent, e.decay_exponent);
            decay_ok = decay_ok && e.decay_exponent >= p - 1.0 - 0.1;
        } else if (want == hardy::LimitClass::BoundedAway) {
            const auto [lo, hi] = std::minmax_element(e.values.begin(), e.values.end());
            const double ratio = *hi / *lo;
            pj["bracket_ratio"] = ratio;
            worst_bracket = std::max(worst_bracket, ratio);
            bracket_ok = bracket_ok && *lo > 0.0 && ratio < 50.0;
        }
        pts.push_back(pj);
    }
    r.csv = csv.str();
    const double last_change = std::abs(sups.back() - sups[sups.size() - 2]) / sups[sups.size() - 2];

    json& s = r.summary;
    s["p"] = p;
    s["arc"] = {{"center", arc.center()}, {"length", arc.length()}};
    s["h"] = hs;
    s["points"] = pts;
    s["grid_sup_per_h"] = sups;
    s["grid_sup"] = *std::max_element(sups.begin(), sups.end());
    s["grid"] = {{"rings", rings}, {"angles", angles}};

    r.claims.push_back({"limit profile matches the indicator of the closed arc", "phi_h -> comparable to chi_I", classes_match ? "match" : "mismatch",
                        classes_match});
    r.claims.push_back({"off-arc decay exponent >= p - 1 - 0.1", "phi_h(z) <~ h^(p-1) off the arc",
                        std::isfinite(worst_exponent) ? json(worst_exponent) : json(nullptr), decay_ok});
    r.claims.push_back({"on-arc bracket C/c < 50", "phi_h(z) ~ 1 on the arc", worst_bracket, bracket_ok});
    r.claims.push_back({"grid sup bounded uniformly in h (last relative change < 5%)", "sup_h sup_z phi_h(z) < inf", s["grid_sup"],
                        std::isfinite(sups.back()) && last_change < 0.05});
    return r;
}

// ---------------------------------------------------------------------------
// pw-counterexample

inline RunResult run_pw(const json& j, const RunOptions& opt) {
    detail::reject_unknown(j, "", {"kind", "truncation", "scan", "witness", "frame_size"});
    long truncation = j.contains("truncation") ? detail::integer(j["truncation"], "/truncation", 512, 1 << 16) : 1024;
    paley_wiener::Region region;
    std::size_t nre = 128;
    std::size_t nim = 128;
    if (j.contains("scan")) {
        const json& sc = j["scan"];
        detail::reject_unknown(sc, "/scan", {"re", "im", "resolution"});
        if (sc.contains("re")) {
            const auto v = detail::numbers(sc["re"], "/scan/re");
            if (v.size() != 2 || !(v[0] < v[1])) throw SchemaError("/scan/re", "expected [min, max] with min < max");
            region.re_min = v[0];
            region.re_max = v[1];
        }
        if (sc.contains("im")) {
            const auto v = detail::numbers(sc["im"], "/scan/im");
            if (v.size() != 2 || !(v[0] < v[1])) throw SchemaError("/scan/im", "expected [min, max] with min < max");
            region.im_min = v[0];
            region.im_max = v[1];
        }
        if (sc.contains("resolution")) {
            const json& res = sc["resolution"];
            if (!res.is_array() || res.size() != 2) throw SchemaError("/scan/resolution", "expected [n_re, n_im]");
            nre = static_cast<std::size_t>(detail::integer(res[0], "/scan/resolution/0", 64, 4096));
            nim = static_cast<std::size_t>(detail::integer(res[1], "/scan/resolution/1", 64, 4096));
        }
    }
    double length = 256.0;
    double rate = 8.0;
    if (j.contains("witness")) {
        detail::reject_unknown(j["witness"], "/witness", {"length", "rate"});
        if (j["witness"].contains("length")) length = static_cast<double>(detail::integer(j["witness"]["length"], "/witness/length", 256, 4096));
        if (j["witness"].contains("rate")) rate = static_cast<double>(detail::integer(j["witness"]["rate"], "/witness/rate", 8, 64));
    }
    const long frame_size = j.contains("frame_size") ? detail::integer(j["frame_size"], "/frame_size", 1, 256) : 32;
    if (opt.quick) {
        truncation = 512;
        nre = 64;
        nim = 64;
    }
    if (0.5 * length > 0.25 * static_cast<double>(truncation)) throw SchemaError("/witness/length", "witness window must fit in a quarter of the truncation");

    const auto seq = paley_wiener::SamplingSequence::kadets(truncation);
    const auto scan = paley_wiener::rkt_lower_bound_scan(seq, region, nre, nim, opt.threads);
    log(LogLevel::Info, "pw: lower-bound scan done");

    // Witness on a uniform grid over [-L/2, L/2) and at the sequence points.
    const std::size_t m = static_cast<std::size_t>(length * rate);
    std::vector<Complex> xs(m);
    for (std::size_t k = 0; k < m; ++k) xs[k] = -0.5 * length + static_cast<double>(k) / rate;
    const auto wv = paley_wiener::generating_witness(seq, xs, 1e-6, opt.threads);
    std::vector<Complex> nodes;
    for (double x : seq.points()) nodes.push_back(x);
    const auto at_nodes = paley_wiener::generating_witness(seq, nodes, 1e-6, opt.threads);
    double on_mu = 0.0;
    for (const Complex& v : at_nodes.values) on_mu += std::norm(v);
    // L^2(R): Riemann sum (exact for band-limited samples) plus a C/x^2 tail from the last unit on each side.
    double l2 = 0.0;
    for (const Complex& v : wv.values) l2 += std::norm(v) / rate;
    double tail_c = 0.0;
    const std::size_t per_unit = static_cast<std::size_t>(rate);
    for (std::size_t k = 0; k < per_unit; ++k) {
        tail_c += std::norm(wv.values[k]) * std::norm(xs[k]);
        tail_c += std::norm(wv.values[m - 1 - k]) * std::norm(xs[m - 1 - k]);
    }
    tail_c /= static_cast<double>(2 * per_unit);
    l2 += 2.0 * tail_c / (0.5 * length);
    const double witness_ratio = on_mu / l2;
    const double band = paley_wiener::bandlimit_check(wv.values, length, rate);
    const auto sanity = paley_wiener::carleson_sanity(seq);
    const double frame_min = paley_wiener::frame_gram_min_eigenvalue(seq, frame_size);

    double own_min = std::numeric_limits<double>::infinity();
    for (long n = -16; n <= 16; ++n) {
        if (n != 0) own_min = std::min(own_min, paley_wiener::rkt_sum(seq.point(n), seq).low);
    }
    const auto doubled = paley_wiener::SamplingSequence::kadets(2 * truncation);
    const auto s1 = paley_wiener::rkt_sum(scan.witness, seq);
    const auto s2 = paley_wiener::rkt_sum(scan.witness, doubled);
    const double drift = std::abs(s2.low - s1.low);

    RunResult r;
    r.kind = "pw-counterexample";
    r.csv_name = "pw_scan.csv";
    std::ostringstream csv;
    csv << "re_lambda,im_lambda,rkt_sum_low,rkt_sum_high\n";
    for (const auto& node : scan.nodes) {
        csv << fmt(node.lambda.real()) << ',' << fmt(node.lambda.imag()) << ',' << fmt(node.value.low) << ',' << fmt(node.value.high) << '\n';
    }
    r.csv = csv.str();

    json& s = r.summary;
    s["truncation"] = truncation;
    s["scan"] = {{"re", {region.re_min, region.re_max}}, {"im", {region.im_min, region.im_max}}, {"resolution", {nre, nim}}};
    s["rkt_delta"] = scan.delta;
    s["rkt_witness"] = point_json(scan.witness);
    s["witness_ratio"] = witness_ratio;
    s["witness_sum_on_sequence"] = on_mu;
    s["witness_l2_norm_sq"] = l2;
    s["witness_error_estimate"] = std::max(wv.max_error_estimate, at_nodes.max_error_estimate);
    s["bandlimit_fraction"] = band;
    s["separation"] = sanity.separation;
    s["strip_width"] = sanity.strip_width;
    s["frame_gram_min_eigenvalue"] = frame_min;
    s["frame_size"] = frame_size;
    s["own_node_min"] = own_min;
    s["truncation_drift"] = drift;

    r.claims.push_back({"kernel lower bound delta (grid minimum)", "inf_lambda sum_n |K_lambda(x_n)|^2 >= delta > 0", scan.delta, scan.delta > 0.0});
    r.claims.push_back({"Contrast pair: delta > 0 and witness ratio < 1e-6", "sum_n |f(x_n)|^2 vs ||f||^2 for f vanishing on the sequence",
                        witness_ratio, scan.delta > 0.0 && witness_ratio < 1e-6});
    r.claims.push_back({"witness is band-limited (out-of-band fraction < 0.05)", "f in PW_pi", band, band < 0.05});
    r.claims.push_back({"separated real sequence (gap >= 3/4, strip width 0)", "Carleson measure for PW_pi", sanity.separation,
                        sanity.separation >= 0.75 - 1e-12 && sanity.strip_width == 0.0});
    r.claims.push_back({"own-node term: rkt_sum(x_m) >= 1", "|K_{x_m}(x_m)|^2 = 1", own_min, own_min >= 1.0 - 1e-12});
    r.claims.push_back({"Truncation stability: doubling N moves the sum by less than the tail bound", "tail of sum c^2/|x_n - lambda|^2", drift,
                        drift <= (s1.high - s1.low) + 1e-12});
    r.claims.push_back({"frame Gram minimum eigenvalue (sequence plus origin)", "Riesz basis after adding 0", frame_min, std::nullopt});
    return r;
}

// ---------------------------------------------------------------------------
// theorem2

inline RunResult run_theorem2(const json& j, const RunOptions& opt) {
    detail::reject_unknown(j, "", {"kind", "zeros", "alpha_angle", "epsilon", "grid", "delta_list"});
    const auto zeros = detail::complex_points(detail::require(j, "zeros", ""), "/zeros");
    if (zeros.size() < 2 || zeros.size() > 64) throw SchemaError("/zeros", "need between 2 and 64 zeros");
    for (std::size_t k = 0; k < zeros.size(); ++k) {
        if (!(std::abs(zeros[k]) < 1.0)) throw SchemaError("/zeros/" + std::to_string(k), "zero must lie in the open disk");
    }
    const double alpha_angle = j.contains("alpha_angle") ? detail::number(j["alpha_angle"], "/alpha_angle") : 0.0;
    std::size_t rings = 64;
    std::size_t angles = 512;
    if (j.contains("grid")) {
        detail::reject_unknown(j["grid"], "/grid", {"rings", "angles"});
        if (j["grid"].contains("rings")) rings = static_cast<std::size_t>(detail::integer(j["grid"]["rings"], "/grid/rings", 1, 1024));
        if (j["grid"].contains("angles")) angles = static_cast<std::size_t>(detail::integer(j["grid"]["angles"], "/grid/angles", 1, 1 << 16));
    }
    std::vector<double> deltas{0.05, 0.1, 0.2, 0.4};
    if (j.contains("delta_list")) deltas = detail::numbers(j["delta_list"], "/delta_list");
    std::sort(deltas.begin(), deltas.end());
    for (double d : deltas) {
        if (!(d > 0.0)) throw SchemaError("/delta_list", "entries must be positive");
    }
    if (opt.quick) {
        rings = std::min<std::size_t>(rings, 16);
        angles = std::min<std::size_t>(angles, 128);
    }

    const model_space::ModelSpace space{model_space::BlaschkeProduct(zeros)};
    const Complex alpha = unit(alpha_angle);
    const auto clark = model_space::clark_points(space.theta(), alpha);
    double epsilon = model_space::default_epsilon(clark);
    if (j.contains("epsilon") && !j["epsilon"].is_null()) epsilon = detail::number(j["epsilon"], "/epsilon");
    model_space::PerturbedSystem sys;
    try {
        sys = model_space::build_theorem2_measure(space, alpha, epsilon);
    } catch (const DomainError& e) {
        throw SchemaError("/epsilon", e.what());
    }

    const auto gram = model_space::kernel_gram(space, clark.points).dense();
    double gram_error = 0.0;
    for (std::size_t a = 0; a < gram.rows(); ++a) {
        for (std::size_t b = 0; b < gram.cols(); ++b) gram_error = std::max(gram_error, std::abs(gram(a, b) - (a == b ? 1.0 : 0.0)));
    }
    const auto riesz = model_space::riesz_bounds(space, sys);
    const auto witness = model_space::witness_function(space, sys);
    const auto grid = DiskGrid::geometric(rings, angles);
    const auto scan = model_space::rkt_model_scan(space, sys, grid, opt.threads);
    log(LogLevel::Info, "theorem2: grid scan done over " + std::to_string(scan.nodes.size()) + " points");
    double phi_max = 0.0;
    for (const auto& node : scan.nodes) phi_max = std::max(phi_max, node.phi);

    json psi_j = json::array();
    bool psi_ok = true;
    bool near_ok = true;
    bool far_ok = true;
    double prev_psi = std::numeric_limits<double>::infinity();
    std::vector<double> psi_values;
    double near_min = std::numeric_limits<double>::infinity();
    double far_slack = std::numeric_limits<double>::infinity();
    for (double d : deltas) {
        const auto ps = model_space::psi(space, sys, d, grid);
        const auto tt = model_space::two_term_bound(space, sys, d, grid);
        double far_min = std::numeric_limits<double>::infinity();
        for (const auto& node : scan.nodes) {
            if (std::abs(node.z - sys.xi[0]) >= d) far_min = std::min(far_min, node.mu_norm_sq);
        }
        const double far_bound = (1.0 - riesz.eta) - ps.value;
        psi_ok = psi_ok && ps.value < 1.0 && ps.value <= prev_psi + 1e-15;
        prev_psi = ps.value;
        psi_values.push_back(ps.value);
        if (tt.points > 0) {
            near_ok = near_ok && tt.value > 0.0;
            near_min = std::min(near_min, tt.value);
        }
        if (std::isfinite(far_min)) {
            far_ok = far_ok && far_min >= far_bound - 1e-9;
            far_slack = std::min(far_slack, far_min - far_bound);
        }
        json row = {{"delta", d}, {"psi", ps.value}, {"psi_witness", point_json(ps.witness)}, {"two_term_min", nullptr},
                    {"two_term_points", tt.points}, {"far_min", nullptr}, {"far_bound", far_bound}};
        if (tt.points > 0) row["two_term_min"] = tt.value;
        if (std::isfinite(far_min)) row["far_min"] = far_min;
        psi_j.push_back(row);
    }
    const std::size_t components = model_space::sublevel_components(space.theta(), 0.5, opt.quick ? 201 : 401);

    RunResult r;
    r.kind = "theorem2";
    r.csv_name = "theorem2.csv";
    std::ostringstream csv;
    csv << "re_z,im_z,phi,mu_norm_sq\n";
    for (const auto& node : scan.nodes) csv << fmt(node.z.real()) << ',' << fmt(node.z.imag()) << ',' << fmt(node.phi) << ',' << fmt(node.mu_norm_sq) << '\n';
    r.csv = csv.str();

    json& s = r.summary;
    json zj = json::array();
    for (const Complex& z : zeros) zj.push_back(point_json(z));
    s["zeros"] = zj;
    s["alpha_angle"] = alpha_angle;
    s["epsilon"] = epsilon;
    json cj = json::array();
    for (std::size_t k = 0; k < clark.points.size(); ++k) cj.push_back({{"angle", clark.angles[k]}, {"weight", clark.weights[k]}});
    s["clark_points"] = cj;
    s["clark_gram_error"] = gram_error;
    s["riesz_lower"] = riesz.lower;
    s["riesz_upper"] = riesz.upper;
    s["eta"] = riesz.eta;
    s["rkt_delta"] = scan.delta;
    s["rkt_witness"] = point_json(scan.witness);
    s["witness_ratio"] = witness.mu_norm_sq;
    s["witness_abs_at_xi0"] = std::abs(witness.value_at_xi0);
    s["decomposition_error"] = scan.decomposition_error;
    s["phi_max"] = phi_max;
    s["psi"] = psi_j;
    s["nonorthogonality_margin"] = sys.margin;
    s["sublevel_components"] = components;
    s["grid"] = {{"rings", rings}, {"angles", angles}};

    r.claims.push_back({"Clark orthonormality: Gram = identity to 1e-9", "(K_{zeta_n}) orthonormal basis", gram_error, gram_error <= 1e-9});
    r.claims.push_back({"Riesz bound eta", "(1 - eta)||f||^2 <= |<f, K_{zeta_0}>|^2 + sum_{n>=1} |<f, K_{xi_n}>|^2 <= (1 + eta)||f||^2",
                        riesz.eta, riesz.eta < 1.0});
    r.claims.push_back({"kernel lower bound delta (grid minimum)", "||K_z||^2_{L^2(mu)} >= delta", scan.delta, scan.delta > 0.0});
    r.claims.push_back({"Contrast pair: delta > 0 and witness ratio 0 to 1e-12", "f(xi_n) = 0 for n > 0, f(xi_0) != 0", witness.mu_norm_sq,
                        scan.delta > 0.0 && witness.mu_norm_sq <= 1e-12});
    r.claims.push_back({"Decomposition identity to 1e-9", "||K_z||^2_{L^2(mu)} = sum_{n>=1} |<K_z, K_{xi_n}>|^2", scan.decomposition_error,
                        scan.decomposition_error <= 1e-9});
    r.claims.push_back({"Cauchy-Schwarz: phi <= 1", "phi(z) = |<K_{zeta_0}, K_z>|^2 <= 1", phi_max, phi_max <= 1.0 + 1e-12});
    r.claims.push_back({"psi-monotonicity and psi(delta) < 1", "psi(delta) = sup_{z not in U_delta} phi(z)", psi_values, psi_ok});
    r.claims.push_back({"near case: phi_1 + phi_2 > 0 on the closure of U_delta", "two-term lower bound near zeta_0",
                        std::isfinite(near_min) ? json(near_min) : json(nullptr), near_ok});
    r.claims.push_back({"far case: ||K_z||^2_{L^2(mu)} >= (1 - eta) - psi(delta)", ">= (1 - eta)||K_z||^2 - phi(z)",
                        std::isfinite(far_slack) ? json(far_slack) : json(nullptr), far_ok});
    r.claims.push_back({"Sublevel connectivity: {|Theta| < 0.5} has one component", "one-component inner function", components, components == 1});
    r.claims.push_back({"non-orthogonality margin min_n |<K_{xi_1}, K_{zeta_n}>| > 0", "xi_1 close to but different from zeta_1", sys.margin,
                        sys.margin > 1e-12});
    return r;
}

// ---------------------------------------------------------------------------
// Dispatch, report and artifacts

inline RunResult run_experiment(const json& config, const RunOptions& opt) {
    if (!config.is_object()) throw SchemaError("", "config must be a JSON object");
    const json& kind = detail::require(config, "kind", "");
    if (!kind.is_string()) throw SchemaError("/kind", "expected a string");
    const std::string k = kind.get<std::string>();
    log(LogLevel::Info, "running experiment kind " + k);
    RunResult r;
    if (k == "windows") {
        r = run_windows(config, opt);
    } else if (k == "rkt-hardy") {
        r = run_rkt_hardy(config, opt);
    } else if (k == "phi-h") {
        r = run_phi_h(config, opt);
    } else if (k == "pw-counterexample") {
        r = run_pw(config, opt);
    } else if (k == "theorem2") {
        r = run_theorem2(config, opt);
    } else {
        throw SchemaError("/kind", "unknown experiment kind '" + k + "'");
    }
    r.summary["kind"] = r.kind;
    r.summary["quick"] = opt.quick;
    r.summary["conventions"] = kConventions;
    json claims = json::array();
    for (const Claim& c : r.claims) {
        json cj = {{"claim", c.claim}, {"anchor", c.anchor}, {"value", c.value}};
        cj["status"] = c.pass ? (*c.pass ? "pass" : "fail") : "reported";
        claims.push_back(cj);
    }
    r.summary["claims"] = claims;
    r.summary["passed"] = r.passed();
    return r;
}

inline std::string value_cell(const json& v) {
    if (v.is_number_float()) return fmt(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array() && v.size() > 8) return "see summary.json";
    return v.dump();
}

/// Markdown table claim | anchor | computed value | status from a summary document.
inline std::string render_report(const json& summary) {
    std::ostringstream md;
    md << "# rktlab report: " << summary.value("kind", std::string("unknown")) << "\n\n";
    if (summary.contains("conventions")) md << "Conventions: " << summary["conventions"].get<std::string>() << "\n\n";
    md << "| claim | anchor | computed value | status |\n";
    md << "|---|---|---|---|\n";
    if (summary.contains("claims")) {
        for (const json& c : summary["claims"]) {
            md << "| " << c.value("claim", std::string()) << " | `" << c.value("anchor", std::string()) << "` | " << value_cell(c["value"]) << " | "
               << c.value("status", std::string()) << " |\n";
        }
    }
    md << "\nOverall: " << (summary.value("passed", false) ? "pass" : "fail") << "\n";
    return md.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline void write_artifacts(const RunResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_text(dir / r.csv_name, r.csv);
    write_text(dir / "summary.json", r.summary.dump(2) + "\n");
    write_text(dir / "report.md", render_report(r.summary));
}

inline json load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("", "cannot read config file " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("malformed JSON: ") + e.what());
    }
}

/// Runs one config and writes its artifacts; returns the process exit code.
inline int run_and_write(const json& config, const std::filesystem::path& out_dir, const RunOptions& opt) {
    RunResult r;
    try {
        r = run_experiment(config, opt);
    } catch (const SchemaError& e) {
        log(LogLevel::Error, std::string("schema error at ") + e.what());
        return kSchema;
    } catch (const NumericalError& e) {
        log(LogLevel::Error, std::string("numerical failure: ") + e.what());
        return kNumerical;
    } catch (const DomainError& e) {
        log(LogLevel::Error, std::string("invalid config value: ") + e.what());
        return kSchema;
    }
    try {
        write_artifacts(r, out_dir);
    } catch (const std::exception& e) {
        log(LogLevel::Error, e.what());
        return kOutput;
    }
    for (const Claim& c : r.claims) {
        if (c.pass && !*c.pass) log(LogLevel::Error, "invariant failed: " + c.claim);
    }
    return r.passed() ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// Built-in suite

inline json lebesgue_measure() { return {{"boundary_density", {{"breakpoints", {0.0, kTwoPi}}, {"values", {1.0}}}}}; }

inline json half_circle_measure() { return {{"boundary_density", {{"breakpoints", {0.0, kPi, kTwoPi}}, {"values", {1.0, 0.0}}}}}; }

/// Named default configs covering every experiment kind.
inline std::vector<std::pair<std::string, json>> suite_configs() {
    std::vector<std::pair<std::string, json>> out;
    out.push_back({"windows_lebesgue",
                   {{"kind", "windows"},
                    {"measure", lebesgue_measure()},
                    {"max_depth", 12},
                    {"refine", {{"arc", {{"center", 1.0}, {"length", 0.5}}}, {"depths", {0.5, 0.25, 0.125, 0.0625}}}}}});
    out.push_back({"windows_half_circle", {{"kind", "windows"}, {"measure", half_circle_measure()}, {"max_depth", 12}}});
    out.push_back({"rkt_hardy_normalized",
                   {{"kind", "rkt-hardy"},
                    {"measure", {{"boundary_density", {{"breakpoints", {0.0, kTwoPi}}, {"values", {1.0 / kTwoPi}}}}}},
                    {"p", 2.0},
                    {"grid", {{"levels", 20}, {"angles", 64}}},
                    {"polynomials", {{"count", 200}, {"max_degree", 32}}}}});
    out.push_back({"rkt_hardy_half_circle",
                   {{"kind", "rkt-hardy"}, {"measure", half_circle_measure()}, {"p", 2.0}, {"grid", {{"levels", 20}, {"angles", 64}}}}});
    out.push_back({"phi_h",
                   {{"kind", "phi-h"},
                    {"p", 2.0},
                    {"arc", {{"center", 0.0}, {"length", 0.5}}},
                    {"h", {0.125, 0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625, 0.001953125, 0.0009765625}},
                    {"points", {{{"re", -1.0}, {"im", 0.0}}, {{"re", 0.0}, {"im", 1.0}}, {{"re", 0.5}, {"im", 0.0}},
                                {{"re", 1.0}, {"im", 0.0}}, {{"re", std::cos(0.1)}, {"im", std::sin(0.1)}},
                                {{"re", std::cos(0.25)}, {"im", std::sin(0.25)}}}},
                    {"grid", {{"rings", 16}, {"angles", 64}}}}});
    out.push_back({"pw_counterexample",
                   {{"kind", "pw-counterexample"},
                    {"truncation", 1024},
                    {"scan", {{"re", {0.0, 4.0}}, {"im", {-2.0, 2.0}}, {"resolution", {128, 128}}}},
                    {"witness", {{"length", 256}, {"rate", 8}}}}});
    out.push_back({"theorem2_z8",
                   {{"kind", "theorem2"},
                    {"zeros", json::array({{{"re", 0.0}, {"im", 0.0}}, {{"re", 0.0}, {"im", 0.0}}, {{"re", 0.0}, {"im", 0.0}}, {{"re", 0.0}, {"im", 0.0}},
                                           {{"re", 0.0}, {"im", 0.0}}, {{"re", 0.0}, {"im", 0.0}}, {{"re", 0.0}, {"im", 0.0}}, {{"re", 0.0}, {"im", 0.0}}})},
                    {"alpha_angle", 0.0},
                    {"epsilon", 0.05 * kTwoPi / 8.0},
                    {"grid", {{"rings", 64}, {"angles", 512}}},
                    {"delta_list", {0.05, 0.1, 0.2, 0.4}}}});
    out.push_back({"theorem2_two_zeros",
                   {{"kind", "theorem2"},
                    {"zeros", {{{"re", 0.5}, {"im", 0.0}}, {{"re", 0.0}, {"im", -0.3}}}},
                    {"alpha_angle", 0.0},
                    {"grid", {{"rings", 64}, {"angles", 512}}},
                    {"delta_list", {0.05, 0.1, 0.2, 0.4}}}});
    return out;
}

/// Runs every suite config into out_dir/<name>/; returns the worst exit code.
inline int run_suite(const std::filesystem::path& out_dir, const RunOptions& opt) {
    int worst = kOk;
    json index = json::array();
    for (const auto& [name, config] : suite_configs()) {
        log(LogLevel::Info, "suite: " + name);
        std::error_code ec;
        std::filesystem::create_directories(out_dir / name, ec);
        const int code = run_and_write(config, out_dir / name, opt);
        try {
            write_text(out_dir / name / "config.json", config.dump(2) + "\n");
        } catch (const std::exception& e) {
            log(LogLevel::Error, e.what());
            return kOutput;
        }
        index.push_back({{"name", name}, {"kind", config["kind"]}, {"exit_code", code}});
        worst = std::max(worst, code);
    }
    try {
        write_text(out_dir / "suite.json", index.dump(2) + "\n");
    } catch (const std::exception& e) {
        log(LogLevel::Error, e.what());
        return kOutput;
    }
    return worst;
}

}  // namespace rktlab::experiments

#endif  // RKTLAB_EXPERIMENTS_HPP
