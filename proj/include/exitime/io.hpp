#pragma once

// Run configuration and file formats. Every file written here embeds the
// configuration that produced it: CSV files on a leading "# config: " line,
// JSON files under the "config" key.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "exitime/errors.hpp"
#include "exitime/quadrature.hpp"
#include "exitime/random.hpp"
#include "exitime/resonance.hpp"
#include "exitime/stats.hpp"
#include "exitime/transit.hpp"

namespace exitime {

using json = nlohmann::ordered_json;

/// Shortest round-trip decimal form; "nan", "inf", "-inf" otherwise.
[[nodiscard]] inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

[[nodiscard]] inline std::string format_number(std::uint64_t v) { return std::to_string(v); }

struct RunConfig {
    std::string subcommand;
    std::string map = "linear"; ///< linear | diag | shear | henon
    double lambda = 2.0;
    std::vector<double> eigenvalues;
    double k = 0.5;
    double k_min = 0.0;
    double k_max = 0.0;
    std::size_t steps = 1;
    std::size_t n_pixels = kDeskPixels;
    std::uint64_t t_max = kDeskTmax;
    double tol = kDefaultValueTol;
    std::size_t bins = 0;
    std::uint64_t samples = 1000000;
    std::uint64_t seed = kDefaultSeed;
    std::string mode = "stratified"; ///< stratified | random
    std::string out;
    std::string format = "csv"; ///< csv | json
    unsigned jobs = 0;

    bool operator==(const RunConfig&) const = default;
};

[[nodiscard]] inline json to_json(const RunConfig& c) {
    json j;
    j["subcommand"] = c.subcommand;
    j["map"] = c.map;
    j["lambda"] = c.lambda;
    j["eigenvalues"] = c.eigenvalues;
    j["k"] = c.k;
    j["k_min"] = c.k_min;
    j["k_max"] = c.k_max;
    j["steps"] = c.steps;
    j["n_pixels"] = c.n_pixels;
    j["t_max"] = c.t_max;
    j["tol"] = c.tol;
    j["bins"] = c.bins;
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    j["mode"] = c.mode;
    j["out"] = c.out;
    j["format"] = c.format;
    j["jobs"] = c.jobs;
    return j;
}

namespace detail {

template <class T>
void read_field(const json& j, const char* key, T& dst) {
    if (!j.contains(key)) return;
    try {
        j.at(key).get_to(dst);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config field '") + key + "': " + e.what());
    }
}

} // namespace detail

[[nodiscard]] inline RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
    RunConfig c;
    detail::read_field(j, "subcommand", c.subcommand);
    detail::read_field(j, "map", c.map);
    detail::read_field(j, "lambda", c.lambda);
    detail::read_field(j, "eigenvalues", c.eigenvalues);
    detail::read_field(j, "k", c.k);
    detail::read_field(j, "k_min", c.k_min);
    detail::read_field(j, "k_max", c.k_max);
    detail::read_field(j, "steps", c.steps);
    detail::read_field(j, "n_pixels", c.n_pixels);
    detail::read_field(j, "t_max", c.t_max);
    detail::read_field(j, "tol", c.tol);
    detail::read_field(j, "bins", c.bins);
    detail::read_field(j, "samples", c.samples);
    detail::read_field(j, "seed", c.seed);
    detail::read_field(j, "mode", c.mode);
    detail::read_field(j, "out", c.out);
    detail::read_field(j, "format", c.format);
    detail::read_field(j, "jobs", c.jobs);
    return c;
}

/// Checks field ranges; the message names the offending field.
inline void validate(const RunConfig& c) {
    auto fail = [](const std::string& field, const std::string& why) {
        throw InvalidArgument("config field '" + field + "': " + why);
    };
    if (c.format != "csv" && c.format != "json") fail("format", "must be csv or json");
    if (c.mode != "stratified" && c.mode != "random") fail("mode", "must be stratified or random");
    if (c.t_max < 1) fail("t_max", "must be at least 1");
    if (!(c.tol > 0.0)) fail("tol", "must be positive");
    if (c.samples < 1) fail("samples", "must be at least 1");
    if (c.subcommand == "decompose") {
        if (c.map != "linear" && c.map != "diag" && c.map != "shear" && c.map != "henon")
            fail("map", "must be linear, diag, shear or henon");
        if (c.map == "linear" && !(c.lambda > 1.0)) fail("lambda", "must exceed 1");
        if (c.map == "diag" && (c.eigenvalues.size() < 2 || c.eigenvalues.size() > 4))
            fail("eigenvalues", "need 2 to 4 eigenvalues");
    }
    if (c.subcommand == "henon-zone" || (c.subcommand == "decompose" && c.map == "henon")) {
        if (!(c.k >= kZoneMinK && c.k <= kZoneMaxK)) fail("k", "must lie in [-0.8, 5]");
        if (c.n_pixels < 2) fail("n_pixels", "must be at least 2");
    }
    if (c.subcommand == "sweep") {
        if (c.steps < 1) fail("steps", "must be at least 1");
        if (c.k_max < c.k_min) fail("k_max", "must not be below k_min");
        if (c.n_pixels < kMinPanels || c.n_pixels % 2 != 0) fail("n_pixels", "must be even and at least 100");
    }
}

[[nodiscard]] inline SamplingMode sampling_mode(const RunConfig& c) {
    return c.mode == "random" ? SamplingMode::Random : SamplingMode::Stratified;
}

inline constexpr const char* kConfigPrefix = "# config: ";

[[nodiscard]] inline std::string config_comment(const RunConfig& c) {
    return std::string(kConfigPrefix) + to_json(c).dump() + "\n";
}

/// Reads the configuration embedded in a CSV or JSON output.
[[nodiscard]] inline RunConfig read_embedded_config(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    const std::string prefix = kConfigPrefix;
    while (std::getline(in, line))
        if (line.rfind(prefix, 0) == 0) return config_from_json(json::parse(line.substr(prefix.size())));
    const json j = json::parse(text, nullptr, false);
    if (j.is_object() && j.contains("config")) return config_from_json(j.at("config"));
    throw InvalidArgument("no embedded config found");
}

[[nodiscard]] inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path);
    out << text;
}

// ---------------------------------------------------------------------------
// Decomposition and distributions

[[nodiscard]] inline std::string decomposition_csv(const TransitDecomposition& d, const RunConfig& c) {
    std::ostringstream s;
    s << config_comment(c);
    s << "# map: " << d.map_name << "\n";
    s << "# region: " << d.region_name << "\n";
    s << "# t_max: " << d.t_max << "\n";
    s << "# samples: " << d.samples << "\n";
    s << "# seed: " << d.seed << "\n";
    s << "# mode: " << d.mode << "\n";
    s << "# mu_A: " << format_number(d.mu_A) << "\n";
    s << "# mu_I: " << format_number(d.mu_I) << "\n";
    s << "# censored_mass: " << format_number(d.censored_mass) << "\n";
    s << "j,measure,stderr\n";
    for (std::size_t j = 1; j <= d.bins(); ++j)
        s << j << "," << format_number(d.mu(j)) << "," << format_number(d.bin_stderr(j)) << "\n";
    return s.str();
}

/// Parsed rows of a decomposition CSV.
struct DecompositionRows {
    std::vector<std::size_t> j;
    std::vector<double> measure;
    std::vector<double> stderr_;
};

[[nodiscard]] inline DecompositionRows parse_decomposition_csv(const std::string& text) {
    DecompositionRows r;
    std::istringstream in(text);
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "j,measure,stderr") throw InvalidArgument("unexpected decomposition header: " + line);
            header = true;
            continue;
        }
        std::istringstream row(line);
        std::string a, b, c;
        std::getline(row, a, ',');
        std::getline(row, b, ',');
        std::getline(row, c, ',');
        r.j.push_back(std::stoul(a));
        r.measure.push_back(std::stod(b));
        r.stderr_.push_back(std::stod(c));
    }
    return r;
}

[[nodiscard]] inline std::string distributions_csv(const DistributionTable& t, const RunConfig& c) {
    std::ostringstream s;
    s << config_comment(c);
    s << "k,exit_pdf_I,survival_I,exit_pdf_acc,transit_pdf_acc,survival_A\n";
    for (std::size_t k = 1; k <= t.size(); ++k) {
        const std::size_t i = k - 1;
        s << k << "," << format_number(t.exit_pdf_I[i]) << "," << format_number(t.survival_I[i]) << ","
          << format_number(t.exit_pdf_acc[i]) << "," << format_number(t.transit_pdf_acc[i]) << ","
          << format_number(t.survival_A[i]) << "\n";
    }
    return s.str();
}

namespace detail {
inline json estimate_json(double v, double se) {
    json j;
    j["value"] = v;
    j["stderr"] = se;
    return j;
}
inline json maybe_json(const MaybeDivergent& m) {
    json j;
    j["divergent"] = m.divergent;
    if (!m.divergent) {
        j["value"] = m.value;
        j["stderr"] = m.stderr_;
    }
    return j;
}
} // namespace detail

[[nodiscard]] inline json summary_json(const TransitDecomposition& d, const TransportSummary& s) {
    json j;
    j["map"] = d.map_name;
    j["region"] = d.region_name;
    j["t_max"] = d.t_max;
    j["samples"] = d.samples;
    j["seed"] = d.seed;
    j["mode"] = d.mode;
    j["bins"] = d.bins();
    j["mu_A"] = d.mu_A;
    j["mu_I"] = detail::estimate_json(d.mu_I, d.mu_I_stderr());
    j["censored_mass"] = detail::estimate_json(d.censored_mass, d.censored_stderr());
    j["avg_exit_I"] = detail::estimate_json(s.avg_exit_I.value, s.avg_exit_I.stderr_);
    j["mu_A_acc"] = detail::estimate_json(s.mu_A_acc.value, s.mu_A_acc.stderr_);
    j["avg_transit_acc"] = detail::maybe_json(s.avg_transit_acc);
    j["avg_exit_acc"] = detail::maybe_json(s.avg_exit_acc);
    std::size_t first = 0;
    for (std::size_t k = 1; k <= d.bins(); ++k)
        if (d.mu(k) > 0.0) {
            first = k;
            break;
        }
    j["first_nonzero_bin"] = first;
    return j;
}

/// Dumps JSON with a fixed indent and a trailing newline.
[[nodiscard]] inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Zone

[[nodiscard]] inline std::string zone_csv(const ResonanceZone& z, const RunConfig& c) {
    std::ostringstream s;
    s << config_comment(c);
    s << "x,y,which_manifold,iterate_depth\n";
    const auto& v = z.boundary.vertices();
    for (std::size_t i = 0; i < v.size(); ++i)
        s << format_number(v[i][0]) << "," << format_number(v[i][1]) << "," << to_string(z.boundary_tags[i].piece)
          << "," << z.boundary_tags[i].depth << "\n";
    return s.str();
}

[[nodiscard]] inline json zone_json(const ResonanceZone& z) {
    auto pt = [](const Point2& p) { return json::array({p[0], p[1]}); };
    auto pair = [](const AreaPair& a) {
        json j;
        j["by_action"] = a.by_action;
        j["by_geometry"] = a.by_geometry;
        j["relative_difference"] = a.relative_difference();
        return j;
    };
    const HomoclinicPair& hp = z.homoclinics;
    json j;
    j["k"] = z.k;
    j["N"] = z.pixels;
    j["h"] = z.h;
    j["epsilon"] = z.epsilon;
    j["saddle"] = pt(z.saddle);
    j["elliptic"] = pt(z.elliptic);
    j["z_h"] = pt(hp.z_h);
    j["z_m"] = pt(hp.z_m);
    j["u_h"] = hp.u_h;
    j["u_m"] = hp.u_m;
    j["action_h"] = hp.action_h;
    j["action_m"] = hp.action_m;
    j["minimax"] = hp.minimax_label();
    j["lobe_area"] = pair(lobe_area(z));
    j["resonance_area"] = pair(resonance_area(z));
    const auto approx = approx_inaccessible(z.k);
    j["approx_inaccessible"] = approx ? json(*approx) : json(nullptr);
    j["boundary_vertices"] = z.boundary.size();
    j["lobe_x_range"] = json::array({z.x_lo, z.x_hi});
    return j;
}

// ---------------------------------------------------------------------------
// Sweep

inline constexpr const char* kSweepHeader =
    "k,mu_A,mu_I,avg_exit_I,mu_A_acc,mu_A_i,acc_frac,inacc_frac,censored_frac,N,t_max,seconds,status";

[[nodiscard]] inline std::string sanitize_field(std::string s) {
    for (char& ch : s)
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    return s;
}

[[nodiscard]] inline std::string sweep_csv(const std::vector<SweepRow>& rows, const RunConfig& c) {
    std::ostringstream s;
    s << config_comment(c);
    s << kSweepHeader << "\n";
    for (const auto& r : rows) {
        s << format_number(r.k) << "," << format_number(r.mu_A) << "," << format_number(r.mu_I) << ","
          << format_number(r.avg_exit_I) << "," << format_number(r.mu_A_acc) << "," << format_number(r.mu_A_i) << ","
          << format_number(r.acc_frac) << "," << format_number(r.inacc_frac) << ","
          << format_number(r.censored_frac) << "," << r.N << "," << r.t_max << "," << format_number(r.seconds)
          << "," << sanitize_field(r.status) << "\n";
    }
    return s.str();
}

[[nodiscard]] inline json sweep_json(const std::vector<SweepRow>& rows, const RunConfig& c) {
    json j;
    j["config"] = to_json(c);
    json arr = json::array();
    for (const auto& r : rows) {
        json o;
        o["k"] = r.k;
        o["mu_A"] = r.mu_A;
        o["mu_I"] = r.mu_I;
        o["avg_exit_I"] = r.avg_exit_I;
        o["avg_exit_I_stderr"] = r.avg_exit_I_stderr;
        o["mu_A_acc"] = r.mu_A_acc;
        o["mu_A_i"] = r.mu_A_i;
        o["acc_frac"] = r.acc_frac;
        o["inacc_frac"] = r.inacc_frac;
        o["censored_frac"] = r.censored_frac;
        o["N"] = r.N;
        o["t_max"] = r.t_max;
        o["seconds"] = r.seconds;
        o["status"] = r.status;
        arr.push_back(o);
    }
    j["rows"] = arr;
    return j;
}

} // namespace exitime
