#pragma once

// Subcommands of the command-line tool. Each returns the files it would
// write (path and contents) plus a short human-readable report, so callers
// decide whether to touch the filesystem.

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "exitime/analytic.hpp"
#include "exitime/io.hpp"
#include "exitime/maps.hpp"
#include "exitime/quadrature.hpp"
#include "exitime/resonance.hpp"
#include "exitime/stats.hpp"
#include "exitime/transit.hpp"
#include "exitime/verify.hpp"

namespace exitime {

struct OutputFile {
    std::string path;
    std::string contents;
};

struct CommandOutput {
    std::vector<OutputFile> files;
    std::string report;
    int status = 0;

    void write_all() const {
        for (const auto& f : files) write_file(f.path, f.contents);
    }
};

[[nodiscard]] inline std::string default_output(const RunConfig& c, const std::string& stem) {
    if (!c.out.empty()) return c.out;
    return stem + (c.format == "json" ? ".json" : ".csv");
}

[[nodiscard]] inline CommandOutput cmd_verify(const VerifyFormulas& formulas = {}, const VerifyOptions& opt = {}) {
    const VerifyReport rep = run_verification(formulas, opt);
    std::ostringstream s;
    s << rep;
    return {{}, s.str(), rep.exit_status()};
}

// ---------------------------------------------------------------------------
// decompose

namespace detail {

template <PhaseMap M, class R>
TransitDecomposition decompose_with(const M& map, const R& region, const AxisBox<M::dimension>& box,
                                    const RunConfig& c, double mu_A, std::string map_name, std::string region_name) {
    const BoxSampler<M::dimension> sampler(box, c.samples, sampling_mode(c), c.seed);
    DecompositionOptions o;
    o.t_max = c.t_max;
    o.bins = c.bins;
    o.mu_A = mu_A;
    o.jobs = c.jobs;
    o.map_name = std::move(map_name);
    o.region_name = std::move(region_name);
    return estimate_decomposition(map, region, sampler, o);
}

template <std::size_t N>
TransitDecomposition decompose_diag(const RunConfig& c) {
    std::array<double, N> eig{};
    for (std::size_t i = 0; i < N; ++i) eig[i] = c.eigenvalues[i];
    const DiagHyperbolic<N> map(eig);
    std::string name = "diag(";
    for (std::size_t i = 0; i < N; ++i) name += (i ? "," : "") + format_number(eig[i]);
    name += ")";
    return decompose_with(map, AxisBox<N>::unit(), AxisBox<N>::unit(), c, 1.0, name, "unit cube");
}

} // namespace detail

[[nodiscard]] inline TransitDecomposition run_decomposition(const RunConfig& c) {
    validate(c);
    if (c.map == "linear") {
        const Linear2D map(c.lambda);
        const AxisBox<2> entry_box{{0.0, 1.0 / c.lambda}, {1.0, 1.0}};
        return detail::decompose_with(map, AxisBox<2>::unit(), entry_box, c, 1.0,
                                      "linear(" + format_number(c.lambda) + ")", "unit square");
    }
    if (c.map == "shear") {
        return detail::decompose_with(Shear{}, AxisBox<2>::unit(), AxisBox<2>::unit(), c, 1.0, "shear",
                                      "unit square");
    }
    if (c.map == "diag") {
        switch (c.eigenvalues.size()) {
        case 2: return detail::decompose_diag<2>(c);
        case 3: return detail::decompose_diag<3>(c);
        default: return detail::decompose_diag<4>(c);
        }
    }
    const ResonanceZone zone = build_zone(c.k, c.n_pixels);
    const Polygon lobe(zone.lobe_polygon());
    return detail::decompose_with(zone.map(), zone, lobe.bounding_box(), c, resonance_area(zone).by_action,
                                  "henon(" + format_number(c.k) + ")", "resonance zone");
}

[[nodiscard]] inline CommandOutput cmd_decompose(const RunConfig& c) {
    const TransitDecomposition d = run_decomposition(c);
    const TransportSummary s = summarize(d);
    const DistributionTable t = distributions(d);
    const std::string out = default_output(c, "decomposition");
    CommandOutput res;
    if (c.format == "json") {
        json j;
        j["config"] = to_json(c);
        json rows = json::array();
        for (std::size_t k = 1; k <= d.bins(); ++k) rows.push_back(json::array({k, d.mu(k), d.bin_stderr(k)}));
        j["columns"] = json::array({"j", "measure", "stderr"});
        j["decomposition"] = rows;
        j["summary"] = summary_json(d, s);
        res.files.push_back({out, dump(j)});
    } else {
        json sj;
        sj["config"] = to_json(c);
        sj["summary"] = summary_json(d, s);
        res.files.push_back({out, decomposition_csv(d, c)});
        res.files.push_back({out + ".summary.json", dump(sj)});
        res.files.push_back({out + ".distributions.csv", distributions_csv(t, c)});
    }
    std::ostringstream r;
    r << d.map_name << " on " << d.region_name << ": mu(I) = " << d.mu_I << " +- " << d.mu_I_stderr()
      << ", <t+>_I = " << s.avg_exit_I.value << " +- " << s.avg_exit_I.stderr_ << ", mu(A_acc) = " << s.mu_A_acc.value
      << " +- " << s.mu_A_acc.stderr_ << ", censored " << d.censored_mass << "\n";
    res.report = r.str();
    return res;
}

// ---------------------------------------------------------------------------
// henon-zone

[[nodiscard]] inline CommandOutput cmd_henon_zone(const RunConfig& c) {
    validate(c);
    const ResonanceZone z = build_zone(c.k, c.n_pixels);
    const std::string out = default_output(c, "zone");
    CommandOutput res;
    json summary = zone_json(z);
    if (c.format == "json") {
        json j;
        j["config"] = to_json(c);
        j["summary"] = summary;
        json verts = json::array();
        const auto& v = z.boundary.vertices();
        for (std::size_t i = 0; i < v.size(); ++i)
            verts.push_back(json::array({v[i][0], v[i][1], to_string(z.boundary_tags[i].piece), z.boundary_tags[i].depth}));
        j["columns"] = json::array({"x", "y", "which_manifold", "iterate_depth"});
        j["boundary"] = verts;
        res.files.push_back({out, dump(j)});
    } else {
        json j;
        j["config"] = to_json(c);
        j["summary"] = summary;
        res.files.push_back({out, zone_csv(z, c)});
        res.files.push_back({out + ".summary.json", dump(j)});
    }
    const AreaPair la = lobe_area(z);
    const AreaPair ra = resonance_area(z);
    std::ostringstream r;
    r.precision(10);
    r << "k = " << z.k << ": z_h = (" << z.homoclinics.z_h[0] << ", " << z.homoclinics.z_h[1] << "), z_m = ("
      << z.homoclinics.z_m[0] << ", " << z.homoclinics.z_m[1] << ")\n"
      << "  lobe area " << la.by_action << " (action), " << la.by_geometry << " (shoelace)\n"
      << "  zone area " << ra.by_action << " (action), " << ra.by_geometry << " (shoelace)\n"
      << "  " << z.boundary.size() << " boundary vertices\n";
    res.report = r.str();
    return res;
}

// ---------------------------------------------------------------------------
// sweep

[[nodiscard]] inline std::vector<double> sweep_values(const RunConfig& c) {
    std::vector<double> ks;
    if (c.steps <= 1) return {c.k_min};
    for (std::size_t i = 0; i < c.steps; ++i)
        ks.push_back(c.k_min + (c.k_max - c.k_min) * static_cast<double>(i) / static_cast<double>(c.steps - 1));
    return ks;
}

[[nodiscard]] inline CommandOutput cmd_sweep(const RunConfig& c) {
    validate(c);
    QuadratureOptions q;
    q.value_tol = c.tol;
    q.seed = c.seed;
    q.jobs = c.jobs;
    const std::vector<SweepRow> rows = sweep(sweep_values(c), c.n_pixels, c.t_max, q);
    const std::string out = default_output(c, "sweep");
    CommandOutput res;
    res.files.push_back({out, c.format == "json" ? dump(sweep_json(rows, c)) : sweep_csv(rows, c)});
    std::ostringstream r;
    for (const auto& row : rows) {
        r << "k = " << row.k << ": ";
        if (!row.ok()) {
            r << row.status << "\n";
            continue;
        }
        r << "mu(A) = " << row.mu_A << ", <t+>_I = " << row.avg_exit_I << ", mu(A_i) = " << row.mu_A_i;
        if (const auto a = approx_inaccessible(row.k)) r << " (approximation " << *a << ")";
        r << ", " << row.status << "\n";
    }
    res.report = r.str();
    return res;
}

[[nodiscard]] inline CommandOutput run_command(const RunConfig& c) {
    if (c.subcommand == "verify") {
        VerifyOptions o;
        o.seed = c.seed;
        o.jobs = c.jobs;
        return cmd_verify({}, o);
    }
    if (c.subcommand == "decompose") return cmd_decompose(c);
    if (c.subcommand == "henon-zone") return cmd_henon_zone(c);
    if (c.subcommand == "sweep") return cmd_sweep(c);
    throw InvalidArgument("unknown subcommand '" + c.subcommand + "'");
}

} // namespace exitime
