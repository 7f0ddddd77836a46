// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "exitime/analytic.hpp"
#include "exitime/geometry.hpp"
#include "exitime/maps.hpp"
#include "exitime/quadrature.hpp"
#include "exitime/resonance.hpp"
#include "exitime/stats.hpp"
#include "exitime/transit.hpp"

using namespace exitime;

namespace {

struct Outcome {
    bool ok = true;
    std::ostringstream detail;

    void check(bool c, const std::string& what) {
        if (!c) {
            ok = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

const AxisBox<2> kUnit = AxisBox<2>::unit();

const ResonanceZone& zone(double k) {
    static std::map<double, ResonanceZone> cache;
    auto it = cache.find(k);
    if (it == cache.end()) it = cache.emplace(k, build_zone(k, kDeskPixels)).first;
    return it->second;
}

// ---------------------------------------------------------------------------

void linear_oracle(Outcome& o) {
    for (double lam : {1.5, 2.0, 4.0}) {
        const Linear2D map(lam);
        const AxisBox<2> I_box{{0.0, 1.0 / lam}, {1.0, 1.0}};
        const BoxSampler<2> s(I_box, 1000000, SamplingMode::Stratified, kDefaultSeed);
        DecompositionOptions opt;
        opt.t_max = 100000;
        const auto d = estimate_decomposition(map, kUnit, s, opt);
        // plug-in standard error, floored by the one at the expected count
        // so that empty bins are not given zero width
        double worst = 0.0, worst_expected = 0.0;
        for (std::size_t j = 1; j <= 12; ++j) {
            const double e = analytic::linear_Tj(lam, j);
            const double se_e = d.expected_bin_stderr(e);
            worst = std::max(worst, std::abs(d.mu(j) - e) / std::max(d.bin_stderr(j), se_e));
            worst_expected = std::max(worst_expected, std::abs(d.mu(j) - e) / se_e);
        }
        const auto sm = summarize(d);
        const auto exact = analytic::linear_average_times(lam);
        const double r1 = std::abs(sm.avg_exit_I.value / exact.avg_exit_I - 1.0);
        const double r2 = sm.avg_transit_acc.divergent ? INFINITY
                                                       : std::abs(sm.avg_transit_acc.value / exact.avg_transit_A - 1.0);
        o.check(worst <= 3.0, "bins at lambda " + std::to_string(lam));
        o.check(r1 <= 0.005 && r2 <= 0.005, "averages at lambda " + std::to_string(lam));
        o.detail << "lambda " << lam << ": max |z| " << worst << " (" << worst_expected
                 << " against the expected-count error alone), <t+>_I " << sm.avg_exit_I.value << " ("
                 << exact.avg_exit_I << "), <t_transit> " << sm.avg_transit_acc.value << " (" << exact.avg_transit_A
                 << "); ";
    }
}

void shear_oracle(Outcome& o) {
    const BoxSampler<2> s(kUnit, 1000000, SamplingMode::Random, kDefaultSeed);
    DecompositionOptions opt;
    opt.t_max = 100000;
    opt.bins = 10;
    const auto d = estimate_decomposition(Shear{}, kUnit, s, opt);
    const double z1 = std::abs(d.mu(1) - 0.25) / d.expected_bin_stderr(0.25);
    const double z5 = std::abs(d.mu(5) - 1.0 / 120.0) / d.expected_bin_stderr(1.0 / 120.0);
    o.check(z1 <= 3.0 && z5 <= 3.0, "sampled bins");
    o.detail << "mu(T_1) " << d.mu(1) << " (|z| " << z1 << "), mu(T_5) " << d.mu(5) << " (|z| " << z5 << "); ";

    const auto s0 = analytic::shear_partial_sum(0, 1000000);
    o.check(std::abs(s0.value - 0.5) <= 1e-6, "sum mu(T_j)");
    o.detail << "sum to 1e6 " << s0.value << "; ";
    double worst = 0.0;
    for (std::size_t J = 100; J <= 1000000; J *= 10) {
        const double deficit = 1.0 - analytic::shear_partial_sum(1, J).value;
        o.check(deficit >= 0.0 && deficit <= 1.1 / static_cast<double>(J), "deficit at J=" + std::to_string(J));
        worst = std::max(worst, deficit * static_cast<double>(J));
    }
    o.detail << "max J * deficit " << worst << "; ";
    double prev = analytic::shear_partial_sum(2, 10).value;
    double least = INFINITY;
    for (std::size_t J = 100; J <= 1000000; J *= 10) {
        const double v = analytic::shear_partial_sum(2, J).value;
        least = std::min(least, v - prev);
        prev = v;
    }
    o.check(least >= 0.6, "second moment increments");
    const auto sm = summarize(analytic::shear_decomposition().tabulate(1000000));
    o.check(sm.avg_transit_acc.divergent, "divergence flag");
    o.detail << "smallest increment per decade " << least << ", divergent " << sm.avg_transit_acc.divergent;
}

void lemma_crosscheck(Outcome& o) {
    const auto& z = zone(0.5);
    const auto q = average_exit_over_lobe(z, kDeskPixels, kDeskTmax);
    const double mu_I = lobe_area(z).by_action;
    const double acc = mu_I * q.avg_exit_I;
    const double acc_se = mu_I * q.stderr_;
    const BoxSampler<2> s(z.boundary.bounding_box(), 1000000, SamplingMode::Random, kDefaultSeed);
    const auto flood = estimate_accessible_measure(z.map(), z, s, kDeskTmax);
    const double se = std::hypot(acc_se, flood.stderr_);
    o.check(std::abs(acc - flood.value) <= 3.0 * se, "accessible measure");
    o.detail << "<t+>_I " << q.avg_exit_I << " +- " << q.stderr_ << ", mu(I) <t+>_I " << acc << " +- " << acc_se
             << ", flood " << flood.value << " +- " << flood.stderr_ << " (" << std::abs(acc - flood.value) / se
             << " sigma)";
}

void kac(Outcome& o) {
    const CatMap cat;
    for (double side : {0.5, std::sqrt(0.1)}) {
        AxisBox<2> A{{0.0, 0.0}, {side, side}};
        A.closure = Closure::HalfOpen;
        const BoxSampler<2> a_s(A, 100000, SamplingMode::Random, kDefaultSeed);
        const BoxSampler<2> m_s(kUnit, 10000, SamplingMode::Random, kDefaultSeed + 1);
        const auto r = kac_check(cat, A, kUnit, a_s, m_s, 100000);
        const double expect = 1.0 / (side * side);
        o.check(std::abs(r.avg_return.value - expect) <= 0.05 * expect, "mean return");
        o.detail << "mu(A) " << side * side << ": " << r.avg_return.value << " (" << expect << "); ";
    }
}

void henon_structure(Outcome& o) {
    double worst = 0.0;
    auto track = [&](double v) { worst = std::max(worst, v); };
    auto dist = [](const Point2& a, const Point2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); };
    for (double k : {-0.5, 0.0, 0.25, 0.5, 1.0, 1.25, 1.6, 2.0, 4.0}) {
        const Henon h(k);
        const auto f = henon_fixed_points({k});
        track(std::abs(f.saddle[0] - (1.0 + std::sqrt(1.0 + k))));
        track(std::abs(f.elliptic[0] - (1.0 - std::sqrt(1.0 + k))));
        track(dist(h.forward(f.saddle), f.saddle));
        track(dist(h.forward(f.elliptic), f.elliptic));
    }
    {
        const Henon h(0.25);
        const Point2 p0{0.5, 0.5};
        Point2 p = p0;
        for (int n = 0; n < 4; ++n) {
            p = h.forward(p);
            track(std::abs(std::abs(p[0]) - 0.5));
            track(std::abs(std::abs(p[1]) - 0.5));
        }
        track(dist(p, p0));
        o.check(dist(h.forward(h.forward(p0)), p0) > 0.1, "period 4 is minimal");
    }
    {
        const Henon h(1.6);
        const double b = std::sqrt(0.6);
        const Point2 z0{-b, b};
        const Point2 z1 = h.forward(z0);
        const Point2 z2 = h.forward(z1);
        track(dist(z1, {-1.0 + b, b}));
        track(dist(z2, {-b, 1.0 - b}));
        track(dist(h.forward(z2), z0));
    }
    {
        const Henon h(1.25);
        const Point2 a = h.forward({0.5, -0.5});
        const Point2 b = h.forward(a);
        track(dist(a, {-1.5, -0.5}));
        track(dist(b, {0.5, 1.5}));
        track(dist(h.forward(b), {0.5, -0.5}));
    }
    o.check(worst < 1e-12, "residuals");
    o.detail << "largest residual " << worst;
}

void areas(Outcome& o) {
    double prev_lobe = 0.0, prev_zone = 0.0, prev_lobe_g = 0.0, prev_zone_g = 0.0;
    for (double k : {0.5, 1.0, 1.6}) {
        const auto& z = zone(k);
        const auto la = lobe_area(z);
        const auto ra = resonance_area(z);
        o.check(la.relative_difference() < 0.005 && ra.relative_difference() < 0.005, "agreement at k " + std::to_string(k));
        o.check(la.by_action > prev_lobe && ra.by_action > prev_zone && la.by_geometry > prev_lobe_g &&
                    ra.by_geometry > prev_zone_g,
                "monotone at k " + std::to_string(k));
        prev_lobe = la.by_action;
        prev_zone = ra.by_action;
        prev_lobe_g = la.by_geometry;
        prev_zone_g = ra.by_geometry;
        o.detail << "k " << k << ": lobe " << la.by_action << "/" << la.by_geometry << ", zone " << ra.by_action << "/"
                 << ra.by_geometry << "; ";
    }
}

void bounded_measure(Outcome& o) {
    for (double k : {0.3, 1.6}) {
        const auto r = sweep_row(k, kDeskPixels, kDeskTmax, QuadratureOptions{});
        const double approx = k < 1.0 ? 4.0 * k : 0.5 * std::pow(2.0 * std::sqrt(k - 1.0) - 1.0, 2);
        o.check(r.ok(), "row status at k " + std::to_string(k));
        o.check(std::abs(r.mu_A_i - approx) <= 0.2 * approx, "mu(A_i) at k " + std::to_string(k));
        o.detail << "k " << k << ": mu(A_i) " << r.mu_A_i << " vs " << approx << " ("
                 << 100.0 * (r.mu_A_i / approx - 1.0) << "%); ";
    }
}

void self_consistency(Outcome& o) {
    const auto& z = zone(0.5);
    QuadratureOptions coarse;
    coarse.value_tol = kDefaultValueTol;
    QuadratureOptions fine;
    fine.value_tol = kDefaultValueTol / 2.0;
    const auto a = average_exit_over_lobe(z, kDeskPixels, kDeskTmax, coarse);
    const ResonanceZone z2 = build_zone(0.5, 2 * kDeskPixels);
    const auto b = average_exit_over_lobe(z2, 2 * kDeskPixels, kDeskTmax, fine);
    const double change = std::abs(b.avg_exit_I / a.avg_exit_I - 1.0);
    o.check(change < 0.02, "refinement");
    o.detail << "<t+>_I " << a.avg_exit_I << " -> " << b.avg_exit_I << " (" << 100.0 * change << "%); ";
    const auto c4 = average_exit_over_lobe(z, kDeskPixels, 10000, coarse);
    o.check(a.censored_fraction <= c4.censored_fraction, "censoring");
    o.detail << "censored fraction " << c4.censored_fraction << " at t_max 1e4, " << a.censored_fraction
             << " at 1e5";
}

template <PhaseMap M, class R>
double balance_sigma(const M& map, const R& region, const AxisBox<2>& box, std::uint64_t n) {
    const auto I = estimate_measure(EntrySet<M, R>{&map, &region}, BoxSampler<2>(box, n, SamplingMode::Random, 101));
    const auto E = estimate_measure(ExitSet<M, R>{&map, &region}, BoxSampler<2>(box, n, SamplingMode::Random, 202));
    return std::abs(I.value - E.value) / std::hypot(I.stderr_, E.stderr_);
}

void property_suite(Outcome& o) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto& z = zone(0.5);
    const Henon h = z.map();

    // transit time is constant along orbits
    {
        const Linear2D lin(2.0);
        const Shear sh;
        std::size_t checked = 0, bad = 0;
        for (int i = 0; i < 2000; ++i) {
            const Point2 p{u(rng), u(rng)};
            for (int m = 0; m < 2; ++m) {
                const auto rec = m == 0 ? transit_record(lin, p, kUnit, 10000) : transit_record(sh, p, kUnit, 10000);
                if (rec.t_plus.value() < 2 || rec.t_transit.is_censored()) continue;
                const Point2 q = m == 0 ? lin.forward(p) : sh.forward(p);
                const auto next = m == 0 ? transit_record(lin, q, kUnit, 10000) : transit_record(sh, q, kUnit, 10000);
                bad += rec.t_transit == next.t_transit ? 0 : 1;
                ++checked;
            }
        }
        const Polygon lobe(z.lobe_polygon());
        const auto& bb = lobe.bounding_box();
        std::size_t hen = 0;
        while (hen < 500) {
            const Point2 p{bb.lo[0] + (bb.hi[0] - bb.lo[0]) * u(rng), bb.lo[1] + (bb.hi[1] - bb.lo[1]) * u(rng)};
            if (!z.contains(p)) continue;
            const auto rec = transit_record(h, p, z, kDeskTmax);
            if (rec.t_transit.is_censored() || rec.t_plus.value() < 2 || rec.t_transit.value() > 40) continue;
            bad += rec.t_transit == transit_record(h, h.forward(p), z, kDeskTmax).t_transit ? 0 : 1;
            ++hen;
        }
        o.check(bad == 0, "orbit invariance");
        o.detail << "invariance " << checked + hen << " orbits; ";
    }

    // exit/transit identity and survival monotonicity on arbitrary tables
    {
        double worst = 0.0;
        bool monotone = true;
        for (std::uint64_t n = 0; n < 200; ++n) {
            std::vector<double> m(1 + n % 40);
            double mu_I = 0.0;
            for (std::size_t j = 0; j < m.size(); ++j) mu_I += m[j] = uniform_at(3, n, j) * std::pow(0.9, double(j));
            const auto d = TransitDecomposition::from_measures(m, mu_I, 1.0);
            const auto s = summarize(d);
            worst = std::max(worst, std::abs(s.avg_exit_acc.value - 0.5 * (s.avg_transit_acc.value + 1.0)));
            const auto t = distributions(d);
            for (std::size_t k = 1; k < t.size(); ++k)
                monotone = monotone && t.survival_I[k] <= t.survival_I[k - 1] && t.survival_A[k] <= t.survival_A[k - 1];
        }
        o.check(worst < 1e-12, "exit/transit identity");
        o.check(monotone, "survival monotone");
        o.detail << "identity residual " << worst << "; ";
    }

    // partial sums of j mu(T_j) never exceed mu(A)
    {
        const BoxSampler<2> s(kUnit, 1000000, SamplingMode::Random, 23);
        DecompositionOptions opt;
        opt.t_max = 100000;
        const auto d = estimate_decomposition(Shear{}, kUnit, s, opt);
        const auto t = distributions(d);
        bool ok = true;
        double partial = 0.0;
        for (std::size_t j = 1; j <= d.bins(); ++j) {
            partial += static_cast<double>(j) * d.mu(j);
            const double se = d.stderr_of([J = j](std::size_t i) { return i <= J ? double(i) : 0.0; });
            ok = ok && partial <= 1.0 + 3.0 * se;
        }
        for (std::size_t k = 1; k < t.size(); ++k) ok = ok && t.survival_I[k] <= t.survival_I[k - 1];
        o.check(ok, "partial-sum bound");
        o.detail << "shear partial sum " << partial << "; ";
    }

    // reversor identity
    {
        double worst = 0.0;
        for (double k : {-0.5, 0.0, 0.5, 1.6, 4.0}) {
            const Henon hk(k);
            for (int i = 0; i < 100; ++i) {
                const Point2 p{-3.0 + 6.0 * u(rng), -3.0 + 6.0 * u(rng)};
                const Point2 a = henon_reversor(hk.forward(henon_reversor(p)));
                const Point2 b = hk.inverse(p);
                worst = std::max(worst, std::hypot(a[0] - b[0], a[1] - b[1]) / (1.0 + std::hypot(b[0], b[1])));
            }
        }
        o.check(worst < 1e-14, "reversor");
        o.detail << "RHR vs inverse " << worst << "; ";
    }

    // turnstile balance
    {
        const double s1 = balance_sigma(Linear2D(2.0), kUnit, kUnit, 400000);
        const double s2 = balance_sigma(Shear{}, kUnit, kUnit, 400000);
        const double s3 = balance_sigma(h, z, z.boundary.bounding_box(), 400000);
        o.check(s1 <= 3.0 && s2 <= 3.0 && s3 <= 3.0, "turnstile balance");
        o.detail << "mu(E) - mu(I) in sigma: " << s1 << ", " << s2 << ", " << s3;
    }
}

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<void(Outcome&)> run;
};

} // namespace

int main() {
    const std::vector<Criterion> all = {
        {1, "linear hyperbolic oracle", 30.0, linear_oracle},
        {2, "shear oracle", 10.0, shear_oracle},
        {3, "averaging lemma against forward flood", 600.0, lemma_crosscheck},
        {4, "Kac return time on the cat map", 60.0, kac},
        {5, "Henon fixed points and periodic orbits", 60.0, henon_structure},
        {6, "lobe and zone areas by action and geometry", 600.0, areas},
        {7, "bounded-orbit measure against approximations", 600.0, bounded_measure},
        {8, "quadrature self-consistency", 600.0, self_consistency},
        {9, "property suite", 300.0, property_suite},
    };
    int failed = 0;
    for (const auto& c : all) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail << "exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_seconds) {
            o.ok = false;
            o.detail << " [over time budget " << c.budget_seconds << " s]";
        }
        failed += o.ok ? 0 : 1;
        std::printf("%s criterion %d (%s), %.1f s: %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                    o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
