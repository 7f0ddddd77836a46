#pragma once

// Quadrature of the piecewise-constant exit-time field over the incoming
// lobe. Each vertical fiber x = const of the lobe is scanned on a uniform
// grid, discontinuities of t+ are located by bisection, and the fiber
// integrals T(x) are combined with Simpson's rule.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "exitime/errors.hpp"
#include "exitime/parallel.hpp"
#include "exitime/random.hpp"
#include "exitime/resonance.hpp"
#include "exitime/transit.hpp"

namespace exitime {

/// Bisection depth cap for locating a discontinuity of t+.
inline constexpr int kMaxBisectionDepth = 40;
/// Default relative error accepted when neglecting variation of t+.
inline constexpr double kDefaultValueTol = 1e-3;
/// Evaluation points are moved this fraction of a grid step off the fiber ends.
inline constexpr double kEndpointNudge = 1e-4;
/// Censored share of the lobe above which a result is flagged as mostly trapped.
inline constexpr double kMostlyTrappedFraction = 0.5;
inline constexpr std::size_t kMinPanels = 100;

/// Exit times along one fiber of the lobe, as constant pieces.
struct ExitTimeProfile {
    double x = 0.0;
    std::vector<double> breakpoints;    ///< pieces + 1 values, lower end to upper end
    std::vector<std::uint64_t> times;   ///< t+ on each piece (t_max when censored)
    std::vector<char> censored;
    double integral = 0.0;              ///< T(x) over non-censored pieces
    double censored_length = 0.0;
    double error = 0.0;                 ///< length x time jump of unresolved pieces, halved
    std::size_t evaluations = 0;
    std::size_t unresolved = 0;
    /// Residual correction: sum over grid cells of dy (t(y*) - P(y*)) at one
    /// jittered point y* per cell, P the piecewise reconstruction above.
    double correction = 0.0;
    double censored_correction = 0.0;
    double correction_var = 0.0; ///< sum of squared cell residuals, a variance bound

    [[nodiscard]] double corrected_integral() const noexcept { return integral + correction; }
    [[nodiscard]] double corrected_censored_length() const noexcept { return censored_length + censored_correction; }
    /// Piecewise value at y, with censored pieces as 0 (the flag goes to `censored_out`).
    [[nodiscard]] double value_at(double y, bool& censored_out) const noexcept {
        auto it = std::upper_bound(breakpoints.begin() + 1, breakpoints.end() - 1, y);
        const auto i = static_cast<std::size_t>(it - (breakpoints.begin() + 1));
        censored_out = censored[i] != 0;
        return censored_out ? 0.0 : static_cast<double>(times[i]);
    }
    [[nodiscard]] std::size_t pieces() const noexcept { return times.size(); }
    [[nodiscard]] double width() const noexcept {
        return breakpoints.empty() ? 0.0 : breakpoints.back() - breakpoints.front();
    }
    /// Smallest finite exit time on the fiber, 0 if none.
    [[nodiscard]] std::uint64_t min_exit_time() const noexcept {
        std::uint64_t m = 0;
        for (std::size_t i = 0; i < times.size(); ++i)
            if (!censored[i] && (m == 0 || times[i] < m)) m = times[i];
        return m;
    }
};

/// Anything with fiber(x) -> (lower, upper) and an exit time evaluator.
template <class F>
concept FiberField = requires(const F& f, double x, double y, std::uint64_t t) {
    { f.fiber(x) } -> std::convertible_to<std::pair<double, double>>;
    { f.exit_time(x, y, t) } -> std::convertible_to<TimeValue>;
    { f.x_range() } -> std::convertible_to<std::pair<double, double>>;
};

/// Exit-time field of the incoming lobe of a resonance zone.
class LobeField {
public:
    explicit LobeField(const ResonanceZone& zone) : zone_(&zone), map_(zone.k) {}

    [[nodiscard]] std::pair<double, double> fiber(double x) const noexcept { return zone_->fiber(x); }
    [[nodiscard]] std::pair<double, double> x_range() const noexcept { return {zone_->x_lo, zone_->x_hi}; }
    [[nodiscard]] TimeValue exit_time(double x, double y, std::uint64_t t_max) const {
        return detail::first_passage<true>(map_, Point2{x, y}, NotIn<ResonanceZone>{zone_}, t_max);
    }

private:
    const ResonanceZone* zone_;
    Henon map_;
};

namespace detail {

struct Piece {
    double a, b;
    TimeValue t;
};

inline double time_gap(const TimeValue& p, const TimeValue& q) noexcept {
    const double a = static_cast<double>(p.value());
    const double b = static_cast<double>(q.value());
    return std::abs(a - b);
}

} // namespace detail

struct FiberOptions {
    double value_tol = kDefaultValueTol;
    /// Add the jittered residual correction (off: grid and bisection only).
    bool residual = true;
    std::uint64_t seed = kDefaultSeed;
    std::uint64_t stream = 0; ///< distinguishes fibers sharing a seed
};

/// Scans the fiber at x with grid spacing `step`, bisecting every grid
/// interval whose end values differ until the values agree, the neglected
/// contribution length * |jump| falls below value_tol * T(x), or the depth
/// cap is reached. Unresolved intervals are split at their midpoint.
///
/// Thin bands of long exit time that fall between grid points are invisible
/// to this reconstruction and bias T(x) low. With opt.residual one extra
/// point per grid cell, uniform in the cell, measures the reconstruction's
/// error there; the summed correction makes T(x) unbiased.
template <FiberField F>
[[nodiscard]] ExitTimeProfile fiber_profile(const F& field, double x, double step, std::uint64_t t_max,
                                            const FiberOptions& opt) {
    detail::require_budget(t_max);
    const double value_tol = opt.value_tol;
    if (!(step > 0.0)) throw InvalidArgument("fiber grid step must be positive");
    if (!(value_tol > 0.0)) throw InvalidArgument("value_tol must be positive");
    const auto [xl, xh] = field.x_range();
    if (!(x > xl && x < xh)) throw OutsideLobe("abscissa lies outside the open lobe interval");
    const auto [lo, hi] = field.fiber(x);
    if (!(hi > lo)) throw OutsideLobe("fiber has no interior at this abscissa");

    ExitTimeProfile prof;
    prof.x = x;
    const std::size_t m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) / step)));
    const double dy = (hi - lo) / static_cast<double>(m);
    auto eval = [&](double y) {
        ++prof.evaluations;
        return field.exit_time(x, y, t_max);
    };

    std::vector<double> ys(m + 1);
    std::vector<TimeValue> ts;
    ts.reserve(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        ys[i] = i == m ? hi : lo + dy * static_cast<double>(i);
        double ye = ys[i];
        if (i == 0) ye += kEndpointNudge * dy;
        if (i == m) ye -= kEndpointNudge * dy;
        ts.push_back(eval(ye));
    }

    // scale for the relative criterion, from the grid alone
    double T_est = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double a = ts[i].is_finite() ? static_cast<double>(ts[i].value()) : 0.0;
        const double b = ts[i + 1].is_finite() ? static_cast<double>(ts[i + 1].value()) : 0.0;
        T_est += 0.5 * (a + b) * dy;
    }
    if (!(T_est > 0.0)) T_est = (hi - lo) * static_cast<double>(t_max);
    const double threshold = value_tol * T_est;

    std::vector<detail::Piece> pieces;
    struct Job {
        double a, b;
        TimeValue ta, tb;
        int depth;
    };
    std::vector<Job> stack;
    for (std::size_t i = 0; i < m; ++i) {
        stack.push_back({ys[i], ys[i + 1], ts[i], ts[i + 1], 0});
        while (!stack.empty()) {
            const Job j = stack.back();
            stack.pop_back();
            if (j.ta == j.tb) {
                pieces.push_back({j.a, j.b, j.ta});
                continue;
            }
            const double jump = detail::time_gap(j.ta, j.tb);
            const double mid = 0.5 * (j.a + j.b);
            if (j.depth >= kMaxBisectionDepth || (j.b - j.a) * jump <= threshold || !(mid > j.a && mid < j.b)) {
                pieces.push_back({j.a, mid, j.ta});
                pieces.push_back({mid, j.b, j.tb});
                prof.error += 0.5 * (j.b - j.a) * jump;
                ++prof.unresolved;
                continue;
            }
            const TimeValue tm = eval(mid);
            stack.push_back({mid, j.b, tm, j.tb, j.depth + 1});
            stack.push_back({j.a, mid, j.ta, tm, j.depth + 1});
        }
    }

    // merge equal neighbours
    prof.breakpoints.push_back(pieces.front().a);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const auto& p = pieces[i];
        const bool merge = !prof.times.empty() && prof.times.back() == p.t.value() &&
                           static_cast<bool>(prof.censored.back()) == p.t.is_censored();
        if (merge) {
            prof.breakpoints.back() = p.b;
        } else {
            prof.times.push_back(p.t.value());
            prof.censored.push_back(p.t.is_censored() ? 1 : 0);
            prof.breakpoints.push_back(p.b);
        }
    }
    prof.breakpoints.back() = hi;
    for (std::size_t i = 0; i < prof.times.size(); ++i) {
        const double len = prof.breakpoints[i + 1] - prof.breakpoints[i];
        if (prof.censored[i])
            prof.censored_length += len;
        else
            prof.integral += len * static_cast<double>(prof.times[i]);
    }

    if (opt.residual) {
        for (std::size_t i = 0; i < m; ++i) {
            const double a = ys[i];
            const double b = ys[i + 1];
            const double u = uniform_at(opt.seed, opt.stream, i);
            const double y = std::clamp(a + u * (b - a), lo + kEndpointNudge * dy, hi - kEndpointNudge * dy);
            const TimeValue t = eval(y);
            bool pc = false;
            const double pv = prof.value_at(y, pc);
            const double tv = t.is_finite() ? static_cast<double>(t.value()) : 0.0;
            const double r = (b - a) * (tv - pv);
            prof.correction += r;
            prof.censored_correction += (b - a) * ((t.is_censored() ? 1.0 : 0.0) - (pc ? 1.0 : 0.0));
            prof.correction_var += r * r;
        }
    }
    return prof;
}

template <FiberField F>
[[nodiscard]] ExitTimeProfile fiber_profile(const F& field, double x, double step, std::uint64_t t_max,
                                            double value_tol = kDefaultValueTol) {
    FiberOptions opt;
    opt.value_tol = value_tol;
    return fiber_profile(field, x, step, t_max, opt);
}

/// Fiber of the zone's lobe with the zone's own resolution h.
[[nodiscard]] inline ExitTimeProfile fiber_profile(const ResonanceZone& zone, double x, std::uint64_t t_max,
                                                   double value_tol = kDefaultValueTol) {
    return fiber_profile(LobeField(zone), x, zone.h, t_max, value_tol);
}

struct QuadratureOptions {
    double value_tol = kDefaultValueTol;
    bool residual = true;
    std::uint64_t seed = kDefaultSeed;
    /// Fiber grid step is the panel width divided by this.
    std::size_t oversample = 1;
    unsigned jobs = 0;
};

struct LobeAverage {
    double avg_exit_I = 0.0;        ///< integral of T over mu(I), censored length excluded
    double stderr_ = 0.0;           ///< from the residual samples; 0 without them
    double avg_exit_I_grid = 0.0;   ///< grid and bisection only
    double censored_fraction = 0.0; ///< censored lobe measure over mu(I)
    double integral_T = 0.0;        ///< Simpson integral of T(x)
    double mu_I = 0.0;              ///< Simpson integral of the fiber widths
    double censored_measure = 0.0;
    double error = 0.0;             ///< Simpson integral of the unresolved-jump charge, over mu(I)
    std::uint64_t min_exit_time = 0;
    std::size_t evaluations = 0;
    std::size_t unresolved = 0;
    std::size_t N = 0;
    std::uint64_t t_max = 0;
    double value_tol = 0.0;
    bool residual = false;
    bool mostly_trapped = false;
};

/// Simpson's rule over N panels of the lobe's x range, fibers in parallel.
/// Fiber i draws its residual points from stream i of opt.seed, so the
/// result does not depend on the number of jobs.
template <FiberField F>
[[nodiscard]] LobeAverage average_exit_over_lobe(const F& field, std::size_t N, std::uint64_t t_max,
                                                 const QuadratureOptions& opt) {
    detail::require_budget(t_max);
    if (N < kMinPanels || N % 2 != 0) throw InvalidArgument("Simpson's rule needs an even panel count of at least 100");
    if (opt.oversample < 1) throw InvalidArgument("oversample must be at least 1");
    const auto [xl, xh] = field.x_range();
    const double dx = (xh - xl) / static_cast<double>(N);
    struct Fiber {
        double T = 0.0, T_grid = 0.0, width = 0.0, censored = 0.0, error = 0.0, var = 0.0;
        std::uint64_t min_t = 0;
        std::size_t evals = 0, unresolved = 0;
    };
    std::vector<Fiber> fibers(N + 1);
    parallel_blocks(N + 1, opt.jobs, [&](unsigned, std::uint64_t b, std::uint64_t e) {
        for (std::uint64_t i = b; i < e; ++i) {
            const double x = xl + dx * static_cast<double>(i);
            if (!(x > xl && x < xh)) continue;
            const auto [lo, hi] = field.fiber(x);
            if (!(hi > lo)) continue;
            FiberOptions fo;
            fo.value_tol = opt.value_tol;
            fo.residual = opt.residual;
            fo.seed = opt.seed;
            fo.stream = i;
            const ExitTimeProfile p =
                fiber_profile(field, x, dx / static_cast<double>(opt.oversample), t_max, fo);
            fibers[i] = {p.corrected_integral(), p.integral,  p.width(),       p.corrected_censored_length(),
                         p.error,                p.correction_var, p.min_exit_time(), p.evaluations,
                         p.unresolved};
        }
    });

    LobeAverage r;
    r.N = N;
    r.t_max = t_max;
    r.value_tol = opt.value_tol;
    r.residual = opt.residual;
    double err = 0.0, var = 0.0, grid = 0.0;
    for (std::size_t i = 0; i <= N; ++i) {
        const double w = (i == 0 || i == N) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const Fiber& f = fibers[i];
        r.integral_T += w * f.T;
        grid += w * f.T_grid;
        r.mu_I += w * f.width;
        r.censored_measure += w * f.censored;
        err += w * f.error;
        var += w * w * f.var;
        r.evaluations += f.evals;
        r.unresolved += f.unresolved;
        if (f.min_t != 0 && (r.min_exit_time == 0 || f.min_t < r.min_exit_time)) r.min_exit_time = f.min_t;
    }
    const double c = dx / 3.0;
    r.integral_T *= c;
    grid *= c;
    r.mu_I *= c;
    r.censored_measure = std::max(0.0, r.censored_measure * c);
    err *= c;
    var *= c * c;
    if (!(r.mu_I > 0.0)) throw EmptyEntrySet("lobe has zero measure");
    r.avg_exit_I = r.integral_T / r.mu_I;
    r.avg_exit_I_grid = grid / r.mu_I;
    r.stderr_ = std::sqrt(var) / r.mu_I;
    r.censored_fraction = r.censored_measure / r.mu_I;
    r.error = err / r.mu_I;
    r.mostly_trapped = r.censored_fraction > kMostlyTrappedFraction;
    return r;
}

[[nodiscard]] inline LobeAverage average_exit_over_lobe(const ResonanceZone& zone, std::size_t N, std::uint64_t t_max,
                                                        const QuadratureOptions& opt = {}) {
    return average_exit_over_lobe(LobeField(zone), N, t_max, opt);
}

// ---------------------------------------------------------------------------
// Sweep over k

/// Desk-scale defaults.
inline constexpr std::size_t kDeskPixels = 2000;
inline constexpr std::uint64_t kDeskTmax = 100000;

struct SweepRow {
    double k = 0.0;
    double mu_A = 0.0;
    double mu_I = 0.0;
    double avg_exit_I = 0.0;
    double mu_A_acc = 0.0;
    double mu_A_i = 0.0;
    double acc_frac = 0.0;
    double inacc_frac = 0.0;
    double censored_frac = 0.0;
    double avg_exit_I_stderr = 0.0; ///< not part of the CSV schema
    std::size_t N = 0;
    std::uint64_t t_max = 0;
    double seconds = 0.0;
    std::string status = "ok";

    [[nodiscard]] bool ok() const noexcept { return status == "ok" || status == "mostly_trapped"; }
};

/// One sweep row: zone areas by action, lobe average by quadrature.
[[nodiscard]] inline SweepRow sweep_row(double k, std::size_t N, std::uint64_t t_max, const QuadratureOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepRow row;
    row.k = k;
    row.N = N;
    row.t_max = t_max;
    try {
        const ResonanceZone zone = build_zone(k, N);
        row.mu_A = resonance_area(zone).by_action;
        row.mu_I = lobe_area(zone).by_action;
        const LobeAverage avg = average_exit_over_lobe(zone, N, t_max, opt);
        row.avg_exit_I = avg.avg_exit_I;
        row.avg_exit_I_stderr = avg.stderr_;
        row.mu_A_acc = row.mu_I * row.avg_exit_I;
        row.mu_A_i = row.mu_A - row.mu_A_acc;
        row.acc_frac = row.mu_A_acc / row.mu_A;
        row.inacc_frac = row.mu_A_i / row.mu_A;
        row.censored_frac = avg.censored_fraction;
        if (avg.mostly_trapped) row.status = "mostly_trapped";
    } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

/// Rows in the order of k_values; the k values run concurrently.
[[nodiscard]] inline std::vector<SweepRow> sweep(const std::vector<double>& k_values, std::size_t N,
                                                 std::uint64_t t_max, const QuadratureOptions& opt = {}) {
    const unsigned jobs = opt.jobs == 0 ? default_jobs() : opt.jobs;
    std::vector<SweepRow> rows(k_values.size());
    if (k_values.size() == 1) {
        QuadratureOptions inner = opt;
        inner.jobs = jobs;
        rows[0] = sweep_row(k_values[0], N, t_max, inner);
        return rows;
    }
    QuadratureOptions inner = opt;
    inner.jobs = 1;
    parallel_blocks(k_values.size(), jobs, [&](unsigned, std::uint64_t b, std::uint64_t e) {
        for (std::uint64_t i = b; i < e; ++i) rows[i] = sweep_row(k_values[i], N, t_max, inner);
    });
    return rows;
}

} // namespace exitime
