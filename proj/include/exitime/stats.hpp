#pragma once

// Transport averages and distributions derived from a transit decomposition:
// the average exit time over the entry set, the accessible measure, the
// transit/exit averages over the accessible set, the exit and survival
// tables, power-law tail fits and the Kac return-time check.

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <vector>

#include "exitime/errors.hpp"
#include "exitime/transit.hpp"

namespace exitime {

struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

/// A series average that may fail to exist.
struct MaybeDivergent {
    bool divergent = false;
    double value = std::numeric_limits<double>::quiet_NaN();
    double stderr_ = 0.0;
};

struct TransportSummary {
    Estimate avg_exit_I;             ///< <t+>_I = sum j mu(T_j) / mu(I)
    Estimate mu_A_acc;               ///< sum j mu(T_j)
    MaybeDivergent avg_transit_acc;  ///< sum j^2 mu(T_j) / mu(A_acc)
    MaybeDivergent avg_exit_acc;     ///< sum j(j+1)/2 mu(T_j) / mu(A_acc)
    double censored_mass = 0.0;
    double mu_I = 0.0;
};

namespace detail {

/// Delta-method standard error of X / Y for linear functionals X, Y.
template <class CoefX, class CoefY>
double ratio_stderr(const TransitDecomposition& d, CoefX x, double xc, CoefY y, double yc, double X, double Y) {
    const double R = X / Y;
    const double var = d.covariance(x, xc, x, xc) - 2.0 * R * d.covariance(x, xc, y, yc) +
                       R * R * d.covariance(y, yc, y, yc);
    return std::sqrt(std::max(0.0, var)) / std::abs(Y);
}

inline std::size_t last_nonzero_bin(const TransitDecomposition& d) {
    for (std::size_t j = d.bins(); j >= 1; --j)
        if (d.mu(j) > 0.0) return j;
    return 0;
}

} // namespace detail

/// Minimum table length on which the decade Cauchy test is applied.
inline constexpr std::size_t kDivergenceMinBins = 100;
/// Share of the second moment that may accrue over the last decade of j
/// before the series is declared divergent.
inline constexpr double kDivergenceDecadeShare = 0.10;

/// True when sum j^2 mu(T_j) fails the decade Cauchy test.
[[nodiscard]] inline bool second_moment_divergent(const TransitDecomposition& d) {
    const std::size_t jmax = detail::last_nonzero_bin(d);
    if (jmax < kDivergenceMinBins) return false;
    double total = 0.0, last_decade = 0.0;
    for (std::size_t j = jmax; j >= 1; --j) {
        const double t = static_cast<double>(j) * static_cast<double>(j) * d.mu(j);
        total += t;
        if (j * 10 > jmax) last_decade += t;
    }
    return last_decade > kDivergenceDecadeShare * total;
}

[[nodiscard]] inline TransportSummary summarize(const TransitDecomposition& d) {
    if (!(d.mu_I > 0.0)) throw EmptyEntrySet("entry measure is zero");
    auto one = [](std::size_t) { return 1.0; };
    auto lin = [](std::size_t j) { return static_cast<double>(j); };
    auto sq = [](std::size_t j) { return static_cast<double>(j) * static_cast<double>(j); };
    auto tri = [](std::size_t j) { return 0.5 * static_cast<double>(j) * static_cast<double>(j + 1); };

    double s1 = 0.0, s2 = 0.0, st = 0.0;
    for (std::size_t j = d.bins(); j >= 1; --j) {
        const double m = d.mu(j);
        s1 += lin(j) * m;
        s2 += sq(j) * m;
        st += tri(j) * m;
    }

    TransportSummary s;
    s.mu_I = d.mu_I;
    s.censored_mass = d.censored_mass;
    s.mu_A_acc = {s1, d.stderr_of(lin)};
    // mu(I) includes the censored mass
    s.avg_exit_I = {s1 / d.mu_I, detail::ratio_stderr(d, lin, 0.0, one, 1.0, s1, d.mu_I)};

    const bool divergent = second_moment_divergent(d);
    if (divergent || !(s1 > 0.0)) {
        s.avg_transit_acc.divergent = true;
        s.avg_exit_acc.divergent = true;
    } else {
        s.avg_transit_acc = {false, s2 / s1, detail::ratio_stderr(d, sq, 0.0, lin, 0.0, s2, s1)};
        s.avg_exit_acc = {false, st / s1, detail::ratio_stderr(d, tri, 0.0, lin, 0.0, st, s1)};
    }
    return s;
}

/// Exit and survival tables indexed by k = 1..J (entry k - 1).
struct DistributionTable {
    std::vector<double> exit_pdf_I;      ///< Prob(t+(I) = k)
    std::vector<double> survival_I;      ///< Prob(t+(I) >= k), finite exits only
    std::vector<double> exit_pdf_acc;    ///< Prob(t+(A_acc) = k)
    std::vector<double> transit_pdf_acc; ///< Prob(t_transit(A_acc) = k)
    std::vector<double> survival_A;      ///< Prob(t+(A_acc) >= k)

    [[nodiscard]] std::size_t size() const noexcept { return exit_pdf_I.size(); }
};

[[nodiscard]] inline DistributionTable distributions(const TransitDecomposition& d) {
    if (!(d.mu_I > 0.0)) throw EmptyEntrySet("entry measure is zero");
    const std::size_t J = d.bins();
    std::vector<double> suffix0(J + 2, 0.0), suffix_area(J + 2, 0.0);
    // suffix0[k] = sum_{m>=k} mu_m ; suffix_area[k] = sum_{m>=k} (m-k+1) mu_m
    for (std::size_t k = J; k >= 1; --k) {
        suffix0[k] = suffix0[k + 1] + d.mu(k);
        suffix_area[k] = suffix_area[k + 1] + suffix0[k];
    }
    double s1 = 0.0;
    for (std::size_t j = J; j >= 1; --j) s1 += static_cast<double>(j) * d.mu(j);

    DistributionTable t;
    t.exit_pdf_I.resize(J);
    t.survival_I.resize(J);
    t.exit_pdf_acc.resize(J);
    t.transit_pdf_acc.resize(J);
    t.survival_A.resize(J);
    for (std::size_t k = 1; k <= J; ++k) {
        t.exit_pdf_I[k - 1] = d.mu(k) / d.mu_I;
        t.survival_I[k - 1] = suffix0[k] / d.mu_I;
        t.exit_pdf_acc[k - 1] = s1 > 0.0 ? suffix0[k] / s1 : 0.0;
        t.transit_pdf_acc[k - 1] = s1 > 0.0 ? static_cast<double>(k) * d.mu(k) / s1 : 0.0;
        t.survival_A[k - 1] = s1 > 0.0 ? suffix_area[k] / s1 : 0.0;
    }
    return t;
}

/// Least-squares fit of log mu(T_j) against log j.
struct TailFit {
    double slope = 0.0;           ///< fitted exponent, -(2 + alpha)
    double alpha = 0.0;
    double residual = 0.0;        ///< rms residual of the log-log fit
    double semilog_residual = 0.0; ///< rms residual of log mu against j
    std::size_t points = 0;
    /// The data are better described by geometric than algebraic decay.
    bool exponential_like = false;
};

[[nodiscard]] inline TailFit tail_exponent(const TransitDecomposition& d, std::size_t j_min, std::size_t j_max) {
    if (!(j_max > j_min && j_min >= 1)) throw InvalidArgument("need j_max > j_min >= 1");
    std::vector<double> lx, lj, ly;
    for (std::size_t j = j_min; j <= j_max; ++j) {
        const double m = d.mu(j);
        if (m > 0.0) {
            lx.push_back(std::log(static_cast<double>(j)));
            lj.push_back(static_cast<double>(j));
            ly.push_back(std::log(m));
        }
    }
    if (lx.size() < 5) throw InsufficientData("fewer than 5 nonzero bins in the fit window");

    auto fit = [&](const std::vector<double>& xs, double& slope) {
        const double n = static_cast<double>(xs.size());
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ly[i];
        }
        mx /= n;
        my /= n;
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ly[i] - my);
        }
        slope = sxy / sxx;
        double ss = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double r = ly[i] - (my + slope * (xs[i] - mx));
            ss += r * r;
        }
        return std::sqrt(ss / n);
    };

    TailFit f;
    f.points = lx.size();
    f.residual = fit(lx, f.slope);
    double semilog_slope = 0.0;
    f.semilog_residual = fit(lj, semilog_slope);
    f.alpha = -f.slope - 2.0;
    f.exponential_like = f.semilog_residual < 0.1 * f.residual;
    return f;
}

// ---------------------------------------------------------------------------
// Kac return-time check

struct KacResult {
    Estimate avg_return;
    double predicted = 0.0; ///< mu(M_acc) / mu(A)
    double mu_A = 0.0;
    double mu_M_acc = 0.0;
    double censored_fraction = 0.0;
    std::uint64_t samples = 0;
};

/// Largest censored fraction kac_check accepts.
inline constexpr double kKacMaxCensoredFraction = 0.01;

/// Averages the first return time to A over uniform samples of A and
/// compares it with mu(M_acc) / mu(A), where M_acc is the part of M whose
/// backward orbit meets A within t_max. mu(M) is normalised to one.
template <PhaseMap M, class RA, class RM>
[[nodiscard]] KacResult kac_check(const M& map, const RA& region_A, const RM& region_M,
                                  const BoxSampler<M::dimension>& a_sampler,
                                  const BoxSampler<M::dimension>& m_sampler, std::uint64_t t_max) {
    detail::require_budget(t_max);
    KacResult r;

    std::uint64_t in_A = 0, censored = 0;
    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t i = 0; i < a_sampler.size(); ++i) {
        const auto p = a_sampler(i);
        if (!region_A.contains(p)) continue;
        ++in_A;
        const TimeValue t = detail::first_passage<true>(map, p, region_A, t_max);
        if (t.is_censored()) {
            ++censored;
            continue;
        }
        const double v = static_cast<double>(t.value());
        sum += v;
        sum_sq += v * v;
    }
    if (in_A == 0) throw EmptyEntrySet("no sample landed in A");
    r.samples = in_A;
    r.censored_fraction = static_cast<double>(censored) / static_cast<double>(in_A);
    if (r.censored_fraction > kKacMaxCensoredFraction)
        throw UnreliableEstimate("censored fraction " + std::to_string(r.censored_fraction) + " exceeds 1%");
    const double n = static_cast<double>(in_A - censored);
    const double mean = sum / n;
    r.avg_return = {mean, std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / n)};
    r.mu_A = a_sampler.box().measure() * static_cast<double>(in_A) / static_cast<double>(a_sampler.size());

    std::uint64_t in_M = 0, reached = 0;
    for (std::uint64_t i = 0; i < m_sampler.size(); ++i) {
        const auto p = m_sampler(i);
        if (!region_M.contains(p)) continue;
        ++in_M;
        if (region_A.contains(p) || detail::first_passage<false>(map, p, region_A, t_max).is_finite()) ++reached;
    }
    if (in_M == 0) throw EmptyEntrySet("no sample landed in M");
    const double mu_M = m_sampler.box().measure() * static_cast<double>(in_M) / static_cast<double>(m_sampler.size());
    // measures relative to mu(M) = 1
    r.mu_A /= mu_M;
    r.mu_M_acc = static_cast<double>(reached) / static_cast<double>(in_M);
    r.predicted = r.mu_M_acc / r.mu_A;
    return r;
}

} // namespace exitime
