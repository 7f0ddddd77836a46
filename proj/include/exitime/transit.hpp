#pragma once

// Crossing, exit, return and transit times over regions, entry/exit set
// membership, and sampled estimates of the transit-time decomposition
// T_j = { a in I : t+(a) = j } of the entry set I.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "exitime/errors.hpp"
#include "exitime/geometry.hpp"
#include "exitime/maps.hpp"
#include "exitime/parallel.hpp"
#include "exitime/random.hpp"

namespace exitime {

/// Either a finite time n >= 1 or a censored time standing in for "not
/// within t_max iterates".
class TimeValue {
public:
    [[nodiscard]] static constexpr TimeValue finite(std::uint64_t n) noexcept { return TimeValue(n, false); }
    [[nodiscard]] static constexpr TimeValue censored(std::uint64_t t_max) noexcept { return TimeValue(t_max, true); }

    [[nodiscard]] constexpr bool is_finite() const noexcept { return !censored_; }
    [[nodiscard]] constexpr bool is_censored() const noexcept { return censored_; }
    /// n for finite values, t_max for censored ones.
    [[nodiscard]] constexpr std::uint64_t value() const noexcept { return value_; }

    constexpr bool operator==(const TimeValue&) const noexcept = default;

    friend std::ostream& operator<<(std::ostream& os, const TimeValue& t) {
        return t.censored_ ? os << "Censored(" << t.value_ << ")" : os << "Finite(" << t.value_ << ")";
    }

private:
    constexpr TimeValue(std::uint64_t v, bool c) noexcept : value_(v), censored_(c) {}
    std::uint64_t value_;
    bool censored_;
};

struct TransitRecord {
    TimeValue t_plus;
    TimeValue t_minus;
    TimeValue t_transit;
};

/// Region adaptor: points not in `inner`. Holds a reference.
template <class R>
struct NotIn {
    const R* inner;

    template <std::size_t N>
    [[nodiscard]] bool contains(const PhasePoint<N>& p) const {
        return !inner->contains(p);
    }
};

/// Entry set I = { a in A : f^{-1}(a) not in A }. Holds references.
template <PhaseMap M, class R>
struct EntrySet {
    const M* map;
    const R* region;

    [[nodiscard]] bool contains(const typename M::point_type& p) const {
        return region->contains(p) && !region->contains(map->inverse(p));
    }
};

/// Exit set E = { a in A : f(a) not in A }. Holds references.
template <PhaseMap M, class R>
struct ExitSet {
    const M* map;
    const R* region;

    [[nodiscard]] bool contains(const typename M::point_type& p) const {
        return region->contains(p) && !region->contains(map->forward(p));
    }
};

namespace detail {

template <bool Forward, PhaseMap M, class Target>
[[nodiscard]] TimeValue first_passage(const M& map, typename M::point_type a, const Target& target,
                                      std::uint64_t t_max) {
    for (std::uint64_t n = 1; n <= t_max; ++n) {
        if constexpr (Forward) {
            a = map.forward(a);
        } else {
            a = map.inverse(a);
        }
        if (target.contains(a)) return TimeValue::finite(n);
        // an overflowed orbit can no longer be tracked; it never reaches a
        // target that does not contain the overflow region
        if (is_escaped(a)) return TimeValue::censored(t_max);
    }
    return TimeValue::censored(t_max);
}

inline void require_budget(std::uint64_t t_max) {
    if (t_max < 1) throw InvalidArgument("t_max must be at least 1");
}

template <class R, class P>
void require_member(const R& region, const P& a) {
    if (!region.contains(a)) throw NotInRegion("initial point is not in the region");
}

} // namespace detail

/// Smallest n in [1, t_max] with f^n(a) in target, else Censored(t_max).
template <PhaseMap M, class Target>
[[nodiscard]] TimeValue crossing_time(const M& map, const typename M::point_type& a, const Target& target,
                                      std::uint64_t t_max) {
    detail::require_budget(t_max);
    return detail::first_passage<true>(map, a, target, t_max);
}

/// Backward crossing time: smallest n with f^{-n}(a) in target.
template <PhaseMap M, class Target>
[[nodiscard]] TimeValue backward_crossing_time(const M& map, const typename M::point_type& a, const Target& target,
                                               std::uint64_t t_max) {
    detail::require_budget(t_max);
    return detail::first_passage<false>(map, a, target, t_max);
}

template <PhaseMap M, class R>
[[nodiscard]] TimeValue exit_time(const M& map, const typename M::point_type& a, const R& region,
                                  std::uint64_t t_max) {
    detail::require_budget(t_max);
    detail::require_member(region, a);
    return detail::first_passage<true>(map, a, NotIn<R>{&region}, t_max);
}

template <PhaseMap M, class R>
[[nodiscard]] TimeValue backward_exit_time(const M& map, const typename M::point_type& a, const R& region,
                                           std::uint64_t t_max) {
    detail::require_budget(t_max);
    detail::require_member(region, a);
    return detail::first_passage<false>(map, a, NotIn<R>{&region}, t_max);
}

/// First return time; equals 1 whenever f(a) stays in the region.
template <PhaseMap M, class R>
[[nodiscard]] TimeValue return_time(const M& map, const typename M::point_type& a, const R& region,
                                    std::uint64_t t_max) {
    detail::require_budget(t_max);
    detail::require_member(region, a);
    return detail::first_passage<true>(map, a, region, t_max);
}

/// Forward, backward and transit time t+ + t- - 1. The transit time is
/// censored at t_max when either constituent is censored.
template <PhaseMap M, class R>
[[nodiscard]] TransitRecord transit_record(const M& map, const typename M::point_type& a, const R& region,
                                           std::uint64_t t_max) {
    const TimeValue plus = exit_time(map, a, region, t_max);
    const TimeValue minus = backward_exit_time(map, a, region, t_max);
    const TimeValue transit = plus.is_finite() && minus.is_finite()
                                  ? TimeValue::finite(plus.value() + minus.value() - 1)
                                  : TimeValue::censored(t_max);
    return {plus, minus, transit};
}

struct TurnstileMembership {
    bool in_exit_set = false;  ///< f(a) leaves the region
    bool in_entry_set = false; ///< f^{-1}(a) lies outside the region
};

template <PhaseMap M, class R>
[[nodiscard]] TurnstileMembership entry_exit_membership(const M& map, const typename M::point_type& a,
                                                        const R& region) {
    detail::require_member(region, a);
    return {!region.contains(map.forward(a)), !region.contains(map.inverse(a))};
}

// ---------------------------------------------------------------------------
// Tallies and decompositions

/// Integer counts of exit times. Merging is order independent.
struct TransitTally {
    std::vector<std::uint64_t> counts; ///< counts[j - 1] = samples with t+ = j
    std::uint64_t censored = 0;
    std::uint64_t rejected = 0; ///< samples that were not in the sampled set
    std::uint64_t total = 0;

    void record(const TimeValue& t) {
        ++total;
        if (t.is_censored()) {
            ++censored;
            return;
        }
        if (counts.size() < t.value()) counts.resize(t.value(), 0);
        ++counts[t.value() - 1];
    }
    void reject() noexcept {
        ++total;
        ++rejected;
    }
    [[nodiscard]] std::uint64_t accepted() const noexcept { return total - rejected; }

    void merge(const TransitTally& other) {
        if (counts.size() < other.counts.size()) counts.resize(other.counts.size(), 0);
        for (std::size_t i = 0; i < other.counts.size(); ++i) counts[i] += other.counts[i];
        censored += other.censored;
        rejected += other.rejected;
        total += other.total;
    }
};

/// Measures mu(T_j), j >= 1, of the transit decomposition of an entry set,
/// plus the mass that did not exit within t_max.
///
/// Sampled decompositions are hit-or-miss estimates mu(T_j) = W c_j / n with
/// normaliser W (box volume, or mu(I) when that is known exactly) and n
/// samples; analytic ones have n = 0 and carry no statistical error.
struct TransitDecomposition {
    std::string map_name;
    std::string region_name;
    std::string mode = "analytic"; ///< analytic | stratified | random
    std::uint64_t seed = 0;
    std::uint64_t t_max = 0;
    std::uint64_t samples = 0; ///< n used for normalisation; 0 = exact
    double normalizer = 0.0;   ///< W

    double mu_A = std::numeric_limits<double>::quiet_NaN(); ///< measure of the region, if known
    double mu_I = 0.0;
    std::vector<double> measure; ///< measure[j - 1] = mu(T_j)
    double censored_mass = 0.0;

    [[nodiscard]] std::size_t bins() const noexcept { return measure.size(); }
    [[nodiscard]] double mu(std::size_t j) const noexcept {
        return j >= 1 && j <= measure.size() ? measure[j - 1] : 0.0;
    }
    [[nodiscard]] bool is_exact() const noexcept { return samples == 0; }

    /// Covariance of two linear functionals sum_j a(j) mu(T_j) + a_c * censored
    /// under multinomial sampling of the bins.
    template <class CoefA, class CoefB>
    [[nodiscard]] double covariance(CoefA a, double a_censored, CoefB b, double b_censored) const {
        if (is_exact() || normalizer <= 0.0) return 0.0;
        const double W = normalizer;
        double eab = 0.0, ea = 0.0, eb = 0.0;
        for (std::size_t j = 1; j <= measure.size(); ++j) {
            const double p = measure[j - 1] / W;
            if (p == 0.0) continue;
            const double aj = a(j);
            const double bj = b(j);
            eab += aj * bj * p;
            ea += aj * p;
            eb += bj * p;
        }
        const double pc = censored_mass / W;
        eab += a_censored * b_censored * pc;
        ea += a_censored * pc;
        eb += b_censored * pc;
        return W * W * (eab - ea * eb) / static_cast<double>(samples);
    }

    template <class Coef>
    [[nodiscard]] double stderr_of(Coef a, double a_censored = 0.0) const {
        return std::sqrt(std::max(0.0, covariance(a, a_censored, a, a_censored)));
    }

    [[nodiscard]] double bin_stderr(std::size_t j) const {
        return stderr_of([j](std::size_t i) { return i == j ? 1.0 : 0.0; });
    }
    /// Standard error of a bin whose true measure is `expected`; unlike
    /// bin_stderr it does not vanish for bins with no hits.
    [[nodiscard]] double expected_bin_stderr(double expected) const {
        if (is_exact() || normalizer <= 0.0) return 0.0;
        const double q = std::clamp(expected / normalizer, 0.0, 1.0);
        return normalizer * std::sqrt(q * (1.0 - q) / static_cast<double>(samples));
    }
    [[nodiscard]] double censored_stderr() const {
        return stderr_of([](std::size_t) { return 0.0; }, 1.0);
    }
    [[nodiscard]] double mu_I_stderr() const {
        return stderr_of([](std::size_t) { return 1.0; }, 1.0);
    }

    /// Exact decomposition from closed-form measures.
    [[nodiscard]] static TransitDecomposition from_measures(std::vector<double> measures, double mu_I,
                                                            double mu_A, double censored = 0.0) {
        TransitDecomposition d;
        d.measure = std::move(measures);
        d.mu_I = mu_I;
        d.mu_A = mu_A;
        d.censored_mass = censored;
        return d;
    }

    /// Hit-or-miss decomposition from a tally. When `known_mu_I` is given,
    /// the accepted samples are normalised to it; otherwise every sample
    /// counts and W is the sampling-box volume.
    [[nodiscard]] static TransitDecomposition from_tally(const TransitTally& tally, double box_volume,
                                                         std::optional<double> known_mu_I) {
        if (tally.accepted() == 0) throw EmptyEntrySet("no sample landed in the entry set");
        TransitDecomposition d;
        d.samples = known_mu_I ? tally.accepted() : tally.total;
        d.normalizer = known_mu_I ? *known_mu_I : box_volume;
        const double scale = d.normalizer / static_cast<double>(d.samples);
        d.measure.resize(tally.counts.size());
        for (std::size_t i = 0; i < tally.counts.size(); ++i)
            d.measure[i] = scale * static_cast<double>(tally.counts[i]);
        d.censored_mass = scale * static_cast<double>(tally.censored);
        d.mu_I = known_mu_I ? *known_mu_I : scale * static_cast<double>(tally.accepted());
        return d;
    }
};

struct DecompositionOptions {
    std::uint64_t t_max = 100000;
    std::size_t bins = 0; ///< J; the measure table is padded to at least J bins
    std::optional<double> known_mu_I;
    double mu_A = std::numeric_limits<double>::quiet_NaN();
    unsigned jobs = 0;
    std::string map_name;
    std::string region_name;
};

/// Samples the entry set of `region` through `sampler` (points outside the
/// entry set are rejected) and tallies exit times.
template <PhaseMap M, class R>
[[nodiscard]] TransitDecomposition estimate_decomposition(const M& map, const R& region,
                                                          const BoxSampler<M::dimension>& sampler,
                                                          const DecompositionOptions& opt) {
    detail::require_budget(opt.t_max);
    const EntrySet<M, R> entry{&map, &region};
    const NotIn<R> outside{&region};
    const std::uint64_t n = sampler.size();
    const unsigned jobs = opt.jobs == 0 ? default_jobs() : opt.jobs;
    std::vector<TransitTally> partial(std::min<std::uint64_t>(jobs, std::max<std::uint64_t>(n, 1)));
    parallel_blocks(n, static_cast<unsigned>(partial.size()), [&](unsigned w, std::uint64_t b, std::uint64_t e) {
        TransitTally& t = partial[w];
        for (std::uint64_t i = b; i < e; ++i) {
            const auto p = sampler(i);
            if (!entry.contains(p)) {
                t.reject();
                continue;
            }
            t.record(detail::first_passage<true>(map, p, outside, opt.t_max));
        }
    });
    TransitTally total;
    for (const auto& t : partial) total.merge(t);

    TransitDecomposition d = TransitDecomposition::from_tally(total, sampler.box().measure(), opt.known_mu_I);
    if (d.measure.size() < opt.bins) d.measure.resize(opt.bins, 0.0);
    d.mode = to_string(sampler.mode());
    d.seed = sampler.seed();
    d.t_max = opt.t_max;
    d.mu_A = opt.mu_A;
    d.map_name = opt.map_name;
    d.region_name = opt.region_name;
    return d;
}

/// Estimate of a sampled measure with its binomial standard error.
struct MeasureEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;
    std::uint64_t censored = 0; ///< region samples whose backward orbit stayed for t_max iterates
};

/// Measure of the accessible set A_acc = { a in A : t-(a) < infinity },
/// i.e. the part of A flooded by forward images of the entry set. Points
/// whose backward orbit stays in A for t_max iterates count as inaccessible.
template <PhaseMap M, class R>
[[nodiscard]] MeasureEstimate estimate_accessible_measure(const M& map, const R& region,
                                                          const BoxSampler<M::dimension>& sampler,
                                                          std::uint64_t t_max, unsigned jobs = 0) {
    detail::require_budget(t_max);
    const NotIn<R> outside{&region};
    const std::uint64_t n = sampler.size();
    if (jobs == 0) jobs = default_jobs();
    jobs = static_cast<unsigned>(std::min<std::uint64_t>(jobs, std::max<std::uint64_t>(n, 1)));
    std::vector<std::uint64_t> hits(jobs, 0), censored(jobs, 0);
    parallel_blocks(n, jobs, [&](unsigned w, std::uint64_t b, std::uint64_t e) {
        for (std::uint64_t i = b; i < e; ++i) {
            const auto p = sampler(i);
            if (!region.contains(p)) continue;
            if (detail::first_passage<false>(map, p, outside, t_max).is_finite())
                ++hits[w];
            else
                ++censored[w];
        }
    });
    MeasureEstimate est;
    est.samples = n;
    for (unsigned w = 0; w < jobs; ++w) {
        est.hits += hits[w];
        est.censored += censored[w];
    }
    const double V = sampler.box().measure();
    const double p = static_cast<double>(est.hits) / static_cast<double>(n);
    est.value = V * p;
    est.stderr_ = V * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return est;
}

/// Hit-or-miss measure of an arbitrary region inside the sampler's box.
template <std::size_t N, class R>
[[nodiscard]] MeasureEstimate estimate_measure(const R& region, const BoxSampler<N>& sampler) {
    MeasureEstimate est;
    est.samples = sampler.size();
    for (std::uint64_t i = 0; i < sampler.size(); ++i)
        if (region.contains(sampler(i))) ++est.hits;
    const double V = sampler.box().measure();
    const double p = static_cast<double>(est.hits) / static_cast<double>(est.samples);
    est.value = V * p;
    est.stderr_ = V * std::sqrt(p * (1.0 - p) / static_cast<double>(est.samples));
    return est;
}

} // namespace exitime
