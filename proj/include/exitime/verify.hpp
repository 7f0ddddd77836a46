#pragma once

// Self-checks run by `exitime verify`: the closed-form examples against
// independent evaluations and sampled estimates, the averaging identities,
// and the Kac return time on the cat map. The formulas under test are
// injectable so a wrong one can be shown to fail.

#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "exitime/analytic.hpp"
#include "exitime/maps.hpp"
#include "exitime/random.hpp"
#include "exitime/stats.hpp"
#include "exitime/transit.hpp"

namespace exitime {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;

    [[nodiscard]] bool all_passed() const noexcept {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return !checks.empty();
    }
    [[nodiscard]] int exit_status() const noexcept { return all_passed() ? 0 : 1; }

    friend std::ostream& operator<<(std::ostream& os, const VerifyReport& r) {
        for (const auto& c : r.checks) os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        std::size_t failed = 0;
        for (const auto& c : r.checks) failed += c.passed ? 0 : 1;
        os << (failed == 0 ? "all " + std::to_string(r.checks.size()) + " checks passed"
                           : std::to_string(failed) + " of " + std::to_string(r.checks.size()) + " checks failed")
           << "\n";
        return os;
    }
};

/// Formulas under test.
struct VerifyFormulas {
    std::function<double(double, std::size_t)> linear_Tj = [](double l, std::size_t j) {
        return analytic::linear_Tj(l, j);
    };
    std::function<analytic::AverageTimes(double)> linear_average_times = [](double l) {
        return analytic::linear_average_times(l);
    };
    std::function<double(double, double, std::size_t)> diag_Tj = [](double L, double P, std::size_t j) {
        return analytic::diag_Tj(L, P, j);
    };
    std::function<double(std::size_t)> shear_Tj = [](std::size_t j) { return analytic::shear_Tj(j); };
};

struct VerifyOptions {
    std::uint64_t samples = 200000;
    std::uint64_t kac_samples = 100000;
    std::uint64_t seed = kDefaultSeed;
    unsigned jobs = 0;
};

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream s;
    s.precision(10);
    s << v;
    return s.str();
}

inline bool close_rel(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

} // namespace detail

[[nodiscard]] inline VerifyReport run_verification(const VerifyFormulas& f = {}, const VerifyOptions& opt = {}) {
    VerifyReport rep;
    auto add = [&](std::string name, bool ok, std::string detail) {
        rep.checks.push_back({std::move(name), ok, std::move(detail)});
    };

    // linear map: formula against direct evaluation and the stated sums
    {
        const double lam = 2.0;
        const double t3 = f.linear_Tj(lam, 3);
        add("linear mu(T_3), lambda=2", std::abs(t3 - 0.0625) < 1e-15, "got " + detail::fmt(t3) + ", expected 0.0625");
        double s0 = 0.0, s1 = 0.0;
        for (std::size_t j = 200; j >= 1; --j) {
            s0 += f.linear_Tj(lam, j);
            s1 += static_cast<double>(j) * f.linear_Tj(lam, j);
        }
        add("linear sum mu(T_j) = mu(I), lambda=2", std::abs(s0 - 0.5) < 1e-12, "sum " + detail::fmt(s0));
        add("linear sum j mu(T_j) = mu(A), lambda=2", std::abs(s1 - 1.0) < 1e-12, "sum " + detail::fmt(s1));
        const auto avg = f.linear_average_times(lam);
        add("linear averages, lambda=2",
            std::abs(avg.avg_exit_I - 2.0) < 1e-12 && std::abs(avg.avg_transit_A - 3.0) < 1e-12 &&
                std::abs(avg.avg_exit_A - 2.0) < 1e-12,
            "(" + detail::fmt(avg.avg_exit_I) + ", " + detail::fmt(avg.avg_transit_A) + ", " +
                detail::fmt(avg.avg_exit_A) + "), expected (2, 3, 2)");
        add("exit/transit identity, lambda=2",
            std::abs(avg.avg_exit_A - 0.5 * (avg.avg_transit_A + 1.0)) < 1e-12,
            detail::fmt(avg.avg_exit_A) + " vs " + detail::fmt(0.5 * (avg.avg_transit_A + 1.0)));

        // the averaging lemma on the exact table
        std::vector<double> m(400);
        for (std::size_t j = 1; j <= m.size(); ++j) m[j - 1] = f.linear_Tj(lam, j);
        const auto d = TransitDecomposition::from_measures(m, 1.0 - 1.0 / lam, 1.0);
        const auto s = summarize(d);
        add("lemma on linear table, lambda=2",
            std::abs(s.avg_exit_I.value - avg.avg_exit_I) < 1e-9 && std::abs(s.mu_A_acc.value - 1.0) < 1e-9 &&
                !s.avg_transit_acc.divergent && std::abs(s.avg_transit_acc.value - avg.avg_transit_A) < 1e-9,
            "<t+>_I " + detail::fmt(s.avg_exit_I.value) + ", mu(A_acc) " + detail::fmt(s.mu_A_acc.value) +
                ", <t_transit> " + detail::fmt(s.avg_transit_acc.value));
    }

    // sampled decomposition of the linear map against the formula
    {
        const double lam = 2.0;
        const Linear2D map(lam);
        const AxisBox<2> A = AxisBox<2>::unit();
        const AxisBox<2> I_box{{0.0, 1.0 / lam}, {1.0, 1.0}};
        const BoxSampler<2> sampler(I_box, opt.samples, SamplingMode::Stratified, opt.seed);
        DecompositionOptions d_opt;
        d_opt.t_max = 1000;
        d_opt.bins = 12;
        d_opt.mu_A = 1.0;
        d_opt.jobs = opt.jobs;
        const auto d = estimate_decomposition(map, A, sampler, d_opt);
        bool ok = true;
        double worst = 0.0;
        for (std::size_t j = 1; j <= 12; ++j) {
            const double expect = f.linear_Tj(lam, j);
            const double se = d.expected_bin_stderr(expect);
            const double z = std::abs(d.mu(j) - expect) / se;
            worst = std::max(worst, z);
            ok = ok && z <= 3.0;
        }
        add("sampled linear decomposition, lambda=2", ok, "largest deviation " + detail::fmt(worst) + " standard errors");
    }

    // diagonal map reduces to the linear one when Lambda Pi = 1
    {
        bool ok = true;
        for (std::size_t j = 1; j <= 20; ++j)
            ok = ok && detail::close_rel(f.diag_Tj(2.0, 0.5, j), f.linear_Tj(2.0, j), 1e-14);
        const double d1 = f.diag_Tj(6.0, 1.0 / 6.0, 1);
        ok = ok && std::abs(d1 - 5.0 * (5.0 / 6.0) / 6.0) < 1e-14;
        add("diagonal map formula", ok, "mu(T_1) at Lambda=6, Pi=1/6: " + detail::fmt(d1));
    }

    // shear: values, sums, divergence of the second moment
    {
        const double t1 = f.shear_Tj(1);
        const double t5 = f.shear_Tj(5);
        add("shear mu(T_1), mu(T_5)", std::abs(t1 - 0.25) < 1e-15 && std::abs(t5 - 1.0 / 120.0) < 1e-15,
            detail::fmt(t1) + ", " + detail::fmt(t5));
        const std::size_t J = 1000000;
        double s0 = 0.0, s1 = 0.0;
        for (std::size_t j = J; j >= 1; --j) {
            const double m = f.shear_Tj(j);
            s0 += m;
            s1 += static_cast<double>(j) * m;
        }
        add("shear sum mu(T_j) to 10^6", s0 >= 0.5 - 1e-6 && s0 <= 0.5 + 1e-12, detail::fmt(s0));
        add("shear sum j mu(T_j) to 10^6", 1.0 - s1 >= 0.0 && 1.0 - s1 <= 1.1 / static_cast<double>(J),
            "deficit " + detail::fmt(1.0 - s1));
        bool grows = true;
        std::string inc;
        for (std::size_t n : {100u, 1000u, 10000u}) {
            double a = 0.0, b = 0.0;
            for (std::size_t j = 1; j <= 2 * n; ++j) {
                const double t = static_cast<double>(j) * static_cast<double>(j) * f.shear_Tj(j);
                if (j <= n) a += t;
                b += t;
            }
            grows = grows && (b - a) > 0.6;
            inc += detail::fmt(b - a) + " ";
        }
        add("shear second moment diverges", grows, "increments per doubling " + inc);
    }

    // Kac on the cat map
    {
        const CatMap cat;
        const AxisBox<2> M = AxisBox<2>::unit();
        for (double side : {0.5, std::sqrt(0.1)}) {
            AxisBox<2> A{{0.0, 0.0}, {side, side}};
            A.closure = Closure::HalfOpen;
            const BoxSampler<2> a_s(A, opt.kac_samples, SamplingMode::Random, opt.seed);
            const BoxSampler<2> m_s(M, 10000, SamplingMode::Random, opt.seed + 1);
            const auto r = kac_check(cat, A, M, a_s, m_s, 100000);
            const double expect = 1.0 / (side * side);
            add("Kac return time, mu(A)=" + detail::fmt(side * side), detail::close_rel(r.avg_return.value, expect, 0.05),
                "mean return " + detail::fmt(r.avg_return.value) + ", predicted " + detail::fmt(r.predicted) +
                    ", exact " + detail::fmt(expect));
        }
    }
    return rep;
}

} // namespace exitime
