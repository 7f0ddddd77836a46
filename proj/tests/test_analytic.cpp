#include <cmath>

#include <gtest/gtest.h>

#include "exitime/analytic.hpp"
#include "exitime/maps.hpp"
#include "exitime/random.hpp"
#include "exitime/stats.hpp"
#include "exitime/transit.hpp"

using namespace exitime;
using namespace exitime::analytic;

namespace {

// mu(T_j) for the linear map from the exit-time intervals: a point of the
// entry strip y in (1/lambda, 1] has t+ = j iff x in (lambda^-j, lambda^-(j-1)]
double linear_interval_oracle(double lam, std::size_t j) {
    const double width = std::pow(lam, -double(j - 1)) - std::pow(lam, -double(j));
    return width * (1.0 - 1.0 / lam);
}

// midpoint-grid average of exit times over a box, n x n cells
template <PhaseMap M>
std::vector<double> grid_decomposition(const M& map, const AxisBox<2>& box, int n, std::size_t J) {
    const AxisBox<2> A = AxisBox<2>::unit();
    std::vector<double> m(J, 0.0);
    const double cell = box.measure() / double(n) / double(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const Point2 p{box.lo[0] + (box.hi[0] - box.lo[0]) * (i + 0.5) / n,
                           box.lo[1] + (box.hi[1] - box.lo[1]) * (k + 0.5) / n};
            if (!A.contains(p) || A.contains(map.inverse(p))) continue;
            const auto t = exit_time(map, p, A, 100000);
            if (t.is_finite() && t.value() <= J) m[t.value() - 1] += cell;
        }
    return m;
}

} // namespace

TEST(LinearTj, Examples) {
    EXPECT_DOUBLE_EQ(linear_Tj(2.0, 3), 0.0625);
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t j = 300; j >= 1; --j) {
        s0 += linear_Tj(2.0, j);
        s1 += double(j) * linear_Tj(2.0, j);
    }
    EXPECT_NEAR(s0, 0.5, 1e-14);
    EXPECT_NEAR(s1, 1.0, 1e-14);
    EXPECT_THROW((void)linear_Tj(1.0, 1), InvalidSpectrum);
    EXPECT_THROW((void)linear_Tj(2.0, 0), InvalidIndex);
}

TEST(LinearTj, MatchesIntervalOracle) {
    for (double lam : {1.5, 2.0, 3.0, 4.0, 10.0})
        for (std::size_t j = 1; j <= 30; ++j) EXPECT_NEAR(linear_Tj(lam, j), linear_interval_oracle(lam, j), 1e-15);
}

TEST(LinearTj, MatchesGridOfExitTimes) {
    const Linear2D lin(2.0);
    const auto m = grid_decomposition(lin, {{0.0, 0.5}, {1.0, 1.0}}, 1024, 8);
    // the grid is aligned with the dyadic T_j strips
    for (std::size_t j = 1; j <= 8; ++j) EXPECT_NEAR(m[j - 1], linear_Tj(2.0, j), 1e-12) << j;
}

TEST(LinearSums, ClosedForms) {
    for (double lam : {1.5, 2.0, 4.0}) {
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (std::size_t j = 2000; j >= 1; --j) {
            const double m = linear_Tj(lam, j);
            s0 += m;
            s1 += double(j) * m;
            s2 += double(j) * double(j) * m;
        }
        const auto c = linear_sums(lam);
        EXPECT_NEAR(c.zeroth, s0, 1e-12);
        EXPECT_NEAR(c.first, s1, 1e-12);
        EXPECT_NEAR(c.second, s2, 1e-10);
    }
}

TEST(LinearAverageTimes, Examples) {
    const auto a = linear_average_times(2.0);
    EXPECT_DOUBLE_EQ(a.avg_exit_I, 2.0);
    EXPECT_DOUBLE_EQ(a.avg_transit_A, 3.0);
    EXPECT_DOUBLE_EQ(a.avg_exit_A, 2.0);
    EXPECT_DOUBLE_EQ(a.avg_exit_A, 0.5 * (a.avg_transit_A + 1.0));
    const auto big = linear_average_times(1e12);
    EXPECT_NEAR(big.avg_exit_I, 1.0, 1e-9);
    EXPECT_NEAR(big.avg_transit_A, 1.0, 1e-9);
    EXPECT_NEAR(big.avg_exit_A, 1.0, 1e-9);
    const auto inf = linear_average_times(std::numeric_limits<double>::infinity());
    EXPECT_EQ(inf.avg_exit_I, 1.0);
}

TEST(LinearAverageTimes, AgreeWithSums) {
    for (double lam : {1.5, 2.0, 4.0, 7.0}) {
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (std::size_t j = 3000; j >= 1; --j) {
            const double m = linear_Tj(lam, j);
            s0 += m;
            s1 += double(j) * m;
            s2 += double(j) * double(j) * m;
        }
        const auto a = linear_average_times(lam);
        EXPECT_NEAR(a.avg_exit_I, s1 / s0, 1e-10);
        EXPECT_NEAR(a.avg_transit_A, s2 / s1, 1e-10);
    }
}

TEST(DiagTj, Examples) {
    EXPECT_NEAR(diag_Tj(6.0, 1.0 / 6.0, 1), 5.0 * (5.0 / 6.0) / 6.0, 1e-15);
    EXPECT_NEAR(diag_Tj(6.0, 1.0 / 6.0, 1), 0.694444, 1e-6);
    for (std::size_t j = 1; j <= 20; ++j) EXPECT_NEAR(diag_Tj(2.0, 0.5, j), linear_Tj(2.0, j), 1e-16);
    EXPECT_THROW((void)diag_Tj(1.0, 0.5, 1), InvalidSpectrum);
    EXPECT_THROW((void)diag_Tj(2.0, 1.0, 1), InvalidSpectrum);
    EXPECT_THROW((void)diag_Tj(2.0, 0.5, 0), InvalidIndex);
}

TEST(DiagTj, VolumePreservingAveragesMatchLinear) {
    for (double L : {1.5, 2.0, 6.0}) {
        const auto d = diag_decomposition(L, 1.0 / L);
        const auto s = summarize(d.tabulate(3000));
        const auto a = linear_average_times(L);
        EXPECT_NEAR(s.avg_exit_I.value, a.avg_exit_I, 1e-10);
        EXPECT_NEAR(s.avg_transit_acc.value, a.avg_transit_A, 1e-9);
        EXPECT_NEAR(s.mu_A_acc.value, d.mu_A_acc, 1e-10);
    }
}

TEST(DiagTj, ThreeDimensionalMonteCarlo) {
    const DiagHyperbolic<3> map({2.0, 3.0, 1.0 / 6.0});
    const BoxSampler<3> s(AxisBox<3>::unit(), 1000000, SamplingMode::Stratified, kDefaultSeed);
    DecompositionOptions o;
    o.t_max = 1000;
    o.bins = 8;
    const auto d = estimate_decomposition(map, AxisBox<3>::unit(), s, o);
    for (std::size_t j = 1; j <= 8; ++j)
        {
            const double e = diag_Tj(6.0, 1.0 / 6.0, j);
            EXPECT_LE(std::abs(d.mu(j) - e), 3.0 * d.expected_bin_stderr(e)) << j;
        }
}

TEST(ShearTj, Examples) {
    EXPECT_DOUBLE_EQ(shear_Tj(1), 0.25);
    EXPECT_NEAR(shear_Tj(5), 1.0 / 120.0, 1e-18);
    EXPECT_NEAR(shear_Tj(5), 0.008333, 1e-6);
    EXPECT_THROW((void)shear_Tj(0), InvalidIndex);
}

TEST(ShearTj, PartialSums) {
    const std::size_t J = 1000000;
    const auto s0 = shear_partial_sum(0, J);
    EXPECT_GE(s0.value, 0.5 - 1e-6);
    EXPECT_LE(s0.value, 0.5 + 1e-12);
    EXPECT_NEAR(s0.value + s0.error, 0.5, 1e-12);
    for (std::size_t j : {10u, 1000u, 1000000u}) {
        const auto s1 = shear_partial_sum(1, j);
        EXPECT_GE(1.0 - s1.value, 0.0);
        EXPECT_LE(1.0 - s1.value, 1.1 / double(j));
        EXPECT_NEAR(s1.value + s1.error, 1.0, 1e-12);
    }
    EXPECT_TRUE(std::isinf(shear_partial_sum(2, 10).error));
}

TEST(ShearTj, SecondMomentDiverges) {
    for (std::size_t J : {100u, 1000u, 10000u}) {
        const double inc = shear_partial_sum(2, 2 * J).value - shear_partial_sum(2, J).value;
        EXPECT_GT(inc, 0.6);
        EXPECT_NEAR(inc, std::log(2.0), 0.01);
    }
}

TEST(ShearGeometryTest, Examples) {
    const auto g = shear_entry_geometry();
    EXPECT_DOUBLE_EQ(g.entry_measure, 0.5);
    EXPECT_DOUBLE_EQ(g.entry.measure(), 0.5);
    EXPECT_EQ(g.wedge_index({0.1, 0.6}), 2u);
    EXPECT_TRUE(g.wedge(2).contains({0.1, 0.6}));
    EXPECT_FALSE(g.wedge(1).contains({0.1, 0.6}));
    EXPECT_EQ(g.wedge_index({0.95, 0.96}), 1u);
    EXPECT_TRUE(g.wedge(1).contains({0.95, 0.96}));
    const AxisBox<2> A = AxisBox<2>::unit();
    EXPECT_EQ(exit_time(Shear{}, Point2{0.1, 0.6}, A, 100), TimeValue::finite(2));
    EXPECT_EQ(exit_time(Shear{}, Point2{0.95, 0.96}, A, 100), TimeValue::finite(1));
}

TEST(ShearGeometryTest, WedgesMatchExitTimes) {
    const auto g = shear_entry_geometry();
    const AxisBox<2> A = AxisBox<2>::unit();
    for (std::uint64_t i = 0; i < 20000; ++i) {
        const Point2 p{uniform_at(1, i, 0), uniform_at(1, i, 1)};
        if (!(p[0] < p[1])) continue;
        const auto t = exit_time(Shear{}, p, A, 1000000);
        ASSERT_TRUE(t.is_finite());
        ASSERT_EQ(g.wedge_index(p), t.value());
        ASSERT_TRUE(g.wedge(t.value()).contains(p));
    }
}

TEST(ShearGeometryTest, WedgeAreasMatchFormula) {
    const int n = 2000;
    std::vector<double> m(6, 0.0);
    const auto g = shear_entry_geometry();
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const Point2 p{(i + 0.5) / n, (k + 0.5) / n};
            if (!(p[0] < p[1])) continue;
            const auto j = g.wedge_index(p);
            if (j <= 6) m[j - 1] += 1.0 / n / n;
        }
    for (std::size_t j = 1; j <= 6; ++j) EXPECT_NEAR(m[j - 1], shear_Tj(j), 2e-3) << j;
}

TEST(AnalyticDecompositions, Flags) {
    EXPECT_TRUE(linear_decomposition(2.0).second_moment_converges);
    EXPECT_FALSE(shear_decomposition().second_moment_converges);
    EXPECT_DOUBLE_EQ(shear_decomposition().mu_I, 0.5);
    const auto d = diag_decomposition(6.0, 1.0 / 6.0);
    double s1 = 0.0;
    for (std::size_t j = 500; j >= 1; --j) s1 += double(j) * d.measure(j);
    EXPECT_NEAR(d.mu_A_acc, s1, 1e-12);
    for (std::size_t j = 1; j < 50; ++j) {
        EXPECT_GE(d.measure(j), 0.0);
        EXPECT_LT(d.measure(j + 1), d.measure(j));
    }
}

TEST(MonteCarloOracles, LinearAndShear) {
    {
        const Linear2D lin(3.0);
        const BoxSampler<2> s({{0.0, 1.0 / 3.0}, {1.0, 1.0}}, 1000000, SamplingMode::Random, kDefaultSeed);
        DecompositionOptions o;
        o.bins = 10;
        const auto d = estimate_decomposition(lin, AxisBox<2>::unit(), s, o);
        for (std::size_t j = 1; j <= 10; ++j)
            EXPECT_LE(std::abs(d.mu(j) - linear_Tj(3.0, j)), 3.0 * d.expected_bin_stderr(linear_Tj(3.0, j))) << j;
        EXPECT_NEAR(summarize(d).avg_exit_I.value, 1.5, 3.0 * summarize(d).avg_exit_I.stderr_);
    }
    {
        const BoxSampler<2> s(AxisBox<2>::unit(), 1000000, SamplingMode::Random, kDefaultSeed);
        DecompositionOptions o;
        o.bins = 10;
        const auto d = estimate_decomposition(Shear{}, AxisBox<2>::unit(), s, o);
        for (std::size_t j = 1; j <= 10; ++j)
            EXPECT_LE(std::abs(d.mu(j) - shear_Tj(j)), 3.0 * d.bin_stderr(j)) << j;
    }
}
