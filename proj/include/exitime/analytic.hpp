#pragma once

// Closed-form transit decompositions for the linear hyperbolic map, the
// diagonal hyperbolic map on the unit hypercube and the trivial shear, all
// with A the unit square (cube).

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "exitime/errors.hpp"
#include "exitime/geometry.hpp"
#include "exitime/transit.hpp"

namespace exitime::analytic {

/// A series value with an absolute bound on the neglected tail.
struct SeriesValue {
    double value = 0.0;
    double error = 0.0;
};

namespace detail {
inline void require_lambda(double lambda) {
    if (!(lambda > 1.0) || !std::isfinite(lambda)) throw InvalidSpectrum("need lambda > 1");
}
inline void require_index(std::size_t j) {
    if (j < 1) throw InvalidIndex("transit index j must be >= 1");
}
} // namespace detail

/// mu(T_j) = (lambda - 1)(1 - 1/lambda) / lambda^j for the linear map on the unit square.
[[nodiscard]] inline double linear_Tj(double lambda, std::size_t j) {
    detail::require_lambda(lambda);
    detail::require_index(j);
    return (lambda - 1.0) * (1.0 - 1.0 / lambda) * std::pow(lambda, -static_cast<double>(j));
}

struct AverageTimes {
    double avg_exit_I = 0.0;    ///< <t+>_I
    double avg_transit_A = 0.0; ///< <t_transit>_A
    double avg_exit_A = 0.0;    ///< <t+>_A
};

[[nodiscard]] inline AverageTimes linear_average_times(double lambda) {
    if (!(lambda > 1.0)) throw InvalidSpectrum("need lambda > 1");
    if (std::isinf(lambda)) return {1.0, 1.0, 1.0};
    const double exit_I = lambda / (lambda - 1.0);
    const double transit_A = (lambda + 1.0) / (lambda - 1.0);
    return {exit_I, transit_A, 0.5 * (transit_A + 1.0)};
}

/// mu(T_j) = (Lambda - 1)(1 - Pi) / Lambda^j for a diagonal hyperbolic map
/// with total expansion Lambda and total contraction Pi.
[[nodiscard]] inline double diag_Tj(double total_expansion, double total_contraction, std::size_t j) {
    if (!(total_expansion > 1.0) || !std::isfinite(total_expansion))
        throw InvalidSpectrum("total expansion must exceed 1");
    if (!(total_contraction > 0.0 && total_contraction < 1.0))
        throw InvalidSpectrum("total contraction must lie in (0, 1)");
    detail::require_index(j);
    return (total_expansion - 1.0) * (1.0 - total_contraction) * std::pow(total_expansion, -static_cast<double>(j));
}

/// mu(T_1) = 1/4, mu(T_j) = 1 / (j (j^2 - 1)) for the shear.
[[nodiscard]] inline double shear_Tj(std::size_t j) {
    detail::require_index(j);
    if (j == 1) return 0.25;
    const double x = static_cast<double>(j);
    return 1.0 / (x * (x * x - 1.0));
}

/// Sum over j <= J of j^power * mu(T_j) for the shear, power in {0, 1, 2},
/// with the tail bound in `error` (infinite for the divergent second moment).
[[nodiscard]] inline SeriesValue shear_partial_sum(int power, std::size_t J) {
    if (power < 0 || power > 2) throw InvalidArgument("power must be 0, 1 or 2");
    detail::require_index(J);
    SeriesValue s;
    // sum small terms first
    for (std::size_t j = J; j >= 1; --j) s.value += std::pow(static_cast<double>(j), power) * shear_Tj(j);
    const double x = static_cast<double>(J);
    switch (power) {
    case 0: s.error = 0.5 / (x * (x + 1.0)); break;
    case 1: s.error = 0.5 * (1.0 / x + 1.0 / (x + 1.0)); break;
    default: s.error = std::numeric_limits<double>::infinity(); break;
    }
    return s;
}

/// Closed-form decomposition with the sums the averaging lemma needs.
struct AnalyticDecomposition {
    std::function<double(std::size_t)> measure;
    double mu_A = 1.0;
    double mu_I = 0.0;
    double mu_A_acc = 0.0; ///< sum_j j mu(T_j)
    bool first_moment_converges = true;
    bool second_moment_converges = true;

    /// Exact table of the first J bins (tail mass beyond J omitted).
    [[nodiscard]] TransitDecomposition tabulate(std::size_t J) const {
        std::vector<double> m(J);
        for (std::size_t j = 1; j <= J; ++j) m[j - 1] = measure(j);
        return TransitDecomposition::from_measures(std::move(m), mu_I, mu_A);
    }
};

[[nodiscard]] inline AnalyticDecomposition linear_decomposition(double lambda) {
    detail::require_lambda(lambda);
    return {[lambda](std::size_t j) { return linear_Tj(lambda, j); }, 1.0, 1.0 - 1.0 / lambda, 1.0, true, true};
}

[[nodiscard]] inline AnalyticDecomposition diag_decomposition(double total_expansion, double total_contraction) {
    (void)diag_Tj(total_expansion, total_contraction, 1); // validates
    const double L = total_expansion;
    const double P = total_contraction;
    return {[L, P](std::size_t j) { return diag_Tj(L, P, j); }, 1.0, 1.0 - P, (1.0 - P) * L / (L - 1.0), true,
            true};
}

[[nodiscard]] inline AnalyticDecomposition shear_decomposition() {
    return {[](std::size_t j) { return shear_Tj(j); }, 1.0, 0.5, 1.0, true, false};
}

/// Closed-form sums for the linear map: sum mu, sum j mu, sum j^2 mu.
struct LinearSums {
    double zeroth, first, second;
};
[[nodiscard]] inline LinearSums linear_sums(double lambda) {
    detail::require_lambda(lambda);
    return {1.0 - 1.0 / lambda, 1.0, (lambda + 1.0) / (lambda - 1.0)};
}

/// Shear entry set I = { 0 <= x < y <= 1 } and its exact T_j wedges.
struct ShearGeometry {
    Triangle entry{{0.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    double entry_measure = 0.5;

    /// T_j = { (x, y) in I : 1 - j y < x < 1 - (j - 1) y } as closed half-planes.
    [[nodiscard]] HalfPlaneIntersection wedge(std::size_t j) const {
        detail::require_index(j);
        const double jd = static_cast<double>(j);
        HalfPlaneIntersection h;
        h.constraints = {
            {{-1.0, -jd}, -1.0},        // x + j y >= 1
            {{1.0, jd - 1.0}, 1.0},     // x + (j-1) y <= 1
            {{-1.0, 0.0}, 0.0},         // x >= 0
            {{1.0, -1.0}, 0.0},         // x <= y
            {{0.0, 1.0}, 1.0},          // y <= 1
        };
        return h;
    }

    /// Index j of the wedge holding a point of I, from the inequalities.
    [[nodiscard]] std::size_t wedge_index(const Point2& p) const {
        if (!(p[1] > 0.0)) throw NotInRegion("shear entry point needs y > 0");
        // smallest j with x + j y > 1
        const double j = std::floor((1.0 - p[0]) / p[1]) + 1.0;
        return static_cast<std::size_t>(std::max(1.0, j));
    }
};

[[nodiscard]] inline ShearGeometry shear_entry_geometry() { return {}; }

} // namespace exitime::analytic
