#pragma once

// Volume-preserving map zoo: Hénon quadratic map, linear hyperbolic maps,
// the trivial shear and the cat map on the unit torus.
//
// Every map is an immutable value type exposing
//   static constexpr std::size_t dimension;
//   point_type forward(const point_type&) const;
//   point_type inverse(const point_type&) const;
//   matrix_type jacobian(const point_type&) const;
// The member functions are raw arithmetic for use in hot loops; the free
// henon_* / *_forward functions below are the checked entry points.

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "exitime/errors.hpp"

namespace exitime {

template <std::size_t N>
using PhasePoint = std::array<double, N>;
using Point2 = PhasePoint<2>;

template <std::size_t N>
using Matrix = std::array<std::array<double, N>, N>;

/// Magnitude beyond which an orbit is considered to have overflowed.
inline constexpr double kOverflowMagnitude = 1e150;

template <std::size_t N>
[[nodiscard]] bool is_escaped(const PhasePoint<N>& p) noexcept {
    for (double c : p) {
        if (!(std::abs(c) <= kOverflowMagnitude)) return true; // catches NaN
    }
    return false;
}

template <std::size_t N>
[[nodiscard]] double determinant(Matrix<N> a) noexcept {
    if constexpr (N == 1) {
        return a[0][0];
    } else if constexpr (N == 2) {
        return a[0][0] * a[1][1] - a[0][1] * a[1][0];
    } else {
        double det = 1.0;
        for (std::size_t c = 0; c < N; ++c) {
            std::size_t pivot = c;
            for (std::size_t r = c + 1; r < N; ++r)
                if (std::abs(a[r][c]) > std::abs(a[pivot][c])) pivot = r;
            if (a[pivot][c] == 0.0) return 0.0;
            if (pivot != c) {
                std::swap(a[pivot], a[c]);
                det = -det;
            }
            det *= a[c][c];
            for (std::size_t r = c + 1; r < N; ++r) {
                const double f = a[r][c] / a[c][c];
                for (std::size_t k = c; k < N; ++k) a[r][k] -= f * a[c][k];
            }
        }
        return det;
    }
}

template <class M>
concept PhaseMap = requires(const M& m, const typename M::point_type& p) {
    { M::dimension } -> std::convertible_to<std::size_t>;
    { m.forward(p) } -> std::same_as<typename M::point_type>;
    { m.inverse(p) } -> std::same_as<typename M::point_type>;
    { m.jacobian(p) } -> std::same_as<Matrix<M::dimension>>;
};

/// Applies `map` (or its inverse for negative `steps`) |steps| times.
template <PhaseMap M>
[[nodiscard]] typename M::point_type iterate(const M& map, typename M::point_type p, long steps) {
    if (steps >= 0) {
        for (long i = 0; i < steps; ++i) p = map.forward(p);
    } else {
        for (long i = 0; i < -steps; ++i) p = map.inverse(p);
    }
    return p;
}

// ---------------------------------------------------------------------------
// Hénon quadratic map  (x, y) -> (y - k + x^2, -x)

struct HenonParams {
    double k = 0.0;
};

struct Eigenstructure {
    double expanding = 1.0; ///< lambda > 1; the contracting eigenvalue is 1/lambda
    Point2 unstable{};      ///< unit vector, x-component >= 0
    Point2 stable{};        ///< unit vector, x-component >= 0

    [[nodiscard]] double contracting() const noexcept { return 1.0 / expanding; }
};

struct FixedPoints {
    Point2 elliptic;
    Point2 saddle;
};

/// The reversor R(x, y) = (-y, -x). Its fixed set is the line x + y = 0 and
/// R H R = H^{-1}.
[[nodiscard]] constexpr Point2 henon_reversor(const Point2& p) noexcept { return {-p[1], -p[0]}; }

class Henon {
public:
    using point_type = Point2;
    static constexpr std::size_t dimension = 2;

    constexpr explicit Henon(HenonParams params) noexcept : k_(params.k) {}
    constexpr explicit Henon(double k) noexcept : k_(k) {}

    [[nodiscard]] constexpr double k() const noexcept { return k_; }
    [[nodiscard]] constexpr HenonParams params() const noexcept { return {k_}; }

    [[nodiscard]] constexpr Point2 forward(const Point2& p) const noexcept {
        return {p[1] - k_ + p[0] * p[0], -p[0]};
    }
    [[nodiscard]] constexpr Point2 inverse(const Point2& p) const noexcept {
        return {-p[1], p[0] + k_ - p[1] * p[1]};
    }
    [[nodiscard]] constexpr Matrix<2> jacobian(const Point2& p) const noexcept {
        return {{{2.0 * p[0], 1.0}, {-1.0, 0.0}}};
    }

    /// x-coordinate of the saddle, 1 + sqrt(1 + k). Requires k > -1.
    [[nodiscard]] double saddle_x() const {
        require_fixed_points();
        return 1.0 + std::sqrt(1.0 + k_);
    }

    /// Bounded orbits stay inside |x|, |y| < x_s; anything beyond ten times that
    /// is treated as escaped.
    [[nodiscard]] double escape_radius() const { return 10.0 * saddle_x(); }

    [[nodiscard]] FixedPoints fixed_points() const {
        require_fixed_points();
        const double r = std::sqrt(1.0 + k_);
        const double xe = 1.0 - r;
        const double xs = 1.0 + r;
        return {{xe, -xe}, {xs, -xs}};
    }

    [[nodiscard]] Eigenstructure saddle_eigenstructure() const {
        const double xs = saddle_x();
        // characteristic polynomial of [[2x, 1], [-1, 0]]: l^2 - 2 x l + 1
        const double lambda = xs + std::sqrt(xs * xs - 1.0);
        auto unit = [](double a, double b) {
            const double n = std::hypot(a, b);
            return Point2{a / n, b / n};
        };
        return {lambda, unit(1.0, lambda - 2.0 * xs), unit(1.0, 1.0 / lambda - 2.0 * xs)};
    }

private:
    void require_fixed_points() const {
        if (!(k_ > -1.0)) {
            std::ostringstream os;
            os << "Henon map has no real fixed points for k = " << k_ << " (need k > -1)";
            throw NoRealFixedPoints(os.str());
        }
    }

    double k_;
};

namespace detail {
inline Point2 check_finite(const Point2& p) {
    if (is_escaped(p)) throw Escaped("orbit left the representable range");
    return p;
}
inline void require_finite(const Point2& p) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
        throw InvalidArgument("phase point must have finite coordinates");
}
} // namespace detail

[[nodiscard]] inline Point2 henon_forward(const Point2& p, HenonParams params) {
    detail::require_finite(p);
    return detail::check_finite(Henon(params).forward(p));
}

[[nodiscard]] inline Point2 henon_inverse(const Point2& p, HenonParams params) {
    detail::require_finite(p);
    return detail::check_finite(Henon(params).inverse(p));
}

[[nodiscard]] inline FixedPoints henon_fixed_points(HenonParams params) {
    return Henon(params).fixed_points();
}

[[nodiscard]] inline Eigenstructure henon_saddle_eigenstructure(HenonParams params) {
    return Henon(params).saddle_eigenstructure();
}

// ---------------------------------------------------------------------------
// Linear hyperbolic maps

class Linear2D {
public:
    using point_type = Point2;
    static constexpr std::size_t dimension = 2;

    explicit Linear2D(double lambda) : lambda_(lambda) {
        if (!(lambda > 1.0) || !std::isfinite(lambda))
            throw InvalidSpectrum("linear map needs lambda > 1");
    }

    [[nodiscard]] double lambda() const noexcept { return lambda_; }

    [[nodiscard]] Point2 forward(const Point2& p) const noexcept { return {lambda_ * p[0], p[1] / lambda_}; }
    [[nodiscard]] Point2 inverse(const Point2& p) const noexcept { return {p[0] / lambda_, lambda_ * p[1]}; }
    [[nodiscard]] Matrix<2> jacobian(const Point2&) const noexcept {
        return {{{lambda_, 0.0}, {0.0, 1.0 / lambda_}}};
    }

private:
    double lambda_;
};

/// Diagonal hyperbolic map. Eigenvalues are ordered: the leading block is
/// expanding (> 1), the trailing block contracting (in (0, 1)), and their
/// product is one.
template <std::size_t N>
class DiagHyperbolic {
public:
    using point_type = PhasePoint<N>;
    static constexpr std::size_t dimension = N;

    explicit DiagHyperbolic(const std::array<double, N>& eigenvalues) : eig_(eigenvalues) {
        static_assert(N >= 2);
        std::size_t i = 0;
        while (i < N && eig_[i] > 1.0) ++i;
        expanding_ = i;
        while (i < N && eig_[i] > 0.0 && eig_[i] < 1.0) ++i;
        if (i != N || expanding_ == 0 || expanding_ == N)
            throw InvalidSpectrum("eigenvalues must be (expanding > 1 ..., contracting in (0,1) ...)");
        double prod = 1.0;
        for (double e : eig_) {
            if (!std::isfinite(e)) throw InvalidSpectrum("non-finite eigenvalue");
            prod *= e;
        }
        if (std::abs(prod - 1.0) > 1e-12) throw InvalidSpectrum("eigenvalue product must be 1");
    }

    [[nodiscard]] const std::array<double, N>& eigenvalues() const noexcept { return eig_; }
    [[nodiscard]] std::size_t expanding_count() const noexcept { return expanding_; }

    /// Total expansion Lambda (product of the expanding block).
    [[nodiscard]] double total_expansion() const noexcept {
        double v = 1.0;
        for (std::size_t i = 0; i < expanding_; ++i) v *= eig_[i];
        return v;
    }
    /// Total contraction Pi (product of the contracting block).
    [[nodiscard]] double total_contraction() const noexcept {
        double v = 1.0;
        for (std::size_t i = expanding_; i < N; ++i) v *= eig_[i];
        return v;
    }

    [[nodiscard]] point_type forward(const point_type& p) const noexcept {
        point_type q;
        for (std::size_t i = 0; i < N; ++i) q[i] = eig_[i] * p[i];
        return q;
    }
    [[nodiscard]] point_type inverse(const point_type& p) const noexcept {
        point_type q;
        for (std::size_t i = 0; i < N; ++i) q[i] = p[i] / eig_[i];
        return q;
    }
    [[nodiscard]] Matrix<N> jacobian(const point_type&) const noexcept {
        Matrix<N> m{};
        for (std::size_t i = 0; i < N; ++i) m[i][i] = eig_[i];
        return m;
    }

private:
    std::array<double, N> eig_;
    std::size_t expanding_ = 0;
};

/// Trivial shear x' = x + y', y' = y.
class Shear {
public:
    using point_type = Point2;
    static constexpr std::size_t dimension = 2;

    [[nodiscard]] Point2 forward(const Point2& p) const noexcept { return {p[0] + p[1], p[1]}; }
    [[nodiscard]] Point2 inverse(const Point2& p) const noexcept { return {p[0] - p[1], p[1]}; }
    [[nodiscard]] Matrix<2> jacobian(const Point2&) const noexcept { return {{{1.0, 1.0}, {0.0, 1.0}}}; }
};

/// Arnold cat map (x + y, x + 2y) mod 1 on the unit torus [0, 1)^2.
class CatMap {
public:
    using point_type = Point2;
    static constexpr std::size_t dimension = 2;

    [[nodiscard]] Point2 forward(const Point2& p) const noexcept {
        return {wrap(p[0] + p[1]), wrap(p[0] + 2.0 * p[1])};
    }
    [[nodiscard]] Point2 inverse(const Point2& p) const noexcept {
        return {wrap(2.0 * p[0] - p[1]), wrap(p[1] - p[0])};
    }
    [[nodiscard]] Matrix<2> jacobian(const Point2&) const noexcept { return {{{1.0, 1.0}, {1.0, 2.0}}}; }

    [[nodiscard]] static double wrap(double v) noexcept {
        double w = v - std::floor(v);
        return w >= 1.0 ? 0.0 : w;
    }
};

// ---------------------------------------------------------------------------
// Checked single-step entry points for the linear maps and the shear.

[[nodiscard]] inline Point2 linear2d_forward(const Point2& p, double lambda) {
    return Linear2D(lambda).forward(p);
}

template <std::size_t N>
[[nodiscard]] PhasePoint<N> diag_forward(const PhasePoint<N>& p, const std::array<double, N>& eigenvalues) {
    return DiagHyperbolic<N>(eigenvalues).forward(p);
}

[[nodiscard]] inline Point2 shear_forward(const Point2& p) noexcept { return Shear{}.forward(p); }

} // namespace exitime
