#pragma once

// Regions of phase space. A region is anything with
//   bool contains(const PhasePoint<N>&) const;
// Membership is deterministic; polygon tests use an exact orientation
// predicate so that points on or near edges are classified consistently.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "exitime/errors.hpp"
#include "exitime/maps.hpp"

namespace exitime {

template <class R, std::size_t N>
concept Region = requires(const R& r, const PhasePoint<N>& p) {
    { r.contains(p) } -> std::convertible_to<bool>;
};

// ---------------------------------------------------------------------------
// Exact orientation predicate

namespace predicates {

namespace detail {

inline void two_sum(double a, double b, double& x, double& y) noexcept {
    x = a + b;
    const double bv = x - a;
    const double av = x - bv;
    y = (a - av) + (b - bv);
}

inline void two_product(double a, double b, double& x, double& y) noexcept {
    x = a * b;
    y = std::fma(a, b, -x);
}

/// Sign of an exact sum of products, evaluated with a nonoverlapping
/// floating-point expansion.
inline int exact_sign(const std::array<double, 12>& terms) noexcept {
    std::array<double, 12> e{};
    std::size_t len = 0;
    for (double b : terms) {
        double q = b;
        for (std::size_t i = 0; i < len; ++i) {
            double h;
            two_sum(q, e[i], q, h);
            e[i] = h;
        }
        e[len++] = q;
    }
    for (std::size_t i = len; i-- > 0;) {
        if (e[i] > 0.0) return 1;
        if (e[i] < 0.0) return -1;
    }
    return 0;
}

} // namespace detail

/// Returns +1 if (a, b, c) turn counter-clockwise, -1 if clockwise and 0 if
/// collinear. Exact for all finite inputs that do not overflow.
[[nodiscard]] inline int orient2d(const Point2& a, const Point2& b, const Point2& c) noexcept {
    const double detleft = (a[0] - c[0]) * (b[1] - c[1]);
    const double detright = (a[1] - c[1]) * (b[0] - c[0]);
    const double det = detleft - detright;
    constexpr double eps = std::numeric_limits<double>::epsilon() / 2.0;
    constexpr double errbound = (3.0 + 16.0 * eps) * eps;
    const double bound = errbound * (std::abs(detleft) + std::abs(detright));
    if (det > bound) return 1;
    if (-det > bound) return -1;

    // ax*by - ax*cy - cx*by - ay*bx + ay*cx + cy*bx
    std::array<double, 12> t{};
    detail::two_product(a[0], b[1], t[0], t[1]);
    detail::two_product(-a[0], c[1], t[2], t[3]);
    detail::two_product(-c[0], b[1], t[4], t[5]);
    detail::two_product(-a[1], b[0], t[6], t[7]);
    detail::two_product(a[1], c[0], t[8], t[9]);
    detail::two_product(c[1], b[0], t[10], t[11]);
    return detail::exact_sign(t);
}

/// True when closed segments [p1, p2] and [q1, q2] share at least one point.
[[nodiscard]] inline bool segments_intersect(const Point2& p1, const Point2& p2, const Point2& q1,
                                             const Point2& q2) noexcept {
    const int d1 = orient2d(q1, q2, p1);
    const int d2 = orient2d(q1, q2, p2);
    const int d3 = orient2d(p1, p2, q1);
    const int d4 = orient2d(p1, p2, q2);
    if (d1 * d2 < 0 && d3 * d4 < 0) return true;
    auto on_segment = [](const Point2& a, const Point2& b, const Point2& c) {
        return std::min(a[0], b[0]) <= c[0] && c[0] <= std::max(a[0], b[0]) && std::min(a[1], b[1]) <= c[1] &&
               c[1] <= std::max(a[1], b[1]);
    };
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

} // namespace predicates

// ---------------------------------------------------------------------------
// Simple regions

enum class Closure { Closed, HalfOpen };

/// Axis-aligned box. HalfOpen boxes are [lo, hi) per coordinate.
template <std::size_t N>
struct AxisBox {
    PhasePoint<N> lo{};
    PhasePoint<N> hi{};
    Closure closure = Closure::Closed;

    [[nodiscard]] static AxisBox unit() {
        AxisBox b;
        b.lo.fill(0.0);
        b.hi.fill(1.0);
        return b;
    }

    [[nodiscard]] bool contains(const PhasePoint<N>& p) const noexcept {
        for (std::size_t i = 0; i < N; ++i) {
            if (!(p[i] >= lo[i])) return false;
            if (closure == Closure::Closed ? !(p[i] <= hi[i]) : !(p[i] < hi[i])) return false;
        }
        return true;
    }

    [[nodiscard]] double measure() const noexcept {
        double v = 1.0;
        for (std::size_t i = 0; i < N; ++i) v *= hi[i] - lo[i];
        return v;
    }
};

/// Closed triangle.
struct Triangle {
    Point2 a{}, b{}, c{};

    [[nodiscard]] bool contains(const Point2& p) const noexcept {
        const int s = predicates::orient2d(a, b, c);
        if (s == 0) return false;
        const int d1 = predicates::orient2d(a, b, p);
        const int d2 = predicates::orient2d(b, c, p);
        const int d3 = predicates::orient2d(c, a, p);
        return d1 * s >= 0 && d2 * s >= 0 && d3 * s >= 0;
    }

    [[nodiscard]] double measure() const noexcept {
        return 0.5 * std::abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
    }
};

/// Intersection of closed half-spaces normal . p <= offset.
template <std::size_t N>
struct HalfSpaceIntersection {
    struct HalfSpace {
        PhasePoint<N> normal{};
        double offset = 0.0;
    };
    std::vector<HalfSpace> constraints;

    [[nodiscard]] bool contains(const PhasePoint<N>& p) const noexcept {
        for (const auto& h : constraints) {
            double s = 0.0;
            for (std::size_t i = 0; i < N; ++i) s += h.normal[i] * p[i];
            if (!(s <= h.offset)) return false;
        }
        return true;
    }
};
using HalfPlaneIntersection = HalfSpaceIntersection<2>;

/// Set complement of another region.
template <class R>
struct Complement {
    R inner;

    template <std::size_t N>
    [[nodiscard]] bool contains(const PhasePoint<N>& p) const {
        return !inner.contains(p);
    }
};
template <class R>
Complement(R) -> Complement<R>;

// ---------------------------------------------------------------------------
// Polygon

/// Simple closed polygon with even-odd membership.
///
/// Membership is answered through two uniform indices over the bounding box:
/// a coarse cell grid whose edge-free cells are pre-classified, and fine
/// horizontal strips holding the edges that a rightward ray may cross. Both
/// give exactly the answer of the plain crossing-number test.
class Polygon {
public:
    Polygon() = default;

    /// Builds the polygon; throws InvalidPolygon if it has fewer than three
    /// vertices, repeated consecutive vertices, non-finite coordinates or
    /// self-intersections.
    explicit Polygon(std::vector<Point2> vertices, bool validate = true) : v_(std::move(vertices)) {
        if (v_.size() < 3) throw InvalidPolygon("polygon needs at least 3 vertices");
        if (v_.front() == v_.back()) v_.pop_back();
        if (v_.size() < 3) throw InvalidPolygon("polygon needs at least 3 distinct vertices");
        for (std::size_t i = 0; i < v_.size(); ++i) {
            if (!std::isfinite(v_[i][0]) || !std::isfinite(v_[i][1]))
                throw InvalidPolygon("non-finite vertex");
            if (v_[i] == v_[(i + 1) % v_.size()]) throw InvalidPolygon("repeated consecutive vertex");
        }
        build_index();
        if (validate) validate_simple();
    }

    [[nodiscard]] const std::vector<Point2>& vertices() const noexcept { return v_; }
    [[nodiscard]] std::size_t size() const noexcept { return v_.size(); }
    [[nodiscard]] const AxisBox<2>& bounding_box() const noexcept { return bbox_; }

    [[nodiscard]] bool contains(const Point2& p) const noexcept {
        if (!(p[0] >= bbox_.lo[0] && p[0] <= bbox_.hi[0] && p[1] >= bbox_.lo[1] && p[1] <= bbox_.hi[1]))
            return false;
        const std::size_t cell = cell_of(p);
        const CellState s = cell_state_[cell];
        if (s != CellState::Boundary) return s == CellState::Inside;
        return strip_parity(p);
    }

    /// Reference crossing-number test over all edges (no index).
    [[nodiscard]] bool contains_brute_force(const Point2& p) const noexcept {
        bool inside = false;
        for (std::size_t i = 0; i < v_.size(); ++i)
            if (crosses_right(v_[i], v_[(i + 1) % v_.size()], p)) inside = !inside;
        return inside;
    }

    /// Signed shoelace area (positive for counter-clockwise order).
    [[nodiscard]] double signed_area() const noexcept { return shoelace(v_); }
    [[nodiscard]] double area() const noexcept { return std::abs(signed_area()); }

    [[nodiscard]] static double shoelace(std::span<const Point2> pts) noexcept {
        const std::size_t n = pts.size();
        if (n < 3) return 0.0;
        double s = 0.0;
        double c = 0.0; // Kahan compensation
        for (std::size_t i = 0; i < n; ++i) {
            const Point2& prev = pts[(i + n - 1) % n];
            const Point2& next = pts[(i + 1) % n];
            const double term = pts[i][0] * (next[1] - prev[1]) - c;
            const double t = s + term;
            c = (t - s) - term;
            s = t;
        }
        return 0.5 * s;
    }

private:
    enum class CellState : std::uint8_t { Outside, Inside, Boundary };

    // Edge (a, b) crosses the rightward horizontal ray from p.
    [[nodiscard]] static bool crosses_right(const Point2& a, const Point2& b, const Point2& p) noexcept {
        if (a[1] <= p[1]) {
            if (b[1] > p[1]) return predicates::orient2d(a, b, p) > 0;
        } else if (b[1] <= p[1]) {
            return predicates::orient2d(a, b, p) < 0;
        }
        return false;
    }

    [[nodiscard]] static std::size_t index_of(double v, double lo, double inv_step, std::size_t count) noexcept {
        const double f = (v - lo) * inv_step;
        if (!(f > 0.0)) return 0;
        const auto i = static_cast<std::size_t>(f);
        return i >= count ? count - 1 : i;
    }

    [[nodiscard]] std::size_t cell_of(const Point2& p) const noexcept {
        return index_of(p[1], bbox_.lo[1], inv_cell_h_, cells_y_) * cells_x_ +
               index_of(p[0], bbox_.lo[0], inv_cell_w_, cells_x_);
    }

    [[nodiscard]] bool strip_parity(const Point2& p) const noexcept {
        const std::size_t s = index_of(p[1], bbox_.lo[1], inv_strip_h_, strips_);
        bool inside = false;
        for (std::uint32_t k = strip_start_[s]; k < strip_start_[s + 1]; ++k) {
            const std::uint32_t e = strip_edges_[k];
            const Point2& a = v_[e];
            const Point2& b = v_[e + 1 == v_.size() ? 0 : e + 1];
            if (a[0] < p[0] && b[0] < p[0]) continue;
            if (crosses_right(a, b, p)) inside = !inside;
        }
        return inside;
    }

    template <class Visit>
    void for_each_edge_cell(std::size_t e, Visit&& visit) const {
        const Point2& a = v_[e];
        const Point2& b = v_[(e + 1) % v_.size()];
        const std::size_t x0 = index_of(std::min(a[0], b[0]), bbox_.lo[0], inv_cell_w_, cells_x_);
        const std::size_t x1 = index_of(std::max(a[0], b[0]), bbox_.lo[0], inv_cell_w_, cells_x_);
        const std::size_t y0 = index_of(std::min(a[1], b[1]), bbox_.lo[1], inv_cell_h_, cells_y_);
        const std::size_t y1 = index_of(std::max(a[1], b[1]), bbox_.lo[1], inv_cell_h_, cells_y_);
        for (std::size_t y = y0; y <= y1; ++y)
            for (std::size_t x = x0; x <= x1; ++x) visit(y * cells_x_ + x);
    }

    void build_index() {
        const std::size_t n = v_.size();
        bbox_.lo = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        bbox_.hi = {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        for (const auto& p : v_) {
            for (int d = 0; d < 2; ++d) {
                bbox_.lo[d] = std::min(bbox_.lo[d], p[d]);
                bbox_.hi[d] = std::max(bbox_.hi[d], p[d]);
            }
        }
        const double w = std::max(bbox_.hi[0] - bbox_.lo[0], 1e-300);
        const double h = std::max(bbox_.hi[1] - bbox_.lo[1], 1e-300);

        // about two cells per edge, aspect-matched, at most 1024 per side
        const double target = std::sqrt(2.0 * static_cast<double>(n) * w / h);
        cells_x_ = std::clamp<std::size_t>(static_cast<std::size_t>(target), 4, 1024);
        cells_y_ = std::clamp<std::size_t>(static_cast<std::size_t>(2.0 * static_cast<double>(n) /
                                                                    static_cast<double>(cells_x_)),
                                           4, 1024);
        inv_cell_w_ = static_cast<double>(cells_x_) / w;
        inv_cell_h_ = static_cast<double>(cells_y_) / h;
        strips_ = std::clamp<std::size_t>(n, 16, std::size_t{1} << 16);
        inv_strip_h_ = static_cast<double>(strips_) / h;

        // strip index (CSR)
        std::vector<std::uint32_t> count(strips_ + 1, 0);
        auto strip_range = [&](std::size_t e) {
            const Point2& a = v_[e];
            const Point2& b = v_[(e + 1) % n];
            return std::pair{index_of(std::min(a[1], b[1]), bbox_.lo[1], inv_strip_h_, strips_),
                             index_of(std::max(a[1], b[1]), bbox_.lo[1], inv_strip_h_, strips_)};
        };
        for (std::size_t e = 0; e < n; ++e) {
            auto [s0, s1] = strip_range(e);
            for (std::size_t s = s0; s <= s1; ++s) ++count[s + 1];
        }
        strip_start_.assign(strips_ + 1, 0);
        for (std::size_t s = 0; s < strips_; ++s) strip_start_[s + 1] = strip_start_[s] + count[s + 1];
        strip_edges_.assign(strip_start_.back(), 0);
        std::vector<std::uint32_t> fill(strip_start_.begin(), strip_start_.end() - 1);
        for (std::size_t e = 0; e < n; ++e) {
            auto [s0, s1] = strip_range(e);
            for (std::size_t s = s0; s <= s1; ++s) strip_edges_[fill[s]++] = static_cast<std::uint32_t>(e);
        }

        // cell classification
        cell_state_.assign(cells_x_ * cells_y_, CellState::Outside);
        for (std::size_t e = 0; e < n; ++e)
            for_each_edge_cell(e, [&](std::size_t c) { cell_state_[c] = CellState::Boundary; });
        for (std::size_t cy = 0; cy < cells_y_; ++cy) {
            for (std::size_t cx = 0; cx < cells_x_; ++cx) {
                const std::size_t c = cy * cells_x_ + cx;
                if (cell_state_[c] == CellState::Boundary) continue;
                const Point2 centre{bbox_.lo[0] + (static_cast<double>(cx) + 0.5) / inv_cell_w_,
                                    bbox_.lo[1] + (static_cast<double>(cy) + 0.5) / inv_cell_h_};
                if (cell_of(centre) != c) {
                    cell_state_[c] = CellState::Boundary; // degenerate cell, fall back to strips
                    continue;
                }
                cell_state_[c] = strip_parity(centre) ? CellState::Inside : CellState::Outside;
            }
        }
    }

    void validate_simple() const {
        const std::size_t n = v_.size();
        std::vector<std::vector<std::uint32_t>> buckets(cells_x_ * cells_y_);
        for (std::size_t e = 0; e < n; ++e)
            for_each_edge_cell(e, [&](std::size_t c) { buckets[c].push_back(static_cast<std::uint32_t>(e)); });
        for (const auto& bucket : buckets) {
            for (std::size_t i = 0; i < bucket.size(); ++i) {
                for (std::size_t j = i + 1; j < bucket.size(); ++j) {
                    const std::size_t e1 = bucket[i];
                    const std::size_t e2 = bucket[j];
                    const Point2& a = v_[e1];
                    const Point2& b = v_[(e1 + 1) % n];
                    const Point2& c = v_[e2];
                    const Point2& d = v_[(e2 + 1) % n];
                    const bool adjacent = (e1 + 1) % n == e2 || (e2 + 1) % n == e1;
                    if (!adjacent) {
                        if (predicates::segments_intersect(a, b, c, d))
                            throw InvalidPolygon("edges " + std::to_string(e1) + " and " + std::to_string(e2) +
                                                 " intersect");
                        continue;
                    }
                    // adjacent edges may only share their common vertex
                    const bool e1_first = (e1 + 1) % n == e2;
                    const Point2& shared = e1_first ? b : a;
                    const Point2& far1 = e1_first ? a : b;
                    const Point2& far2 = e1_first ? d : c;
                    if (predicates::orient2d(far1, shared, far2) == 0) {
                        const double dot = (far1[0] - shared[0]) * (far2[0] - shared[0]) +
                                           (far1[1] - shared[1]) * (far2[1] - shared[1]);
                        if (dot > 0.0)
                            throw InvalidPolygon("adjacent edges " + std::to_string(e1) + " and " +
                                                 std::to_string(e2) + " overlap");
                    }
                }
            }
        }
    }

    std::vector<Point2> v_;
    AxisBox<2> bbox_{};
    std::size_t cells_x_ = 0, cells_y_ = 0, strips_ = 0;
    double inv_cell_w_ = 0, inv_cell_h_ = 0, inv_strip_h_ = 0;
    std::vector<CellState> cell_state_;
    std::vector<std::uint32_t> strip_start_;
    std::vector<std::uint32_t> strip_edges_;
};

// ---------------------------------------------------------------------------
// Polyline distance helpers

[[nodiscard]] inline double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) noexcept {
    const double dx = b[0] - a[0];
    const double dy = b[1] - a[1];
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p[0] - (a[0] + t * dx), p[1] - (a[1] + t * dy));
}

/// Distance from p to an open polyline.
[[nodiscard]] inline double polyline_distance(std::span<const Point2> polyline, const Point2& p) noexcept {
    if (polyline.empty()) return std::numeric_limits<double>::infinity();
    if (polyline.size() == 1) return std::hypot(p[0] - polyline[0][0], p[1] - polyline[0][1]);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < polyline.size(); ++i)
        best = std::min(best, point_segment_distance(p, polyline[i], polyline[i + 1]));
    return best;
}

/// Largest distance from a vertex of `from` to the polyline `to`. Both curves
/// are assumed to be traversed in the same direction, which lets the search
/// track a moving window and fall back to a full scan only when needed.
[[nodiscard]] inline double directed_deviation(std::span<const Point2> from, std::span<const Point2> to,
                                               std::size_t window = 64) noexcept {
    if (to.size() < 2) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    std::size_t cursor = 0;
    const std::size_t segs = to.size() - 1;
    for (const auto& p : from) {
        const std::size_t lo = cursor > window ? cursor - window : 0;
        const std::size_t hi = std::min(segs, cursor + window);
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = cursor;
        for (std::size_t i = lo; i < hi; ++i) {
            const double d = point_segment_distance(p, to[i], to[i + 1]);
            if (d < best) {
                best = d;
                arg = i;
            }
        }
        if (best > worst) {
            // confirm against the whole curve before growing the maximum
            for (std::size_t i = 0; i < segs; ++i) {
                const double d = point_segment_distance(p, to[i], to[i + 1]);
                if (d < best) {
                    best = d;
                    arg = i;
                }
            }
        }
        cursor = arg;
        worst = std::max(worst, best);
    }
    return worst;
}

[[nodiscard]] inline double hausdorff_distance(std::span<const Point2> a, std::span<const Point2> b) noexcept {
    return std::max(directed_deviation(a, b), directed_deviation(b, a));
}

} // namespace exitime
