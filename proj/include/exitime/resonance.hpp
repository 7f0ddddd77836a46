#pragma once

// Fixed-point resonance zone of the Hénon map.
//
// The left-going branch of W^u(z_s) is parametrised by u = n + s, n integer,
// s in [0, 1): the point H^n(p0 + s (H(p0) - p0)) with p0 = z_s + eps d_u.
// Because the fundamental segment ends exactly at H(p0), the parametrisation
// is continuous across blocks, and u - 1 is the preimage of u. The stable
// branch is the image of the unstable one under the reversor R.
//
// The zone A is bounded by W^u from z_s to z_h, the first crossing of W^u
// with x + y = 0, and by its reflection. The entry lobe I is bounded by
// W^u from z_h to z_m, the next homoclinic point, which lies on the second
// symmetry line x = (y^2 - k)/2, and by W^s from z_m back to z_h.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "exitime/errors.hpp"
#include "exitime/geometry.hpp"
#include "exitime/maps.hpp"

namespace exitime {

enum class Stability { Unstable, Stable };

[[nodiscard]] inline const char* to_string(Stability s) noexcept {
    return s == Stability::Unstable ? "unstable" : "stable";
}

/// Evaluates points of the left-going saddle branch by parameter.
class ManifoldParametrization {
public:
    ManifoldParametrization(double k, Stability stability, double epsilon)
        : map_(k), stability_(stability), epsilon_(epsilon) {
        if (!(epsilon >= 1e-8 && epsilon <= 1e-4)) throw InvalidArgument("epsilon must lie in [1e-8, 1e-4]");
        const FixedPoints fp = map_.fixed_points();
        saddle_ = fp.saddle;
        const Eigenstructure eig = map_.saddle_eigenstructure();
        // left-going unstable direction; the stable one is its reflection
        direction_ = {-eig.unstable[0], -eig.unstable[1]};
        if (stability == Stability::Stable) direction_ = henon_reversor(direction_);
        seed_offset_ = {epsilon * direction_[0], epsilon * direction_[1]};
        image_offset_ = step_offset(seed_offset_);
        seed_ = {saddle_[0] + seed_offset_[0], saddle_[1] + seed_offset_[1]};
    }

    [[nodiscard]] const Henon& map() const noexcept { return map_; }
    [[nodiscard]] Stability stability() const noexcept { return stability_; }
    [[nodiscard]] double epsilon() const noexcept { return epsilon_; }
    [[nodiscard]] const Point2& saddle() const noexcept { return saddle_; }
    [[nodiscard]] const Point2& direction() const noexcept { return direction_; }
    [[nodiscard]] const Point2& seed() const noexcept { return seed_; }

    /// One step along the branch: H for W^u, H^{-1} for W^s.
    [[nodiscard]] Point2 step(const Point2& p) const noexcept {
        return stability_ == Stability::Unstable ? map_.forward(p) : map_.inverse(p);
    }

    /// The step in coordinates relative to the saddle. Near the saddle this
    /// keeps the full precision of the offset, which absolute coordinates
    /// round to ulp(x_s).
    [[nodiscard]] Point2 step_offset(const Point2& d) const noexcept {
        const double xs = saddle_[0];
        if (stability_ == Stability::Unstable) return {d[1] + 2.0 * xs * d[0] + d[0] * d[0], -d[0]};
        return {-d[1], d[0] + 2.0 * xs * d[1] - d[1] * d[1]};
    }

    [[nodiscard]] Point2 operator()(double u) const noexcept {
        const double n = std::floor(u);
        const double s = u - n;
        Point2 d{seed_offset_[0] + s * (image_offset_[0] - seed_offset_[0]),
                 seed_offset_[1] + s * (image_offset_[1] - seed_offset_[1])};
        for (long i = 0; i < static_cast<long>(n); ++i) {
            d = step_offset(d);
            if (is_escaped(d)) break;
        }
        return {saddle_[0] + d[0], saddle_[1] + d[1]};
    }

private:
    Henon map_;
    Stability stability_;
    double epsilon_;
    Point2 saddle_{};
    Point2 direction_{};
    Point2 seed_{};
    Point2 seed_offset_{};
    Point2 image_offset_{};
};

/// Ordered polyline approximating one branch of a saddle manifold.
struct ManifoldBranch {
    Point2 saddle{};
    Stability stability = Stability::Unstable;
    double epsilon = 1e-6;
    double h_target = 0.0;
    std::vector<Point2> vertices;
    std::vector<double> parameter; ///< u of each vertex
    double arclength = 0.0;

    /// Number of map iterates applied to the fundamental segment.
    [[nodiscard]] long depth(std::size_t i) const noexcept { return static_cast<long>(std::floor(parameter[i])); }
    [[nodiscard]] std::size_t size() const noexcept { return vertices.size(); }
};

struct GrowthOptions {
    double arclength_budget = 40.0;
    double h_target = 0.01;
    double epsilon = 1e-6;
    double max_turning = 0.2;
    /// Stop once the parameter reaches this value (inclusive).
    double max_parameter = std::numeric_limits<double>::infinity();
    /// Optional early stop, checked after each completed block.
    std::function<bool(const ManifoldBranch&)> done;
};

namespace detail {

inline double dist(const Point2& a, const Point2& b) noexcept { return std::hypot(a[0] - b[0], a[1] - b[1]); }

inline double turning_angle(const Point2& a, const Point2& b, const Point2& c) noexcept {
    const double ux = b[0] - a[0], uy = b[1] - a[1];
    const double vx = c[0] - b[0], vy = c[1] - b[1];
    return std::abs(std::atan2(ux * vy - uy * vx, ux * vx + uy * vy));
}

/// Parameter gap below which segments are not split further.
inline double min_gap(double u) noexcept { return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, u); }

} // namespace detail

/// Grows a branch block by block, splitting segments (by parameter) until
/// each is at most h_target long and every turning angle is at most
/// max_turning. Growth stops at the arclength budget, the parameter cap, the
/// escape radius, or when `done` returns true.
[[nodiscard]] inline ManifoldBranch grow_branch(const ManifoldParametrization& param, const GrowthOptions& opt) {
    if (!(opt.h_target > 0.0)) throw InvalidArgument("h_target must be positive");
    const double escape = param.map().escape_radius();
    ManifoldBranch b;
    b.saddle = param.saddle();
    b.stability = param.stability();
    b.epsilon = param.epsilon();
    b.h_target = opt.h_target;
    b.vertices.push_back(param(0.0));
    b.parameter.push_back(0.0);

    auto escaped = [&](const Point2& p) { return is_escaped(p) || std::abs(p[0]) > escape || std::abs(p[1]) > escape; };

    for (long n = 0;; ++n) {
        const double ua = static_cast<double>(n);
        if (ua >= opt.max_parameter) break;
        const double ub = std::min(ua + 1.0, opt.max_parameter);

        // spacing refinement by recursive parameter bisection
        std::vector<double> us{ua};
        std::vector<Point2> ps{b.vertices.back()};
        struct Seg {
            double u0, u1;
            Point2 p0, p1;
        };
        std::vector<Seg> stack{{ua, ub, b.vertices.back(), param(ub)}};
        std::vector<std::pair<double, Point2>> out;
        while (!stack.empty()) {
            Seg s = stack.back();
            stack.pop_back();
            if (detail::dist(s.p0, s.p1) > opt.h_target && s.u1 - s.u0 > detail::min_gap(s.u1) && !escaped(s.p1)) {
                const double um = 0.5 * (s.u0 + s.u1);
                const Point2 pm = param(um);
                stack.push_back({um, s.u1, pm, s.p1}); // processed after the left half
                stack.push_back({s.u0, um, s.p0, pm});
            } else {
                out.emplace_back(s.u1, s.p1);
            }
        }
        for (auto& [u, p] : out) {
            us.push_back(u);
            ps.push_back(p);
        }

        // turning-angle refinement; the previous block's last segment is fixed
        for (int pass = 0; pass < 40; ++pass) {
            std::vector<char> split(us.size(), 0); // split segment i -> i+1
            bool any = false;
            const std::size_t first = b.vertices.size() >= 2 ? 0 : 1;
            for (std::size_t i = first; i + 1 < us.size(); ++i) {
                const Point2& prev = i == 0 ? b.vertices[b.vertices.size() - 2] : ps[i - 1];
                if (detail::turning_angle(prev, ps[i], ps[i + 1]) > opt.max_turning) {
                    if (i > 0 && us[i] - us[i - 1] > detail::min_gap(us[i])) split[i - 1] = 1;
                    if (us[i + 1] - us[i] > detail::min_gap(us[i + 1])) split[i] = 1;
                    any = any || (i > 0 && split[i - 1]) || split[i];
                }
            }
            if (!any) break;
            std::vector<double> nu;
            std::vector<Point2> np;
            for (std::size_t i = 0; i < us.size(); ++i) {
                nu.push_back(us[i]);
                np.push_back(ps[i]);
                if (i + 1 < us.size() && split[i] && !escaped(ps[i + 1])) {
                    const double um = 0.5 * (us[i] + us[i + 1]);
                    nu.push_back(um);
                    np.push_back(param(um));
                }
            }
            us.swap(nu);
            ps.swap(np);
        }

        bool stop = false;
        for (std::size_t i = 1; i < us.size(); ++i) {
            b.arclength += detail::dist(b.vertices.back(), ps[i]);
            b.vertices.push_back(ps[i]);
            b.parameter.push_back(us[i]);
            if (escaped(ps[i])) {
                stop = true;
                break;
            }
        }
        if (stop || b.arclength >= opt.arclength_budget) break;
        if (opt.done && opt.done(b)) break;
    }
    return b;
}

/// x + y, zero on the reversor's fixed line.
[[nodiscard]] inline double symmetry_line_residual(const Point2& p) noexcept { return p[0] + p[1]; }

/// x - (y^2 - k)/2, zero on the fixed line of H∘R.
[[nodiscard]] inline double second_symmetry_residual(const Point2& p, double k) noexcept {
    return p[0] - 0.5 * (p[1] * p[1] - k);
}

/// First index i >= start with residual sign change between vertices i and i+1.
template <class F>
[[nodiscard]] std::optional<std::size_t> first_sign_change(const ManifoldBranch& b, F residual, std::size_t start = 0) {
    for (std::size_t i = start; i + 1 < b.size(); ++i) {
        const double r0 = residual(b.vertices[i]);
        const double r1 = residual(b.vertices[i + 1]);
        if (r0 == 0.0 && i > start) return i;
        if ((r0 < 0.0 && r1 > 0.0) || (r0 > 0.0 && r1 < 0.0)) return i;
    }
    return std::nullopt;
}

/// Root of residual(param(u)) in [u0, u1] (a sign change is required),
/// by the Illinois variant of regula falsi with bisection safeguard.
template <class F>
[[nodiscard]] double refine_root(const ManifoldParametrization& param, F residual, double u0, double u1,
                                 double tol = 1e-14) {
    double f0 = residual(param(u0));
    double f1 = residual(param(u1));
    if (f0 == 0.0) return u0;
    if (f1 == 0.0) return u1;
    if ((f0 < 0.0) == (f1 < 0.0)) throw InvalidArgument("root is not bracketed");
    int side = 0;
    for (int it = 0; it < 200; ++it) {
        double um = (u0 * f1 - u1 * f0) / (f1 - f0);
        if (!(um > u0 && um < u1) || it % 8 == 7) um = 0.5 * (u0 + u1);
        const double fm = residual(param(um));
        if (std::abs(fm) <= tol || u1 - u0 <= detail::min_gap(u1)) return um;
        if ((fm < 0.0) == (f0 < 0.0)) {
            u0 = um;
            f0 = fm;
            if (side == -1) f1 *= 0.5;
            side = -1;
        } else {
            u1 = um;
            f1 = fm;
            if (side == 1) f0 *= 0.5;
            side = 1;
        }
    }
    return 0.5 * (u0 + u1);
}

/// Grows one left-going branch of the Hénon saddle up to the arclength
/// budget. Throws BudgetExceeded if it never crosses x + y = 0.
[[nodiscard]] inline ManifoldBranch grow_manifold(double k, Stability stability, double arclength_budget,
                                                  double h_target, double epsilon = 1e-6) {
    const ManifoldParametrization param(k, stability, epsilon);
    GrowthOptions opt;
    opt.arclength_budget = arclength_budget;
    opt.h_target = h_target;
    opt.epsilon = epsilon;
    ManifoldBranch b = grow_branch(param, opt);
    if (!first_sign_change(b, symmetry_line_residual, 1))
        throw BudgetExceeded("branch did not reach the symmetry line within arclength " +
                             std::to_string(arclength_budget));
    return b;
}

// ---------------------------------------------------------------------------
// Homoclinic points and actions

struct HomoclinicPair {
    Point2 z_h{};          ///< first crossing of W^u with x + y = 0
    Point2 z_m{};          ///< next homoclinic point, on x = (y^2 - k)/2
    double u_h = 0.0;      ///< branch parameter of z_h
    double u_m = 0.0;      ///< branch parameter of z_m
    double action_h = 0.0; ///< orbit action relative to the saddle
    double action_m = 0.0;

    /// Label of the orbit with the larger action.
    [[nodiscard]] const char* minimax_label() const noexcept { return action_h >= action_m ? "z_h" : "z_m"; }
};

/// Lagrangian generating function of the Hénon map,
/// L(x, x') = -x x' + x^3/3 - k x, whose stationary sums give
/// x_{n+1} + x_{n-1} = x_n^2 - k.
[[nodiscard]] constexpr double henon_generating_function(double x, double xn, double k) noexcept {
    return -x * xn + x * x * x / 3.0 - k * x;
}

enum class OrbitSymmetry {
    Reversor,       ///< orbit point on x + y = 0: H^n(z) = R H^{-n}(z)
    SecondReversor, ///< orbit point on x = (y^2-k)/2: H^n(z) = R H^{-n-1}(z)
};

/// Maximum orbit length accepted by the action sum.
inline constexpr long kMaxActionTerms = 200;

/// Action of the homoclinic orbit through param(u) relative to the saddle,
/// sum_n [L(x_n, x_{n+1}) - L(x_s, x_s)]. The orbit is read off the branch
/// (backward half) and the reversor (forward half). The first-order terms of
/// the sum telescope near the saddle, so the truncated tails are replaced by
/// x_s (x_last - x_s) - x_s (x_first - x_s), leaving an O(eps^2) error.
[[nodiscard]] inline double homoclinic_action(const ManifoldParametrization& param, double u, OrbitSymmetry sym) {
    const double k = param.map().k();
    const double xs = param.saddle()[0];
    const long back = static_cast<long>(std::floor(u));
    if (2 * back + 2 > kMaxActionTerms)
        throw ActionNotConverged("homoclinic orbit needs more than " + std::to_string(kMaxActionTerms) + " terms");

    // backward half p_{-j} = param(u - j), j = 0..back
    std::vector<Point2> backward;
    for (long j = 0; j <= back; ++j) backward.push_back(param(u - static_cast<double>(j)));

    std::vector<double> xs_seq; // x_n for n = -back .. forward_end
    for (long j = back; j >= 0; --j) xs_seq.push_back(backward[static_cast<std::size_t>(j)][0]);
    if (sym == OrbitSymmetry::Reversor) {
        for (long n = 1; n <= back; ++n) xs_seq.push_back(henon_reversor(backward[static_cast<std::size_t>(n)])[0]);
    } else {
        for (long n = 1; n + 1 <= back; ++n)
            xs_seq.push_back(henon_reversor(backward[static_cast<std::size_t>(n + 1)])[0]);
    }

    const double ls = henon_generating_function(xs, xs, k);
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i + 1 < xs_seq.size(); ++i) {
        const double term = (henon_generating_function(xs_seq[i], xs_seq[i + 1], k) - ls) - comp;
        const double t = sum + term;
        comp = (t - sum) - term;
        sum = t;
    }
    const double tail = xs * (xs_seq.back() - xs) - xs * (xs_seq.front() - xs);
    const double total = sum + tail;
    if (!std::isfinite(total)) throw ActionNotConverged("action sum is not finite");
    return total;
}

struct HomoclinicSearchOptions {
    double epsilon = 1e-6;
    double h_coarse = 0.01;
    double arclength_cap = 400.0;
};

/// Locates z_h and z_m on the unstable branch.
[[nodiscard]] inline HomoclinicPair find_symmetric_homoclinics(double k, const HomoclinicSearchOptions& opt = {}) {
    const ManifoldParametrization param(k, Stability::Unstable, opt.epsilon);
    auto fix_r = [](const Point2& p) { return symmetry_line_residual(p); };
    auto fix_hr = [k](const Point2& p) { return second_symmetry_residual(p, k); };

    GrowthOptions g;
    g.h_target = opt.h_coarse;
    g.epsilon = opt.epsilon;
    g.arclength_budget = opt.arclength_cap;
    g.done = [&](const ManifoldBranch& b) {
        const auto ih = first_sign_change(b, fix_r, 1);
        return ih && first_sign_change(b, fix_hr, *ih + 1).has_value();
    };
    const ManifoldBranch coarse = grow_branch(param, g);
    const auto ih = first_sign_change(coarse, fix_r, 1);
    if (!ih) throw NoHomoclinicFound("unstable branch never crossed x + y = 0");
    const auto im = first_sign_change(coarse, fix_hr, *ih + 1);
    if (!im) throw NoHomoclinicFound("no second homoclinic point after z_h");

    HomoclinicPair pair;
    pair.u_h = refine_root(param, fix_r, coarse.parameter[*ih], coarse.parameter[*ih + 1]);
    pair.u_m = refine_root(param, fix_hr, coarse.parameter[*im], coarse.parameter[*im + 1]);
    if (!(pair.u_m > pair.u_h && pair.u_m - 1.0 < pair.u_h))
        throw NoHomoclinicFound("homoclinic points are not adjacent within one fundamental domain");
    pair.z_h = param(pair.u_h);
    pair.z_m = param(pair.u_m);
    pair.action_h = homoclinic_action(param, pair.u_h, OrbitSymmetry::Reversor);
    pair.action_m = homoclinic_action(param, pair.u_m, OrbitSymmetry::SecondReversor);
    return pair;
}

// ---------------------------------------------------------------------------
// Zone

enum class BoundaryPiece { Saddle, Unstable, Stable };

[[nodiscard]] inline const char* to_string(BoundaryPiece p) noexcept {
    switch (p) {
    case BoundaryPiece::Saddle: return "saddle";
    case BoundaryPiece::Unstable: return "unstable";
    default: return "stable";
    }
}

struct BoundaryTag {
    BoundaryPiece piece = BoundaryPiece::Saddle;
    long depth = 0;
};

/// Single-valued curve y(x) given as a polyline monotone in x.
class GraphCurve {
public:
    GraphCurve() = default;
    explicit GraphCurve(std::vector<Point2> pts) : pts_(std::move(pts)) {
        if (pts_.size() < 2) throw InvalidArgument("graph needs two points");
        if (pts_.front()[0] > pts_.back()[0]) std::reverse(pts_.begin(), pts_.end());
        for (std::size_t i = 0; i + 1 < pts_.size(); ++i)
            if (!(pts_[i + 1][0] > pts_[i][0])) throw UnsupportedGeometry("lobe boundary is not a graph over x");
    }

    [[nodiscard]] double x_min() const noexcept { return pts_.front()[0]; }
    [[nodiscard]] double x_max() const noexcept { return pts_.back()[0]; }
    [[nodiscard]] const std::vector<Point2>& points() const noexcept { return pts_; }

    [[nodiscard]] double operator()(double x) const noexcept {
        if (x <= pts_.front()[0]) return pts_.front()[1];
        if (x >= pts_.back()[0]) return pts_.back()[1];
        auto it = std::upper_bound(pts_.begin(), pts_.end(), x,
                                   [](double v, const Point2& p) { return v < p[0]; });
        const Point2& b = *it;
        const Point2& a = *(it - 1);
        const double t = (x - a[0]) / (b[0] - a[0]);
        return a[1] + t * (b[1] - a[1]);
    }

private:
    std::vector<Point2> pts_;
};

/// The fixed-point resonance zone with its incoming lobe.
struct ResonanceZone {
    double k = 0.0;
    std::size_t pixels = 0; ///< N
    double h = 0.0;         ///< (x_m - x_h) / N in absolute value
    double epsilon = 1e-6;
    Point2 saddle{};
    Point2 elliptic{};
    HomoclinicPair homoclinics;

    Polygon boundary;
    std::vector<BoundaryTag> boundary_tags;

    std::vector<Point2> lobe_unstable; ///< W^u from z_h to z_m
    std::vector<Point2> lobe_stable;   ///< W^s from z_m to z_h
    GraphCurve y_unstable;
    GraphCurve y_stable;
    double x_lo = 0.0, x_hi = 0.0;

    [[nodiscard]] Henon map() const noexcept { return Henon(k); }
    [[nodiscard]] bool contains(const Point2& p) const noexcept { return boundary.contains(p); }

    /// Fiber bounds of the lobe at abscissa x (lower, upper).
    [[nodiscard]] std::pair<double, double> fiber(double x) const noexcept {
        const double a = y_unstable(x);
        const double b = y_stable(x);
        return {std::min(a, b), std::max(a, b)};
    }

    [[nodiscard]] std::vector<Point2> lobe_polygon() const {
        std::vector<Point2> v(lobe_unstable.begin(), lobe_unstable.end());
        v.insert(v.end(), lobe_stable.begin() + 1, lobe_stable.end() - 1);
        return v;
    }
    /// Reflection of the entry lobe, which is the exit lobe.
    [[nodiscard]] std::vector<Point2> exit_lobe_polygon() const {
        std::vector<Point2> v = lobe_polygon();
        for (auto& p : v) p = henon_reversor(p);
        return v;
    }
    [[nodiscard]] double geometric_area() const noexcept { return boundary.area(); }
    [[nodiscard]] double lobe_geometric_area() const { return std::abs(Polygon::shoelace(lobe_polygon())); }
};

struct ZoneOptions {
    double epsilon = 1e-6;
    double h_coarse = 0.01;
    double max_turning = 0.2;
    /// Boundary vertex spacing as a fraction of the lobe resolution h.
    double spacing = 1.0;
};

/// Supported parameter window for zone construction.
inline constexpr double kZoneMinK = -0.8;
inline constexpr double kZoneMaxK = 5.0;

[[nodiscard]] inline ResonanceZone build_zone(double k, std::size_t pixels, const ZoneOptions& opt = {}) {
    if (!(k >= kZoneMinK && k <= kZoneMaxK))
        throw InvalidArgument("zone construction supports k in [-0.8, 5], got " + std::to_string(k));
    if (pixels < 2) throw InvalidArgument("pixel count N must be at least 2");

    HomoclinicSearchOptions hs;
    hs.epsilon = opt.epsilon;
    hs.h_coarse = opt.h_coarse;
    ResonanceZone z;
    z.k = k;
    z.pixels = pixels;
    z.epsilon = opt.epsilon;
    z.homoclinics = find_symmetric_homoclinics(k, hs);
    const HomoclinicPair& hp = z.homoclinics;
    const FixedPoints fp = henon_fixed_points({k});
    z.saddle = fp.saddle;
    z.elliptic = fp.elliptic;
    z.h = std::abs(hp.z_m[0] - hp.z_h[0]) / static_cast<double>(pixels);

    const ManifoldParametrization param(k, Stability::Unstable, opt.epsilon);
    GrowthOptions g;
    g.h_target = z.h * opt.spacing;
    g.epsilon = opt.epsilon;
    g.max_turning = opt.max_turning;
    g.arclength_budget = std::numeric_limits<double>::infinity();
    g.max_parameter = hp.u_m;
    ManifoldBranch wu = grow_branch(param, g);
    if (wu.parameter.back() < hp.u_m) throw BudgetExceeded("unstable branch escaped before reaching z_m");

    // splice in the exact parameters of z_h, H^{-1}(z_m) and z_m
    for (double u : {hp.u_m - 1.0, hp.u_h, hp.u_m}) {
        auto it = std::lower_bound(wu.parameter.begin(), wu.parameter.end(), u);
        const auto idx = static_cast<std::size_t>(it - wu.parameter.begin());
        if (it != wu.parameter.end() && *it == u) continue;
        wu.parameter.insert(it, u);
        wu.vertices.insert(wu.vertices.begin() + static_cast<std::ptrdiff_t>(idx), param(u));
    }
    auto index_of = [&](double u) {
        return static_cast<std::size_t>(std::lower_bound(wu.parameter.begin(), wu.parameter.end(), u) -
                                        wu.parameter.begin());
    };
    const std::size_t ih = index_of(hp.u_h);
    const std::size_t im = index_of(hp.u_m);
    const std::size_t im1 = index_of(hp.u_m - 1.0);

    // boundary: z_s, W^u up to z_h, then R(W^u) back towards z_s
    std::vector<Point2> verts{z.saddle};
    std::vector<BoundaryTag> tags{{BoundaryPiece::Saddle, 0}};
    for (std::size_t i = 0; i <= ih; ++i) {
        verts.push_back(wu.vertices[i]);
        tags.push_back({BoundaryPiece::Unstable, wu.depth(i)});
    }
    for (std::size_t i = ih; i-- > 0;) {
        verts.push_back(henon_reversor(wu.vertices[i]));
        tags.push_back({BoundaryPiece::Stable, wu.depth(i)});
    }
    z.boundary = Polygon(verts);
    z.boundary_tags = std::move(tags);

    z.lobe_unstable.assign(wu.vertices.begin() + static_cast<std::ptrdiff_t>(ih),
                           wu.vertices.begin() + static_cast<std::ptrdiff_t>(im) + 1);
    for (std::size_t i = im1; i <= ih; ++i) z.lobe_stable.push_back(henon_reversor(wu.vertices[i]));
    z.y_unstable = GraphCurve(z.lobe_unstable);
    z.y_stable = GraphCurve(z.lobe_stable);
    z.x_lo = std::max(z.y_unstable.x_min(), z.y_stable.x_min());
    z.x_hi = std::min(z.y_unstable.x_max(), z.y_stable.x_max());
    return z;
}

struct AreaPair {
    double by_action = 0.0;
    double by_geometry = 0.0;

    [[nodiscard]] double relative_difference() const noexcept {
        return std::abs(by_action - by_geometry) / std::max(std::abs(by_action), std::abs(by_geometry));
    }
};

/// Lobe area as the action difference of the two homoclinic orbits, and as
/// the shoelace area of the lobe polygon.
[[nodiscard]] inline AreaPair lobe_area(const ResonanceZone& zone) {
    return {std::abs(zone.homoclinics.action_h - zone.homoclinics.action_m), zone.lobe_geometric_area()};
}

/// Zone area as the action of the z_h orbit relative to the saddle, and as
/// the shoelace area of the boundary polygon.
[[nodiscard]] inline AreaPair resonance_area(const ResonanceZone& zone) {
    return {std::abs(zone.homoclinics.action_h), zone.geometric_area()};
}

/// Area enclosed by the near saddle connections of the period-4 (k in
/// (0, 0.4]) or period-3 (k in [1.28, 2]) saddle orbits, else nullopt.
[[nodiscard]] inline std::optional<double> approx_inaccessible(double k) noexcept {
    if (k > 0.0 && k <= 0.4) return 4.0 * k;
    if (k >= 1.28 && k <= 2.0) {
        const double beta = std::sqrt(k - 1.0);
        return 0.5 * (2.0 * beta - 1.0) * (2.0 * beta - 1.0);
    }
    return std::nullopt;
}

} // namespace exitime
