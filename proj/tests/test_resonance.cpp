#include <cmath>

#include <gtest/gtest.h>

#include "exitime/geometry.hpp"
#include "exitime/maps.hpp"
#include "exitime/random.hpp"
#include "exitime/resonance.hpp"
#include "exitime/transit.hpp"

using namespace exitime;

namespace {

const ResonanceZone& zone(double k) {
    static std::map<double, ResonanceZone> cache;
    auto it = cache.find(k);
    if (it == cache.end()) it = cache.emplace(k, build_zone(k, 2000)).first;
    return it->second;
}

// closest approach of the orbit of z to the saddle, forward or backward
double closest_to_saddle(const Henon& h, Point2 z, bool forward, int steps) {
    const Point2 s = h.fixed_points().saddle;
    double best = std::hypot(z[0] - s[0], z[1] - s[1]);
    for (int n = 0; n < steps; ++n) {
        z = forward ? h.forward(z) : h.inverse(z);
        if (is_escaped(z)) break;
        best = std::min(best, std::hypot(z[0] - s[0], z[1] - s[1]));
    }
    return best;
}

} // namespace

TEST(GrowManifold, SeedAlongUnstableDirection) {
    const double eps = 1e-6;
    const auto b = grow_manifold(0.5, Stability::Unstable, 20.0, 0.01, eps);
    const auto e = henon_saddle_eigenstructure({0.5});
    const auto s = henon_fixed_points({0.5}).saddle;
    EXPECT_NEAR(b.vertices.front()[0], s[0] - eps * e.unstable[0], 1e-15);
    EXPECT_NEAR(b.vertices.front()[1], s[1] - eps * e.unstable[1], 1e-15);
    EXPECT_LT(b.vertices.front()[0], s[0]); // left-going
}

TEST(GrowManifold, CrossesSymmetryLineWithinArclength20) {
    const auto b = grow_manifold(0.5, Stability::Unstable, 20.0, 0.01);
    const auto i = first_sign_change(b, symmetry_line_residual, 1);
    ASSERT_TRUE(i.has_value());
    double len = 0.0;
    for (std::size_t j = 0; j < *i; ++j)
        len += std::hypot(b.vertices[j + 1][0] - b.vertices[j][0], b.vertices[j + 1][1] - b.vertices[j][1]);
    EXPECT_LT(len, 20.0);
}

TEST(GrowManifold, SpacingAndTurning) {
    const double h = 0.005;
    const auto b = grow_manifold(0.5, Stability::Unstable, 15.0, h);
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        const double d = std::hypot(b.vertices[i + 1][0] - b.vertices[i][0], b.vertices[i + 1][1] - b.vertices[i][1]);
        ASSERT_LE(d, h * (1.0 + 1e-9)) << i;
        ASSERT_GT(b.parameter[i + 1], b.parameter[i]);
    }
    for (std::size_t i = 1; i + 1 < b.size(); ++i) {
        const double ux = b.vertices[i][0] - b.vertices[i - 1][0], uy = b.vertices[i][1] - b.vertices[i - 1][1];
        const double vx = b.vertices[i + 1][0] - b.vertices[i][0], vy = b.vertices[i + 1][1] - b.vertices[i][1];
        ASSERT_LE(std::abs(std::atan2(ux * vy - uy * vx, ux * vx + uy * vy)), 0.2 + 1e-9) << i;
    }
}

TEST(GrowManifold, VerticesLieOnTheManifold) {
    // every vertex maps back, through the fundamental-domain parameter, onto
    // the linear seed segment
    const auto b = grow_manifold(0.5, Stability::Unstable, 15.0, 0.01);
    const Henon h(0.5);
    const ManifoldParametrization param(0.5, Stability::Unstable, 1e-6);
    for (std::size_t i = 0; i < b.size(); i += 7) {
        Point2 p = b.vertices[i];
        for (long n = 0; n < b.depth(i); ++n) p = h.inverse(p);
        const Point2 q = param(b.parameter[i] - double(b.depth(i)));
        EXPECT_LT(std::hypot(p[0] - q[0], p[1] - q[1]), 1e-8) << i;
    }
}

TEST(GrowManifold, ReversorMapsUnstableToStable) {
    const double h = 0.01;
    const auto wu = grow_manifold(0.5, Stability::Unstable, 12.0, h);
    const auto ws = grow_manifold(0.5, Stability::Stable, 12.0, h);
    std::vector<Point2> ru;
    for (const auto& p : wu.vertices) ru.push_back(henon_reversor(p));
    // compare over the common parameter range
    EXPECT_LT(hausdorff_distance(ru, ws.vertices), 2.0 * h);
    // the stable branch is invariant: H^{-1} moves a vertex one fundamental
    // domain outwards, H one domain inwards
    const Henon hm(0.5);
    const double u_end = ws.parameter.back();
    for (std::size_t i = 0; i < ws.size(); i += 5) {
        EXPECT_LT(polyline_distance(ws.vertices, hm.forward(ws.vertices[i])), 2.0 * h);
        if (ws.parameter[i] <= u_end - 1.0) {
            EXPECT_LT(polyline_distance(ws.vertices, hm.inverse(ws.vertices[i])), 2.0 * h);
        }
    }
}

TEST(GrowManifold, BudgetExceeded) {
    EXPECT_THROW((void)grow_manifold(0.5, Stability::Unstable, 0.5, 0.01), BudgetExceeded);
    EXPECT_THROW((void)grow_manifold(0.5, Stability::Unstable, 5.0, 0.01, 1e-2), InvalidArgument);
}

TEST(Homoclinics, FoundAndDistinct) {
    const auto p = find_symmetric_homoclinics(0.5);
    EXPECT_NE(p.z_h[0], p.z_m[0]);
    EXPECT_GT(std::abs(p.z_m[0] - p.z_h[0]) / 10000.0, 0.0);
    EXPECT_LT(std::abs(p.z_h[0] + p.z_h[1]), 1e-10);
    EXPECT_LT(std::abs(second_symmetry_residual(p.z_m, 0.5)), 1e-10);
    EXPECT_GT(p.u_m, p.u_h);
    EXPECT_LT(p.u_m - p.u_h, 1.0);
}

TEST(Homoclinics, OrbitsAreDoublyAsymptotic) {
    for (double k : {-0.5, 0.5, 1.6, 4.0}) {
        const auto p = find_symmetric_homoclinics(k);
        const Henon h(k);
        for (const auto& z : {p.z_h, p.z_m}) {
            EXPECT_LT(closest_to_saddle(h, z, true, 200), 1e-5) << "k=" << k;
            EXPECT_LT(closest_to_saddle(h, z, false, 200), 1e-5) << "k=" << k;
        }
    }
}

TEST(Homoclinics, ReversorSymmetryOfZm) {
    // z_m on Fix(HR) means R z_m = H^{-1} z_m, a point on W^u one domain back
    const double k = 0.5;
    const auto p = find_symmetric_homoclinics(k);
    const ManifoldParametrization param(k, Stability::Unstable, 1e-6);
    const Point2 r = henon_reversor(p.z_m);
    const Point2 q = param(p.u_m - 1.0);
    EXPECT_LT(std::hypot(r[0] - q[0], r[1] - q[1]), 1e-10);
    const Point2 hi = Henon(k).inverse(p.z_m);
    EXPECT_LT(std::hypot(r[0] - hi[0], r[1] - hi[1]), 1e-10);
}

TEST(Homoclinics, ForwardImageOfZmStaysOnManifold) {
    const auto& z = zone(0.5);
    const auto b = grow_manifold(0.5, Stability::Unstable, 30.0, z.h);
    const Point2 f = z.map().forward(z.homoclinics.z_m);
    EXPECT_LT(polyline_distance(b.vertices, f), z.h);
}

TEST(Homoclinics, GeneratingFunctionIsStationaryOnOrbits) {
    // d/dx_n [L(x_{n-1}, x_n) + L(x_n, x_{n+1})] = 0 along H orbits
    const double k = 0.7;
    const Henon h(k);
    Point2 p{0.3, -0.2};
    std::vector<double> x;
    for (int i = 0; i < 6; ++i) {
        x.push_back(p[0]);
        p = h.forward(p);
    }
    for (std::size_t n = 1; n + 1 < x.size(); ++n) {
        const double d = 1e-6;
        auto S = [&](double v) {
            return henon_generating_function(x[n - 1], v, k) + henon_generating_function(v, x[n + 1], k);
        };
        EXPECT_NEAR((S(x[n] + d) - S(x[n] - d)) / (2 * d), 0.0, 1e-7);
    }
}

TEST(Zone, Containment) {
    const auto& z = zone(0.5);
    EXPECT_TRUE(z.contains(z.elliptic));
    EXPECT_FALSE(z.contains({10.0, 10.0}));
    EXPECT_EQ(z.boundary.vertices().front(), z.saddle);
    const double xs = z.saddle[0];
    const auto& bb = z.boundary.bounding_box();
    for (int d = 0; d < 2; ++d) {
        EXPECT_GE(bb.lo[d], -xs - 1e-9);
        EXPECT_LE(bb.hi[d], xs + 1e-9);
    }
    EXPECT_GE(z.boundary.size(), 2 * z.pixels);
    EXPECT_NEAR(z.h, std::abs(z.homoclinics.z_m[0] - z.homoclinics.z_h[0]) / 2000.0, 1e-15);
}

TEST(Zone, LobeHasPositiveWidth) {
    const auto& z = zone(0.5);
    EXPECT_LT(z.x_lo, z.x_hi);
    for (int i = 1; i < 2000; ++i) {
        const double x = z.x_lo + (z.x_hi - z.x_lo) * i / 2000.0;
        ASSERT_GT(z.y_stable(x), z.y_unstable(x)) << x;
    }
}

TEST(Zone, EntryLobeIsTheEntrySet) {
    const auto& z = zone(0.5);
    const Henon h = z.map();
    const Polygon lobe(z.lobe_polygon());
    const Polygon exit_lobe(z.exit_lobe_polygon());
    const EntrySet<Henon, ResonanceZone> I{&h, &z};
    const ExitSet<Henon, ResonanceZone> E{&h, &z};
    const BoxSampler<2> s(lobe.bounding_box(), 100000, SamplingMode::Random, 3);
    int mismatches = 0, inside = 0;
    for (std::uint64_t i = 0; i < s.size(); ++i) {
        const Point2 p = s(i);
        const bool in_lobe = lobe.contains(p);
        inside += in_lobe;
        if (I.contains(p) != in_lobe && polyline_distance(lobe.vertices(), p) > 2.0 * z.h) ++mismatches;
        if (E.contains(henon_reversor(p)) != I.contains(p)) ++mismatches;
        if (exit_lobe.contains(henon_reversor(p)) != in_lobe) ++mismatches;
    }
    EXPECT_EQ(mismatches, 0);
    EXPECT_GT(inside, 1000);
    EXPECT_NEAR(exit_lobe.area(), lobe.area(), 0.005 * lobe.area());
}

TEST(Zone, ManifoldInvariance) {
    const auto& z = zone(0.5);
    const Henon h = z.map();
    const auto& v = z.boundary.vertices();
    const long depth_h = static_cast<long>(std::floor(z.homoclinics.u_h));
    for (std::size_t i = 0; i < v.size(); i += 11) {
        const auto tag = z.boundary_tags[i];
        if (tag.piece == BoundaryPiece::Saddle) continue;
        const bool unstable = tag.piece == BoundaryPiece::Unstable;
        // towards the saddle, always on the boundary
        ASSERT_LT(polyline_distance(v, unstable ? h.inverse(v[i]) : h.forward(v[i])), 2.0 * z.h) << i;
        // away from the saddle, while the image stays before z_h
        if (tag.depth < depth_h - 1) {
            ASSERT_LT(polyline_distance(v, unstable ? h.forward(v[i]) : h.inverse(v[i])), 2.0 * z.h) << i;
        }
    }
}

TEST(Zone, PeriodThreeTriangleInside) {
    const auto& z = zone(1.6);
    const double b = std::sqrt(0.6);
    const Point2 a{-b, b}, c{-1.0 + b, b}, d{-b, 1.0 - b};
    EXPECT_TRUE(z.contains(a));
    EXPECT_TRUE(z.contains(c));
    EXPECT_TRUE(z.contains(d));
    EXPECT_TRUE(z.contains({(a[0] + c[0] + d[0]) / 3.0, (a[1] + c[1] + d[1]) / 3.0}));
}

TEST(Zone, UnsupportedK) {
    EXPECT_THROW((void)build_zone(-0.9, 100), InvalidArgument);
    EXPECT_THROW((void)build_zone(5.5, 100), InvalidArgument);
    EXPECT_THROW((void)build_zone(0.5, 1), InvalidArgument);
}

TEST(Areas, ActionMatchesShoelace) {
    for (double k : {0.0, 0.5, 1.0, 1.6, 2.0}) {
        const auto& z = zone(k);
        const auto la = lobe_area(z);
        const auto ra = resonance_area(z);
        EXPECT_LT(la.relative_difference(), 0.005) << k;
        EXPECT_LT(ra.relative_difference(), 0.005) << k;
    }
    EXPECT_NEAR(lobe_area(zone(0.5)).by_action, 1.0365, 1e-3);
    EXPECT_NEAR(resonance_area(zone(0.5)).by_action, 10.625, 1e-2);
}

TEST(Areas, MonotoneInK) {
    double lobe = 0.0, area = 0.0;
    for (double k : {-0.8, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0}) {
        const auto z = build_zone(k, 200);
        const double l = lobe_area(z).by_action;
        const double a = resonance_area(z).by_action;
        EXPECT_GT(l, lobe) << k;
        EXPECT_GT(a, area) << k;
        lobe = l;
        area = a;
    }
}

TEST(Areas, SmallNearSaddleNode) {
    // lobe and zone shrink towards the saddle-node at k = -1; the lobe
    // faster than any power of the zone
    double prev_lobe = 1e9, prev_zone = 1e9;
    for (double k : {-0.3, -0.5, -0.6, -0.7, -0.8}) {
        const auto z = build_zone(k, 200);
        const double l = lobe_area(z).by_action;
        const double a = resonance_area(z).by_action;
        EXPECT_LT(l, prev_lobe);
        EXPECT_LT(a, prev_zone);
        prev_lobe = l;
        prev_zone = a;
    }
    EXPECT_LT(prev_lobe, 1e-3);
    EXPECT_LT(prev_lobe / prev_zone, 1e-3);
}

TEST(Areas, ApproxInaccessible) {
    EXPECT_NEAR(*approx_inaccessible(0.3), 1.2, 1e-15);
    EXPECT_NEAR(*approx_inaccessible(1.6), 0.5 * std::pow(2.0 * std::sqrt(0.6) - 1.0, 2), 1e-15);
    EXPECT_NEAR(*approx_inaccessible(1.6), 0.15076, 1e-4); // 0.1508067 to seven digits
    EXPECT_FALSE(approx_inaccessible(0.7).has_value());
    EXPECT_FALSE(approx_inaccessible(0.0).has_value());
    EXPECT_FALSE(approx_inaccessible(2.5).has_value());
}
