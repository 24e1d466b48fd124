#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "ablq/geometry.hpp"
#include "oracles.hpp"

using namespace ablq;

namespace {

double worst_residual(const Line2& line, std::array<Point2, 3> pts) {
    double w = 0.0;
    for (auto p : pts) w = std::max(w, std::abs(line_residual(line, p)));
    return w;
}

std::array<oracle::AB, 3> in_fit_frame(const Line2& line,
                                       std::array<Point2, 3> pts) {
    std::array<oracle::AB, 3> out{};
    for (int i = 0; i < 3; ++i)
        out[i] = line.swapped ? oracle::AB{pts[i].y, pts[i].x}
                              : oracle::AB{pts[i].x, pts[i].y};
    return out;
}

} // namespace

TEST_CASE("minimax line reproduces the worked three-point fit") {
    Point2 cej{0, 0}, inter{1, 3.2}, apex{2, 6};
    Line2 line = minimax_line(cej, inter, apex);

    // Geometric line is y = 3x + 0.1 regardless of which frame the fit
    // picked, so the direction is (1,3)/sqrt(10) up to sign.
    Point2 d = line.direction;
    CHECK(std::abs(std::abs(dot(d, normalize({1, 3}))) - 1.0) < 1e-12);

    // ... and (0, 0.1) lies on it.
    Point2 on{0.0, 0.1};
    CHECK(distance(on, project_onto_line(on, line)) ==
          doctest::Approx(0.0).epsilon(1e-12));

    // This triple is taller than wide, so the fit frame is swapped and the
    // equal ripple is the vertical 0.1 scaled down by the slope.
    CHECK(line.swapped);
    CHECK(worst_residual(line, {cej, inter, apex}) ==
          doctest::Approx(0.1 / 3.0).epsilon(1e-9));
    CHECK(std::abs(line_residual(line, cej)) ==
          doctest::Approx(std::abs(line_residual(line, inter))));
    CHECK(std::abs(line_residual(line, inter)) ==
          doctest::Approx(std::abs(line_residual(line, apex))));
}

TEST_CASE("minimax line matches a brute-force search on random triples") {
    std::mt19937 rng(20240811u);
    std::uniform_real_distribution<double> coord(-50.0, 50.0);
    int tried = 0;
    for (int it = 0; it < 300; ++it) {
        std::array<Point2, 3> pts;
        for (auto& p : pts) p = {coord(rng), coord(rng)};

        Line2 line;
        try {
            line = minimax_line(pts[0], pts[1], pts[2]);
        } catch (const DegenerateTriple&) {
            continue;
        }
        ++tried;

        double lib = worst_residual(line, pts);
        double ref = oracle::grid_minimax(in_fit_frame(line, pts));
        CHECK(lib == doctest::Approx(ref).epsilon(1e-8));

        // Equal ripple: all three residual magnitudes agree, middle
        // abscissa carries the opposite sign.
        auto frame = in_fit_frame(line, pts);
        std::sort(frame.begin(), frame.end(),
                  [](auto a, auto b) { return a.a < b.a; });
        double r1 = frame[0].b - (line.m * frame[0].a + line.c);
        double r2 = frame[1].b - (line.m * frame[1].a + line.c);
        double r3 = frame[2].b - (line.m * frame[2].a + line.c);
        CHECK(r1 == doctest::Approx(r3).epsilon(1e-9));
        CHECK(r1 == doctest::Approx(-r2).epsilon(1e-9));
    }
    CHECK(tried > 250);
}

TEST_CASE("steep triples fit in the swapped frame") {
    Line2 line = minimax_line({5.0, 0.0}, {5.2, 4.0}, {5.0, 10.0});
    CHECK(line.swapped);
    CHECK(std::abs(line.direction.y) > std::abs(line.direction.x));

    // x spread wins but holds a tie, so the fit falls back to the y frame.
    Line2 fallback = minimax_line({0, 0}, {0, 1}, {3, 0.5});
    CHECK(fallback.swapped);
}

TEST_CASE("coincident points cannot be fitted") {
    CHECK_THROWS_AS(minimax_line({1, 1}, {1, 1}, {2, 2}), DegenerateTriple);
}

TEST_CASE("projection and arclength parameters are consistent") {
    Line2 line = minimax_line({0, 0}, {1, 3.2}, {2, 6});
    std::mt19937 rng(7u);
    std::uniform_real_distribution<double> coord(-20.0, 20.0);
    for (int i = 0; i < 50; ++i) {
        Point2 p{coord(rng), coord(rng)};
        Point2 q = project_onto_line(p, line);
        CHECK(std::abs(dot(p - q, line.direction)) < 1e-9);
        CHECK(arclength_parameter(q, line) ==
              doctest::Approx(arclength_parameter(p, line)));
    }
    Point2 a = project_onto_line({0, 0}, line);
    Point2 b = project_onto_line({5, 5}, line);
    CHECK(std::abs(arclength_parameter(b, line) - arclength_parameter(a, line)) ==
          doctest::Approx(distance(a, b)));
}

TEST_CASE("tangent of a straight polyline is its axis") {
    Polyline pl;
    for (int x = 0; x <= 20; ++x) pl.push_back({double(x), 2.0});

    Point2 t = tangent_at(pl, {10.3, 2.2});
    CHECK(std::abs(t.x) == doctest::Approx(1.0));
    CHECK(std::abs(t.y) == doctest::Approx(0.0).epsilon(1e-9));

    Point2 te = tangent_at(pl, {0.0, 2.0});
    CHECK(std::abs(te.x) == doctest::Approx(1.0));

    CHECK_THROWS_AS(tangent_at(pl, {10.0, 13.0}), PointOffPolyline);
}

TEST_CASE("tangent respects the snap distance boundary") {
    Polyline pl{{0, 0}, {100, 0}};
    CHECK_NOTHROW(tangent_at(pl, {50, 9.5}));
    CHECK_THROWS_AS(tangent_at(pl, {50, 10.5}), PointOffPolyline);
}

TEST_CASE("closed outlines wrap the tangent window") {
    // Square traced clockwise, 4 samples per side.
    Polyline sq;
    for (int i = 0; i < 4; ++i) sq.push_back({double(i) * 2.5, 0.0});
    for (int i = 0; i < 4; ++i) sq.push_back({10.0, double(i) * 2.5});
    for (int i = 0; i < 4; ++i) sq.push_back({10.0 - double(i) * 2.5, 10.0});
    for (int i = 0; i < 4; ++i) sq.push_back({0.0, 10.0 - double(i) * 2.5});

    Point2 t = tangent_at(sq, {5.0, 0.0}, 5, 10.0, true);
    CHECK(std::abs(t.x) > std::abs(t.y));

    // Window centered on the first vertex must wrap to the far end.
    Point2 tc = tangent_at(sq, {0.0, 0.0}, 5, 10.0, true);
    CHECK(norm(tc) == doctest::Approx(1.0));
}

TEST_CASE("angle between directions in degrees") {
    CHECK(angle_between({1, 0}, {0, 1}) == doctest::Approx(90.0));
    CHECK(angle_between({1, 0}, {2, 0}) == doctest::Approx(0.0));
    CHECK(angle_between({1, 0}, {-3, 0}) == doctest::Approx(180.0));
    CHECK(angle_between({1, 0}, {3, 4}) == doctest::Approx(53.13010235));
}

TEST_CASE("uniform resampling spaces points evenly in arclength") {
    Polyline pl{{0, 0}, {1, 0}, {10, 0}};
    Polyline rs = resample_uniform(pl, 10);
    REQUIRE(rs.size() == 10);
    CHECK(rs.front().x == doctest::Approx(0.0));
    CHECK(rs.back().x == doctest::Approx(10.0));
    for (std::size_t i = 1; i < rs.size(); ++i)
        CHECK(distance(rs[i - 1], rs[i]) == doctest::Approx(10.0 / 9.0));

    CHECK(oracle::chord_length({{0, 0}, {1, 0}, {10, 0}}) ==
          doctest::Approx(polyline_length(pl)));
}

TEST_CASE("arclength walk on an L shape") {
    Polyline pl{{0, 0}, {2, 0}, {2, 3}};
    Point2 a = point_at_arclength(pl, 1.0);
    CHECK(a.x == doctest::Approx(1.0));
    CHECK(a.y == doctest::Approx(0.0));
    Point2 b = point_at_arclength(pl, 3.5);
    CHECK(b.x == doctest::Approx(2.0));
    CHECK(b.y == doctest::Approx(1.5));
    Point2 c = point_at_arclength(pl, 99.0);
    CHECK(c.x == doctest::Approx(2.0));
    CHECK(c.y == doctest::Approx(3.0));
    Point2 d = point_at_arclength(pl, -1.0);
    CHECK(d.x == doctest::Approx(0.0));
}

TEST_CASE("principal direction recovers the axis of a stretched cloud") {
    Polyline pts;
    for (int i = -10; i <= 10; ++i) {
        Point2 base{2.0 * i, 1.0 * i};
        pts.push_back({base.x, base.y + 0.05});
        pts.push_back({base.x, base.y - 0.05});
    }
    Point2 d = principal_direction(pts);
    CHECK(std::abs(dot(d, normalize({2, 1}))) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("small helpers") {
    CHECK(polyline_length({{0, 0}, {3, 4}}) == doctest::Approx(5.0));
    CHECK(point_segment_distance({0, 1}, {0, 0}, {10, 0}) == doctest::Approx(1.0));
    CHECK(point_segment_distance({-3, 4}, {0, 0}, {10, 0}) == doctest::Approx(5.0));
    CHECK(nearest_vertex({{0, 0}, {5, 0}, {9, 0}}, {6, 1}) == 1);
    CHECK_THROWS_AS(normalize({0, 0}), DegenerateTriple);
    CHECK_THROWS_AS(point_polyline_distance({0, 0}, {{1, 1}}), EmptyPolyline);
}

TEST_CASE("minimax fits with known closed-form answers") {
    // Collinear: zero residual everywhere.
    Line2 a = minimax_line({0, 0}, {1, 1}, {2, 2});
    CHECK(worst_residual(a, {{{0, 0}, {1, 1}, {2, 2}}}) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(dot(a.direction, normalize({1, 1}))) == doctest::Approx(1.0));

    // Symmetric tent: flat line through the mid-height.
    Line2 b = minimax_line({0, 0}, {1, 1}, {2, 0});
    CHECK_FALSE(b.swapped);
    CHECK(b.m == doctest::Approx(0.0));
    CHECK(b.c == doctest::Approx(0.5));
    CHECK(line_residual(b, {0, 0}) == doctest::Approx(-0.5));
    CHECK(line_residual(b, {1, 1}) == doctest::Approx(0.5));
    CHECK(line_residual(b, {2, 0}) == doctest::Approx(-0.5));

    Line2 c = minimax_line({0, 0}, {2, 1}, {4, 0});
    CHECK(c.m == doctest::Approx(0.0));
    CHECK(c.c == doctest::Approx(0.5));
}

TEST_CASE("projections onto axis-aligned and diagonal lines") {
    Line2 xaxis = minimax_line({0, 0}, {1, 0}, {2, 0});
    Point2 p = project_onto_line({1, 1}, xaxis);
    CHECK(p.x == doctest::Approx(1.0));
    CHECK(p.y == doctest::Approx(0.0));

    Line2 diag = minimax_line({0, 0}, {1, 1}, {2, 2});
    Point2 q = project_onto_line({0, 1}, diag);
    CHECK(q.x == doctest::Approx(0.5));
    CHECK(q.y == doctest::Approx(0.5));

    Line2 horiz = minimax_line({0, 0.5}, {1, 0.5}, {2, 0.5});
    Point2 r = project_onto_line({2, 0}, horiz);
    CHECK(r.x == doctest::Approx(2.0));
    CHECK(r.y == doctest::Approx(0.5));

    // Idempotence: a point on the line projects to itself.
    Point2 s = project_onto_line(q, diag);
    CHECK(distance(q, s) < 1e-12);
}

TEST_CASE("arclength parameter on the worked line") {
    Line2 line = minimax_line({0, 0}, {1, 3.2}, {2, 6});
    double t_int = arclength_parameter({1, 3.2}, line);
    double t_cej = arclength_parameter({0, 0}, line);
    // Anchor choice shifts both, but their difference is fixed by the
    // dot-product oracle: (10.3 - (-0.3)) / sqrt(10).
    CHECK(t_int - t_cej == doctest::Approx(10.6 / std::sqrt(10.0)));

    // Translation invariance of differences.
    Point2 shift{17.0, -4.0};
    Line2 moved = minimax_line(Point2{0, 0} + shift, Point2{1, 3.2} + shift,
                               Point2{2, 6} + shift);
    double d0 = arclength_parameter(Point2{1, 3.2} + shift, moved) -
                arclength_parameter(Point2{0, 0} + shift, moved);
    CHECK(d0 == doctest::Approx(10.6 / std::sqrt(10.0)));
}

TEST_CASE("tangent on a dense circle is perpendicular to the radius") {
    Polyline circle;
    for (int d = 0; d < 360; ++d) {
        double a = d * M_PI / 180.0;
        circle.push_back({100.0 * std::cos(a), 100.0 * std::sin(a)});
    }
    Point2 at{100.0, 0.0};
    Point2 t = tangent_at(circle, at, 7, 10.0, true);
    double off = std::abs(angle_between(t, {1.0, 0.0}) - 90.0);
    CHECK(off < 0.5);

    // Same property away from the seam without the closed flag.
    Point2 at2{100.0 * std::cos(M_PI / 3), 100.0 * std::sin(M_PI / 3)};
    Point2 t2 = tangent_at(circle, at2, 7, 10.0, false);
    CHECK(std::abs(angle_between(t2, at2) - 90.0) < 0.5);
}

TEST_CASE("tangent is rotation equivariant") {
    Polyline wavy;
    for (int i = 0; i <= 40; ++i) {
        double x = i * 0.5;
        wavy.push_back({x, 3.0 * std::sin(0.3 * x)});
    }
    Point2 probe = wavy[17];
    Point2 t = tangent_at(wavy, probe);

    double ang = 0.7;
    auto rot = [&](Point2 p) -> Point2 {
        return {p.x * std::cos(ang) - p.y * std::sin(ang),
                p.x * std::sin(ang) + p.y * std::cos(ang)};
    };
    Polyline rwavy;
    for (auto p : wavy) rwavy.push_back(rot(p));
    Point2 rt = tangent_at(rwavy, rot(probe));
    CHECK(std::abs(std::abs(dot(rt, rot(t))) - 1.0) < 1e-6);
}
