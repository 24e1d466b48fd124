#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ablq/mask.hpp"

using namespace ablq;

namespace {

bool vertex_inside(const BinaryMask& m, Point2 p) {
    return m.at(int(std::floor(p.x)), int(std::floor(p.y)));
}

double mean_distance_to(const Polyline& pts, const Polyline& target) {
    double acc = 0.0;
    for (auto p : pts) acc += point_polyline_distance(p, target);
    return acc / double(pts.size());
}

} // namespace

TEST_CASE("capsule stroke pixel count matches the analytic area") {
    Polyline seg{{10, 50}, {30, 50}};
    BinaryMask m = rasterize_polyline(seg, 10.0, 100, 100);
    double count = double(m.count());
    // 20x10 rectangle plus two half-disc caps of radius 5, with raster
    // slack on the curved rim.
    CHECK(count >= 200.0);
    CHECK(count <= 200.0 + M_PI * 25.0 + 8.0);

    // Symmetric about the segment's horizontal midline: rows j and 99-j
    // have centers equidistant from y = 50.
    for (int y = 0; y < 50; ++y)
        for (int x = 0; x < 100; ++x)
            CHECK(m.at(x, y) == m.at(x, 99 - y));
}

TEST_CASE("unit-thickness diagonal is a thin connected chain") {
    Polyline seg{{5, 5}, {15, 15}};
    BinaryMask m = rasterize_polyline(seg, 1.0, 30, 30);
    // Centers (i+0.5, i+0.5) for i = 5..14 lie on the segment; the center
    // past (15,15) is 0.7 px beyond the cap radius.
    CHECK(m.count() == 10);
    CHECK(component_count(m) == 1);
    for (int i = 5; i <= 14; ++i) CHECK(m.at(i, i));
}

TEST_CASE("rasterization clips at the canvas edge") {
    Polyline seg{{-10, 5}, {5, 5}};
    BinaryMask m = rasterize_polyline(seg, 4.0, 10, 10);
    CHECK(m.count() > 0);
    CHECK(m.at(0, 5));
    CHECK_FALSE(m.at(9, 9));
}

TEST_CASE("rasterization rejects degenerate input") {
    CHECK_THROWS_AS(rasterize_polyline({{1, 1}}, 10.0, 50, 50), EmptyPolyline);
    CHECK_THROWS_AS(rasterize_polyline({{1, 1}, {2, 2}}, 0.0, 50, 50),
                    ValidationError);
}

TEST_CASE("rectangle band collapses to its midline") {
    // Pixels whose centers fall in [10,30]x[45,55].
    BinaryMask band(60, 100);
    for (int y = 45; y <= 54; ++y)
        for (int x = 10; x <= 29; ++x) band.set(x, y);

    Polyline center = centerline_from_mask(band);
    Polyline ideal{{10, 50}, {30, 50}};
    CHECK(mean_distance_to(center, ideal) <= 0.5);
    for (auto p : center) CHECK(vertex_inside(band, p));
}

TEST_CASE("one-pixel-wide run recovers itself") {
    BinaryMask run(60, 100);
    for (int x = 10; x <= 30; ++x) run.set(x, 50);

    Polyline center = centerline_from_mask(run);
    for (auto p : center) {
        CHECK(p.y == doctest::Approx(50.5).epsilon(1e-9));
        CHECK(p.x >= 10.5);
        CHECK(p.x <= 30.5);
    }
    CHECK(center.front().x < 11.5);
    CHECK(center.back().x > 29.5);
}

TEST_CASE("centerline input validation") {
    BinaryMask empty(20, 20);
    CHECK_THROWS_AS(centerline_from_mask(empty), EmptyMask);

    BinaryMask lone(20, 20);
    lone.set(5, 5);
    CHECK_THROWS_AS(centerline_from_mask(lone), EmptyMask);

    BinaryMask two(40, 20);
    two.set(2, 2);
    two.set(3, 2);
    two.set(30, 10);
    two.set(31, 10);
    try {
        centerline_from_mask(two);
        FAIL("expected MultipleComponents");
    } catch (const MultipleComponents& e) {
        CHECK(e.count == 2);
    }
}

TEST_CASE("stroke and recover a sine-shaped line") {
    Polyline wave;
    for (int x = 20; x <= 220; x += 2)
        wave.push_back({double(x), 100.0 + 15.0 * std::sin(double(x) / 20.0)});

    BinaryMask m = rasterize_polyline(wave, 10.0, 260, 200);
    CHECK(component_count(m) == 1);
    Polyline center = centerline_from_mask(m);
    REQUIRE(center.size() == 64);

    // Mean absolute deviation away from the half-thickness end zones.
    double acc = 0.0;
    int n = 0;
    for (auto p : center) {
        if (p.x < 25.0 || p.x > 215.0) continue;
        acc += point_polyline_distance(p, wave);
        ++n;
    }
    REQUIRE(n > 40);
    CHECK(acc / n <= 1.5);

    for (auto p : center) CHECK(vertex_inside(m, p));
}

TEST_CASE("mirroring the mask mirrors the centerline") {
    Polyline wave;
    for (int x = 20; x <= 180; x += 2)
        wave.push_back({double(x), 80.0 + 12.0 * std::sin(double(x) / 15.0)});
    BinaryMask m = rasterize_polyline(wave, 10.0, 200, 160);

    BinaryMask flipped(m.width, m.height);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (m.at(x, y)) flipped.set(m.width - 1 - x, y);

    Polyline a = centerline_from_mask(m);
    Polyline b = centerline_from_mask(flipped);

    // Reflect a into flipped coordinates; both lines run west to east, so
    // the reflected copy must be reversed before comparing pointwise.
    Polyline ra;
    for (auto p : a) ra.push_back({double(m.width) - p.x, p.y});
    std::reverse(ra.begin(), ra.end());

    REQUIRE(ra.size() == b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) acc += distance(ra[i], b[i]);
    CHECK(acc / double(ra.size()) <= 0.5);
}

TEST_CASE("pgm export is byte exact") {
    BinaryMask m(4, 3);
    m.set(0, 0);
    m.set(3, 2);
    m.set(1, 1);

    std::string path = "test_mask_out.pgm";
    write_pgm(m, path);

    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    std::stringstream ss;
    ss << in.rdbuf();
    std::string bytes = ss.str();
    std::string header = "P5\n4 3\n255\n";
    REQUIRE(bytes.size() == header.size() + 12);
    CHECK(bytes.compare(0, header.size(), header) == 0);
    const unsigned char* px =
        reinterpret_cast<const unsigned char*>(bytes.data() + header.size());
    CHECK(px[0] == 255);
    CHECK(px[1] == 0);
    CHECK(px[5] == 255);
    CHECK(px[11] == 255);
    std::remove(path.c_str());
}
