#include "ablq/mask.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <utility>

#include "ablq/errors.hpp"

namespace ablq {

std::size_t BinaryMask::count() const {
    return std::size_t(std::count(bits.begin(), bits.end(), std::uint8_t(1)));
}

BinaryMask rasterize_polyline(const Polyline& poly, double thickness,
                              int width, int height) {
    if (poly.size() < 2)
        throw EmptyPolyline("rasterization needs at least two vertices");
    if (thickness < 1.0)
        throw ValidationError("stroke thickness must be at least 1 pixel");
    if (width < 1 || height < 1)
        throw ValidationError("canvas must be at least 1x1");

    double r = thickness / 2.0;
    double minx = poly[0].x, maxx = poly[0].x;
    double miny = poly[0].y, maxy = poly[0].y;
    for (auto p : poly) {
        minx = std::min(minx, p.x);
        maxx = std::max(maxx, p.x);
        miny = std::min(miny, p.y);
        maxy = std::max(maxy, p.y);
    }
    int x0 = std::max(0, int(std::floor(minx - r - 1)));
    int x1 = std::min(width - 1, int(std::ceil(maxx + r + 1)));
    int y0 = std::max(0, int(std::floor(miny - r - 1)));
    int y1 = std::min(height - 1, int(std::ceil(maxy + r + 1)));

    BinaryMask mask(width, height);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            Point2 center{x + 0.5, y + 0.5};
            if (point_polyline_distance(center, poly) <= r) mask.set(x, y);
        }
    return mask;
}

namespace {

struct Pix {
    int x, y;
    bool operator==(const Pix& o) const { return x == o.x && y == o.y; }
    bool operator<(const Pix& o) const {
        return x != o.x ? x < o.x : y < o.y;
    }
};

// Moore neighborhood in clockwise order starting west (y grows downward).
constexpr int RING_X[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
constexpr int RING_Y[8] = {0, -1, -1, -1, 0, 1, 1, 1};

int ring_index(Pix center, Pix n) {
    for (int i = 0; i < 8; ++i)
        if (center.x + RING_X[i] == n.x && center.y + RING_Y[i] == n.y)
            return i;
    return -1;
}

// Ordered outer-boundary cycle via Moore-neighbor tracing. The backtrack
// is always a background pixel adjacent to the current one; the walk ends
// when a (pixel, backtrack) state repeats.
std::vector<Pix> trace_boundary(const BinaryMask& mask) {
    Pix start{-1, -1};
    for (int x = 0; x < mask.width && start.x < 0; ++x)
        for (int y = 0; y < mask.height; ++y)
            if (mask.at(x, y)) {
                start = {x, y};
                break;
            }
    if (start.x < 0) throw EmptyMask("mask has no foreground pixels");

    std::vector<Pix> boundary;
    std::set<std::pair<Pix, Pix>> seen;
    Pix p = start;
    Pix b{start.x - 1, start.y};
    while (seen.insert({p, b}).second) {
        boundary.push_back(p);
        int bi = ring_index(p, b);
        Pix next = p, nextb = b;
        bool found = false;
        for (int s = 1; s <= 8; ++s) {
            int i = (bi + s) % 8;
            Pix cand{p.x + RING_X[i], p.y + RING_Y[i]};
            if (mask.at(cand.x, cand.y)) {
                next = cand;
                found = true;
                break;
            }
            nextb = cand;
        }
        if (!found) break; // isolated pixel
        p = next;
        b = nextb;
    }
    return boundary;
}

// Midpoint line grown from boundary index s: pair the k-th pixel before s
// with the k-th after, stopping when the walkers meet.
Polyline midpoint_line(const std::vector<Pix>& cycle, std::size_t s) {
    std::size_t n = cycle.size();
    Polyline out;
    for (std::size_t k = 0; 2 * k < n; ++k) {
        const Pix& fwd = cycle[(s + k) % n];
        const Pix& bwd = cycle[(s + n - k) % n];
        out.push_back({0.5 * (fwd.x + bwd.x) + 0.5, 0.5 * (fwd.y + bwd.y) + 0.5});
    }
    // Zero-length steps would break arclength resampling.
    Polyline dedup;
    for (auto p : out)
        if (dedup.empty() || distance(dedup.back(), p) > 1e-9)
            dedup.push_back(p);
    return dedup;
}

void orient_west_to_east(Polyline& pl) {
    if (pl.front().x > pl.back().x ||
        (pl.front().x == pl.back().x && pl.front().y > pl.back().y))
        std::reverse(pl.begin(), pl.end());
}

} // namespace

int component_count(const BinaryMask& mask) {
    std::vector<std::uint8_t> visited(mask.bits.size(), 0);
    int components = 0;
    std::vector<Pix> stack;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y) || visited[std::size_t(y) * mask.width + x])
                continue;
            ++components;
            stack.push_back({x, y});
            visited[std::size_t(y) * mask.width + x] = 1;
            while (!stack.empty()) {
                Pix p = stack.back();
                stack.pop_back();
                for (int i = 0; i < 8; ++i) {
                    int nx = p.x + RING_X[i], ny = p.y + RING_Y[i];
                    if (!mask.at(nx, ny)) continue;
                    auto& v = visited[std::size_t(ny) * mask.width + nx];
                    if (!v) {
                        v = 1;
                        stack.push_back({nx, ny});
                    }
                }
            }
        }
    return components;
}

Polyline centerline_from_mask(const BinaryMask& mask,
                              std::size_t resample_points) {
    if (mask.count() == 0) throw EmptyMask("mask has no foreground pixels");
    int comps = component_count(mask);
    if (comps != 1)
        throw MultipleComponents(
            "mask has " + std::to_string(comps) + " components, expected 1",
            comps);

    std::vector<Pix> cycle = trace_boundary(mask);
    if (cycle.size() < 2)
        throw EmptyMask("mask boundary is a single pixel, no centerline");

    // Leftmost boundary pixel is where the trace started; rightmost by
    // max x with smallest y breaking ties.
    std::size_t left = 0;
    std::size_t right = 0;
    for (std::size_t i = 1; i < cycle.size(); ++i) {
        const Pix& c = cycle[i];
        const Pix& l = cycle[left];
        const Pix& r = cycle[right];
        if (c.x < l.x || (c.x == l.x && c.y < l.y)) left = i;
        if (c.x > r.x || (c.x == r.x && c.y < r.y)) right = i;
    }

    Polyline a = midpoint_line(cycle, left);
    Polyline b = midpoint_line(cycle, right);
    if (a.size() < 2 || b.size() < 2)
        throw EmptyMask("mask too small to carry a centerline");

    if (resample_points < 2) resample_points = 2;
    a = resample_uniform(a, resample_points);
    b = resample_uniform(b, resample_points);
    orient_west_to_east(a);
    orient_west_to_east(b);

    Polyline center;
    center.reserve(resample_points);
    for (std::size_t i = 0; i < resample_points; ++i) {
        Point2 m = 0.5 * (a[i] + b[i]);
        if (center.empty() || distance(center.back(), m) > 1e-9)
            center.push_back(m);
    }
    if (center.size() < 2)
        throw EmptyMask("centerline collapsed to a point");
    return center;
}

void write_pgm(const BinaryMask& mask, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
    std::vector<std::uint8_t> row(std::size_t(mask.width));
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x)
            row[std::size_t(x)] = mask.at(x, y) ? 255 : 0;
        out.write(reinterpret_cast<const char*>(row.data()),
                  std::streamsize(row.size()));
    }
    if (!out) throw IoError("write failed for " + path);
}

} // namespace ablq
