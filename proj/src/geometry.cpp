#include "ablq/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace ablq {

double norm(Point2 p) { return std::hypot(p.x, p.y); }

double distance(Point2 a, Point2 b) { return norm(a - b); }

Point2 normalize(Point2 p) {
    double n = norm(p);
    if (n < 1e-12)
        throw DegenerateTriple("cannot normalize a zero-length vector");
    return {p.x / n, p.y / n};
}

double polyline_length(const Polyline& pl) {
    double len = 0.0;
    for (std::size_t i = 1; i < pl.size(); ++i)
        len += distance(pl[i - 1], pl[i]);
    return len;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
    Point2 ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 < 1e-24) return distance(p, a);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + t * ab);
}

double point_polyline_distance(Point2 p, const Polyline& pl) {
    if (pl.size() < 2)
        throw EmptyPolyline("polyline needs at least two vertices");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < pl.size(); ++i)
        best = std::min(best, point_segment_distance(p, pl[i - 1], pl[i]));
    return best;
}

namespace {

// Closed-form Chebyshev fit for a1 < a2 < a3 in (abscissa, ordinate) form.
// The worst vertical residual is minimized when the three residuals are
// equal-ripple: e1 = e3 = -e2.
void chebyshev_3(double a1, double b1, double a2, double b2, double a3,
                 double b3, double& m, double& c) {
    m = (b3 - b1) / (a3 - a1);
    c = (b1 * (a2 + a3) + b2 * (a3 - a1) - b3 * (a1 + a2)) / (2.0 * (a3 - a1));
}

void finish_line(Line2& line) {
    double inv = 1.0 / std::sqrt(1.0 + line.m * line.m);
    if (!line.swapped) {
        line.anchor = {0.0, line.c};
        line.direction = {inv, line.m * inv};
    } else {
        line.anchor = {line.c, 0.0};
        line.direction = {line.m * inv, inv};
    }
}

} // namespace

Line2 minimax_line(Point2 p1, Point2 p2, Point2 p3) {
    std::array<Point2, 3> pts{p1, p2, p3};

    double sx = std::max({pts[0].x, pts[1].x, pts[2].x}) -
                std::min({pts[0].x, pts[1].x, pts[2].x});
    double sy = std::max({pts[0].y, pts[1].y, pts[2].y}) -
                std::min({pts[0].y, pts[1].y, pts[2].y});

    const double tol = 1e-9;
    bool prefer_swap = sy > sx;

    for (int attempt = 0; attempt < 2; ++attempt) {
        bool swapped = (attempt == 0) ? prefer_swap : !prefer_swap;
        std::array<Point2, 3> s = pts;
        std::sort(s.begin(), s.end(), [&](Point2 a, Point2 b) {
            return swapped ? a.y < b.y : a.x < b.x;
        });
        double a1 = swapped ? s[0].y : s[0].x, b1 = swapped ? s[0].x : s[0].y;
        double a2 = swapped ? s[1].y : s[1].x, b2 = swapped ? s[1].x : s[1].y;
        double a3 = swapped ? s[2].y : s[2].x, b3 = swapped ? s[2].x : s[2].y;
        if (a2 - a1 <= tol || a3 - a2 <= tol) continue;

        Line2 line;
        line.swapped = swapped;
        chebyshev_3(a1, b1, a2, b2, a3, b3, line.m, line.c);
        finish_line(line);
        return line;
    }
    throw DegenerateTriple("three points share an abscissa in both axes");
}

double line_residual(const Line2& line, Point2 p) {
    return line.swapped ? p.x - (line.m * p.y + line.c)
                        : p.y - (line.m * p.x + line.c);
}

Point2 project_onto_line(Point2 p, const Line2& line) {
    double t = dot(p - line.anchor, line.direction);
    return line.anchor + t * line.direction;
}

double arclength_parameter(Point2 p, const Line2& line) {
    return dot(p - line.anchor, line.direction);
}

std::size_t nearest_vertex(const Polyline& pl, Point2 p) {
    if (pl.empty()) throw EmptyPolyline("polyline is empty");
    std::size_t best = 0;
    double bd = distance(p, pl[0]);
    for (std::size_t i = 1; i < pl.size(); ++i) {
        double d = distance(p, pl[i]);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

Point2 principal_direction(const Polyline& pts) {
    if (pts.empty()) throw EmptyPolyline("point set is empty");
    double mx = 0.0, my = 0.0;
    for (const auto& p : pts) {
        mx += p.x;
        my += p.y;
    }
    mx /= double(pts.size());
    my /= double(pts.size());
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const auto& p : pts) {
        double dx = p.x - mx, dy = p.y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx < 1e-18 && syy < 1e-18 && std::abs(sxy) < 1e-18)
        return {1.0, 0.0};
    // Eigenvector of the dominant eigenvalue of [[sxx, sxy], [sxy, syy]].
    double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    return {std::cos(angle), std::sin(angle)};
}

Point2 tangent_at(const Polyline& pl, Point2 p, int window,
                  double snap_distance, bool closed) {
    if (pl.size() < 2)
        throw EmptyPolyline("polyline needs at least two vertices");
    if (window < 2) window = 2;

    double gap = point_polyline_distance(p, pl);
    if (closed)
        gap = std::min(gap, point_segment_distance(p, pl.back(), pl.front()));
    if (gap > snap_distance)
        throw PointOffPolyline("query point is farther than the snap distance");

    std::size_t n = pl.size();
    std::size_t center = nearest_vertex(pl, p);
    std::size_t w = std::min<std::size_t>(std::size_t(window), n);

    Polyline patch;
    patch.reserve(w);
    if (closed && n > w) {
        std::size_t half = w / 2;
        for (std::size_t k = 0; k < w; ++k) {
            std::size_t idx = (center + n - half + k) % n;
            patch.push_back(pl[idx]);
        }
    } else {
        // Contiguous index window clamped at the open ends.
        std::size_t half = w / 2;
        std::size_t lo = center > half ? center - half : 0;
        if (lo + w > n) lo = n - w;
        for (std::size_t k = 0; k < w; ++k) patch.push_back(pl[lo + k]);
    }
    return principal_direction(patch);
}

double angle_between(Point2 u, Point2 v) {
    double d = dot(normalize(u), normalize(v));
    d = std::clamp(d, -1.0, 1.0);
    return std::acos(d) * 180.0 / M_PI;
}

Point2 point_at_arclength(const Polyline& pl, double s) {
    if (pl.empty()) throw EmptyPolyline("polyline is empty");
    if (pl.size() == 1 || s <= 0.0) return pl.front();
    double acc = 0.0;
    for (std::size_t i = 1; i < pl.size(); ++i) {
        double seg = distance(pl[i - 1], pl[i]);
        if (acc + seg >= s && seg > 0.0) {
            double t = (s - acc) / seg;
            return pl[i - 1] + t * (pl[i] - pl[i - 1]);
        }
        acc += seg;
    }
    return pl.back();
}

Polyline resample_uniform(const Polyline& pl, std::size_t n) {
    if (pl.size() < 2)
        throw EmptyPolyline("polyline needs at least two vertices");
    if (n < 2) n = 2;
    double total = polyline_length(pl);
    Polyline out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = total * double(i) / double(n - 1);
        out.push_back(point_at_arclength(pl, s));
    }
    out.front() = pl.front();
    out.back() = pl.back();
    return out;
}

} // namespace ablq
