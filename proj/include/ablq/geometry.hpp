#pragma once

#include <cstddef>
#include <vector>

#include "ablq/errors.hpp"

namespace ablq {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

double norm(Point2 p);
double distance(Point2 a, Point2 b);

// Unit vector; normalize() throws DegenerateTriple on a zero vector.
Point2 normalize(Point2 p);

// Directions of unit norm are passed around as plain points.
using UnitVector = Point2;

using Polyline = std::vector<Point2>;

double polyline_length(const Polyline& pl);

// Distance from p to the segment [a, b].
double point_segment_distance(Point2 p, Point2 a, Point2 b);

// Distance from p to the nearest segment of pl (pl needs >= 2 vertices).
double point_polyline_distance(Point2 p, const Polyline& pl);

// Straight line fitted in one of the two axis frames. When swapped is
// false the graph is y = m*x + c; when true it is x = m*y + c. Either way
// anchor/direction describe the same line parametrically in image
// coordinates, with direction unit length.
struct Line2 {
    double m = 0.0;
    double c = 0.0;
    bool swapped = false;
    Point2 anchor;
    Point2 direction;
};

// Chebyshev (minimax) line through three points with distinct abscissae:
// the unique line minimizing the largest absolute vertical residual. The
// residuals come out equal-ripple, e1 = e3 = -e2. Points are sorted by
// abscissa internally. Fitting happens in the axis with the larger spread;
// if that axis has a tie the other axis is tried, and if both are tied the
// triple is degenerate.
Line2 minimax_line(Point2 p1, Point2 p2, Point2 p3);

// Vertical-axis residual of p against the fitted line (in the fit frame).
double line_residual(const Line2& line, Point2 p);

// Foot of the perpendicular from p onto the line.
Point2 project_onto_line(Point2 p, const Line2& line);

// Signed arclength of p's projection along the line, measured from anchor.
double arclength_parameter(Point2 p, const Line2& line);

// Unit tangent of a polyline near p: take the `window` vertices centered
// on the vertex nearest p (clamped at open ends, wrapping when closed) and
// return the principal direction of that neighborhood. Throws
// PointOffPolyline when p sits farther than snap_distance from every
// segment. Sign of the returned vector is arbitrary.
Point2 tangent_at(const Polyline& pl, Point2 p, int window = 7,
                  double snap_distance = 10.0, bool closed = false);

// Principal direction of a point cloud (largest-eigenvalue axis of the
// 2x2 covariance). Sign is arbitrary; ties resolve to the x axis.
Point2 principal_direction(const Polyline& pts);

// Angle between two directions in degrees, in [0, 180].
double angle_between(Point2 u, Point2 v);

// Index of the vertex nearest p.
std::size_t nearest_vertex(const Polyline& pl, Point2 p);

// Resample to n points spaced uniformly in arclength, keeping endpoints.
Polyline resample_uniform(const Polyline& pl, std::size_t n);

// Point at arclength s from the front (clamped to [0, length]).
Point2 point_at_arclength(const Polyline& pl, double s);

} // namespace ablq
