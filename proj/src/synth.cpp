#include "ablq/synth.hpp"

#include <cmath>
#include <random>

#include "ablq/errors.hpp"
#include "ablq/geometry.hpp"

namespace ablq {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Local tooth frame: x across the tooth, y from the cej (0) toward the
// root tip, crown above. Faces are straight so keypoint triples placed
// on them are exactly collinear and tangent windows sit on a line.
constexpr double kHalfWidth = 28.0;
constexpr double kRootLength = 200.0; // cej y=0, apex y=200
constexpr double kFaceTop = -30.0;
constexpr double kFaceBottom = 210.0; // straight margin below the apex
constexpr double kCapControlY = -62.0;
constexpr double kCapPeakY = -46.0; // cap curve midpoint
constexpr double kTipY = 235.0;
constexpr double kVertexStep = 2.0;
constexpr double kRayLength = 44.0;
constexpr double kSlotPitch = 110.0;
constexpr double kFirstSlot = 100.0;
constexpr double kMaxTiltDeg = 8.0;
constexpr double kKeypointBox = 4.0;

// Angular/horizontal decision threshold and the band the random theta
// draw skips so labels never sit on the boundary.
constexpr double kThresholdDeg = 54.1372;
constexpr double kBandLo = 53.1;
constexpr double kBandHi = 55.2;

// Explicit generator arithmetic: 53 uniform bits, no library
// distribution, so streams are stable across standard libraries.
double u01(std::mt19937_64& g) { return double(g() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& g, double lo, double hi) {
    return lo + (hi - lo) * u01(g);
}

struct Frame {
    Point2 anchor;
    double c = 1.0, s = 0.0; // rotation by the tooth tilt

    Point2 map(Point2 p) const {
        return {anchor.x + c * p.x - s * p.y,
                anchor.y + s * p.x + c * p.y};
    }
};

Point2 bezier(Point2 a, Point2 ctrl, Point2 b, double t) {
    double u = 1.0 - t;
    return (u * u) * a + (2.0 * u * t) * ctrl + (t * t) * b;
}

void append(Polyline& pl, Point2 p) {
    if (!pl.empty() && distance(pl.back(), p) < 1e-9) return;
    pl.push_back(p);
}

Polyline tooth_outline(const Frame& f) {
    Polyline pl;
    for (int i = 0; i <= 16; ++i)
        append(pl, f.map(bezier({-kHalfWidth, kFaceTop}, {0.0, kCapControlY},
                                {kHalfWidth, kFaceTop}, i / 16.0)));
    for (double y = kFaceTop; y <= kFaceBottom + 1e-9; y += kVertexStep)
        append(pl, f.map({kHalfWidth, y}));
    for (int i = 0; i <= 8; ++i)
        append(pl, f.map(bezier({kHalfWidth, kFaceBottom}, {20.0, 228.0},
                                {0.0, kTipY}, i / 8.0)));
    for (int i = 0; i <= 8; ++i)
        append(pl, f.map(bezier({0.0, kTipY}, {-20.0, 228.0},
                                {-kHalfWidth, kFaceBottom}, i / 8.0)));
    for (double y = kFaceBottom; y >= kFaceTop - 1e-9; y -= kVertexStep)
        append(pl, f.map({-kHalfWidth, y}));
    if (distance(pl.front(), pl.back()) < 1e-9) pl.pop_back();
    return pl;
}

Rect bounding_box(const Polyline& pl) {
    Rect r{pl[0].x, pl[0].y, pl[0].x, pl[0].y};
    for (Point2 p : pl) {
        r.x0 = std::min(r.x0, p.x);
        r.y0 = std::min(r.y0, p.y);
        r.x1 = std::max(r.x1, p.x);
        r.y1 = std::max(r.y1, p.y);
    }
    return r;
}

KeypointDetection make_kp(KeypointKind kind, Point2 at) {
    KeypointDetection d;
    d.kind = kind;
    d.location = at;
    d.box = {at.x - kKeypointBox, at.y - kKeypointBox, at.x + kKeypointBox,
             at.y + kKeypointBox};
    return d;
}

void check_bounds(const RadiographRecord& r) {
    auto inside = [&](Point2 p) {
        return p.x >= 0.0 && p.x <= r.width && p.y >= 0.0 && p.y <= r.height;
    };
    bool ok = true;
    for (const auto& t : r.teeth) {
        for (Point2 p : t.outline) ok = ok && inside(p);
        for (const auto& k : t.keypoints) ok = ok && inside(k.location);
    }
    for (const auto& bl : r.bone_lines)
        for (Point2 p : bl) ok = ok && inside(p);
    if (!ok)
        throw InfeasibleSpec(std::to_string(r.teeth.size()) +
                             " teeth do not fit a " +
                             std::to_string(r.width) + " x " +
                             std::to_string(r.height) + " canvas");
}

} // namespace

SynthDetail generate_detailed(const SynthSpec& spec) {
    if (spec.teeth_count < 1)
        throw InfeasibleSpec("teeth_count must be at least 1");
    if (spec.width < 1 || spec.height < 1)
        throw InfeasibleSpec("canvas must be at least 1 x 1");
    if (spec.severity_percent &&
        !(*spec.severity_percent > 0.0 && *spec.severity_percent < 100.0))
        throw InfeasibleSpec("planted severity must lie inside (0, 100)");
    if (spec.theta_degrees &&
        !(*spec.theta_degrees > 0.0 && *spec.theta_degrees < 180.0))
        throw InfeasibleSpec("planted theta must lie inside (0, 180)");
    if (!(spec.jitter >= 0.0))
        throw InfeasibleSpec("jitter bound must be non-negative");

    std::mt19937_64 rng(spec.seed);

    SynthDetail out;
    RadiographRecord& r = out.record;
    r.image_id = "synth-" + std::to_string(spec.seed);
    r.width = spec.width;
    r.height = spec.height;
    r.arch = Arch::Mandibular;
    r.occlusal = OcclusalDirection::Up; // crowns point toward -y

    GroundTruthBlock gt;
    gt.annotator_verified = true;

    // Vertical placement centers the full local extent (cap through tip).
    double anchor_y = spec.height / 2.0 - (kCapPeakY + kTipY) / 2.0;

    for (int k = 0; k < spec.teeth_count; ++k) {
        double tilt =
            uniform(rng, -kMaxTiltDeg, kMaxTiltDeg) * kPi / 180.0;
        Frame f{{kFirstSlot + kSlotPitch * k, anchor_y}, std::cos(tilt),
                std::sin(tilt)};

        ToothRecord t;
        t.tooth_id = "t" + std::to_string(k + 1);
        t.outline = tooth_outline(f);
        t.box = bounding_box(t.outline);

        for (int side = 0; side < 2; ++side) {
            double sign = side == 0 ? -1.0 : 1.0; // left face, then right
            double severity = spec.severity_percent
                                  ? *spec.severity_percent
                                  : uniform(rng, 12.0, 85.0);
            double theta;
            if (spec.theta_degrees) {
                theta = spec.theta_degrees.value();
            } else {
                theta = uniform(rng, 15.0, 170.0 - (kBandHi - kBandLo));
                if (theta >= kBandLo) theta += kBandHi - kBandLo;
            }

            Point2 cej{sign * kHalfWidth, 0.0};
            Point2 apex{sign * kHalfWidth, kRootLength};
            Point2 inter{sign * kHalfWidth, severity / 100.0 * kRootLength};

            // Ray leaving the face point at theta from the crown
            // direction, outward so it cannot cross the tooth.
            double rad = theta * kPi / 180.0;
            Point2 dir{sign * std::sin(rad), -std::cos(rad)};
            Polyline ray;
            for (double s = 0.0; s <= kRayLength + 1e-9; s += kVertexStep)
                ray.push_back(f.map(inter + s * dir));
            r.bone_lines.push_back(std::move(ray));

            Point2 noise[3];
            for (auto& n : noise)
                n = {spec.jitter * uniform(rng, -1.0, 1.0),
                     spec.jitter * uniform(rng, -1.0, 1.0)};
            t.keypoints.push_back(
                make_kp(KeypointKind::Cej, f.map(cej) + noise[0]));
            t.keypoints.push_back(
                make_kp(KeypointKind::Intersection, f.map(inter) + noise[1]));
            t.keypoints.push_back(
                make_kp(KeypointKind::Apex, f.map(apex) + noise[2]));

            GroundTruthEntry e;
            e.tooth_id = t.tooth_id;
            e.side = side == 0 ? Side::Left : Side::Right;
            e.severity_percent = severity;
            e.pattern = theta < kThresholdDeg - 1e-7 ? PatternLabel::Angular
                                                     : PatternLabel::Horizontal;
            gt.entries.push_back(e);
            out.sites.push_back({t.tooth_id, e.side, severity, theta});
        }
        r.teeth.push_back(std::move(t));
    }
    r.ground_truth = std::move(gt);

    check_bounds(r);
    return out;
}

RadiographRecord generate(const SynthSpec& spec) {
    return generate_detailed(spec).record;
}

std::vector<RadiographRecord> generate_batch(const SynthSpec& spec,
                                             int count) {
    if (count < 0) throw InfeasibleSpec("record count must be non-negative");
    std::vector<RadiographRecord> out;
    out.reserve(std::size_t(count));
    for (int i = 0; i < count; ++i) {
        SynthSpec s = spec;
        s.seed = spec.seed + std::uint64_t(i);
        out.push_back(generate(s));
    }
    return out;
}

} // namespace ablq
