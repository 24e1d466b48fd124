#include "ablq/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ablq/errors.hpp"

namespace ablq {

void validate_pattern_config(const PatternConfig& cfg) {
    if (cfg.threshold_degrees <= 0.0 || cfg.threshold_degrees >= 180.0)
        throw ValidationError("pattern threshold must lie inside (0,180)");
    if (cfg.tangent_window < 2)
        throw ValidationError("tangent window needs at least 2 vertices");
    if (cfg.snap_distance <= 0.0)
        throw ValidationError("snap distance must be positive");
    if (cfg.orient_step <= 0.0)
        throw ValidationError("orientation step must be positive");
}

namespace {

Point2 flipped(Point2 v) { return {-v.x, -v.y}; }

struct NearestPoint {
    Point2 point;
    double arclength = 0.0;
    double distance = 0.0;
};

NearestPoint nearest_on_polyline(const Polyline& pl, Point2 p) {
    NearestPoint best;
    best.distance = std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (std::size_t i = 1; i < pl.size(); ++i) {
        Point2 a = pl[i - 1], b = pl[i];
        Point2 ab = b - a;
        double len2 = dot(ab, ab);
        double len = std::sqrt(len2);
        double t = len2 > 1e-24 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0)
                                : 0.0;
        Point2 q = a + t * ab;
        double d = distance(p, q);
        if (d < best.distance) best = {q, acc + t * len, d};
        acc += len;
    }
    return best;
}

} // namespace

UnitVector orient_face_tangent(UnitVector raw, const Polyline& outline,
                               Point2 /*intersection*/,
                               const OrientationCues& cues) {
    Point2 crownward{0, 0};
    bool have = false;

    if (cues.cej && cues.apex) {
        Point2 d = *cues.cej - *cues.apex;
        if (norm(d) > 1e-9) {
            crownward = normalize(d);
            have = true;
        }
    }
    if (!have && cues.occlusal != OcclusalDirection::Unknown) {
        Point2 occ{0.0, cues.occlusal == OcclusalDirection::Up ? -1.0 : 1.0};
        crownward = occ;
        if (outline.size() >= 3) {
            Point2 axis = principal_direction(outline);
            double a = dot(axis, occ);
            if (std::abs(a) > 1e-9) crownward = a > 0 ? axis : flipped(axis);
        }
        have = true;
    }
    if (!have)
        throw OrientationUndetermined("no crown/root cue available");

    double d = dot(raw, crownward);
    if (std::abs(d) < 1e-6)
        throw OrientationUndetermined(
            "face tangent is perpendicular to the crown cue");
    return d > 0 ? raw : flipped(raw);
}

UnitVector orient_bone_tangent(UnitVector raw, Point2 face_point,
                               const Polyline& bone_line, double step) {
    if (bone_line.size() < 2)
        throw EmptyPolyline("bone line needs at least two vertices");
    if (step <= 0.0)
        throw ValidationError("orientation step must be positive");

    NearestPoint base = nearest_on_polyline(bone_line, face_point);
    double total = polyline_length(bone_line);
    Point2 fwd = point_at_arclength(bone_line,
                                    std::min(base.arclength + step, total));
    Point2 bwd = point_at_arclength(bone_line,
                                    std::max(base.arclength - step, 0.0));
    double gain_f = distance(fwd, face_point) - base.distance;
    double gain_b = distance(bwd, face_point) - base.distance;

    if (std::max(gain_f, gain_b) < 1e-9)
        throw OrientationUndetermined(
            "no direction along the bone line leads away from the face");

    Point2 away;
    if (std::abs(gain_f - gain_b) < 1e-9) {
        // Symmetric crossing: fix the sign deterministically.
        Point2 u = fwd - base.point, v = bwd - base.point;
        away = (u.x != v.x ? u.x > v.x : u.y >= v.y) ? u : v;
    } else {
        away = gain_f > gain_b ? fwd - base.point : bwd - base.point;
    }
    if (norm(away) < 1e-12)
        throw OrientationUndetermined("bone line too short to orient");

    double d = dot(raw, away);
    if (std::abs(d) < 1e-9 * norm(away))
        throw OrientationUndetermined(
            "bone tangent is perpendicular to the away direction");
    return d > 0 ? raw : flipped(raw);
}

PatternResult classify_site(const Polyline& outline, const Polyline& bone_line,
                            Point2 intersection, const PatternConfig& cfg,
                            const OrientationCues& cues) {
    validate_pattern_config(cfg);
    PatternResult r;
    r.intersection = intersection;

    UnitVector face_raw = tangent_at(outline, intersection, cfg.tangent_window,
                                     cfg.snap_distance, /*closed=*/true);
    r.face_tangent = orient_face_tangent(face_raw, outline, intersection, cues);

    UnitVector bone_raw = tangent_at(bone_line, intersection,
                                     cfg.tangent_window, cfg.snap_distance,
                                     /*closed=*/false);
    r.bone_tangent =
        orient_bone_tangent(bone_raw, intersection, bone_line, cfg.orient_step);

    r.theta_degrees = angle_between(r.face_tangent, r.bone_tangent);
    // Ties land on horizontal; the epsilon keeps an exactly-at-threshold
    // angle from flipping on the last floating-point bit.
    r.label = r.theta_degrees < cfg.threshold_degrees - 1e-7
                  ? PatternLabel::Angular
                  : PatternLabel::Horizontal;
    r.status = SiteStatus::Ok;
    return r;
}

std::vector<PatternResult> assess_radiograph_pattern(
    const RadiographRecord& record,
    const std::vector<SideAssessment>& severity_results,
    const PatternConfig& cfg) {
    validate_pattern_config(cfg);

    std::vector<PatternResult> out;
    for (const auto& s : severity_results) {
        if (!s.complete || !s.severity_percent) continue;
        if (*s.severity_percent < cfg.severity_floor_percent) continue;

        PatternResult r;
        r.tooth_id = s.tooth_id;
        r.side = s.side;
        Point2 ip = s.intersection->location;
        r.intersection = ip;

        const ToothRecord* tooth = nullptr;
        for (const auto& t : record.teeth)
            if (t.tooth_id == s.tooth_id) {
                tooth = &t;
                break;
            }
        if (!tooth || tooth->outline.size() < 2) {
            r.status = SiteStatus::Failed;
            r.error = "tooth outline unavailable";
            out.push_back(std::move(r));
            continue;
        }

        const Polyline* nearest = nullptr;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& bl : record.bone_lines) {
            if (bl.size() < 2) continue;
            double d = point_polyline_distance(ip, bl);
            if (d < best) {
                best = d;
                nearest = &bl;
            }
        }
        if (!nearest || best > cfg.snap_distance) {
            r.status = SiteStatus::Unmatched;
            out.push_back(std::move(r));
            continue;
        }

        OrientationCues cues;
        cues.cej = s.cej->location;
        cues.apex = s.apex->location;
        cues.occlusal = record.occlusal;
        try {
            PatternResult c = classify_site(tooth->outline, *nearest, ip, cfg,
                                            cues);
            c.tooth_id = s.tooth_id;
            c.side = s.side;
            out.push_back(std::move(c));
        } catch (const Error& e) {
            r.status = SiteStatus::Failed;
            r.error = e.what();
            out.push_back(std::move(r));
        }
    }
    return out;
}

} // namespace ablq
