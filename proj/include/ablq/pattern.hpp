#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ablq/record.hpp"

namespace ablq {

struct PatternConfig {
    double threshold_degrees = 54.1372;
    int tangent_window = 7;
    double snap_distance = 15.0;
    double severity_floor_percent = 10.0; // sites below this are not classified
    double orient_step = 2.0;             // arclength step for bone orientation
};

// ValidationError unless the threshold lies inside (0, 180) and the
// distances are positive.
void validate_pattern_config(const PatternConfig& cfg);

// Context used to tell the crown end from the root end.
struct OrientationCues {
    std::optional<Point2> cej;
    std::optional<Point2> apex;
    OcclusalDirection occlusal = OcclusalDirection::Unknown;
};

// Flip the raw face tangent so it points from root toward crown. Cue
// priority: apex+cej keypoints, then the occlusal direction combined with
// the outline's principal axis.
UnitVector orient_face_tangent(UnitVector raw, const Polyline& outline,
                               Point2 intersection,
                               const OrientationCues& cues);

// Flip the raw bone tangent so it leads away from the tooth face: walk the
// bone line `step` pixels of arclength to each side of the point nearest
// face_point and keep the direction whose distance from face_point grows
// more.
UnitVector orient_bone_tangent(UnitVector raw, Point2 face_point,
                               const Polyline& bone_line, double step = 2.0);

enum class SiteStatus { Ok, Unmatched, Failed };

struct PatternResult {
    std::string tooth_id;
    Side side = Side::Left;
    Point2 intersection;
    double theta_degrees = 0.0;
    PatternLabel label = PatternLabel::Horizontal;
    UnitVector face_tangent;
    UnitVector bone_tangent;
    SiteStatus status = SiteStatus::Ok;
    std::string error;
};

// Angle between the crown-directed face tangent and the away-directed bone
// tangent; angular below the threshold, horizontal at or above it.
PatternResult classify_site(const Polyline& outline, const Polyline& bone_line,
                            Point2 intersection, const PatternConfig& cfg,
                            const OrientationCues& cues);

// Classify every complete side whose severity reaches the reporting floor,
// matching each to its nearest bone line. Sites without a bone line within
// the snap distance come back Unmatched; per-site failures come back
// Failed. Output order follows severity_results.
std::vector<PatternResult> assess_radiograph_pattern(
    const RadiographRecord& record,
    const std::vector<SideAssessment>& severity_results,
    const PatternConfig& cfg = {});

} // namespace ablq
