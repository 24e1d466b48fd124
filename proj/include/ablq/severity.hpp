#pragma once

#include <array>
#include <vector>

#include "ablq/record.hpp"

namespace ablq {

// Greedy per-kind non-maximum suppression over detection boxes. A
// detection survives iff its IoU with every already-kept detection of the
// same kind stays below the threshold. The outcome is independent of
// input order: candidates are ranked by confidence with a full
// lexicographic tie-break.
std::vector<KeypointDetection> nms_merge(std::vector<KeypointDetection> dets,
                                         double iou_threshold = 0.6);

// Split a tooth's keypoints into its two sides (left/right in image
// coordinates, relative to the outline's principal axis through the box
// center) and pick the best detection per kind on each side. Keypoints are
// expected to be NMS-merged already.
std::array<SideAssessment, 2> assemble_sides(const ToothRecord& tooth);

struct SeverityValue {
    double percent = 0.0;
    bool out_of_range = false; // intersection projects outside cej..apex
    Line2 line;
};

// Bone-loss severity: fit the minimax line through the three points,
// project them onto it, and take 100*|t_int - t_cej| / |t_apex - t_cej|
// over the arclength parameters. Out-of-range intersections keep their raw
// ratio and are flagged, never clamped.
SeverityValue compute_severity(Point2 cej, Point2 intersection, Point2 apex);

// Full severity pass over one radiograph: per tooth, merge keypoints,
// assemble sides, and score every complete side. Per-side failures are
// recorded on the assessment; the radiograph never aborts. Output is
// ordered by (tooth_id, side).
std::vector<SideAssessment> assess_radiograph_severity(
    const RadiographRecord& record, double iou_threshold = 0.6);

} // namespace ablq
