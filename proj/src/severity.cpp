#include "ablq/severity.hpp"

#include <algorithm>
#include <cmath>

#include "ablq/errors.hpp"
#include "ablq/metrics.hpp"

namespace ablq {

namespace {

// Total order: confidence first, then location and box so that equal
// confidences cannot make the result depend on input order.
bool detection_before(const KeypointDetection& a, const KeypointDetection& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.location.x != b.location.x) return a.location.x < b.location.x;
    if (a.location.y != b.location.y) return a.location.y < b.location.y;
    if (a.box.x0 != b.box.x0) return a.box.x0 < b.box.x0;
    if (a.box.y0 != b.box.y0) return a.box.y0 < b.box.y0;
    if (a.box.x1 != b.box.x1) return a.box.x1 < b.box.x1;
    if (a.box.y1 != b.box.y1) return a.box.y1 < b.box.y1;
    return int(a.kind) < int(b.kind);
}

} // namespace

std::vector<KeypointDetection> nms_merge(std::vector<KeypointDetection> dets,
                                         double iou_threshold) {
    if (iou_threshold <= 0.0 || iou_threshold >= 1.0)
        throw ValidationError("iou threshold must lie strictly inside (0,1)");
    std::sort(dets.begin(), dets.end(), detection_before);

    std::vector<KeypointDetection> kept;
    for (const auto& d : dets) {
        bool survives = true;
        for (const auto& k : kept) {
            if (k.kind != d.kind) continue;
            if (box_iou(k.box, d.box) >= iou_threshold) {
                survives = false;
                break;
            }
        }
        if (survives) kept.push_back(d);
    }
    return kept;
}

std::array<SideAssessment, 2> assemble_sides(const ToothRecord& tooth) {
    // Side axis: the outline's principal direction, canonically pointing
    // toward positive y so "left of the axis" means smaller x for an
    // upright tooth; pure left/right of the box center when no outline.
    Point2 axis{0.0, 1.0};
    if (tooth.outline.size() >= 3) axis = principal_direction(tooth.outline);
    if (std::abs(axis.y) < 1e-12) {
        if (axis.x < 0) axis = {-axis.x, -axis.y};
    } else if (axis.y < 0) {
        axis = {-axis.x, -axis.y};
    }
    Point2 center = tooth.box.center();

    std::array<SideAssessment, 2> sides;
    sides[0].tooth_id = tooth.tooth_id;
    sides[0].side = Side::Left;
    sides[1].tooth_id = tooth.tooth_id;
    sides[1].side = Side::Right;

    std::vector<KeypointDetection> sorted = tooth.keypoints;
    std::sort(sorted.begin(), sorted.end(), detection_before);

    for (const auto& d : sorted) {
        SideAssessment& s =
            cross(axis, d.location - center) >= 0.0 ? sides[0] : sides[1];
        auto& slot = d.kind == KeypointKind::Cej ? s.cej
                     : d.kind == KeypointKind::Intersection ? s.intersection
                                                            : s.apex;
        if (!slot) slot = d; // sorted order makes this the best one
    }

    for (auto& s : sides)
        s.complete = s.cej && s.intersection && s.apex;
    return sides;
}

SeverityValue compute_severity(Point2 cej, Point2 intersection, Point2 apex) {
    Line2 line = minimax_line(cej, intersection, apex);
    double tc = arclength_parameter(cej, line);
    double ti = arclength_parameter(intersection, line);
    double ta = arclength_parameter(apex, line);

    double root = std::abs(ta - tc);
    if (root < 1e-6)
        throw ZeroRootLength("cej and apex project to the same point");

    SeverityValue v;
    v.line = line;
    v.percent = 100.0 * std::abs(ti - tc) / root;
    v.out_of_range = ti < std::min(tc, ta) || ti > std::max(tc, ta);
    return v;
}

std::vector<SideAssessment> assess_radiograph_severity(
    const RadiographRecord& record, double iou_threshold) {
    std::vector<SideAssessment> out;
    out.reserve(record.teeth.size() * 2);

    for (const auto& tooth : record.teeth) {
        ToothRecord merged = tooth;
        merged.keypoints = nms_merge(tooth.keypoints, iou_threshold);
        auto sides = assemble_sides(merged);
        for (auto& s : sides) {
            if (s.complete) {
                try {
                    SeverityValue v =
                        compute_severity(s.cej->location,
                                         s.intersection->location,
                                         s.apex->location);
                    s.line = v.line;
                    s.severity_percent = v.percent;
                    s.out_of_range = v.out_of_range;
                } catch (const Error& e) {
                    s.error = e.what();
                }
            }
            out.push_back(std::move(s));
        }
    }

    std::sort(out.begin(), out.end(),
              [](const SideAssessment& a, const SideAssessment& b) {
                  if (a.tooth_id != b.tooth_id) return a.tooth_id < b.tooth_id;
                  return int(a.side) < int(b.side);
              });
    return out;
}

} // namespace ablq
