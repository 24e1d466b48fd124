#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ablq/geometry.hpp"
#include "ablq/mask.hpp"

namespace ablq {

enum class KeypointKind { Cej, Intersection, Apex };
enum class Side { Left, Right };
enum class Arch { Maxillary, Mandibular, Unknown };
enum class OcclusalDirection { Up, Down, Unknown };
enum class Split { Train, Validation, Test, Unspecified };
enum class PatternLabel { Angular, Horizontal };

// Axis-aligned rectangle in pixel coordinates, corners (x0,y0)-(x1,y1).
struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    Point2 center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
};

struct KeypointDetection {
    KeypointKind kind = KeypointKind::Cej;
    Point2 location;
    double confidence = 1.0;
    Rect box;
};

struct ToothRecord {
    std::string tooth_id;
    Rect box;
    Polyline outline; // closed ring stored without the repeated first vertex
    std::vector<KeypointDetection> keypoints;
};

struct GroundTruthEntry {
    std::string tooth_id;
    Side side = Side::Left;
    std::optional<double> severity_percent;
    std::optional<PatternLabel> pattern;
};

struct GroundTruthBlock {
    std::vector<GroundTruthEntry> entries;
    bool annotator_verified = false;
};

struct RadiographRecord {
    std::string image_id;
    int width = 0;
    int height = 0;
    Arch arch = Arch::Unknown;
    OcclusalDirection occlusal = OcclusalDirection::Unknown;
    Split split = Split::Unspecified;
    std::vector<ToothRecord> teeth;
    std::vector<Polyline> bone_lines;
    std::vector<BinaryMask> bone_line_masks;
    std::optional<GroundTruthBlock> ground_truth;
};

// One tooth side after keypoint assembly. Severity and the fitted line are
// present only when all three keypoint kinds were found and the fit
// succeeded; fit failures land in `error`.
struct SideAssessment {
    std::string tooth_id;
    Side side = Side::Left;
    bool complete = false;
    std::optional<KeypointDetection> cej;
    std::optional<KeypointDetection> intersection;
    std::optional<KeypointDetection> apex;
    std::optional<Line2> line;
    std::optional<double> severity_percent;
    bool out_of_range = false;
    std::string error;
};

inline const char* to_string(Side s) {
    return s == Side::Left ? "left" : "right";
}
inline const char* to_string(KeypointKind k) {
    switch (k) {
        case KeypointKind::Cej: return "cej";
        case KeypointKind::Intersection: return "intersection";
        default: return "apex";
    }
}
inline const char* to_string(PatternLabel l) {
    return l == PatternLabel::Angular ? "angular" : "horizontal";
}

} // namespace ablq
