#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ablq/pattern.hpp"
#include "ablq/record.hpp"

namespace ablq {

// Severity and pattern outcomes for one radiograph. A record-level failure
// leaves sides/patterns empty and sets error.
struct RecordAnalysis {
    std::string image_id;
    Split split = Split::Unspecified;
    std::vector<SideAssessment> sides;
    std::vector<PatternResult> patterns;
    std::string error;
};

struct AnalyzeOptions {
    bool run_pattern = true; // severity always runs; pattern is optional
    double iou_threshold = 0.6;
    PatternConfig pattern;
    int jobs = 0; // <= 0 means available parallelism
};

// Analyze every record over a worker pool; results keep batch order
// regardless of scheduling. Options are validated before any work starts.
std::vector<RecordAnalysis> analyze_batch(
    const std::vector<RadiographRecord>& batch, const AnalyzeOptions& opts);

enum class ReportFormat { Csv, Structured };

// One merged row per assembled side, globally ordered by
// (image_id, tooth_id, side). CSV columns: image_id, tooth_id, side,
// severity_percent, flags, theta_degrees, pattern_label.
std::string format_assessment_report(
    const std::vector<RecordAnalysis>& results, ReportFormat format);
void write_assessment_report(const std::vector<RecordAnalysis>& results,
                             const std::string& path, ReportFormat format);

// SVG overlay for one record: tooth outlines, bone lines, per-side
// keypoint glyphs color-coded by kind, fitted lines with severity labels,
// and a circle around each angular site.
std::string render_overlay_svg(const RadiographRecord& record,
                               const RecordAnalysis& results);
void render_overlay(const RadiographRecord& record,
                    const RecordAnalysis& results, const std::string& path);

// One evaluation metric row; an unset value prints as NA.
struct MetricRow {
    std::string split;
    std::string metric;
    std::optional<double> value;
    std::size_t n = 0;
};

std::string format_metric_report(const std::vector<MetricRow>& rows,
                                 ReportFormat format);
void write_metric_report(const std::vector<MetricRow>& rows,
                         const std::string& path, ReportFormat format);

} // namespace ablq
