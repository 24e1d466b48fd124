#pragma once

#include <cstddef>
#include <vector>

#include "ablq/metrics.hpp"
#include "ablq/report.hpp"

namespace ablq {

struct EvalOptions {
    AnalyzeOptions analyze;
    int mse_samples = 100; // abscissae per bone-line comparison
};

// Aggregated agreement between predictions and ground truth. rows is
// ready for format_metric_report: per-split and overall severity ICC,
// overall bone-line MSE, then the pattern confusion statistics.
struct EvalReport {
    std::vector<MetricRow> rows;
    ConfusionMatrix2 confusion; // pattern labels, positive class Angular
    std::size_t severity_pairs = 0;
    std::size_t bone_line_pairs = 0;
};

// Runs the analysis pipeline over `predictions` and joins each assessed
// side with its reference by (image_id, tooth_id, side). A ground-truth
// record's annotation block is the reference when present; otherwise the
// pipeline runs on the ground-truth geometry itself. Bone lines pair up
// per image by centroid order; pairs with disjoint ranges are skipped.
// Metrics a degenerate sample cannot define come back unset, never zero.
EvalReport evaluate_batches(const std::vector<RadiographRecord>& predictions,
                            const std::vector<RadiographRecord>& ground_truth,
                            const EvalOptions& opts = {});

} // namespace ablq
