#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ablq/geometry.hpp"
#include "ablq/record.hpp"

namespace ablq {

// Two raters scoring the same subjects.
struct PairedRatings {
    struct Item {
        std::string subject_id;
        double a = 0.0;
        double b = 0.0;
    };
    std::vector<Item> items;
};

enum class IccForm {
    TwoWayRandomAbsolute, // ICC(2,1)
    TwoWayMixedConsistency // ICC(3,1)
};

// Intraclass correlation from the two-way ANOVA mean squares. Default is
// ICC(2,1): two-way random effects, absolute agreement, single rater.
double icc_agreement(const PairedRatings& r,
                     IccForm form = IccForm::TwoWayRandomAbsolute);

// Mean squared vertical difference between two polylines, sampled at
// `samples` evenly spaced abscissae across the overlap of their ranges.
// Both polylines share one orientation normalization: if their combined
// y-spread exceeds the x-spread, sampling runs along y instead.
double polyline_mse(const Polyline& gt, const Polyline& pred,
                    std::size_t samples = 100);

struct ConfusionMatrix2 {
    long long tp = 0, fp = 0, fn = 0, tn = 0;
    long long total() const { return tp + fp + fn + tn; }
};

// Metrics with a zero denominator come back unset instead of NaN.
struct ConfusionMetrics {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> specificity;
    std::optional<double> f1;
};

ConfusionMetrics confusion_metrics(const ConfusionMatrix2& m);

double box_iou(const Rect& a, const Rect& b);

// Keypoint similarity with Gaussian falloff: exp(-d^2 / (2*scale*k^2)).
// object_scale carries px^2 (an area), falloff_k is dimensionless.
double oks(Point2 gt, Point2 pred, double object_scale, double falloff_k);

// Mean OKS over the labeled keypoints of one detection.
double oks_mean(const std::vector<std::pair<Point2, Point2>>& gt_pred_pairs,
                double object_scale, double falloff_k);

// (confidence, is-true-positive) per detection.
using ScoredMatch = std::pair<double, bool>;

// 101-point interpolated average precision. Unset when gt_count is zero.
std::optional<double> average_precision(std::vector<ScoredMatch> matches,
                                        std::size_t gt_count);

// (confidence, match quality in [0,1]) per detection; a detection counts
// as a true positive at threshold t iff quality >= t.
using QualityMatch = std::pair<double, double>;

// Mean AP over the quality thresholds {0.50, 0.55, ..., 0.95}.
std::optional<double> ap_over_thresholds(
    const std::vector<QualityMatch>& matches, std::size_t gt_count);

} // namespace ablq
