#include "ablq/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ablq/errors.hpp"

namespace ablq {

double icc_agreement(const PairedRatings& r, IccForm form) {
    std::size_t n = r.items.size();
    if (n < 2)
        throw DegenerateRatings("need at least two subjects");
    constexpr double k = 2.0;

    double grand = 0.0;
    for (const auto& it : r.items) grand += it.a + it.b;
    grand /= (k * double(n));

    double col_a = 0.0, col_b = 0.0;
    for (const auto& it : r.items) {
        col_a += it.a;
        col_b += it.b;
    }
    col_a /= double(n);
    col_b /= double(n);

    double ssr = 0.0, ssc = 0.0, sse = 0.0;
    for (const auto& it : r.items) {
        double row = 0.5 * (it.a + it.b);
        ssr += (row - grand) * (row - grand);
        double ea = it.a - row - col_a + grand;
        double eb = it.b - row - col_b + grand;
        sse += ea * ea + eb * eb;
    }
    ssr *= k;
    ssc = double(n) * ((col_a - grand) * (col_a - grand) +
                       (col_b - grand) * (col_b - grand));

    if (ssr < 1e-12)
        throw DegenerateRatings("between-subject variance is zero");

    double msr = ssr / double(n - 1);
    double msc = ssc / (k - 1.0);
    double mse = sse / (double(n - 1) * (k - 1.0));

    if (form == IccForm::TwoWayMixedConsistency)
        return (msr - mse) / (msr + (k - 1.0) * mse);
    return (msr - mse) /
           (msr + (k - 1.0) * mse + k * (msc - mse) / double(n));
}

namespace {

struct Frame {
    bool swapped;
    double a(Point2 p) const { return swapped ? p.y : p.x; }
    double b(Point2 p) const { return swapped ? p.x : p.y; }
};

Frame shared_frame(const Polyline& g, const Polyline& p) {
    double minx = g[0].x, maxx = g[0].x, miny = g[0].y, maxy = g[0].y;
    auto absorb = [&](const Polyline& pl) {
        for (auto q : pl) {
            minx = std::min(minx, q.x);
            maxx = std::max(maxx, q.x);
            miny = std::min(miny, q.y);
            maxy = std::max(maxy, q.y);
        }
    };
    absorb(g);
    absorb(p);
    return {maxy - miny > maxx - minx};
}

// Mean ordinate of all segment crossings at abscissa a; linear
// interpolation inside segments, inclusive at vertices.
double ordinate_at(const Polyline& pl, const Frame& f, double a) {
    double sum = 0.0;
    int hits = 0;
    for (std::size_t i = 1; i < pl.size(); ++i) {
        double a0 = f.a(pl[i - 1]), a1 = f.a(pl[i]);
        double b0 = f.b(pl[i - 1]), b1 = f.b(pl[i]);
        double lo = std::min(a0, a1), hi = std::max(a0, a1);
        if (a < lo || a > hi) continue;
        if (hi - lo < 1e-12) {
            sum += 0.5 * (b0 + b1);
        } else {
            double t = (a - a0) / (a1 - a0);
            sum += b0 + t * (b1 - b0);
        }
        ++hits;
    }
    if (hits == 0) return f.b(pl.front()); // unreachable inside the overlap
    return sum / hits;
}

} // namespace

double polyline_mse(const Polyline& gt, const Polyline& pred,
                    std::size_t samples) {
    if (gt.size() < 2 || pred.size() < 2)
        throw EmptyPolyline("polylines need at least two vertices");
    if (samples < 2) samples = 2;

    Frame f = shared_frame(gt, pred);
    auto range = [&](const Polyline& pl) {
        double lo = f.a(pl[0]), hi = f.a(pl[0]);
        for (auto q : pl) {
            lo = std::min(lo, f.a(q));
            hi = std::max(hi, f.a(q));
        }
        return std::pair<double, double>{lo, hi};
    };
    auto [glo, ghi] = range(gt);
    auto [plo, phi] = range(pred);
    double lo = std::max(glo, plo);
    double hi = std::min(ghi, phi);
    if (hi - lo <= 0.0)
        throw NoOverlap("polyline abscissa ranges do not overlap");

    double acc = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        double a = lo + (hi - lo) * double(i) / double(samples - 1);
        double d = ordinate_at(gt, f, a) - ordinate_at(pred, f, a);
        acc += d * d;
    }
    return acc / double(samples);
}

ConfusionMetrics confusion_metrics(const ConfusionMatrix2& m) {
    ConfusionMetrics out;
    double tp = double(m.tp), fp = double(m.fp);
    double fn = double(m.fn), tn = double(m.tn);
    double total = tp + fp + fn + tn;
    if (total > 0) out.accuracy = (tp + tn) / total;
    if (tp + fp > 0) out.precision = tp / (tp + fp);
    if (tp + fn > 0) out.recall = tp / (tp + fn);
    if (tn + fp > 0) out.specificity = tn / (tn + fp);
    if (out.precision && out.recall && *out.precision + *out.recall > 0)
        out.f1 = 2.0 * *out.precision * *out.recall /
                 (*out.precision + *out.recall);
    return out;
}

double box_iou(const Rect& a, const Rect& b) {
    if (a.area() <= 0 || b.area() <= 0)
        throw ValidationError("boxes must have positive area");
    double ix = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
    double iy = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
    if (ix <= 0 || iy <= 0) return 0.0;
    double inter = ix * iy;
    return inter / (a.area() + b.area() - inter);
}

double oks(Point2 gt, Point2 pred, double object_scale, double falloff_k) {
    if (object_scale <= 0 || falloff_k <= 0)
        throw ValidationError("oks scale and falloff must be positive");
    double d2 = (gt.x - pred.x) * (gt.x - pred.x) +
                (gt.y - pred.y) * (gt.y - pred.y);
    return std::exp(-d2 / (2.0 * object_scale * falloff_k * falloff_k));
}

double oks_mean(const std::vector<std::pair<Point2, Point2>>& gt_pred_pairs,
                double object_scale, double falloff_k) {
    if (gt_pred_pairs.empty())
        throw ValidationError("oks mean needs at least one keypoint pair");
    double acc = 0.0;
    for (const auto& [g, p] : gt_pred_pairs)
        acc += oks(g, p, object_scale, falloff_k);
    return acc / double(gt_pred_pairs.size());
}

std::optional<double> average_precision(std::vector<ScoredMatch> matches,
                                        std::size_t gt_count) {
    if (gt_count == 0) return std::nullopt;
    if (matches.empty()) return 0.0;

    // Descending confidence; false positives first at equal confidence so
    // ties never inflate the curve and input order never matters.
    std::sort(matches.begin(), matches.end(), [](ScoredMatch a, ScoredMatch b) {
        if (a.first != b.first) return a.first > b.first;
        return int(a.second) < int(b.second);
    });

    std::vector<double> precision, recall;
    double tp = 0, fp = 0;
    for (auto [conf, is_tp] : matches) {
        (void)conf;
        if (is_tp)
            ++tp;
        else
            ++fp;
        precision.push_back(tp / (tp + fp));
        recall.push_back(tp / double(gt_count));
    }

    double ap = 0.0;
    for (int i = 0; i <= 100; ++i) {
        double r = double(i) / 100.0;
        double best = 0.0;
        for (std::size_t j = 0; j < recall.size(); ++j)
            if (recall[j] >= r - 1e-12) best = std::max(best, precision[j]);
        ap += best;
    }
    return ap / 101.0;
}

std::optional<double> ap_over_thresholds(
    const std::vector<QualityMatch>& matches, std::size_t gt_count) {
    if (gt_count == 0) return std::nullopt;
    double acc = 0.0;
    for (int i = 0; i < 10; ++i) {
        double t = 0.50 + 0.05 * i;
        std::vector<ScoredMatch> scored;
        scored.reserve(matches.size());
        for (auto [conf, quality] : matches)
            scored.emplace_back(conf, quality >= t - 1e-12);
        acc += average_precision(std::move(scored), gt_count).value();
    }
    return acc / 10.0;
}

} // namespace ablq
