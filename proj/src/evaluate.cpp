#include "ablq/evaluate.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "ablq/errors.hpp"

namespace ablq {

namespace {

using SiteKey = std::tuple<std::string, std::string, int>;

struct SiteRef {
    std::optional<double> severity;
    std::optional<PatternLabel> label;
};

const char* split_label(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Validation: return "validation";
        case Split::Test: return "test";
        default: return "overall";
    }
}

void require_unique_ids(const std::vector<RadiographRecord>& batch,
                        const char* which) {
    std::set<std::string> seen;
    for (const auto& r : batch)
        if (!seen.insert(r.image_id).second)
            throw ValidationError(std::string(which) +
                                  " batch repeats image_id \"" + r.image_id +
                                  "\"");
}

void collect_sites(const RecordAnalysis& a,
                   std::map<SiteKey, SiteRef>& out) {
    for (const auto& s : a.sides)
        if (s.severity_percent)
            out[{a.image_id, s.tooth_id, int(s.side)}].severity =
                s.severity_percent;
    for (const auto& p : a.patterns)
        if (p.status == SiteStatus::Ok)
            out[{a.image_id, p.tooth_id, int(p.side)}].label = p.label;
}

std::optional<double> try_icc(const std::vector<PairedRatings::Item>& items) {
    try {
        return icc_agreement(PairedRatings{items});
    } catch (const Error&) {
        return std::nullopt; // too few or degenerate pairs
    }
}

Point2 centroid(const Polyline& pl) {
    if (pl.empty()) return {0.0, 0.0};
    Point2 c{0.0, 0.0};
    for (Point2 p : pl) c = c + p;
    return (1.0 / double(pl.size())) * c;
}

// Stable pairing of two line sets from the same image: both sides sorted
// by centroid, i-th with i-th.
std::vector<std::size_t> centroid_order(const std::vector<Polyline>& lines) {
    std::vector<std::size_t> idx(lines.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) {
                         Point2 ca = centroid(lines[a]);
                         Point2 cb = centroid(lines[b]);
                         if (ca.x != cb.x) return ca.x < cb.x;
                         return ca.y < cb.y;
                     });
    return idx;
}

} // namespace

EvalReport evaluate_batches(const std::vector<RadiographRecord>& predictions,
                            const std::vector<RadiographRecord>& ground_truth,
                            const EvalOptions& opts) {
    if (opts.mse_samples < 2)
        throw ValidationError("mse_samples must be at least 2");
    require_unique_ids(predictions, "prediction");
    require_unique_ids(ground_truth, "ground-truth");

    // Reference sites: the annotation block when a record has one, the
    // pipeline's own reading of the geometry otherwise.
    std::map<SiteKey, SiteRef> ref;
    std::vector<RadiographRecord> derived;
    for (const auto& g : ground_truth)
        if (!g.ground_truth || g.ground_truth->entries.empty())
            derived.push_back(g);
    std::vector<RecordAnalysis> derived_results =
        analyze_batch(derived, opts.analyze);
    for (const auto& a : derived_results) collect_sites(a, ref);
    for (const auto& g : ground_truth) {
        if (!g.ground_truth || g.ground_truth->entries.empty()) continue;
        for (const auto& e : g.ground_truth->entries) {
            SiteRef& site = ref[{g.image_id, e.tooth_id, int(e.side)}];
            site.severity = e.severity_percent;
            site.label = e.pattern;
        }
    }

    std::map<std::string, const RadiographRecord*> gt_by_id;
    std::map<std::string, Split> split_by_id;
    for (const auto& g : ground_truth) {
        gt_by_id[g.image_id] = &g;
        split_by_id[g.image_id] = g.split;
    }

    std::vector<RecordAnalysis> results =
        analyze_batch(predictions, opts.analyze);

    EvalReport report;
    std::map<Split, std::vector<PairedRatings::Item>> per_split;
    std::vector<PairedRatings::Item> overall;

    for (const auto& a : results) {
        std::map<SiteKey, SiteRef> pred_sites;
        collect_sites(a, pred_sites);
        for (const auto& [key, site] : pred_sites) {
            auto it = ref.find(key);
            if (it == ref.end()) continue;
            if (site.severity && it->second.severity) {
                PairedRatings::Item item;
                item.subject_id = std::get<0>(key) + ":" +
                                  std::get<1>(key) + ":" +
                                  to_string(Side(std::get<2>(key)));
                item.a = *it->second.severity;
                item.b = *site.severity;
                per_split[split_by_id[a.image_id]].push_back(item);
                overall.push_back(std::move(item));
            }
            if (site.label && it->second.label) {
                bool pred_ang = *site.label == PatternLabel::Angular;
                bool ref_ang = *it->second.label == PatternLabel::Angular;
                if (pred_ang && ref_ang) ++report.confusion.tp;
                else if (pred_ang) ++report.confusion.fp;
                else if (ref_ang) ++report.confusion.fn;
                else ++report.confusion.tn;
            }
        }
    }
    report.severity_pairs = overall.size();

    double mse_sum = 0.0;
    std::size_t mse_n = 0;
    for (const auto& p : predictions) {
        auto it = gt_by_id.find(p.image_id);
        if (it == gt_by_id.end()) continue;
        const auto& gt_lines = it->second->bone_lines;
        auto gi = centroid_order(gt_lines);
        auto pi = centroid_order(p.bone_lines);
        std::size_t n = std::min(gi.size(), pi.size());
        for (std::size_t k = 0; k < n; ++k) {
            try {
                mse_sum += polyline_mse(gt_lines[gi[k]], p.bone_lines[pi[k]],
                                        std::size_t(opts.mse_samples));
                ++mse_n;
            } catch (const Error&) {
                // disjoint or degenerate pair: not comparable
            }
        }
    }
    report.bone_line_pairs = mse_n;

    for (Split s : {Split::Train, Split::Validation, Split::Test}) {
        auto it = per_split.find(s);
        if (it == per_split.end() || it->second.empty()) continue;
        report.rows.push_back({split_label(s), "icc_severity",
                               try_icc(it->second), it->second.size()});
    }
    report.rows.push_back(
        {"overall", "icc_severity", try_icc(overall), overall.size()});
    report.rows.push_back({"overall", "bone_mse",
                           mse_n ? std::optional<double>(mse_sum / mse_n)
                                 : std::nullopt,
                           mse_n});

    ConfusionMetrics cm = confusion_metrics(report.confusion);
    std::size_t total = std::size_t(report.confusion.total());
    report.rows.push_back({"overall", "accuracy", cm.accuracy, total});
    report.rows.push_back({"overall", "precision", cm.precision, total});
    report.rows.push_back({"overall", "recall", cm.recall, total});
    report.rows.push_back({"overall", "specificity", cm.specificity, total});
    report.rows.push_back({"overall", "f1", cm.f1, total});
    return report;
}

} // namespace ablq
