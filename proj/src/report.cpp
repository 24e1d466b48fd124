#include "ablq/report.hpp"

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ablq/errors.hpp"
#include "ablq/record_io.hpp"
#include "ablq/severity.hpp"

namespace ablq {

namespace {

using json = nlohmann::ordered_json;

std::string fixed_decimal(double v, int places) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(places) << v;
    return os.str();
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// One merged side for reporting.
struct ReportRow {
    std::string image_id;
    std::string tooth_id;
    Side side = Side::Left;
    std::optional<double> severity;
    std::vector<std::string> flags;
    std::optional<double> theta;
    std::optional<PatternLabel> label;
    std::string error;
};

std::vector<ReportRow> merge_rows(const std::vector<RecordAnalysis>& results) {
    std::vector<ReportRow> rows;
    for (const auto& a : results) {
        for (const auto& s : a.sides) {
            ReportRow row;
            row.image_id = a.image_id;
            row.tooth_id = s.tooth_id;
            row.side = s.side;
            row.severity = s.severity_percent;
            if (!s.complete) row.flags.push_back("incomplete");
            if (s.out_of_range) row.flags.push_back("out_of_range");
            if (!s.error.empty()) {
                row.flags.push_back("fit_error");
                row.error = s.error;
            }
            for (const auto& p : a.patterns) {
                if (p.tooth_id != s.tooth_id || p.side != s.side) continue;
                if (p.status == SiteStatus::Ok) {
                    row.theta = p.theta_degrees;
                    row.label = p.label;
                } else if (p.status == SiteStatus::Unmatched) {
                    row.flags.push_back("no_bone_line");
                } else {
                    row.flags.push_back("pattern_failed");
                    if (row.error.empty()) row.error = p.error;
                }
                break;
            }
            rows.push_back(std::move(row));
        }
    }
    std::sort(rows.begin(), rows.end(),
              [](const ReportRow& a, const ReportRow& b) {
                  if (a.image_id != b.image_id) return a.image_id < b.image_id;
                  if (a.tooth_id != b.tooth_id) return a.tooth_id < b.tooth_id;
                  return int(a.side) < int(b.side);
              });
    return rows;
}

std::string join_flags(const std::vector<std::string>& flags) {
    std::string out;
    for (const auto& f : flags) {
        if (!out.empty()) out += ';';
        out += f;
    }
    return out;
}

} // namespace

std::vector<RecordAnalysis> analyze_batch(
    const std::vector<RadiographRecord>& batch, const AnalyzeOptions& opts) {
    if (!(opts.iou_threshold > 0.0 && opts.iou_threshold < 1.0))
        throw ValidationError("iou threshold must lie inside (0,1)");
    validate_pattern_config(opts.pattern);

    std::vector<RecordAnalysis> out(batch.size());
    std::size_t jobs =
        opts.jobs > 0 ? std::size_t(opts.jobs)
                      : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min(jobs, std::max<std::size_t>(batch.size(), 1));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= batch.size()) return;
            RecordAnalysis a;
            a.image_id = batch[i].image_id;
            a.split = batch[i].split;
            try {
                a.sides =
                    assess_radiograph_severity(batch[i], opts.iou_threshold);
                if (opts.run_pattern)
                    a.patterns = assess_radiograph_pattern(batch[i], a.sides,
                                                           opts.pattern);
            } catch (const std::exception& e) {
                a.sides.clear();
                a.patterns.clear();
                a.error = e.what();
            }
            out[i] = std::move(a);
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return out;
}

std::string format_assessment_report(
    const std::vector<RecordAnalysis>& results, ReportFormat format) {
    std::vector<ReportRow> rows = merge_rows(results);

    if (format == ReportFormat::Csv) {
        std::string out =
            "image_id,tooth_id,side,severity_percent,flags,theta_degrees,"
            "pattern_label\n";
        for (const auto& r : rows) {
            out += csv_escape(r.image_id);
            out += ',';
            out += csv_escape(r.tooth_id);
            out += ',';
            out += to_string(r.side);
            out += ',';
            if (r.severity) out += fixed_decimal(*r.severity, 1);
            out += ',';
            out += join_flags(r.flags);
            out += ',';
            if (r.theta) out += fixed_decimal(*r.theta, 4);
            out += ',';
            if (r.label) out += to_string(*r.label);
            out += '\n';
        }
        return out;
    }

    json doc;
    doc["schema"] = "ablq-report/1";
    json jrows = json::array();
    for (const auto& r : rows) {
        json j;
        j["image_id"] = r.image_id;
        j["tooth_id"] = r.tooth_id;
        j["side"] = to_string(r.side);
        j["severity_percent"] =
            r.severity ? json(*r.severity) : json(nullptr);
        json flags = json::array();
        for (const auto& f : r.flags) flags.push_back(f);
        j["flags"] = std::move(flags);
        j["theta_degrees"] = r.theta ? json(*r.theta) : json(nullptr);
        j["pattern_label"] =
            r.label ? json(to_string(*r.label)) : json(nullptr);
        if (!r.error.empty()) j["error"] = r.error;
        jrows.push_back(std::move(j));
    }
    doc["rows"] = std::move(jrows);
    json errors = json::array();
    for (const auto& a : results)
        if (!a.error.empty()) {
            json e;
            e["image_id"] = a.image_id;
            e["message"] = a.error;
            errors.push_back(std::move(e));
        }
    if (!errors.empty()) doc["record_errors"] = std::move(errors);
    return doc.dump(2) + "\n";
}

void write_assessment_report(const std::vector<RecordAnalysis>& results,
                             const std::string& path, ReportFormat format) {
    write_text_file(path, format_assessment_report(results, format));
}

namespace {

void svg_points(std::ostringstream& s, const Polyline& pl) {
    for (std::size_t i = 0; i < pl.size(); ++i) {
        if (i) s << ' ';
        s << pl[i].x << ',' << pl[i].y;
    }
}

void svg_keypoint(std::ostringstream& s, const KeypointDetection& d) {
    const char* color = d.kind == KeypointKind::Cej            ? "#2e7d32"
                        : d.kind == KeypointKind::Intersection ? "#1565c0"
                                                               : "#c62828";
    s << "  <circle class=\"kp-" << to_string(d.kind) << "\" cx=\""
      << d.location.x << "\" cy=\"" << d.location.y
      << "\" r=\"3\" fill=\"" << color << "\"/>\n";
}

} // namespace

std::string render_overlay_svg(const RadiographRecord& record,
                               const RecordAnalysis& results) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << record.width << "\" height=\"" << record.height << "\" viewBox=\"0 0 "
      << record.width << ' ' << record.height << "\">\n";

    for (const auto& t : record.teeth) {
        if (t.outline.size() < 2) continue;
        s << "  <polygon class=\"tooth-outline\" fill=\"none\" "
             "stroke=\"#9e9e9e\" stroke-width=\"1.5\" points=\"";
        svg_points(s, t.outline);
        s << "\"/>\n";
    }
    for (const auto& bl : record.bone_lines) {
        if (bl.size() < 2) continue;
        s << "  <polyline class=\"bone-line\" fill=\"none\" "
             "stroke=\"#8d6e63\" stroke-width=\"2\" points=\"";
        svg_points(s, bl);
        s << "\"/>\n";
    }

    for (const auto& side : results.sides) {
        if (side.cej) svg_keypoint(s, *side.cej);
        if (side.intersection) svg_keypoint(s, *side.intersection);
        if (side.apex) svg_keypoint(s, *side.apex);
        if (side.complete && side.line && side.severity_percent) {
            Point2 a = project_onto_line(side.cej->location, *side.line);
            Point2 b = project_onto_line(side.apex->location, *side.line);
            s << "  <line class=\"fit-line\" x1=\"" << a.x << "\" y1=\""
              << a.y << "\" x2=\"" << b.x << "\" y2=\"" << b.y
              << "\" stroke=\"#f9a825\" stroke-width=\"1.5\"/>\n";
            Point2 at = side.intersection->location;
            s << "  <text class=\"severity-label\" x=\"" << at.x + 6
              << "\" y=\"" << at.y - 6
              << "\" font-family=\"sans-serif\" font-size=\"12\" "
                 "fill=\"#212121\">"
              << fixed_decimal(*side.severity_percent, 1) << "%</text>\n";
        }
    }

    for (const auto& p : results.patterns)
        if (p.status == SiteStatus::Ok && p.label == PatternLabel::Angular)
            s << "  <circle class=\"angular-mark\" cx=\"" << p.intersection.x
              << "\" cy=\"" << p.intersection.y
              << "\" r=\"9\" fill=\"none\" stroke=\"#d32f2f\" "
                 "stroke-width=\"2\"/>\n";

    s << "</svg>\n";
    return s.str();
}

void render_overlay(const RadiographRecord& record,
                    const RecordAnalysis& results, const std::string& path) {
    write_text_file(path, render_overlay_svg(record, results));
}

std::string format_metric_report(const std::vector<MetricRow>& rows,
                                 ReportFormat format) {
    if (format == ReportFormat::Csv) {
        std::string out = "split,metric,value,n\n";
        for (const auto& r : rows) {
            out += csv_escape(r.split);
            out += ',';
            out += csv_escape(r.metric);
            out += ',';
            out += r.value ? fixed_decimal(*r.value, 6) : "NA";
            out += ',';
            out += std::to_string(r.n);
            out += '\n';
        }
        return out;
    }
    json doc;
    doc["schema"] = "ablq-eval/1";
    json jrows = json::array();
    for (const auto& r : rows) {
        json j;
        j["split"] = r.split;
        j["metric"] = r.metric;
        j["value"] = r.value ? json(*r.value) : json(nullptr);
        j["n"] = r.n;
        jrows.push_back(std::move(j));
    }
    doc["rows"] = std::move(jrows);
    return doc.dump(2) + "\n";
}

void write_metric_report(const std::vector<MetricRow>& rows,
                         const std::string& path, ReportFormat format) {
    write_text_file(path, format_metric_report(rows, format));
}

} // namespace ablq
