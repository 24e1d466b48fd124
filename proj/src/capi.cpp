#include "ablq.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "ablq/errors.hpp"
#include "ablq/evaluate.hpp"
#include "ablq/mask.hpp"
#include "ablq/record_io.hpp"
#include "ablq/report.hpp"
#include "ablq/severity.hpp"
#include "ablq/synth.hpp"

struct ablq_batch {
    ablq::ParsedBatch data;
};
struct ablq_results {
    std::vector<ablq::RecordAnalysis> data;
};
struct ablq_eval {
    ablq::EvalReport data;
};

namespace {

using json = nlohmann::ordered_json;

thread_local std::string t_error;

ablq_status set_error(ablq_status s, const char* msg) {
    t_error = msg;
    return s;
}

template <typename F>
ablq_status guarded(F&& f) {
    try {
        f();
        t_error.clear();
        return ABLQ_OK;
    } catch (const ablq::IoError& e) {
        return set_error(ABLQ_ERR_IO, e.what());
    } catch (const ablq::SchemaError& e) {
        return set_error(ABLQ_ERR_SCHEMA, e.what());
    } catch (const ablq::GeometryOutOfBounds& e) {
        return set_error(ABLQ_ERR_SCHEMA, e.what());
    } catch (const ablq::ValidationError& e) {
        return set_error(ABLQ_ERR_VALIDATION, e.what());
    } catch (const ablq::InfeasibleSpec& e) {
        return set_error(ABLQ_ERR_INFEASIBLE, e.what());
    } catch (const ablq::Error& e) {
        return set_error(ABLQ_ERR_DEGENERATE, e.what());
    } catch (const std::exception& e) {
        return set_error(ABLQ_ERR_INTERNAL, e.what());
    }
}

ablq_status null_arg() {
    return set_error(ABLQ_ERR_VALIDATION, "null argument");
}

json parse_options(const char* text, const char* what) {
    if (!text || !*text) return json::object();
    json v;
    try {
        v = json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ablq::ValidationError(std::string(what) + ": " + e.what());
    }
    if (!v.is_object())
        throw ablq::ValidationError(std::string(what) +
                                    ": expected an object");
    return v;
}

// Consuming getters so leftovers can be rejected as unknown keys.
double take_number(json& o, const char* key, double dflt) {
    auto it = o.find(key);
    if (it == o.end()) return dflt;
    if (!it->is_number())
        throw ablq::ValidationError(std::string(key) + ": expected a number");
    double v = it->get<double>();
    o.erase(it);
    return v;
}

long long take_integer(json& o, const char* key, long long dflt) {
    auto it = o.find(key);
    if (it == o.end()) return dflt;
    if (!it->is_number_integer())
        throw ablq::ValidationError(std::string(key) +
                                    ": expected an integer");
    long long v = it->get<long long>();
    o.erase(it);
    return v;
}

bool take_bool(json& o, const char* key, bool dflt) {
    auto it = o.find(key);
    if (it == o.end()) return dflt;
    if (!it->is_boolean())
        throw ablq::ValidationError(std::string(key) +
                                    ": expected a boolean");
    bool v = it->get<bool>();
    o.erase(it);
    return v;
}

void reject_leftovers(const json& o, const char* what) {
    if (o.empty()) return;
    throw ablq::ValidationError(std::string(what) + ": unknown key \"" +
                                o.begin().key() + "\"");
}

ablq::AnalyzeOptions analyze_options_from(json o, const char* what) {
    ablq::AnalyzeOptions opts;
    opts.run_pattern = take_bool(o, "run_pattern", opts.run_pattern);
    opts.iou_threshold = take_number(o, "iou_threshold", opts.iou_threshold);
    opts.jobs = int(take_integer(o, "jobs", opts.jobs));
    if (auto it = o.find("pattern"); it != o.end()) {
        if (!it->is_object())
            throw ablq::ValidationError("pattern: expected an object");
        json p = *it;
        o.erase(it);
        opts.pattern.threshold_degrees =
            take_number(p, "threshold_degrees",
                        opts.pattern.threshold_degrees);
        opts.pattern.tangent_window = int(take_integer(
            p, "tangent_window", opts.pattern.tangent_window));
        opts.pattern.snap_distance =
            take_number(p, "snap_distance", opts.pattern.snap_distance);
        opts.pattern.severity_floor_percent =
            take_number(p, "severity_floor_percent",
                        opts.pattern.severity_floor_percent);
        opts.pattern.orient_step =
            take_number(p, "orient_step", opts.pattern.orient_step);
        reject_leftovers(p, "pattern options");
    }
    reject_leftovers(o, what);
    return opts;
}

ablq::ReportFormat format_from(const char* format) {
    std::string f = format ? format : "";
    if (f == "csv") return ablq::ReportFormat::Csv;
    if (f == "structured") return ablq::ReportFormat::Structured;
    throw ablq::ValidationError("format must be csv or structured");
}

char* heap_copy(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::string safe_filename(const std::string& id) {
    std::string out;
    for (char c : id) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        out += ok ? c : '_';
    }
    return out.empty() ? "record" : out;
}

} // namespace

extern "C" {

const char* ablq_version(void) { return "0.1.0"; }

const char* ablq_last_error(void) { return t_error.c_str(); }

void ablq_string_free(char* text) { std::free(text); }

ablq_status ablq_batch_load(const char* path, int strict, ablq_batch** out) {
    if (!path || !out) return null_arg();
    return guarded([&] {
        auto parsed = ablq::parse_records_text(ablq::read_text_file(path),
                                               strict != 0);
        *out = new ablq_batch{std::move(parsed)};
    });
}

ablq_status ablq_batch_from_text(const char* text, int strict,
                                 ablq_batch** out) {
    if (!text || !out) return null_arg();
    return guarded([&] {
        *out = new ablq_batch{ablq::parse_records_text(text, strict != 0)};
    });
}

ablq_status ablq_batch_import_annotations(const char* path,
                                          const char* name_map_json,
                                          int strict, ablq_batch** out) {
    if (!path || !out) return null_arg();
    return guarded([&] {
        ablq::NameMap nm;
        if (!name_map_json || !*name_map_json) {
            nm = ablq::default_name_map();
        } else {
            json v = parse_options(name_map_json, "name map");
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!it.value().is_string())
                    throw ablq::ValidationError(
                        "name map: roles must be strings");
                nm.emplace_back(it.key(), it.value().get<std::string>());
            }
        }
        auto parsed = ablq::import_annotations_text(
            ablq::read_text_file(path), nm, strict != 0);
        *out = new ablq_batch{std::move(parsed)};
    });
}

ablq_status ablq_batch_synth(const char* spec_json, int count,
                             ablq_batch** out) {
    if (!out) return null_arg();
    return guarded([&] {
        json o = parse_options(spec_json, "synth spec");
        ablq::SynthSpec spec;
        spec.seed = std::uint64_t(
            take_integer(o, "seed", (long long)spec.seed));
        spec.teeth_count =
            int(take_integer(o, "teeth_count", spec.teeth_count));
        if (auto it = o.find("severity_percent"); it != o.end()) {
            if (!it->is_null())
                spec.severity_percent =
                    take_number(o, "severity_percent", 0.0);
            else
                o.erase(it);
        }
        if (auto it = o.find("theta_degrees"); it != o.end()) {
            if (!it->is_null())
                spec.theta_degrees = take_number(o, "theta_degrees", 0.0);
            else
                o.erase(it);
        }
        spec.jitter = take_number(o, "jitter", spec.jitter);
        spec.width = int(take_integer(o, "width", spec.width));
        spec.height = int(take_integer(o, "height", spec.height));
        reject_leftovers(o, "synth spec");

        ablq_batch* b = new ablq_batch;
        try {
            b->data.records = ablq::generate_batch(spec, count);
        } catch (...) {
            delete b;
            throw;
        }
        *out = b;
    });
}

ablq_status ablq_batch_save(const ablq_batch* batch, const char* path) {
    if (!batch || !path) return null_arg();
    return guarded(
        [&] { ablq::write_record_file(batch->data.records, path); });
}

size_t ablq_batch_size(const ablq_batch* batch) {
    return batch ? batch->data.records.size() : 0;
}

size_t ablq_batch_diagnostic_count(const ablq_batch* batch) {
    return batch ? batch->data.diagnostics.size() : 0;
}

ablq_status ablq_batch_diagnostic(const ablq_batch* batch, size_t index,
                                  const char** image_id, const char** field,
                                  const char** message) {
    if (!batch || !image_id || !field || !message) return null_arg();
    if (index >= batch->data.diagnostics.size())
        return set_error(ABLQ_ERR_VALIDATION, "diagnostic index out of range");
    const auto& d = batch->data.diagnostics[index];
    *image_id = d.image_id.c_str();
    *field = d.field.c_str();
    *message = d.message.c_str();
    t_error.clear();
    return ABLQ_OK;
}

ablq_status ablq_batch_lines_to_masks(ablq_batch* batch, double thickness) {
    if (!batch) return null_arg();
    return guarded([&] {
        if (!(thickness > 0.0))
            throw ablq::ValidationError("thickness must be positive");
        auto records = batch->data.records; // commit only a full success
        for (auto& r : records) {
            for (const auto& line : r.bone_lines)
                r.bone_line_masks.push_back(ablq::rasterize_polyline(
                    line, thickness, r.width, r.height));
            r.bone_lines.clear();
        }
        batch->data.records = std::move(records);
    });
}

ablq_status ablq_batch_masks_to_lines(ablq_batch* batch,
                                      size_t resample_points) {
    if (!batch) return null_arg();
    return guarded([&] {
        if (resample_points < 2)
            throw ablq::ValidationError(
                "resample_points must be at least 2");
        auto records = batch->data.records;
        for (auto& r : records) {
            for (const auto& m : r.bone_line_masks)
                r.bone_lines.push_back(
                    ablq::centerline_from_mask(m, resample_points));
            r.bone_line_masks.clear();
        }
        batch->data.records = std::move(records);
    });
}

ablq_status ablq_batch_filter_split(ablq_batch* batch, const char* split) {
    if (!batch || !split) return null_arg();
    return guarded([&] {
        ablq::Split want;
        const std::string name = split;
        if (name == "train") want = ablq::Split::Train;
        else if (name == "validation") want = ablq::Split::Validation;
        else if (name == "test") want = ablq::Split::Test;
        else if (name == "unspecified") want = ablq::Split::Unspecified;
        else
            throw ablq::ValidationError("unknown split \"" + name + "\"");
        auto& records = batch->data.records;
        records.erase(std::remove_if(records.begin(), records.end(),
                                     [&](const ablq::RadiographRecord& r) {
                                         return r.split != want;
                                     }),
                      records.end());
    });
}

void ablq_batch_free(ablq_batch* batch) { delete batch; }

ablq_status ablq_analyze(const ablq_batch* batch, const char* options_json,
                         ablq_results** out) {
    if (!batch || !out) return null_arg();
    return guarded([&] {
        ablq::AnalyzeOptions opts = analyze_options_from(
            parse_options(options_json, "analyze options"),
            "analyze options");
        *out = new ablq_results{
            ablq::analyze_batch(batch->data.records, opts)};
    });
}

size_t ablq_results_size(const ablq_results* results) {
    return results ? results->data.size() : 0;
}

ablq_status ablq_results_write_report(const ablq_results* results,
                                      const char* path, const char* format) {
    if (!results || !path) return null_arg();
    return guarded([&] {
        ablq::write_assessment_report(results->data, path,
                                      format_from(format));
    });
}

ablq_status ablq_results_report_text(const ablq_results* results,
                                     const char* format, char** out_text) {
    if (!results || !out_text) return null_arg();
    return guarded([&] {
        *out_text = heap_copy(ablq::format_assessment_report(
            results->data, format_from(format)));
    });
}

ablq_status ablq_results_write_overlays(const ablq_results* results,
                                        const ablq_batch* batch,
                                        const char* directory) {
    if (!results || !batch || !directory) return null_arg();
    return guarded([&] {
        const auto& records = batch->data.records;
        if (results->data.size() != records.size())
            throw ablq::ValidationError(
                "results were not produced from this batch");
        namespace fs = std::filesystem;
        fs::create_directories(directory);
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (results->data[i].image_id != records[i].image_id)
                throw ablq::ValidationError(
                    "results were not produced from this batch");
            fs::path file = fs::path(directory) /
                            (safe_filename(records[i].image_id) + ".svg");
            ablq::render_overlay(records[i], results->data[i],
                                 file.string());
        }
    });
}

void ablq_results_free(ablq_results* results) { delete results; }

ablq_status ablq_evaluate(const ablq_batch* predictions,
                          const ablq_batch* ground_truth,
                          const char* options_json, ablq_eval** out) {
    if (!predictions || !ground_truth || !out) return null_arg();
    return guarded([&] {
        json o = parse_options(options_json, "eval options");
        ablq::EvalOptions opts;
        opts.mse_samples =
            int(take_integer(o, "mse_samples", opts.mse_samples));
        if (auto it = o.find("analyze"); it != o.end()) {
            if (!it->is_object())
                throw ablq::ValidationError("analyze: expected an object");
            json a = *it;
            o.erase(it);
            opts.analyze = analyze_options_from(a, "analyze options");
        }
        reject_leftovers(o, "eval options");
        *out = new ablq_eval{ablq::evaluate_batches(
            predictions->data.records, ground_truth->data.records, opts)};
    });
}

ablq_status ablq_eval_write_report(const ablq_eval* eval, const char* path,
                                   const char* format) {
    if (!eval || !path) return null_arg();
    return guarded([&] {
        ablq::write_metric_report(eval->data.rows, path,
                                  format_from(format));
    });
}

ablq_status ablq_eval_report_text(const ablq_eval* eval, const char* format,
                                  char** out_text) {
    if (!eval || !out_text) return null_arg();
    return guarded([&] {
        *out_text = heap_copy(
            ablq::format_metric_report(eval->data.rows, format_from(format)));
    });
}

ablq_status ablq_eval_counts(const ablq_eval* eval, long long* tp,
                             long long* fp, long long* fn, long long* tn) {
    if (!eval || !tp || !fp || !fn || !tn) return null_arg();
    *tp = eval->data.confusion.tp;
    *fp = eval->data.confusion.fp;
    *fn = eval->data.confusion.fn;
    *tn = eval->data.confusion.tn;
    t_error.clear();
    return ABLQ_OK;
}

void ablq_eval_free(ablq_eval* eval) { delete eval; }

ablq_status ablq_minimax_line(const double xs[3], const double ys[3],
                              double* m, double* c, int* swapped) {
    if (!xs || !ys || !m || !c || !swapped) return null_arg();
    return guarded([&] {
        ablq::Line2 line = ablq::minimax_line(
            {xs[0], ys[0]}, {xs[1], ys[1]}, {xs[2], ys[2]});
        *m = line.m;
        *c = line.c;
        *swapped = line.swapped ? 1 : 0;
    });
}

ablq_status ablq_severity(double cej_x, double cej_y, double inter_x,
                          double inter_y, double apex_x, double apex_y,
                          double* percent, int* out_of_range) {
    if (!percent || !out_of_range) return null_arg();
    return guarded([&] {
        ablq::SeverityValue v = ablq::compute_severity(
            {cej_x, cej_y}, {inter_x, inter_y}, {apex_x, apex_y});
        *percent = v.percent;
        *out_of_range = v.out_of_range ? 1 : 0;
    });
}

ablq_status ablq_box_iou(const double a[4], const double b[4], double* iou) {
    if (!a || !b || !iou) return null_arg();
    return guarded([&] {
        *iou = ablq::box_iou({a[0], a[1], a[2], a[3]},
                             {b[0], b[1], b[2], b[3]});
    });
}

ablq_status ablq_oks(double gt_x, double gt_y, double pred_x, double pred_y,
                     double object_scale, double falloff_k, double* value) {
    if (!value) return null_arg();
    return guarded([&] {
        *value = ablq::oks({gt_x, gt_y}, {pred_x, pred_y}, object_scale,
                           falloff_k);
    });
}

} // extern "C"
