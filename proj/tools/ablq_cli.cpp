// Command-line front end. Everything goes through the shared-library C API;
// this file only parses flags, moves bytes, and maps statuses to exit codes.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <ablq.h>

namespace {

// Exit policy: 0 success, 1 any validation or analysis failure, 2 I/O.
int exit_for(ablq_status s) { return s == ABLQ_ERR_IO ? 2 : 1; }

int fail(ablq_status s) {
    std::fprintf(stderr, "error: %s\n", ablq_last_error());
    return exit_for(s);
}

struct BatchPtr {
    ablq_batch* p = nullptr;
    ~BatchPtr() { ablq_batch_free(p); }
};
struct ResultsPtr {
    ablq_results* p = nullptr;
    ~ResultsPtr() { ablq_results_free(p); }
};
struct EvalPtr {
    ablq_eval* p = nullptr;
    ~EvalPtr() { ablq_eval_free(p); }
};

void print_diagnostics(const ablq_batch* batch) {
    size_t n = ablq_batch_diagnostic_count(batch);
    for (size_t i = 0; i < n; ++i) {
        const char* id = nullptr;
        const char* field = nullptr;
        const char* message = nullptr;
        if (ablq_batch_diagnostic(batch, i, &id, &field, &message) == ABLQ_OK)
            std::fprintf(stderr, "warning: %s: %s: %s\n", id, field, message);
    }
}

struct AnalyzeArgs {
    std::string input;
    std::string out_dir;
    std::string format = "csv";
    std::string mode = "both";
    std::string split;
    bool lenient = false;
    bool overlays = false;
    double iou = 0.6;
    double threshold = 54.1372;
    int window = 7;
    double snap = 15.0;
    double floor = 10.0;
    double orient_step = 2.0;
    int jobs = 0;
};

nlohmann::json pattern_options(const AnalyzeArgs& a) {
    return {{"threshold_degrees", a.threshold},
            {"tangent_window", a.window},
            {"snap_distance", a.snap},
            {"severity_floor_percent", a.floor},
            {"orient_step", a.orient_step}};
}

std::string report_path(const std::string& dir, const std::string& format) {
    return dir + "/report." + (format == "csv" ? "csv" : "json");
}

int run_analyze(const AnalyzeArgs& a) {
    BatchPtr batch;
    ablq_status s =
        ablq_batch_load(a.input.c_str(), a.lenient ? 0 : 1, &batch.p);
    if (s != ABLQ_OK) return fail(s);
    print_diagnostics(batch.p);
    if (!a.split.empty()) {
        s = ablq_batch_filter_split(batch.p, a.split.c_str());
        if (s != ABLQ_OK) return fail(s);
    }

    nlohmann::json opts = {{"run_pattern", a.mode != "severity"},
                           {"iou_threshold", a.iou},
                           {"jobs", a.jobs},
                           {"pattern", pattern_options(a)}};
    ResultsPtr results;
    s = ablq_analyze(batch.p, opts.dump().c_str(), &results.p);
    if (s != ABLQ_OK) return fail(s);

    std::error_code ec;
    std::filesystem::create_directories(a.out_dir, ec);
    s = ablq_results_write_report(results.p,
                                  report_path(a.out_dir, a.format).c_str(),
                                  a.format.c_str());
    if (s != ABLQ_OK) return fail(s);
    if (a.overlays) {
        const std::string dir = a.out_dir + "/overlays";
        s = ablq_results_write_overlays(results.p, batch.p, dir.c_str());
        if (s != ABLQ_OK) return fail(s);
    }
    return 0;
}

struct EvalArgs {
    std::string pred;
    std::string gt;
    std::string out;
    std::string format = "csv";
    bool lenient = false;
    int mse_samples = 100;
    double iou = 0.6;
    int jobs = 0;
};

int run_eval(const EvalArgs& a) {
    BatchPtr pred;
    ablq_status s =
        ablq_batch_load(a.pred.c_str(), a.lenient ? 0 : 1, &pred.p);
    if (s != ABLQ_OK) return fail(s);
    print_diagnostics(pred.p);
    BatchPtr gt;
    s = ablq_batch_load(a.gt.c_str(), a.lenient ? 0 : 1, &gt.p);
    if (s != ABLQ_OK) return fail(s);
    print_diagnostics(gt.p);

    nlohmann::json opts = {
        {"mse_samples", a.mse_samples},
        {"analyze", {{"iou_threshold", a.iou}, {"jobs", a.jobs}}}};
    EvalPtr eval;
    s = ablq_evaluate(pred.p, gt.p, opts.dump().c_str(), &eval.p);
    if (s != ABLQ_OK) return fail(s);

    char* text = nullptr;
    s = ablq_eval_report_text(eval.p, a.format.c_str(), &text);
    if (s != ABLQ_OK) return fail(s);
    std::fputs(text, stdout);
    ablq_string_free(text);
    if (!a.out.empty()) {
        s = ablq_eval_write_report(eval.p, a.out.c_str(), a.format.c_str());
        if (s != ABLQ_OK) return fail(s);
    }
    return 0;
}

struct ConvertArgs {
    std::string direction;
    std::string input;
    std::string out;
    std::string name_map;
    bool lenient = false;
    double thickness = 10.0;
    int resample = 64;
};

int run_convert(const ConvertArgs& a) {
    const int strict = a.lenient ? 0 : 1;
    BatchPtr batch;
    ablq_status s;
    if (a.direction == "import-annotations") {
        std::string map_json;
        if (!a.name_map.empty()) {
            std::ifstream in(a.name_map, std::ios::binary);
            if (!in.good()) {
                std::fprintf(stderr, "error: cannot read name map %s\n",
                             a.name_map.c_str());
                return 2;
            }
            std::ostringstream ss;
            ss << in.rdbuf();
            map_json = ss.str();
        }
        s = ablq_batch_import_annotations(
            a.input.c_str(), map_json.empty() ? nullptr : map_json.c_str(),
            strict, &batch.p);
        if (s != ABLQ_OK) return fail(s);
    } else {
        s = ablq_batch_load(a.input.c_str(), strict, &batch.p);
        if (s != ABLQ_OK) return fail(s);
        if (a.direction == "lines-to-masks")
            s = ablq_batch_lines_to_masks(batch.p, a.thickness);
        else
            s = ablq_batch_masks_to_lines(batch.p, size_t(a.resample));
        if (s != ABLQ_OK) return fail(s);
    }
    print_diagnostics(batch.p);
    s = ablq_batch_save(batch.p, a.out.c_str());
    if (s != ABLQ_OK) return fail(s);
    return 0;
}

struct SynthArgs {
    std::string out;
    int n = 10;
    std::uint64_t seed = 42;
    int teeth = 4;
    double severity = 0.0;
    bool has_severity = false;
    double theta = 0.0;
    bool has_theta = false;
    double jitter = 0.0;
    int width = 800;
    int height = 600;
};

int run_synth(const SynthArgs& a) {
    nlohmann::json spec = {{"seed", a.seed},   {"teeth_count", a.teeth},
                           {"jitter", a.jitter}, {"width", a.width},
                           {"height", a.height}};
    if (a.has_severity) spec["severity_percent"] = a.severity;
    if (a.has_theta) spec["theta_degrees"] = a.theta;

    BatchPtr batch;
    ablq_status s = ablq_batch_synth(spec.dump().c_str(), a.n, &batch.p);
    if (s != ABLQ_OK) return fail(s);
    s = ablq_batch_save(batch.p, a.out.c_str());
    if (s != ABLQ_OK) return fail(s);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Alveolar bone-loss quantification toolkit"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_config("--config", "", "Read defaults from an INI/TOML file")
        ->envname("ABLQ_CONFIG");

    AnalyzeArgs an;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "Measure bone loss and classify defect patterns");
    analyze->add_option("--input,-i", an.input, "Input batch file (JSON)")
        ->required();
    analyze->add_option("--out,-o", an.out_dir, "Output directory")
        ->required();
    analyze->add_option("--format", an.format, "Report format")
        ->check(CLI::IsMember({"csv", "structured"}));
    analyze->add_option("--mode", an.mode, "What to compute")
        ->check(CLI::IsMember({"severity", "pattern", "both"}));
    analyze->add_flag("--lenient", an.lenient,
                      "Keep going past malformed records (diagnostics on "
                      "stderr)");
    analyze->add_flag("--overlays", an.overlays,
                      "Also write per-image SVG overlays");
    analyze->add_option("--split", an.split,
                        "Only analyze records with this split tag "
                        "(train|validation|test|unspecified)");
    analyze->add_option("--iou", an.iou,
                        "IoU threshold for duplicate-detection merging");
    analyze->add_option("--pattern-threshold", an.threshold,
                        "Angle threshold (degrees) separating angular from "
                        "horizontal defects");
    analyze->add_option("--tangent-window", an.window,
                        "Vertices per tangent estimate")
        ->check(CLI::Range(3, 101));
    analyze->add_option("--snap", an.snap,
                        "Max distance (px) to snap a bone line to a tooth");
    analyze->add_option("--severity-floor", an.floor,
                        "Skip pattern classification below this severity (%)");
    analyze->add_option("--orient-step", an.orient_step,
                        "Step (px) used to orient tangents");
    analyze->add_option("--jobs", an.jobs,
                        "Worker threads (0 = all available cores)");
    analyze->callback([&an] { std::exit(run_analyze(an)); });

    EvalArgs ev;
    CLI::App* eval = app.add_subcommand(
        "eval", "Score a prediction batch against ground truth");
    eval->add_option("--pred", ev.pred, "Prediction batch file")->required();
    eval->add_option("--gt", ev.gt, "Ground-truth batch file")->required();
    eval->add_option("--out", ev.out, "Also write the metric report here");
    eval->add_option("--format", ev.format, "Report format")
        ->check(CLI::IsMember({"csv", "structured"}));
    eval->add_flag("--lenient", ev.lenient,
                   "Keep going past malformed records");
    eval->add_option("--mse-samples", ev.mse_samples,
                     "Sample count per bone-line distance comparison");
    eval->add_option("--iou", ev.iou,
                     "IoU threshold for duplicate-detection merging");
    eval->add_option("--jobs", ev.jobs,
                     "Worker threads (0 = all available cores)");
    eval->callback([&ev] { std::exit(run_eval(ev)); });

    ConvertArgs cv;
    CLI::App* convert = app.add_subcommand(
        "convert", "Change how bone lines are represented");
    convert
        ->add_option("--direction", cv.direction, "Conversion to apply")
        ->required()
        ->check(CLI::IsMember(
            {"lines-to-masks", "masks-to-lines", "import-annotations"}));
    convert->add_option("--input,-i", cv.input, "Input file")->required();
    convert->add_option("--out,-o", cv.out, "Output batch file")->required();
    convert->add_option("--thickness", cv.thickness,
                        "Mask stroke thickness (px)")
        ->check(CLI::PositiveNumber);
    convert->add_option("--resample", cv.resample,
                        "Vertices per recovered centerline")
        ->check(CLI::Range(2, 100000));
    convert->add_option("--name-map", cv.name_map,
                        "JSON file mapping annotation labels to canonical "
                        "roles (import-annotations only)");
    convert->add_flag("--lenient", cv.lenient,
                      "Keep going past malformed records");
    convert->callback([&cv] { std::exit(run_convert(cv)); });

    SynthArgs sy;
    CLI::App* synth = app.add_subcommand(
        "synth", "Generate a synthetic batch with known ground truth");
    synth->add_option("--out,-o", sy.out, "Output batch file")->required();
    synth->add_option("--n", sy.n, "Number of records");
    synth->add_option("--seed", sy.seed, "Base random seed");
    synth->add_option("--teeth", sy.teeth, "Teeth per record");
    synth->add_option("--severity", sy.severity,
                      "Plant this severity (%) instead of a random one");
    synth->add_option("--theta", sy.theta,
                      "Plant this bone angle (degrees) instead of a random "
                      "one");
    synth->add_option("--jitter", sy.jitter,
                      "Uniform keypoint jitter amplitude (px)");
    synth->add_option("--width", sy.width, "Canvas width (px)");
    synth->add_option("--height", sy.height, "Canvas height (px)");
    synth->callback([&sy, synth] {
        sy.has_severity = synth->count("--severity") > 0;
        sy.has_theta = synth->count("--theta") > 0;
        std::exit(run_synth(sy));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Help requests exit 0; any flag misuse is a validation failure.
        return app.exit(e) == 0 ? 0 : 1;
    }
    return 0;
}
