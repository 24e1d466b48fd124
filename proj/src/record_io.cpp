#include "ablq/record_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ablq/errors.hpp"

namespace ablq {

namespace {

using json = nlohmann::ordered_json;

// Internal carrier for one finding; converted to SchemaError or Diagnostic
// at the record boundary.
struct FieldError {
    std::string field;
    std::string message;
};

[[noreturn]] void fail(const std::string& field, const std::string& message) {
    throw FieldError{field, message};
}

const json& need(const json& j, const char* key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing required field");
    return *it;
}

std::string need_string(const json& j, const char* key,
                        const std::string& path) {
    const json& v = need(j, key, path);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
}

int need_positive_int(const json& j, const char* key,
                      const std::string& path) {
    const json& v = need(j, key, path);
    if (!v.is_number_integer())
        fail(path + "." + key, "expected an integer");
    long long n = v.get<long long>();
    if (n < 1) fail(path + "." + key, "expected a positive integer");
    return static_cast<int>(n);
}

Point2 parse_point(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) fail(path, "expected [x, y]");
    return {as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]")};
}

Polyline parse_polyline(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of points");
    Polyline pl;
    for (std::size_t i = 0; i < v.size(); ++i)
        pl.push_back(parse_point(v[i], path + "[" + std::to_string(i) + "]"));
    return pl;
}

// Rings arrive either open or with the first vertex repeated at the end;
// storage is open.
void normalize_open(Polyline& ring) {
    if (ring.size() >= 2 && ring.front().x == ring.back().x &&
        ring.front().y == ring.back().y)
        ring.pop_back();
}

Rect parse_rect(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 4)
        fail(path, "expected [x0, y0, x1, y1]");
    Rect r{as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]"),
           as_number(v[2], path + "[2]"), as_number(v[3], path + "[3]")};
    if (r.x1 < r.x0 || r.y1 < r.y0) fail(path, "corners are not ordered");
    return r;
}

Rect bounding_box(const Polyline& pl) {
    Rect r{pl[0].x, pl[0].y, pl[0].x, pl[0].y};
    for (Point2 p : pl) {
        r.x0 = std::min(r.x0, p.x);
        r.y0 = std::min(r.y0, p.y);
        r.x1 = std::max(r.x1, p.x);
        r.y1 = std::max(r.y1, p.y);
    }
    return r;
}

Rect default_keypoint_box(Point2 loc) {
    return {loc.x - 4, loc.y - 4, loc.x + 4, loc.y + 4};
}

Arch parse_arch(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    std::string s = v.get<std::string>();
    if (s == "maxillary") return Arch::Maxillary;
    if (s == "mandibular") return Arch::Mandibular;
    if (s == "unknown") return Arch::Unknown;
    fail(path, "expected maxillary, mandibular or unknown");
}

OcclusalDirection parse_occlusal(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    std::string s = v.get<std::string>();
    if (s == "up") return OcclusalDirection::Up;
    if (s == "down") return OcclusalDirection::Down;
    if (s == "unknown") return OcclusalDirection::Unknown;
    fail(path, "expected up, down or unknown");
}

Split parse_split(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    std::string s = v.get<std::string>();
    if (s == "train") return Split::Train;
    if (s == "validation") return Split::Validation;
    if (s == "test") return Split::Test;
    fail(path, "expected train, validation or test");
}

KeypointKind parse_kind(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    std::string s = v.get<std::string>();
    if (s == "cej") return KeypointKind::Cej;
    if (s == "intersection") return KeypointKind::Intersection;
    if (s == "apex") return KeypointKind::Apex;
    fail(path, "expected cej, intersection or apex");
}

Side parse_side(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    std::string s = v.get<std::string>();
    if (s == "left") return Side::Left;
    if (s == "right") return Side::Right;
    fail(path, "expected left or right");
}

PatternLabel parse_pattern(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    std::string s = v.get<std::string>();
    if (s == "angular") return PatternLabel::Angular;
    if (s == "horizontal") return PatternLabel::Horizontal;
    fail(path, "expected angular or horizontal");
}

// Runs alternate background/foreground, starting with background, row
// major; their sum must cover the mask exactly.
BinaryMask parse_mask(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
    BinaryMask m(need_positive_int(v, "width", path),
                 need_positive_int(v, "height", path));
    const json& runs = need(v, "runs", path);
    if (!runs.is_array()) fail(path + ".runs", "expected an array");
    std::size_t i = 0;
    bool fg = false;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        std::string rp = path + ".runs[" + std::to_string(k) + "]";
        if (!runs[k].is_number_integer()) fail(rp, "expected an integer");
        long long n = runs[k].get<long long>();
        if (n < 0) fail(rp, "expected a non-negative run length");
        if (i + std::size_t(n) > m.bits.size())
            fail(rp, "runs overflow the mask");
        if (fg)
            std::fill(m.bits.begin() + long(i), m.bits.begin() + long(i) + n,
                      std::uint8_t(1));
        i += std::size_t(n);
        fg = !fg;
    }
    if (i != m.bits.size()) fail(path + ".runs", "runs do not cover the mask");
    return m;
}

KeypointDetection parse_keypoint(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
    KeypointDetection d;
    d.kind = parse_kind(need(v, "kind", path), path + ".kind");
    d.location = parse_point(need(v, "location", path), path + ".location");
    if (auto it = v.find("confidence"); it != v.end())
        d.confidence = as_number(*it, path + ".confidence");
    if (auto it = v.find("box"); it != v.end())
        d.box = parse_rect(*it, path + ".box");
    else
        d.box = default_keypoint_box(d.location);
    return d;
}

ToothRecord parse_tooth(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
    ToothRecord t;
    t.tooth_id = need_string(v, "tooth_id", path);
    if (t.tooth_id.empty()) fail(path + ".tooth_id", "must be non-empty");
    if (auto it = v.find("outline"); it != v.end()) {
        t.outline = parse_polyline(*it, path + ".outline");
        normalize_open(t.outline);
    }
    if (auto it = v.find("box"); it != v.end())
        t.box = parse_rect(*it, path + ".box");
    else if (!t.outline.empty())
        t.box = bounding_box(t.outline);
    if (auto it = v.find("keypoints"); it != v.end()) {
        if (!it->is_array()) fail(path + ".keypoints", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i)
            t.keypoints.push_back(parse_keypoint(
                (*it)[i], path + ".keypoints[" + std::to_string(i) + "]"));
    }
    return t;
}

RadiographRecord parse_record(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
    RadiographRecord r;
    r.image_id = need_string(v, "image_id", path);
    if (r.image_id.empty()) fail(path + ".image_id", "must be non-empty");
    r.width = need_positive_int(v, "width", path);
    r.height = need_positive_int(v, "height", path);
    if (auto it = v.find("arch"); it != v.end())
        r.arch = parse_arch(*it, path + ".arch");
    if (auto it = v.find("occlusal"); it != v.end())
        r.occlusal = parse_occlusal(*it, path + ".occlusal");
    if (auto it = v.find("split"); it != v.end())
        r.split = parse_split(*it, path + ".split");

    std::set<std::string> tooth_ids;
    if (auto it = v.find("teeth"); it != v.end()) {
        if (!it->is_array()) fail(path + ".teeth", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            std::string tp = path + ".teeth[" + std::to_string(i) + "]";
            ToothRecord t = parse_tooth((*it)[i], tp);
            if (!tooth_ids.insert(t.tooth_id).second)
                fail(tp + ".tooth_id",
                     "duplicate tooth_id \"" + t.tooth_id + "\"");
            r.teeth.push_back(std::move(t));
        }
    }
    if (auto it = v.find("bone_lines"); it != v.end()) {
        if (!it->is_array()) fail(path + ".bone_lines", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i)
            r.bone_lines.push_back(parse_polyline(
                (*it)[i], path + ".bone_lines[" + std::to_string(i) + "]"));
    }
    if (auto it = v.find("bone_line_masks"); it != v.end()) {
        if (!it->is_array())
            fail(path + ".bone_line_masks", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i)
            r.bone_line_masks.push_back(parse_mask(
                (*it)[i],
                path + ".bone_line_masks[" + std::to_string(i) + "]"));
    }
    if (auto it = v.find("ground_truth"); it != v.end()) {
        const json& g = *it;
        std::string gp = path + ".ground_truth";
        if (!g.is_object()) fail(gp, "expected an object");
        GroundTruthBlock block;
        if (auto av = g.find("annotator_verified"); av != g.end()) {
            if (!av->is_boolean()) fail(gp + ".annotator_verified",
                                        "expected a boolean");
            block.annotator_verified = av->get<bool>();
        }
        const json& entries = need(g, "entries", gp);
        if (!entries.is_array()) fail(gp + ".entries", "expected an array");
        for (std::size_t i = 0; i < entries.size(); ++i) {
            std::string ep = gp + ".entries[" + std::to_string(i) + "]";
            const json& e = entries[i];
            if (!e.is_object()) fail(ep, "expected an object");
            GroundTruthEntry entry;
            entry.tooth_id = need_string(e, "tooth_id", ep);
            if (!tooth_ids.count(entry.tooth_id))
                fail(ep + ".tooth_id",
                     "references unknown tooth \"" + entry.tooth_id + "\"");
            entry.side = parse_side(need(e, "side", ep), ep + ".side");
            if (auto sv = e.find("severity_percent"); sv != e.end())
                entry.severity_percent =
                    as_number(*sv, ep + ".severity_percent");
            if (auto pv = e.find("pattern"); pv != e.end())
                entry.pattern = parse_pattern(*pv, ep + ".pattern");
            block.entries.push_back(std::move(entry));
        }
        r.ground_truth = std::move(block);
    }
    return r;
}

std::vector<FieldError> bounds_findings(const RadiographRecord& r,
                                        const std::string& path) {
    std::vector<FieldError> out;
    auto check = [&](Point2 p, const std::string& f) {
        if (p.x < 0 || p.x > r.width || p.y < 0 || p.y > r.height) {
            std::ostringstream os;
            os << "point (" << p.x << ", " << p.y << ") outside [0, "
               << r.width << "] x [0, " << r.height << "]";
            out.push_back({f, os.str()});
        }
    };
    for (std::size_t t = 0; t < r.teeth.size(); ++t) {
        std::string tp = path + ".teeth[" + std::to_string(t) + "]";
        for (std::size_t i = 0; i < r.teeth[t].outline.size(); ++i)
            check(r.teeth[t].outline[i],
                  tp + ".outline[" + std::to_string(i) + "]");
        for (std::size_t i = 0; i < r.teeth[t].keypoints.size(); ++i)
            check(r.teeth[t].keypoints[i].location,
                  tp + ".keypoints[" + std::to_string(i) + "].location");
    }
    for (std::size_t b = 0; b < r.bone_lines.size(); ++b)
        for (std::size_t i = 0; i < r.bone_lines[b].size(); ++i)
            check(r.bone_lines[b][i], path + ".bone_lines[" +
                                          std::to_string(b) + "][" +
                                          std::to_string(i) + "]");
    return out;
}

std::string best_effort_image_id(const json& v, const char* key) {
    if (v.is_object()) {
        auto it = v.find(key);
        if (it != v.end() && it->is_string()) return it->get<std::string>();
    }
    return "";
}

json point_json(Point2 p) { return json::array({p.x, p.y}); }

json polyline_json(const Polyline& pl) {
    json a = json::array();
    for (Point2 p : pl) a.push_back(point_json(p));
    return a;
}

json rect_json(const Rect& r) {
    return json::array({r.x0, r.y0, r.x1, r.y1});
}

json mask_json(const BinaryMask& m) {
    json j;
    j["width"] = m.width;
    j["height"] = m.height;
    json runs = json::array();
    std::size_t i = 0;
    bool fg = false;
    while (i < m.bits.size()) {
        std::size_t run = 0;
        while (i + run < m.bits.size() && (m.bits[i + run] != 0) == fg) ++run;
        runs.push_back(run);
        i += run;
        fg = !fg;
    }
    j["runs"] = std::move(runs);
    return j;
}

const char* arch_name(Arch a) {
    switch (a) {
        case Arch::Maxillary: return "maxillary";
        case Arch::Mandibular: return "mandibular";
        default: return "unknown";
    }
}

const char* occlusal_name(OcclusalDirection o) {
    switch (o) {
        case OcclusalDirection::Up: return "up";
        case OcclusalDirection::Down: return "down";
        default: return "unknown";
    }
}

const char* split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Validation: return "validation";
        default: return "test";
    }
}

std::string lower(std::string s) {
    for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string map_role(const NameMap& nm, const std::string& name) {
    std::string key = lower(name);
    for (const auto& [from, to] : nm)
        if (lower(from) == key) return to;
    return "";
}

} // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path + ": cannot open for writing");
    out.write(text.data(), std::streamsize(text.size()));
    if (!out) throw IoError(path + ": write failed");
}

ParsedBatch parse_records_text(const std::string& text, bool strict) {
    ParsedBatch out;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        std::string msg = std::string("not a structured document: ") + e.what();
        if (strict) throw SchemaError("$: " + msg);
        out.diagnostics.push_back({"", "$", msg});
        return out;
    }
    auto top_problem = [&](const std::string& field, const std::string& msg) {
        if (strict) throw SchemaError(field + ": " + msg);
        out.diagnostics.push_back({"", field, msg});
    };
    if (!doc.is_object()) {
        top_problem("$", "expected an object");
        return out;
    }
    auto schema = doc.find("schema");
    if (schema == doc.end() || !schema->is_string() ||
        schema->get<std::string>() != "ablq-batch/1") {
        top_problem("schema", "expected \"ablq-batch/1\"");
        return out;
    }
    auto records = doc.find("records");
    if (records == doc.end() || !records->is_array()) {
        top_problem("records", "expected an array");
        return out;
    }

    std::set<std::string> seen;
    for (std::size_t i = 0; i < records->size(); ++i) {
        std::string path = "records[" + std::to_string(i) + "]";
        const json& rv = (*records)[i];
        std::string image_id = best_effort_image_id(rv, "image_id");
        try {
            RadiographRecord r = parse_record(rv, path);
            if (!seen.insert(r.image_id).second)
                fail(path + ".image_id",
                     "duplicate image_id \"" + r.image_id + "\"");
            auto findings = bounds_findings(r, path);
            if (!findings.empty()) {
                if (strict)
                    throw GeometryOutOfBounds(r.image_id + ": " +
                                              findings[0].field + ": " +
                                              findings[0].message);
                for (auto& f : findings)
                    out.diagnostics.push_back(
                        {r.image_id, std::move(f.field), std::move(f.message)});
            }
            out.records.push_back(std::move(r));
        } catch (const FieldError& fe) {
            if (strict)
                throw SchemaError((image_id.empty() ? "" : image_id + ": ") +
                                  fe.field + ": " + fe.message);
            out.diagnostics.push_back({image_id, fe.field, fe.message});
        }
    }
    return out;
}

std::vector<RadiographRecord> parse_record_file(
    const std::string& path, bool strict,
    std::vector<Diagnostic>* diagnostics) {
    ParsedBatch batch = parse_records_text(read_text_file(path), strict);
    if (diagnostics)
        diagnostics->insert(diagnostics->end(), batch.diagnostics.begin(),
                            batch.diagnostics.end());
    return std::move(batch.records);
}

std::string serialize_records(const std::vector<RadiographRecord>& records) {
    json doc;
    doc["schema"] = "ablq-batch/1";
    json arr = json::array();
    for (const auto& r : records) {
        json jr;
        jr["image_id"] = r.image_id;
        jr["width"] = r.width;
        jr["height"] = r.height;
        jr["arch"] = arch_name(r.arch);
        jr["occlusal"] = occlusal_name(r.occlusal);
        if (r.split != Split::Unspecified) jr["split"] = split_name(r.split);
        json teeth = json::array();
        for (const auto& t : r.teeth) {
            json jt;
            jt["tooth_id"] = t.tooth_id;
            jt["box"] = rect_json(t.box);
            jt["outline"] = polyline_json(t.outline);
            json kps = json::array();
            for (const auto& k : t.keypoints) {
                json jk;
                jk["kind"] = to_string(k.kind);
                jk["location"] = point_json(k.location);
                jk["confidence"] = k.confidence;
                jk["box"] = rect_json(k.box);
                kps.push_back(std::move(jk));
            }
            jt["keypoints"] = std::move(kps);
            teeth.push_back(std::move(jt));
        }
        jr["teeth"] = std::move(teeth);
        json lines = json::array();
        for (const auto& bl : r.bone_lines) lines.push_back(polyline_json(bl));
        jr["bone_lines"] = std::move(lines);
        if (!r.bone_line_masks.empty()) {
            json masks = json::array();
            for (const auto& m : r.bone_line_masks)
                masks.push_back(mask_json(m));
            jr["bone_line_masks"] = std::move(masks);
        }
        if (r.ground_truth) {
            json g;
            g["annotator_verified"] = r.ground_truth->annotator_verified;
            json entries = json::array();
            for (const auto& e : r.ground_truth->entries) {
                json je;
                je["tooth_id"] = e.tooth_id;
                je["side"] = to_string(e.side);
                if (e.severity_percent)
                    je["severity_percent"] = *e.severity_percent;
                if (e.pattern) je["pattern"] = to_string(*e.pattern);
                entries.push_back(std::move(je));
            }
            g["entries"] = std::move(entries);
            jr["ground_truth"] = std::move(g);
        }
        arr.push_back(std::move(jr));
    }
    doc["records"] = std::move(arr);
    return doc.dump(2) + "\n";
}

void write_record_file(const std::vector<RadiographRecord>& records,
                       const std::string& path) {
    write_text_file(path, serialize_records(records));
}

NameMap default_name_map() {
    return {{"tooth", "tooth"},        {"outline", "tooth"},
            {"cej", "cej"},            {"intersection", "intersection"},
            {"apex", "apex"},          {"bone-line", "bone-line"},
            {"bone_level", "bone-line"}, {"bone level", "bone-line"},
            {"crest", "bone-line"}};
}

ParsedBatch import_annotations_text(const std::string& text,
                                    const NameMap& name_map, bool strict) {
    ParsedBatch out;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        std::string msg = std::string("not a structured document: ") + e.what();
        if (strict) throw SchemaError("$: " + msg);
        out.diagnostics.push_back({"", "$", msg});
        return out;
    }
    if (!doc.is_array()) {
        if (strict) throw SchemaError("$: expected an array of images");
        out.diagnostics.push_back({"", "$", "expected an array of images"});
        return out;
    }

    std::set<std::string> seen;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        std::string path = "$[" + std::to_string(i) + "]";
        const json& v = doc[i];
        std::string image_id = best_effort_image_id(v, "image");
        if (image_id.empty()) image_id = best_effort_image_id(v, "image_id");
        try {
            if (!v.is_object()) fail(path, "expected an object");
            RadiographRecord r;
            if (v.contains("image"))
                r.image_id = need_string(v, "image", path);
            else
                r.image_id = need_string(v, "image_id", path);
            if (r.image_id.empty()) fail(path + ".image", "must be non-empty");
            r.width = need_positive_int(v, "width", path);
            r.height = need_positive_int(v, "height", path);
            if (auto it = v.find("occlusal"); it != v.end())
                r.occlusal = parse_occlusal(*it, path + ".occlusal");
            if (auto it = v.find("arch"); it != v.end())
                r.arch = parse_arch(*it, path + ".arch");

            const json* objs = nullptr;
            if (auto it = v.find("objects"); it != v.end()) {
                if (!it->is_array())
                    fail(path + ".objects", "expected an array");
                objs = &*it;
            }

            // Resolve every object's role once; an unmappable object is
            // reported a single time and then ignored.
            std::vector<std::string> roles(objs ? objs->size() : 0);
            if (objs)
                for (std::size_t k = 0; k < objs->size(); ++k) {
                    std::string opath =
                        path + ".objects[" + std::to_string(k) + "]";
                    try {
                        const json& o = (*objs)[k];
                        if (!o.is_object()) fail(opath, "expected an object");
                        std::string name = need_string(o, "name", opath);
                        roles[k] = map_role(name_map, name);
                        if (roles[k].empty())
                            fail(opath + ".name",
                                 "unmapped feature name \"" + name + "\"");
                    } catch (const FieldError& fe) {
                        if (strict) throw;
                        out.diagnostics.push_back(
                            {r.image_id, fe.field, fe.message});
                        roles[k].clear();
                    }
                }

            // Teeth first so later keypoints have something to attach to.
            std::set<std::string> tooth_ids;
            int tooth_counter = 0;
            if (objs)
                for (std::size_t k = 0; k < objs->size(); ++k) {
                    std::string opath =
                        path + ".objects[" + std::to_string(k) + "]";
                    if (roles[k] != "tooth") continue;
                    try {
                        const json& o = (*objs)[k];
                        ToothRecord t;
                        ++tooth_counter;
                        t.tooth_id =
                            o.contains("id")
                                ? need_string(o, "id", opath)
                                : "t" + std::to_string(tooth_counter);
                        t.outline = parse_polyline(need(o, "polygon", opath),
                                                   opath + ".polygon");
                        normalize_open(t.outline);
                        if (t.outline.size() < 3)
                            fail(opath + ".polygon",
                                 "needs at least 3 points");
                        if (o.contains("box"))
                            t.box = parse_rect(o["box"], opath + ".box");
                        else
                            t.box = bounding_box(t.outline);
                        if (!tooth_ids.insert(t.tooth_id).second)
                            fail(opath + ".id",
                                 "duplicate tooth id \"" + t.tooth_id + "\"");
                        r.teeth.push_back(std::move(t));
                    } catch (const FieldError& fe) {
                        if (strict) throw;
                        out.diagnostics.push_back(
                            {r.image_id, fe.field, fe.message});
                    }
                }

            if (objs)
                for (std::size_t k = 0; k < objs->size(); ++k) {
                    std::string opath =
                        path + ".objects[" + std::to_string(k) + "]";
                    const std::string& role = roles[k];
                    if (role.empty() || role == "tooth") continue;
                    try {
                        const json& o = (*objs)[k];
                        if (role == "bone-line") {
                            Polyline pl = parse_polyline(
                                need(o, "line", opath), opath + ".line");
                            if (pl.size() < 2)
                                fail(opath + ".line",
                                     "needs at least 2 points");
                            r.bone_lines.push_back(std::move(pl));
                            continue;
                        }
                        KeypointDetection d;
                        d.kind = role == "cej" ? KeypointKind::Cej
                                 : role == "intersection"
                                     ? KeypointKind::Intersection
                                     : KeypointKind::Apex;
                        d.location = parse_point(need(o, "point", opath),
                                                 opath + ".point");
                        if (o.contains("confidence"))
                            d.confidence = as_number(o["confidence"],
                                                     opath + ".confidence");
                        if (o.contains("box"))
                            d.box = parse_rect(o["box"], opath + ".box");
                        else
                            d.box = default_keypoint_box(d.location);

                        ToothRecord* owner = nullptr;
                        if (o.contains("tooth")) {
                            std::string ref = need_string(o, "tooth", opath);
                            for (auto& t : r.teeth)
                                if (t.tooth_id == ref) owner = &t;
                            if (!owner)
                                fail(opath + ".tooth",
                                     "references unknown tooth \"" + ref +
                                         "\"");
                        } else {
                            double best = 0.0;
                            for (auto& t : r.teeth) {
                                if (t.outline.size() < 2) continue;
                                double dist = point_polyline_distance(
                                    d.location, t.outline);
                                if (!owner || dist < best) {
                                    owner = &t;
                                    best = dist;
                                }
                            }
                            if (!owner)
                                fail(opath,
                                     "no tooth outline to attach the "
                                     "keypoint to");
                        }
                        owner->keypoints.push_back(d);
                    } catch (const FieldError& fe) {
                        if (strict) throw;
                        out.diagnostics.push_back(
                            {r.image_id, fe.field, fe.message});
                    }
                }

            if (!seen.insert(r.image_id).second)
                fail(path, "duplicate image \"" + r.image_id + "\"");
            auto findings = bounds_findings(r, path);
            if (!findings.empty()) {
                if (strict)
                    throw GeometryOutOfBounds(r.image_id + ": " +
                                              findings[0].field + ": " +
                                              findings[0].message);
                for (auto& f : findings)
                    out.diagnostics.push_back(
                        {r.image_id, std::move(f.field), std::move(f.message)});
            }
            out.records.push_back(std::move(r));
        } catch (const FieldError& fe) {
            if (strict)
                throw SchemaError((image_id.empty() ? "" : image_id + ": ") +
                                  fe.field + ": " + fe.message);
            out.diagnostics.push_back({image_id, fe.field, fe.message});
        }
    }
    return out;
}

std::vector<RadiographRecord> import_annotation_file(
    const std::string& path, const NameMap& name_map, bool strict,
    std::vector<Diagnostic>* diagnostics) {
    ParsedBatch batch =
        import_annotations_text(read_text_file(path), name_map, strict);
    if (diagnostics)
        diagnostics->insert(diagnostics->end(), batch.diagnostics.begin(),
                            batch.diagnostics.end());
    return std::move(batch.records);
}

} // namespace ablq
