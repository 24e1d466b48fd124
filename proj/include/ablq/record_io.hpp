#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ablq/record.hpp"

namespace ablq {

// One problem found while reading a batch; field is a dotted path into the
// document ("records[2].teeth[0].keypoints[1].location").
struct Diagnostic {
    std::string image_id;
    std::string field;
    std::string message;
};

struct ParsedBatch {
    std::vector<RadiographRecord> records;
    std::vector<Diagnostic> diagnostics;
};

// Parse a batch document (schema "ablq-batch/1"). Strict mode throws
// SchemaError (structure) or GeometryOutOfBounds (coordinates outside the
// canvas) at the first problem. Lenient mode never throws: malformed
// records are dropped, out-of-bounds geometry is kept, and every problem
// becomes a diagnostic.
ParsedBatch parse_records_text(const std::string& text, bool strict);

// File wrapper around parse_records_text; throws IoError when the file
// cannot be read. `diagnostics`, when given, receives the lenient-mode
// findings.
std::vector<RadiographRecord> parse_record_file(
    const std::string& path, bool strict = true,
    std::vector<Diagnostic>* diagnostics = nullptr);

// Deterministic serialization; parse(serialize(x)) == x field for field.
std::string serialize_records(const std::vector<RadiographRecord>& records);
void write_record_file(const std::vector<RadiographRecord>& records,
                       const std::string& path);

// Whole-file helpers; IoError with path context on failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Annotation-export feature name -> role, compared case-insensitively.
// Roles: tooth, cej, intersection, apex, bone-line.
using NameMap = std::vector<std::pair<std::string, std::string>>;

NameMap default_name_map();

// Read a keypoint-annotation export (an array of images carrying named
// point / polygon / line features) and normalize it into records. Points
// with no explicit tooth reference attach to the nearest outline.
ParsedBatch import_annotations_text(const std::string& text,
                                    const NameMap& name_map, bool strict);
std::vector<RadiographRecord> import_annotation_file(
    const std::string& path, const NameMap& name_map, bool strict = true,
    std::vector<Diagnostic>* diagnostics = nullptr);

} // namespace ablq
