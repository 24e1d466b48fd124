#pragma once

#include <stdexcept>
#include <string>

namespace ablq {

// Base for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Geometry
struct DegenerateTriple : Error {
    explicit DegenerateTriple(const std::string& msg) : Error(msg) {}
};
struct PointOffPolyline : Error {
    explicit PointOffPolyline(const std::string& msg) : Error(msg) {}
};
struct EmptyPolyline : Error {
    explicit EmptyPolyline(const std::string& msg) : Error(msg) {}
};

// Masks
struct EmptyMask : Error {
    explicit EmptyMask(const std::string& msg) : Error(msg) {}
};
struct MultipleComponents : Error {
    MultipleComponents(const std::string& msg, int n) : Error(msg), count(n) {}
    int count;
};

// Severity / pattern
struct ZeroRootLength : Error {
    explicit ZeroRootLength(const std::string& msg) : Error(msg) {}
};
struct OrientationUndetermined : Error {
    explicit OrientationUndetermined(const std::string& msg) : Error(msg) {}
};

// Metrics
struct DegenerateRatings : Error {
    explicit DegenerateRatings(const std::string& msg) : Error(msg) {}
};
struct NoOverlap : Error {
    explicit NoOverlap(const std::string& msg) : Error(msg) {}
};

// Synthesis
struct InfeasibleSpec : Error {
    explicit InfeasibleSpec(const std::string& msg) : Error(msg) {}
};

// Serialization / files
struct SchemaError : Error {
    explicit SchemaError(const std::string& msg) : Error(msg) {}
};
struct GeometryOutOfBounds : Error {
    explicit GeometryOutOfBounds(const std::string& msg) : Error(msg) {}
};
struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace ablq
