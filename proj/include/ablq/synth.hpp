#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ablq/record.hpp"

namespace ablq {

// Recipe for one synthetic radiograph with analytically known answers.
// Planted severity must lie inside (0, 100) and planted theta inside
// (0, 180); unset values are drawn per side from documented ranges.
struct SynthSpec {
    std::uint64_t seed = 42;
    int teeth_count = 4;
    std::optional<double> severity_percent; // unset: uniform in [12, 85]
    std::optional<double> theta_degrees; // unset: uniform in [15, 170],
                                         // skipping the threshold band
    double jitter = 0.0; // keypoint noise bound, px, truncated uniform
    int width = 800;
    int height = 600;
};

// Ground truth actually planted at one tooth side, before jitter.
struct PlantedSite {
    std::string tooth_id;
    Side side = Side::Left;
    double severity_percent = 0.0;
    double theta_degrees = 0.0;
};

struct SynthDetail {
    RadiographRecord record;
    std::vector<PlantedSite> sites; // tooth major, left before right
};

// Deterministic: the same spec always yields the same record. Keypoint
// triples are collinear on the straight tooth faces so the planted
// severity is recovered exactly at jitter 0; bone rays leave each
// intersection at the planted angle from the crown direction. Throws
// InfeasibleSpec when the spec breaks an invariant or the geometry
// cannot fit the canvas.
SynthDetail generate_detailed(const SynthSpec& spec);
RadiographRecord generate(const SynthSpec& spec);

// Convenience corpus: records use seeds seed, seed+1, ... so ids stay
// unique and any prefix of a larger corpus is reproducible.
std::vector<RadiographRecord> generate_batch(const SynthSpec& spec,
                                             int count);

} // namespace ablq
