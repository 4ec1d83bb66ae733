#pragma once

#include <cstdint>
#include <span>

#include "dentfit/cloud.hpp"
#include "dentfit/fit.hpp"

namespace dentfit {

struct PlacedDent {
    DentParams params;
    Pose pose;
};

struct SynthConfig {
    double spacing = 0.25;     // mm between grid samples
    double noise_sigma = 0.0;  // mm, Gaussian on heights
    // Flat border around the dents (mm); negative picks half the largest
    // dent dimension.
    double margin = -1.0;
    std::uint64_t seed = 0;
};

// Samples dents (heights summed where they overlap) on a flat z = 0 patch
// covering every dent plus the margin. Deterministic per seed.
PointCloud synthesize_cloud(std::span<const PlacedDent> dents, const SynthConfig& config);

}  // namespace dentfit
