#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dentfit/height_field.hpp"
#include "dentfit/plane.hpp"

namespace dentfit {

using Rgb = std::array<std::uint8_t, 3>;

// Linear blue (0) to red (scale) ramp on |value|, clamped at scale.
struct HeatmapSpec {
    double scale = 1.0;  // mm
    double pitch = 0.5;  // mm per pixel when rasterising scattered values
    Rgb sentinel{128, 128, 128};
};

void validate(const HeatmapSpec& spec);

struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> rgb;  // row-major, top row first

    Rgb pixel(std::size_t row, std::size_t col) const;
};

Rgb ramp_color(double value, const HeatmapSpec& spec);

// Mean |value| per pitch-sized cell over the points' bounding box; empty
// cells are left without a value.
HeightField rasterize(std::span<const LocalPoint> points, std::span<const double> values, double pitch);

// One pixel per cell; image top is the field's highest y row.
Image render_heatmap(const HeightField& field, const HeatmapSpec& spec);

std::string encode_ppm(const Image& image);
Image decode_ppm(const std::string& bytes);

}  // namespace dentfit
