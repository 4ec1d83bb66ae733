#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dentfit/plane.hpp"

namespace dentfit {

struct SegmentationConfig {
    double depth_threshold = 0.05;  // mm
    double cell = 2.0;              // mm
    std::size_t min_points = 50;
};

using CellKey = std::pair<std::int64_t, std::int64_t>;  // (ix, iy)

CellKey cell_of(double x, double y, double cell) noexcept;

// Points of one isolated dent in the plane frame.
struct DentSegment {
    std::vector<LocalPoint> points;
    // Positions of `points` in the local point list the segment was cut from.
    std::vector<std::size_t> indices;
    // Occupied cells after dilation, sorted.
    std::vector<CellKey> footprint;
    double cell = 2.0;
    // Points at or below -depth_threshold.
    std::size_t core_count = 0;
    double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
    // Several separated deep basins: probably overlapping dents, which a
    // single model cannot describe.
    bool multimodal = false;

    std::size_t size() const noexcept { return points.size(); }
};

// Bins points with h <= -depth_threshold into square cells, joins cells
// whose one-cell dilations touch, and re-collects every point (flanks
// included) inside each dilated footprint. Components with fewer than
// min_points below-threshold points are dropped. Output is sorted by
// descending point count, then bounding-box min x, then min y.
std::vector<DentSegment> segment_dents(std::span<const LocalPoint> points, const SegmentationConfig& config = {});

// Builds a segment from explicit points (tests, single-dent inputs).
DentSegment make_segment(std::vector<LocalPoint> points, double cell = 2.0);

}  // namespace dentfit
