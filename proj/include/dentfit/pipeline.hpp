#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dentfit/cloud.hpp"
#include "dentfit/fit.hpp"
#include "dentfit/plane.hpp"
#include "dentfit/segment.hpp"

namespace dentfit {

enum class PlaneMethod { lsq, ransac };

PlaneMethod parse_plane_method(const std::string& text);
std::string to_string(PlaneMethod method);

struct PipelineConfig {
    PlaneMethod plane = PlaneMethod::ransac;
    double inlier_tol = 0.1;  // mm
    int ransac_iterations = 200;
    std::uint64_t seed = 0;
    SegmentationConfig segmentation;
    FitConfig fit;
};

// Plane frame, local points and ring-augmented dent segments of one cloud.
struct PreparedCloud {
    PlaneFrame frame;
    std::vector<LocalPoint> local;
    std::vector<DentSegment> segments;
};

PreparedCloud prepare_cloud(const PointCloud& cloud, const PipelineConfig& config);

// One report per segment, in segment order.
std::vector<FitReport> fit_segments(const PreparedCloud& prepared, const FitConfig& config);

struct CompareReport {
    FitReport simplified;
    FitReport full;
    double mae_ratio = 1.0;  // simplified MAE / full MAE
};

CompareReport compare_fits(const DentSegment& segment, const FitConfig& config);

}  // namespace dentfit
