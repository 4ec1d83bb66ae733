#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dentfit/model.hpp"
#include "dentfit/segment.hpp"
#include "dentfit/srm.hpp"

namespace dentfit {

// In-plane placement of a dent: centre and rotation of its local x-axis.
struct Pose {
    double c_x = 0.0;
    double c_y = 0.0;
    double theta = 0.0;  // radians, (-pi, pi]
};

double canonical_angle(double theta) noexcept;

enum class FitMode { full7, simplified3 };

std::string to_string(FitMode mode);
FitMode parse_fit_mode(const std::string& text);

struct FitConfig {
    FitMode mode = FitMode::full7;
    int multistart = 8;
    int max_evaluations = 20000;  // per start
    // Convergence on the simplex objective spread, in mm^2 per point.
    double tolerance = 1e-10;
    double ring_width = 4.0;  // mm; used by the pipeline via anchor_ring
    std::uint64_t seed = 0;
};

void validate(const FitConfig& config);

struct ResidualStats {
    double mae = 0.0;
    double rmse = 0.0;
    double max_residual = 0.0;
    std::vector<double> residuals;
};

struct FitReport {
    DentParams params;
    Pose pose;
    FitMode mode = FitMode::full7;
    double mae = 0.0;
    double rmse = 0.0;
    double max_residual = 0.0;
    double objective = 0.0;
    std::size_t n_points = 0;
    bool converged = false;
    int evaluations = 0;        // winning start
    int total_evaluations = 0;  // all starts
    int best_start = 0;
    // b above 50: depth profile barely changes with b, value is soft.
    bool weakly_identified_b = false;
    bool multimodal = false;
    SrmMeasures srm;
};

struct InitialGuess {
    DentParams params;
    Pose pose;
};

// Signed model height (negative inside the dent, 0 outside) at a point of
// the plane frame.
double model_height(double x, double y, const DentParams& params, const Pose& pose);

// Moment-based starting point. Throws DegenerateGeometryError when every
// height is zero.
InitialGuess initial_guess(const DentSegment& segment);

// Sum of squared residuals h_i - model_height(x_i, y_i).
double objective(const DentSegment& segment, const DentParams& params, const Pose& pose);

ResidualStats residual_stats(std::span<const LocalPoint> points, const DentParams& params, const Pose& pose);
ResidualStats residual_stats(const DentSegment& segment, const DentParams& params, const Pose& pose);

// Dispatches on config.mode.
FitReport fit(const DentSegment& segment, const FitConfig& config);
FitReport fit_simplified(const DentSegment& segment, const FitConfig& config);
// Full fit seeded with an existing simplified3 result for the same segment.
FitReport fit_full(const DentSegment& segment, const FitConfig& config, const FitReport& restricted);

// Appends flat context points (|h| <= depth_threshold) lying within `width`
// of the segment footprint, measured in whole cells.
DentSegment anchor_ring(const DentSegment& segment, std::span<const LocalPoint> context, double width,
                        double depth_threshold);

// SRM box measures of a fitted model, sampled finely in the dent frame.
SrmMeasures model_srm(const DentParams& params);

}  // namespace dentfit
