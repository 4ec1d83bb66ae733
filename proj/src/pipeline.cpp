#include "dentfit/pipeline.hpp"

#include <limits>

#include "dentfit/errors.hpp"

namespace dentfit {

PlaneMethod parse_plane_method(const std::string& text) {
    if (text == "lsq") return PlaneMethod::lsq;
    if (text == "ransac") return PlaneMethod::ransac;
    throw DomainError("unknown plane method '" + text + "' (expected lsq or ransac)");
}

std::string to_string(PlaneMethod method) { return method == PlaneMethod::lsq ? "lsq" : "ransac"; }

PreparedCloud prepare_cloud(const PointCloud& cloud, const PipelineConfig& config) {
    PreparedCloud out;
    out.frame = config.plane == PlaneMethod::lsq
                    ? fit_plane_lsq(cloud)
                    : fit_plane_ransac(cloud, config.inlier_tol, config.ransac_iterations, config.seed);
    out.local = to_local_frame(cloud, out.frame);
    for (auto& seg : segment_dents(out.local, config.segmentation)) {
        out.segments.push_back(
            anchor_ring(seg, out.local, config.fit.ring_width, config.segmentation.depth_threshold));
    }
    return out;
}

std::vector<FitReport> fit_segments(const PreparedCloud& prepared, const FitConfig& config) {
    std::vector<FitReport> reports;
    reports.reserve(prepared.segments.size());
    for (const auto& seg : prepared.segments) reports.push_back(fit(seg, config));
    return reports;
}

CompareReport compare_fits(const DentSegment& segment, const FitConfig& config) {
    FitConfig simplified = config;
    simplified.mode = FitMode::simplified3;
    FitConfig full = config;
    full.mode = FitMode::full7;
    CompareReport out;
    out.simplified = fit(segment, simplified);
    out.full = fit_full(segment, full, out.simplified);
    if (out.full.mae > 0.0) {
        out.mae_ratio = out.simplified.mae / out.full.mae;
    } else {
        out.mae_ratio = out.simplified.mae > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    }
    return out;
}

}  // namespace dentfit
