#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "dentfit/cloud.hpp"

namespace dentfit {

// Orthonormal frame on the estimated base plane. Heights along `normal` are
// negative inside dents.
struct PlaneFrame {
    Eigen::Vector3d origin = Eigen::Vector3d::Zero();
    Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
    Eigen::Vector3d u = Eigen::Vector3d::UnitX();
    Eigen::Vector3d v = Eigen::Vector3d::UnitY();
};

// Point in a plane frame: in-plane (x, y) and signed height h, all mm.
struct LocalPoint {
    double x = 0.0;
    double y = 0.0;
    double h = 0.0;
};

// Total least squares through the centroid. The normal is flipped so that
// the deepest 1% of points sit below the plane; u follows the largest
// in-plane spread, signed so the first point has x >= 0.
PlaneFrame fit_plane_lsq(const PointCloud& cloud);

// 3-point RANSAC, then least squares on the winning inlier set. Orientation
// uses the whole cloud. Deterministic for a given seed.
PlaneFrame fit_plane_ransac(const PointCloud& cloud, double inlier_tol, int iterations, std::uint64_t seed);

std::vector<LocalPoint> to_local_frame(const PointCloud& cloud, const PlaneFrame& frame);

}  // namespace dentfit
