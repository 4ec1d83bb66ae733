#include "dentfit/plane.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "dentfit/errors.hpp"

namespace dentfit {

namespace {

// Fixes the sign of the normal and u using every point of the cloud.
void orient(PlaneFrame& frame, const PointCloud& cloud) {
    std::vector<double> heights;
    heights.reserve(cloud.size());
    for (const auto& p : cloud.points) heights.push_back((p - frame.origin).dot(frame.normal));

    const std::size_t k = std::max<std::size_t>(1, heights.size() / 100);
    std::nth_element(heights.begin(), heights.begin() + static_cast<std::ptrdiff_t>(k - 1), heights.end(),
                     [](double a, double b) { return std::abs(a) > std::abs(b); });
    double deep_sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) deep_sum += heights[i];

    bool flip = deep_sum > 0.0;
    if (deep_sum == 0.0) {
        // Perfectly flat: pick the sign with a positive dominant component.
        Eigen::Index dominant = 0;
        frame.normal.cwiseAbs().maxCoeff(&dominant);
        flip = frame.normal[dominant] < 0.0;
    }
    if (flip) frame.normal = -frame.normal;

    if ((cloud.points.front() - frame.origin).dot(frame.u) < 0.0) frame.u = -frame.u;
    frame.v = frame.normal.cross(frame.u);
}

template <typename Points>
PlaneFrame plane_through(const Points& points, std::size_t count) {
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < count; ++i) centroid += points(i);
    centroid /= static_cast<double>(count);

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < count; ++i) {
        const Eigen::Vector3d d = points(i) - centroid;
        cov.noalias() += d * d.transpose();
    }
    cov /= static_cast<double>(count);

    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    if (eig.info() != Eigen::Success) throw DegenerateGeometryError("plane fit eigen-decomposition failed");
    const Eigen::Vector3d values = eig.eigenvalues();  // ascending
    if (!(values[2] > 0.0) || values[1] <= 1e-12 * values[2]) {
        throw DegenerateGeometryError("points are collinear or coincident; no unique plane");
    }

    PlaneFrame frame;
    frame.origin = centroid;
    frame.normal = eig.eigenvectors().col(0).normalized();
    frame.u = eig.eigenvectors().col(2).normalized();
    frame.v = frame.normal.cross(frame.u);
    return frame;
}

}  // namespace

PlaneFrame fit_plane_lsq(const PointCloud& cloud) {
    if (cloud.size() < 3) throw InsufficientDataError("plane fit needs at least 3 points");
    PlaneFrame frame = plane_through([&](std::size_t i) -> const Eigen::Vector3d& { return cloud.points[i]; },
                                     cloud.size());
    orient(frame, cloud);
    return frame;
}

PlaneFrame fit_plane_ransac(const PointCloud& cloud, double inlier_tol, int iterations, std::uint64_t seed) {
    if (!(inlier_tol > 0.0)) throw DomainError("RANSAC inlier tolerance must be positive");
    if (iterations < 1) throw DomainError("RANSAC needs at least one iteration");
    const std::size_t n = cloud.size();
    if (n < 3) throw InsufficientDataError("plane fit needs at least 3 points");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);

    std::size_t best_count = 0;
    Eigen::Vector3d best_normal = Eigen::Vector3d::Zero();
    Eigen::Vector3d best_point = Eigen::Vector3d::Zero();
    for (int it = 0; it < iterations; ++it) {
        const std::size_t a = pick(rng);
        std::size_t b = pick(rng);
        std::size_t c = pick(rng);
        if (a == b || a == c || b == c) continue;
        const Eigen::Vector3d& pa = cloud.points[a];
        const Eigen::Vector3d e1 = cloud.points[b] - pa;
        const Eigen::Vector3d e2 = cloud.points[c] - pa;
        Eigen::Vector3d normal = e1.cross(e2);
        const double norm = normal.norm();
        if (!(norm > 1e-12 * e1.squaredNorm() + 1e-300)) continue;
        normal /= norm;
        std::size_t count = 0;
        for (const auto& p : cloud.points) count += std::abs((p - pa).dot(normal)) <= inlier_tol;
        if (count > best_count) {
            best_count = count;
            best_normal = normal;
            best_point = pa;
        }
    }
    if (2 * best_count < n) {
        throw RobustFitError("RANSAC found no plane supported by at least half of the points (best " +
                             std::to_string(best_count) + " of " + std::to_string(n) + ")");
    }

    std::vector<std::size_t> inliers;
    inliers.reserve(best_count);
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs((cloud.points[i] - best_point).dot(best_normal)) <= inlier_tol) inliers.push_back(i);
    }
    auto refit = [&] {
        return plane_through([&](std::size_t i) -> const Eigen::Vector3d& { return cloud.points[inliers[i]]; },
                             inliers.size());
    };
    PlaneFrame frame = refit();

    // One consensus refinement against the least-squares plane, which is less
    // tilted by noise than the 3-point sample.
    std::vector<std::size_t> refined;
    refined.reserve(inliers.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs((cloud.points[i] - frame.origin).dot(frame.normal)) <= inlier_tol) refined.push_back(i);
    }
    if (refined != inliers && 2 * refined.size() >= n) {
        inliers = std::move(refined);
        frame = refit();
    }
    orient(frame, cloud);
    return frame;
}

std::vector<LocalPoint> to_local_frame(const PointCloud& cloud, const PlaneFrame& frame) {
    std::vector<LocalPoint> out;
    out.reserve(cloud.size());
    for (const auto& p : cloud.points) {
        const Eigen::Vector3d d = p - frame.origin;
        out.push_back({d.dot(frame.u), d.dot(frame.v), d.dot(frame.normal)});
    }
    return out;
}

}  // namespace dentfit
