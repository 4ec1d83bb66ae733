#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace dentfit {

// Unordered scanner points in mm. Intensity, when present, is carried along
// but never used by the pipeline.
struct PointCloud {
    std::vector<Eigen::Vector3d> points;
    std::vector<double> intensity;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }
};

// One point per line: "x y z [intensity]". Blank lines and '#' comments are
// skipped. Throws ParseError (with line number) or InsufficientDataError.
PointCloud parse_xyz(std::istream& in);

// ASCII PLY; only vertex x/y/z are kept. Binary variants raise
// UnsupportedFormatError.
PointCloud parse_ply_ascii(std::istream& in);

void write_xyz(std::ostream& out, const PointCloud& cloud);

// Dispatches on extension (.ply, otherwise xyz) and wraps errors with the path.
PointCloud read_cloud_file(const std::filesystem::path& path);

}  // namespace dentfit
