#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dentfit/cloud.hpp"
#include "dentfit/errors.hpp"

using namespace dentfit;

namespace {

PointCloud xyz(const std::string& text) {
    std::istringstream in(text);
    return parse_xyz(in);
}

PointCloud ply(const std::string& text) {
    std::istringstream in(text);
    return parse_ply_ascii(in);
}

const char* kPlyHeader =
    "ply\n"
    "format ascii 1.0\n"
    "comment scanner export\n"
    "element vertex 4\n"
    "property float x\n"
    "property float y\n"
    "property float z\n"
    "property uchar red\n"
    "element face 1\n"
    "property list uchar int vertex_indices\n"
    "end_header\n";

}  // namespace

TEST_CASE("xyz parsing") {
    const auto cloud = xyz("# header\n0 0 0\n\n1 0 0.5\n  0 1 -0.25 7\n");
    REQUIRE(cloud.size() == 3);
    CHECK(cloud.points[1].z() == 0.5);
    CHECK(cloud.points[2].y() == 1.0);
    CHECK(cloud.points[2].z() == -0.25);

    const auto tabbed = xyz("1\t2\t3\n4\t5\t6\r\n7 8 9\n");
    CHECK(tabbed.points[2].x() == 7.0);
}

TEST_CASE("xyz parsing errors") {
    CHECK_THROWS_AS(xyz("0 0 0\n1 1 1\n"), InsufficientDataError);
    CHECK_THROWS_AS(xyz(""), InsufficientDataError);
    try {
        xyz("0 0 0\n1 1 1\n1 x 1\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    try {
        xyz("0 0 0\n1 1\n2 2 2\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(xyz("0 0 0\n1 1 1\n2 2 nan\n"), ParseError);
}

TEST_CASE("ascii ply parsing keeps vertex coordinates only") {
    const auto cloud = ply(std::string(kPlyHeader) + "0 0 0 255\n1 0 0 255\n0 1 0.5 0\n1 1 -1 0\n3 0 1 2\n");
    REQUIRE(cloud.size() == 4);
    CHECK(cloud.points[2].z() == 0.5);
    CHECK(cloud.points[3].z() == -1.0);
}

TEST_CASE("ply errors") {
    CHECK_THROWS_AS(ply("ply\nformat binary_little_endian 1.0\nelement vertex 3\nproperty float x\nend_header\n"),
                    UnsupportedFormatError);
    CHECK_THROWS_AS(ply("ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nend_header\n"
                        "0 0\n1 0\n0 1\n"),
                    ParseError);
    CHECK_THROWS_AS(ply("plx\n"), ParseError);
    CHECK_THROWS_AS(ply("ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\n"
                        "property float z\nend_header\n0 0 0\n1 0 0\n"),
                    ParseError);
}

TEST_CASE("xyz round trip") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0.0, 50.0);
    PointCloud cloud;
    for (int i = 0; i < 500; ++i) cloud.points.emplace_back(n(rng), n(rng), n(rng) * 1e-3);
    std::stringstream buffer;
    write_xyz(buffer, cloud);
    const auto back = parse_xyz(buffer);
    REQUIRE(back.size() == cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) CHECK((back.points[i] - cloud.points[i]).norm() <= 1e-9);
}

TEST_CASE("large ply centroid") {
    std::ostringstream text;
    const int n = 10000;
    text << "ply\nformat ascii 1.0\nelement vertex " << n
         << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
    for (int i = 0; i < n; ++i) text << (i % 100) << ' ' << (i / 100) << ' ' << 0.001 * (i % 7) << '\n';
    const auto cloud = ply(text.str());
    REQUIRE(cloud.size() == static_cast<std::size_t>(n));
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& p : cloud.points) centroid += p;
    centroid /= n;
    // z mean: residues 0..6 repeat, 10000 = 1428 * 7 + 4.
    const double z_mean = 0.001 * (1428.0 * 21.0 + 0 + 1 + 2 + 3) / n;
    CHECK((centroid - Eigen::Vector3d(49.5, 49.5, z_mean)).norm() <= 1e-9);
}

TEST_CASE("file dispatch by extension") {
    const auto dir = std::filesystem::temp_directory_path() / "dentfit_test_cloud";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "a.xyz") << "0 0 0\n1 0 0\n0 1 1\n";
        std::ofstream(dir / "b.ply") << "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\n"
                                        "property float y\nproperty float z\nend_header\n0 0 0\n2 0 0\n0 2 2\n";
        std::ofstream(dir / "bad.xyz") << "0 0 0\n1 0\n";
    }
    CHECK(read_cloud_file(dir / "a.xyz").points[2].z() == 1.0);
    CHECK(read_cloud_file(dir / "b.ply").points[2].z() == 2.0);
    CHECK_THROWS_AS(read_cloud_file(dir / "missing.xyz"), IoError);
    CHECK_THROWS_WITH_AS(read_cloud_file(dir / "bad.xyz"), doctest::Contains("bad.xyz"), ParseError);
    std::filesystem::remove_all(dir);
}
