#include "dentfit/cloud.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "dentfit/errors.hpp"

namespace dentfit {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::optional<double> to_double(std::string_view tok) {
    double v = 0.0;
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

void require_three(const PointCloud& cloud) {
    if (cloud.size() < 3) {
        throw InsufficientDataError("point cloud has " + std::to_string(cloud.size()) +
                                    " points; at least 3 are required");
    }
}

}  // namespace

PointCloud parse_xyz(std::istream& in) {
    PointCloud cloud;
    std::string line;
    std::size_t line_no = 0;
    bool any_intensity = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        const auto tokens = split_ws(view);
        if (tokens.empty()) continue;
        if (tokens.size() < 3) throw ParseError("expected x y z, got " + std::to_string(tokens.size()) + " values", line_no);
        double xyz[3];
        for (int k = 0; k < 3; ++k) {
            const auto v = to_double(tokens[k]);
            if (!v) throw ParseError("malformed number '" + std::string(tokens[k]) + "'", line_no);
            xyz[k] = *v;
        }
        double intensity = 0.0;
        if (tokens.size() >= 4) {
            const auto v = to_double(tokens[3]);
            if (!v) throw ParseError("malformed intensity '" + std::string(tokens[3]) + "'", line_no);
            intensity = *v;
            any_intensity = true;
        }
        cloud.points.emplace_back(xyz[0], xyz[1], xyz[2]);
        cloud.intensity.push_back(intensity);
    }
    if (!any_intensity) cloud.intensity.clear();
    require_three(cloud);
    return cloud;
}

PointCloud parse_ply_ascii(std::istream& in) {
    struct Element {
        std::string name;
        std::size_t count = 0;
        std::vector<std::string> properties;
        bool has_list = false;
    };

    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };

    if (!next_line() || line != "ply") throw ParseError("missing 'ply' magic", 1);

    std::vector<Element> elements;
    bool saw_format = false;
    while (true) {
        if (!next_line()) throw ParseError("header ended without end_header", line_no);
        const auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        const std::string_view key = tokens[0];
        if (key == "end_header") break;
        if (key == "comment" || key == "obj_info") continue;
        if (key == "format") {
            if (tokens.size() < 2) throw ParseError("malformed format line", line_no);
            if (tokens[1] != "ascii") {
                throw UnsupportedFormatError("PLY format '" + std::string(tokens[1]) +
                                             "' is not supported; only ascii PLY can be read");
            }
            saw_format = true;
        } else if (key == "element") {
            if (tokens.size() < 3) throw ParseError("malformed element line", line_no);
            std::size_t count = 0;
            const auto* end = tokens[2].data() + tokens[2].size();
            auto [ptr, ec] = std::from_chars(tokens[2].data(), end, count);
            if (ec != std::errc() || ptr != end) throw ParseError("bad element count", line_no);
            elements.push_back({std::string(tokens[1]), count, {}, false});
        } else if (key == "property") {
            if (elements.empty()) throw ParseError("property before any element", line_no);
            if (tokens.size() >= 2 && tokens[1] == "list") {
                elements.back().has_list = true;
                elements.back().properties.emplace_back(tokens.back());
            } else if (tokens.size() >= 3) {
                elements.back().properties.emplace_back(tokens[2]);
            } else {
                throw ParseError("malformed property line", line_no);
            }
        } else {
            throw ParseError("unknown header keyword '" + std::string(key) + "'", line_no);
        }
    }
    if (!saw_format) throw ParseError("PLY header has no format line", line_no);

    PointCloud cloud;
    bool found_vertex = false;
    for (const auto& element : elements) {
        if (element.name != "vertex") {
            for (std::size_t i = 0; i < element.count; ++i) {
                if (!next_line()) throw ParseError("unexpected end of " + element.name + " data", line_no);
            }
            continue;
        }
        found_vertex = true;
        int ix = -1, iy = -1, iz = -1;
        for (std::size_t k = 0; k < element.properties.size(); ++k) {
            if (element.properties[k] == "x") ix = static_cast<int>(k);
            if (element.properties[k] == "y") iy = static_cast<int>(k);
            if (element.properties[k] == "z") iz = static_cast<int>(k);
        }
        if (ix < 0 || iy < 0 || iz < 0) throw ParseError("vertex element lacks x, y or z property");
        if (element.has_list) throw ParseError("list properties on vertices are not supported");
        cloud.points.reserve(element.count);
        for (std::size_t i = 0; i < element.count; ++i) {
            if (!next_line()) throw ParseError("unexpected end of vertex data", line_no);
            const auto tokens = split_ws(line);
            if (tokens.size() < element.properties.size()) throw ParseError("vertex row too short", line_no);
            Eigen::Vector3d p;
            const int idx[3] = {ix, iy, iz};
            for (int k = 0; k < 3; ++k) {
                const auto v = to_double(tokens[static_cast<std::size_t>(idx[k])]);
                if (!v) throw ParseError("malformed vertex coordinate", line_no);
                p[k] = *v;
            }
            cloud.points.push_back(p);
        }
    }
    if (!found_vertex) throw ParseError("PLY file declares no vertex element");
    require_three(cloud);
    return cloud;
}

void write_xyz(std::ostream& out, const PointCloud& cloud) {
    char buf[96];
    const bool with_intensity = cloud.intensity.size() == cloud.points.size() && !cloud.intensity.empty();
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        const auto& p = cloud.points[i];
        if (with_intensity) {
            std::snprintf(buf, sizeof buf, "%.12g %.12g %.12g %.9g\n", p.x(), p.y(), p.z(), cloud.intensity[i]);
        } else {
            std::snprintf(buf, sizeof buf, "%.12g %.12g %.12g\n", p.x(), p.y(), p.z());
        }
        out << buf;
    }
    if (!out) throw IoError("failed writing xyz data");
}

PointCloud read_cloud_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    auto ext = path.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    try {
        if (ext == ".ply") return parse_ply_ascii(in);
        return parse_xyz(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const UnsupportedFormatError& e) {
        throw UnsupportedFormatError(path.string() + ": " + e.what());
    } catch (const InsufficientDataError& e) {
        throw InsufficientDataError(path.string() + ": " + e.what());
    }
}

}  // namespace dentfit
