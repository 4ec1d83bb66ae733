#include "dentfit/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dentfit/errors.hpp"

namespace dentfit {

void validate(const HeatmapSpec& spec) {
    if (!(spec.scale > 0.0)) throw DomainError("heatmap scale must be positive");
    if (!(spec.pitch > 0.0)) throw DomainError("heatmap pitch must be positive");
}

Rgb Image::pixel(std::size_t row, std::size_t col) const {
    const std::size_t i = 3 * (row * width + col);
    return {rgb.at(i), rgb.at(i + 1), rgb.at(i + 2)};
}

Rgb ramp_color(double value, const HeatmapSpec& spec) {
    const double t = std::clamp(std::abs(value) / spec.scale, 0.0, 1.0);
    const auto red = static_cast<std::uint8_t>(std::lround(255.0 * t));
    return {red, 0, static_cast<std::uint8_t>(255 - red)};
}

HeightField rasterize(std::span<const LocalPoint> points, std::span<const double> values, double pitch) {
    if (points.empty()) throw DegenerateGeometryError("nothing to rasterise");
    if (points.size() != values.size()) throw DomainError("point and value counts differ");
    if (!(pitch > 0.0)) throw DomainError("pitch must be positive");
    double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x, hi_x = -lo_x, hi_y = -lo_x;
    for (const auto& p : points) {
        lo_x = std::min(lo_x, p.x);
        hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y);
        hi_y = std::max(hi_y, p.y);
    }
    const auto cols = static_cast<std::size_t>(std::floor((hi_x - lo_x) / pitch)) + 1;
    const auto rows = static_cast<std::size_t>(std::floor((hi_y - lo_y) / pitch)) + 1;
    if (rows * cols > kDefaultMaxCells) throw ResourceError("heatmap raster exceeds the cell cap");

    std::vector<double> sum(rows * cols, 0.0);
    std::vector<std::size_t> count(rows * cols, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto c = std::min(cols - 1, static_cast<std::size_t>((points[i].x - lo_x) / pitch));
        const auto r = std::min(rows - 1, static_cast<std::size_t>((points[i].y - lo_y) / pitch));
        sum[r * cols + c] += std::abs(values[i]);
        ++count[r * cols + c];
    }
    HeightField field(rows, cols, pitch, lo_x + 0.5 * pitch, lo_y + 0.5 * pitch);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (count[r * cols + c]) field.set(r, c, sum[r * cols + c] / static_cast<double>(count[r * cols + c]));
        }
    }
    return field;
}

Image render_heatmap(const HeightField& field, const HeatmapSpec& spec) {
    validate(spec);
    if (field.rows() == 0 || field.cols() == 0) throw DegenerateGeometryError("cannot render an empty field");
    Image img;
    img.width = field.cols();
    img.height = field.rows();
    img.rgb.resize(3 * img.width * img.height);
    for (std::size_t r = 0; r < img.height; ++r) {
        const std::size_t src_row = img.height - 1 - r;
        for (std::size_t c = 0; c < img.width; ++c) {
            const auto& v = field.at(src_row, c);
            const Rgb color = v ? ramp_color(*v, spec) : spec.sentinel;
            std::copy(color.begin(), color.end(), img.rgb.begin() + static_cast<std::ptrdiff_t>(3 * (r * img.width + c)));
        }
    }
    return img;
}

std::string encode_ppm(const Image& image) {
    std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(image.rgb.data()), image.rgb.size());
    return out;
}

Image decode_ppm(const std::string& bytes) {
    std::istringstream in(bytes);
    std::string magic;
    std::size_t width = 0, height = 0;
    int maxval = 0;
    if (!(in >> magic >> width >> height >> maxval) || magic != "P6" || maxval != 255) {
        throw ParseError("not a binary 8-bit PPM image");
    }
    in.get();  // single whitespace before the raster
    Image img;
    img.width = width;
    img.height = height;
    img.rgb.resize(3 * width * height);
    in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
    if (static_cast<std::size_t>(in.gcount()) != img.rgb.size()) throw ParseError("truncated PPM raster");
    return img;
}

}  // namespace dentfit
