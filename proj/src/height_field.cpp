#include "dentfit/height_field.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "dentfit/errors.hpp"

namespace dentfit {

HeightField::HeightField(std::size_t rows, std::size_t cols, double spacing, double origin_x, double origin_y)
    : rows_(rows), cols_(cols), spacing_(spacing), origin_x_(origin_x), origin_y_(origin_y), cells_(rows * cols) {
    if (!(spacing > 0.0) || !std::isfinite(spacing)) throw DomainError("height field spacing must be positive");
}

std::size_t HeightField::valid_count() const noexcept {
    std::size_t n = 0;
    for (const auto& c : cells_) n += c.has_value();
    return n;
}

HeightField sample_height_field(const DentParams& params, double spacing, double margin, std::size_t max_cells) {
    validate(params);
    if (!(spacing > 0.0)) throw DomainError("spacing must be positive");
    if (!(margin >= 0.0)) throw DomainError("margin must be non-negative");

    const double half_x = params.l / 2.0 + margin;
    const double half_y = params.w / 2.0 + margin;
    const double steps_x = std::ceil(half_x / spacing);
    const double steps_y = std::ceil(half_y / spacing);
    const double cells = (2.0 * steps_x + 1.0) * (2.0 * steps_y + 1.0);
    if (cells > static_cast<double>(max_cells)) {
        throw ResourceError("height field of " + std::to_string(static_cast<long long>(cells)) +
                            " cells exceeds the cap of " + std::to_string(max_cells));
    }
    const auto nx = static_cast<long long>(steps_x);
    const auto ny = static_cast<long long>(steps_y);

    HeightField field(static_cast<std::size_t>(2 * ny + 1), static_cast<std::size_t>(2 * nx + 1), spacing,
                      -static_cast<double>(nx) * spacing, -static_cast<double>(ny) * spacing);
    const ReferenceDent ref(params.b, params.p, params.s_x, params.s_y);
    for (long long i = -ny; i <= ny; ++i) {
        const double y = static_cast<double>(i) * spacing;
        for (long long j = -nx; j <= nx; ++j) {
            const double x = static_cast<double>(j) * spacing;
            const auto v = ref({x / params.l, y / params.w});
            if (v) field.set(static_cast<std::size_t>(i + ny), static_cast<std::size_t>(j + nx), -params.d * *v);
        }
    }
    return field;
}

void write_height_field(std::ostream& out, const HeightField& field) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", field.spacing());
    out << "HF v1 " << field.rows() << ' ' << field.cols() << ' ' << buf;
    std::snprintf(buf, sizeof buf, " %.17g %.17g\n", field.origin_x(), field.origin_y());
    out << buf;
    for (std::size_t r = 0; r < field.rows(); ++r) {
        for (std::size_t c = 0; c < field.cols(); ++c) {
            if (c) out << ' ';
            const auto& v = field.at(r, c);
            if (v) {
                std::snprintf(buf, sizeof buf, "%.17g", *v);
                out << buf;
            } else {
                out << '*';
            }
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing height field");
}

HeightField read_height_field(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty height field input", 1);
    std::istringstream header(line);
    std::string magic, version;
    std::size_t rows = 0, cols = 0;
    double spacing = 0.0, ox = 0.0, oy = 0.0;
    if (!(header >> magic >> version >> rows >> cols >> spacing >> ox >> oy) || magic != "HF" || version != "v1") {
        throw ParseError("expected header 'HF v1 rows cols spacing origin_x origin_y'", 1);
    }
    if (rows == 0 || cols == 0) throw ParseError("height field must have at least one cell", 1);
    if (rows * cols > kDefaultMaxCells) throw ResourceError("height field exceeds the cell cap");
    HeightField field(rows, cols, spacing, ox, oy);

    std::size_t line_no = 1;
    for (std::size_t r = 0; r < rows; ++r) {
        if (!std::getline(in, line)) throw ParseError("missing grid row", line_no + 1);
        ++line_no;
        std::istringstream row(line);
        std::string token;
        for (std::size_t c = 0; c < cols; ++c) {
            if (!(row >> token)) throw ParseError("row has fewer than " + std::to_string(cols) + " values", line_no);
            if (token == "*") continue;
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != token.size() || !std::isfinite(v)) throw ParseError("bad height '" + token + "'", line_no);
            field.set(r, c, v);
        }
        if (row >> token) throw ParseError("row has more than " + std::to_string(cols) + " values", line_no);
    }
    return field;
}

}  // namespace dentfit
