#include "dentfit/srm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "dentfit/errors.hpp"

namespace dentfit {

namespace {

struct Cell {
    double x;
    double y;
    double depth;  // |h|
};

constexpr int kDirections = 360;  // 0.5 degree steps over [0, 180)

}  // namespace

SrmMeasures srm_box_measures(const HeightField& field) {
    std::vector<Cell> cells;
    cells.reserve(field.valid_count());
    for (std::size_t r = 0; r < field.rows(); ++r) {
        for (std::size_t c = 0; c < field.cols(); ++c) {
            if (const auto& h = field.at(r, c)) cells.push_back({field.x_at(c), field.y_at(r), std::abs(*h)});
        }
    }
    if (cells.empty()) throw DegenerateGeometryError("SRM measures need at least one valued cell");

    const double spacing = field.spacing();
    const double tie = 1e-9 * spacing;

    SrmMeasures out;
    for (const auto& cell : cells) out.max_depth = std::max(out.max_depth, cell.depth);

    int best_dir = 0;
    double best_len = -1.0;
    for (int k = 0; k < kDirections; ++k) {
        const double angle = k * std::numbers::pi / kDirections;
        const double ax = std::cos(angle), ay = std::sin(angle);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& cell : cells) {
            const double t = cell.x * ax + cell.y * ay;
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        const double len = hi - lo + spacing;
        if (len > best_len + tie) {
            best_len = len;
            best_dir = k;
        }
    }
    out.length = best_len;
    out.length_angle_deg = best_dir * 180.0 / kDirections;

    // Width: chords perpendicular to the length axis, one per spacing-wide
    // slab along it.
    const double angle = best_dir * std::numbers::pi / kDirections;
    const double ax = std::cos(angle), ay = std::sin(angle);
    const double bx = -ay, by = ax;
    double tmin = std::numeric_limits<double>::infinity();
    for (const auto& cell : cells) tmin = std::min(tmin, cell.x * ax + cell.y * ay);

    struct Slab {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        double depth = 0.0;
    };
    std::vector<Slab> slabs;
    for (const auto& cell : cells) {
        const double t = cell.x * ax + cell.y * ay;
        const auto bin = static_cast<std::size_t>(std::llround((t - tmin) / spacing));
        if (bin >= slabs.size()) slabs.resize(bin + 1);
        Slab& s = slabs[bin];
        const double u = cell.x * bx + cell.y * by;
        s.lo = std::min(s.lo, u);
        s.hi = std::max(s.hi, u);
        s.depth = std::max(s.depth, cell.depth);
    }
    double best_width = -1.0, best_depth = 0.0;
    std::size_t best_bin = 0;
    for (std::size_t i = 0; i < slabs.size(); ++i) {
        if (slabs[i].hi < slabs[i].lo) continue;
        const double chord = slabs[i].hi - slabs[i].lo + spacing;
        // Equal chords: report the deeper section.
        if (chord > best_width + tie || (std::abs(chord - best_width) <= tie && slabs[i].depth > best_depth)) {
            best_width = chord;
            best_depth = slabs[i].depth;
            best_bin = i;
        }
    }
    out.width = best_width;
    out.depth_at_width_section = best_depth;
    out.width_section_offset = tmin + static_cast<double>(best_bin) * spacing;
    return out;
}

}  // namespace dentfit
