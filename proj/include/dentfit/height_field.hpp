#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dentfit/model.hpp"

namespace dentfit {

// Regular grid of signed heights (mm). Cell (row, col) is centred at
// (origin_x + col * spacing, origin_y + row * spacing). Cells outside the
// dent support hold no value.
class HeightField {
public:
    HeightField() = default;
    HeightField(std::size_t rows, std::size_t cols, double spacing, double origin_x, double origin_y);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double spacing() const noexcept { return spacing_; }
    double origin_x() const noexcept { return origin_x_; }
    double origin_y() const noexcept { return origin_y_; }

    double x_at(std::size_t col) const noexcept { return origin_x_ + static_cast<double>(col) * spacing_; }
    double y_at(std::size_t row) const noexcept { return origin_y_ + static_cast<double>(row) * spacing_; }

    const std::optional<double>& at(std::size_t row, std::size_t col) const { return cells_.at(row * cols_ + col); }
    void set(std::size_t row, std::size_t col, std::optional<double> value) { cells_.at(row * cols_ + col) = value; }

    const std::vector<std::optional<double>>& cells() const noexcept { return cells_; }
    std::size_t valid_count() const noexcept;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    double spacing_ = 1.0;
    double origin_x_ = 0.0;
    double origin_y_ = 0.0;
    std::vector<std::optional<double>> cells_;
};

inline constexpr std::size_t kDefaultMaxCells = 10'000'000;

// Samples -dent_depth on a grid centred on the dent origin that covers
// [-l/2 - margin, l/2 + margin] x [-w/2 - margin, w/2 + margin]. The centre
// cell sits exactly at (0, 0).
HeightField sample_height_field(const DentParams& params, double spacing, double margin = 0.0,
                                std::size_t max_cells = kDefaultMaxCells);

// Plain-text grid: "HF v1 rows cols spacing origin_x origin_y" followed by
// row-major heights, '*' for empty cells.
void write_height_field(std::ostream& out, const HeightField& field);
HeightField read_height_field(std::istream& in);

}  // namespace dentfit
