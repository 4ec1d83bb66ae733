#include "dentfit/segment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "dentfit/errors.hpp"

namespace dentfit {

namespace {

void compute_bounds(DentSegment& seg) {
    seg.min_x = seg.min_y = std::numeric_limits<double>::infinity();
    seg.max_x = seg.max_y = -std::numeric_limits<double>::infinity();
    for (const auto& p : seg.points) {
        seg.min_x = std::min(seg.min_x, p.x);
        seg.max_x = std::max(seg.max_x, p.x);
        seg.min_y = std::min(seg.min_y, p.y);
        seg.max_y = std::max(seg.max_y, p.y);
    }
}

// Counts separated deep basins among per-cell mean heights.
bool detect_multimodal(const DentSegment& seg) {
    std::map<CellKey, std::pair<double, std::size_t>> sums;
    for (const auto& p : seg.points) {
        auto& s = sums[cell_of(p.x, p.y, seg.cell)];
        s.first += p.h;
        ++s.second;
    }
    std::map<CellKey, double> mean;
    double deepest = 0.0;
    for (const auto& [key, s] : sums) {
        mean[key] = s.first / static_cast<double>(s.second);
        deepest = std::min(deepest, mean[key]);
    }
    if (deepest >= 0.0) return false;

    std::vector<CellKey> minima;
    for (const auto& [key, h] : mean) {
        if (h > 0.5 * deepest) continue;
        bool is_min = true;
        for (int dx = -1; dx <= 1 && is_min; ++dx) {
            for (int dy = -1; dy <= 1; ++dy) {
                if (!dx && !dy) continue;
                const auto it = mean.find({key.first + dx, key.second + dy});
                if (it != mean.end() && it->second <= h) {
                    is_min = false;
                    break;
                }
            }
        }
        if (is_min) minima.push_back(key);
    }
    if (minima.size() < 2) return false;

    const double span_cells = std::hypot(seg.max_x - seg.min_x, seg.max_y - seg.min_y) / seg.cell;
    const double sep = std::max(3.0, 0.25 * span_cells);
    for (std::size_t i = 0; i < minima.size(); ++i) {
        for (std::size_t j = i + 1; j < minima.size(); ++j) {
            const double d = std::hypot(static_cast<double>(minima[i].first - minima[j].first),
                                        static_cast<double>(minima[i].second - minima[j].second));
            if (d > sep) return true;
        }
    }
    return false;
}

}  // namespace

CellKey cell_of(double x, double y, double cell) noexcept {
    return {static_cast<std::int64_t>(std::floor(x / cell)), static_cast<std::int64_t>(std::floor(y / cell))};
}

DentSegment make_segment(std::vector<LocalPoint> points, double cell) {
    if (!(cell > 0.0)) throw DomainError("cell size must be positive");
    DentSegment seg;
    seg.cell = cell;
    seg.points = std::move(points);
    seg.indices.resize(seg.points.size());
    std::set<CellKey> cells;
    for (std::size_t i = 0; i < seg.points.size(); ++i) {
        seg.indices[i] = i;
        cells.insert(cell_of(seg.points[i].x, seg.points[i].y, cell));
        seg.core_count += seg.points[i].h < 0.0;
    }
    seg.footprint.assign(cells.begin(), cells.end());
    compute_bounds(seg);
    seg.multimodal = !seg.points.empty() && detect_multimodal(seg);
    return seg;
}

std::vector<DentSegment> segment_dents(std::span<const LocalPoint> points, const SegmentationConfig& config) {
    if (!(config.depth_threshold > 0.0)) throw DomainError("depth threshold must be positive");
    if (!(config.cell > 0.0)) throw DomainError("cell size must be positive");

    std::map<CellKey, std::vector<std::size_t>> bins;
    std::map<CellKey, std::size_t> core;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto key = cell_of(points[i].x, points[i].y, config.cell);
        bins[key].push_back(i);
        if (points[i].h <= -config.depth_threshold) ++core[key];
    }

    std::vector<DentSegment> segments;
    std::set<CellKey> visited;
    for (const auto& [seed, unused] : core) {
        if (visited.count(seed)) continue;
        // Cells two apart have overlapping dilations and belong together.
        std::vector<CellKey> component{seed};
        visited.insert(seed);
        for (std::size_t head = 0; head < component.size(); ++head) {
            const auto c = component[head];
            for (int dx = -2; dx <= 2; ++dx) {
                for (int dy = -2; dy <= 2; ++dy) {
                    const CellKey n{c.first + dx, c.second + dy};
                    if (core.count(n) && visited.insert(n).second) component.push_back(n);
                }
            }
        }

        std::size_t core_points = 0;
        std::set<CellKey> footprint;
        for (const auto& c : component) {
            core_points += core.at(c);
            for (int dx = -1; dx <= 1; ++dx) {
                for (int dy = -1; dy <= 1; ++dy) footprint.insert({c.first + dx, c.second + dy});
            }
        }
        if (core_points < config.min_points) continue;

        DentSegment seg;
        seg.cell = config.cell;
        seg.core_count = core_points;
        seg.footprint.assign(footprint.begin(), footprint.end());
        for (const auto& c : footprint) {
            const auto it = bins.find(c);
            if (it != bins.end()) seg.indices.insert(seg.indices.end(), it->second.begin(), it->second.end());
        }
        std::sort(seg.indices.begin(), seg.indices.end());
        seg.points.reserve(seg.indices.size());
        for (auto i : seg.indices) seg.points.push_back(points[i]);
        compute_bounds(seg);
        seg.multimodal = detect_multimodal(seg);
        segments.push_back(std::move(seg));
    }

    std::sort(segments.begin(), segments.end(), [](const DentSegment& a, const DentSegment& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        if (a.min_x != b.min_x) return a.min_x < b.min_x;
        return a.min_y < b.min_y;
    });
    return segments;
}

}  // namespace dentfit
