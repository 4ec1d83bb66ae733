#include "dentfit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dentfit/errors.hpp"
#include "dentfit/height_field.hpp"

namespace dentfit {

PointCloud synthesize_cloud(std::span<const PlacedDent> dents, const SynthConfig& config) {
    if (dents.empty()) throw DomainError("synthesis needs at least one dent");
    if (!(config.spacing > 0.0)) throw DomainError("synthesis spacing must be positive");
    if (!(config.noise_sigma >= 0.0)) throw DomainError("noise sigma must be non-negative");

    double largest = 0.0;
    for (const auto& dent : dents) {
        validate(dent.params);
        largest = std::max({largest, dent.params.l, dent.params.w});
    }
    const double margin = config.margin >= 0.0 ? config.margin : 0.5 * largest;

    double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
    double hi_x = -lo_x, hi_y = -lo_x;
    for (const auto& dent : dents) {
        const double c = std::abs(std::cos(dent.pose.theta)), s = std::abs(std::sin(dent.pose.theta));
        const double ex = 0.5 * (c * dent.params.l + s * dent.params.w);
        const double ey = 0.5 * (s * dent.params.l + c * dent.params.w);
        lo_x = std::min(lo_x, dent.pose.c_x - ex - margin);
        hi_x = std::max(hi_x, dent.pose.c_x + ex + margin);
        lo_y = std::min(lo_y, dent.pose.c_y - ey - margin);
        hi_y = std::max(hi_y, dent.pose.c_y + ey + margin);
    }

    const auto i0 = static_cast<long long>(std::floor(lo_x / config.spacing));
    const auto i1 = static_cast<long long>(std::ceil(hi_x / config.spacing));
    const auto j0 = static_cast<long long>(std::floor(lo_y / config.spacing));
    const auto j1 = static_cast<long long>(std::ceil(hi_y / config.spacing));
    const double count = static_cast<double>(i1 - i0 + 1) * static_cast<double>(j1 - j0 + 1);
    if (count > static_cast<double>(kDefaultMaxCells)) {
        throw ResourceError("synthetic patch would hold more than " + std::to_string(kDefaultMaxCells) + " points");
    }

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    PointCloud cloud;
    cloud.points.reserve(static_cast<std::size_t>(count));
    for (long long j = j0; j <= j1; ++j) {
        const double y = static_cast<double>(j) * config.spacing;
        for (long long i = i0; i <= i1; ++i) {
            const double x = static_cast<double>(i) * config.spacing;
            double z = 0.0;
            for (const auto& dent : dents) z += model_height(x, y, dent.params, dent.pose);
            if (config.noise_sigma > 0.0) z += config.noise_sigma * noise(rng);
            cloud.points.emplace_back(x, y, z);
        }
    }
    return cloud;
}

}  // namespace dentfit
