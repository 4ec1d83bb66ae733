#pragma once

// Closed-form dent model: a bump-like depression on a unit reference square,
// rescaled to physical length, width and depth.
//
// Reference coordinates (x, y) live in [-0.5, 0.5]^2. The support is the
// egg-shaped region -f(x) < y < f(x), where f is the boundary half-width.
// Depth values returned here are positive magnitudes; sampled height fields
// negate them (a dent sits below its base plane).

#include <array>
#include <numbers>
#include <optional>
#include <string>

namespace dentfit {

inline constexpr double kEuler = std::numbers::e;

// The seven shape parameters. l and w are extents along the dent's local x
// and y axes (mm), d the maximum depth (mm). b controls how quickly depth
// builds up inward, p deforms the circular boundary into an egg, and
// (s_x, s_y) place the deepest point as fractions of (l, w).
struct DentParams {
    double l = 1.0;
    double w = 1.0;
    double d = 1.0;
    double b = kEuler;
    double p = 1.0;
    double s_x = 0.0;
    double s_y = 0.0;

    bool shifted() const noexcept { return s_x != 0.0 || s_y != 0.0; }
    friend bool operator==(const DentParams&, const DentParams&) = default;
};

struct RefPoint {
    double x = 0.0;
    double y = 0.0;
};

struct RatioGradient {
    double dx = 0.0;
    double dy = 0.0;
};

// Throws DomainError naming the first violated range. Also rejects shifts
// that fall on or outside the reference boundary for the given p.
void validate(const DentParams& params);
bool is_valid(const DentParams& params) noexcept;

// f(x) = sqrt(0.25 - ((x + 0.5)^p - 0.5)^2), in [0, 0.5].
double boundary_half_width(double x, double p);

// Strict interior test -f(x) < y < f(x), |x| < 0.5.
bool inside_support(RefPoint pt, double p);

// r(x, y) = |(x, y)| / |(x, f(x))|. r(0, 0) = 0; r = 1 on the boundary.
double radial_ratio(RefPoint pt, double p);

// Analytic (dr/dx, dr/dy). Undefined at the origin (throws DomainError).
RatioGradient radial_ratio_gradient(RefPoint pt, double p);

// Precomputed evaluator for one (b, p, s_x, s_y). Cheap to copy; evaluation
// is a pure function of the point.
class ReferenceDent {
public:
    // Validates and throws DomainError on out-of-range parameters.
    ReferenceDent(double b, double p, double s_x, double s_y);

    // Non-throwing construction for optimizer inner loops.
    static std::optional<ReferenceDent> make(double b, double p, double s_x, double s_y) noexcept;

    // Value in [0, 1] inside the support, nullopt outside.
    std::optional<double> operator()(RefPoint pt) const noexcept;

    // Same as operator() but with 0 outside the support.
    double value_or_zero(double x, double y) const noexcept;

    double b() const noexcept { return b_; }
    double p() const noexcept { return p_; }
    double s_x() const noexcept { return s_x_; }
    double s_y() const noexcept { return s_y_; }

private:
    ReferenceDent() = default;
    void precompute() noexcept;
    double exponent_to_value(double exponent) const noexcept;

    double b_ = kEuler;
    double p_ = 1.0;
    double s_x_ = 0.0;
    double s_y_ = 0.0;
    double log_b_ = 1.0;
    bool shifted_ = false;
    // Tangent-plane correction of the shifted branch, evaluated at the shift.
    double slope_x_ = 0.0;
    double slope_y_ = 0.0;
    double offset_ = 1.0;
};

// refDent(x, y); nullopt marks "undefined" outside the support.
std::optional<double> ref_dent(RefPoint pt, double b, double p, double s_x, double s_y);

// Scaled dent: d * refDent(x / l, y / w). Coordinates in mm, dent-local frame.
std::optional<double> dent_depth(double x, double y, const DentParams& params);

struct DepthPoint {
    double x = 0.0;
    double y = 0.0;
    double depth = 0.0;
};

// Deepest point (s_x * l, s_y * w, d).
DepthPoint max_depth_point(const DentParams& params);

struct NamedExample {
    std::string name;
    DentParams params;
};

// The eight gallery shapes: 30 mm dents, 5 mm deep, varying b, p, aspect
// ratio and shift.
const std::array<NamedExample, 8>& example_gallery();

}  // namespace dentfit
