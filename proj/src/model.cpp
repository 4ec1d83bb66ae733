#include "dentfit/model.hpp"

#include <cfloat>
#include <cmath>

#include "dentfit/errors.hpp"

namespace dentfit {

namespace {

// Exponents (in natural-log units) below this underflow past the smallest
// normal double and are reported as exact zero.
const double kMinLogValue = std::log(DBL_MIN);

void check_egg_factor(double p) {
    if (!(p > 0.0 && p < 2.0)) {
        throw DomainError("egg-factor p must lie in (0, 2), got " + std::to_string(p));
    }
}

inline double egg_term(double x, double p) noexcept {
    const double t = x + 0.5;
    return (p == 1.0 ? t : std::pow(t, p)) - 0.5;
}

inline double half_width_unchecked(double x, double p) noexcept {
    const double g = egg_term(x, p);
    const double f2 = 0.25 - g * g;
    return f2 > 0.0 ? std::sqrt(f2) : 0.0;
}

inline double ratio_squared(double x, double y, double f) noexcept {
    const double den = x * x + f * f;
    if (den == 0.0) return 0.0;
    return (x * x + y * y) / den;
}

RatioGradient gradient_unchecked(double x, double y, double p) noexcept {
    const double t = x + 0.5;
    const double g = egg_term(x, p);
    const double dg = p * std::pow(t, p - 1.0);
    const double f2 = 0.25 - g * g;
    const double den2 = x * x + f2;
    const double den = std::sqrt(den2);
    const double num = std::hypot(x, y);
    // d(den)/dx = (x - g * g') / den
    const double dden = (x - g * dg) / den;
    return {x / (num * den) - num * dden / den2, y / (num * den)};
}

}  // namespace

bool is_valid(const DentParams& params) noexcept {
    if (!(params.l > 0.0 && params.w > 0.0 && params.d > 0.0)) return false;
    if (!(params.b > 1.0) || !std::isfinite(params.b)) return false;
    if (!(params.p > 0.0 && params.p < 2.0)) return false;
    if (!(std::abs(params.s_x) < 0.5 && std::abs(params.s_y) < 0.5)) return false;
    return inside_support({params.s_x, params.s_y}, params.p) ||
           (params.s_x == 0.0 && params.s_y == 0.0);
}

void validate(const DentParams& params) {
    auto fail = [](const std::string& what) { throw DomainError("invalid dent parameters: " + what); };
    if (!(params.l > 0.0) || !std::isfinite(params.l)) fail("l must be positive");
    if (!(params.w > 0.0) || !std::isfinite(params.w)) fail("w must be positive");
    if (!(params.d > 0.0) || !std::isfinite(params.d)) fail("d must be positive");
    if (!(params.b > 1.0) || !std::isfinite(params.b)) fail("b must exceed 1");
    if (!(params.p > 0.0 && params.p < 2.0)) fail("p must lie in (0, 2)");
    if (!(std::abs(params.s_x) < 0.5)) fail("s_x must lie in (-0.5, 0.5)");
    if (!(std::abs(params.s_y) < 0.5)) fail("s_y must lie in (-0.5, 0.5)");
    if (params.shifted() && !inside_support({params.s_x, params.s_y}, params.p)) {
        fail("shift (s_x, s_y) lies outside the reference boundary");
    }
}

double boundary_half_width(double x, double p) {
    check_egg_factor(p);
    if (!(x >= -0.5 && x <= 0.5)) {
        throw DomainError("reference abscissa must lie in [-0.5, 0.5], got " + std::to_string(x));
    }
    return half_width_unchecked(x, p);
}

bool inside_support(RefPoint pt, double p) {
    check_egg_factor(p);
    if (!(std::abs(pt.x) < 0.5)) return false;
    return std::abs(pt.y) < half_width_unchecked(pt.x, p);
}

double radial_ratio(RefPoint pt, double p) {
    check_egg_factor(p);
    if (!(pt.x >= -0.5 && pt.x <= 0.5)) {
        throw DomainError("reference abscissa must lie in [-0.5, 0.5]");
    }
    return std::sqrt(ratio_squared(pt.x, pt.y, half_width_unchecked(pt.x, p)));
}

RatioGradient radial_ratio_gradient(RefPoint pt, double p) {
    check_egg_factor(p);
    if (pt.x == 0.0 && pt.y == 0.0) {
        throw DomainError("radial ratio gradient is singular at the origin");
    }
    if (!(std::abs(pt.x) < 0.5)) {
        throw DomainError("radial ratio gradient needs |x| < 0.5");
    }
    return gradient_unchecked(pt.x, pt.y, p);
}

ReferenceDent::ReferenceDent(double b, double p, double s_x, double s_y)
    : b_(b), p_(p), s_x_(s_x), s_y_(s_y) {
    validate({1.0, 1.0, 1.0, b, p, s_x, s_y});
    precompute();
}

std::optional<ReferenceDent> ReferenceDent::make(double b, double p, double s_x, double s_y) noexcept {
    if (!is_valid({1.0, 1.0, 1.0, b, p, s_x, s_y})) return std::nullopt;
    ReferenceDent dent;
    dent.b_ = b;
    dent.p_ = p;
    dent.s_x_ = s_x;
    dent.s_y_ = s_y;
    dent.precompute();
    if (!std::isfinite(dent.offset_) || !std::isfinite(dent.slope_x_) || !std::isfinite(dent.slope_y_)) {
        return std::nullopt;
    }
    return dent;
}

void ReferenceDent::precompute() noexcept {
    log_b_ = std::log(b_);
    shifted_ = s_x_ != 0.0 || s_y_ != 0.0;
    if (!shifted_) return;
    const double r2 = ratio_squared(s_x_, s_y_, half_width_unchecked(s_x_, p_));
    const double r = std::sqrt(r2);
    const RatioGradient grad = gradient_unchecked(s_x_, s_y_, p_);
    const double q = 1.0 - r2;
    slope_x_ = 2.0 * r * grad.dx / (q * q);
    slope_y_ = 2.0 * r * grad.dy / (q * q);
    offset_ = 1.0 / q;
}

double ReferenceDent::exponent_to_value(double exponent) const noexcept {
    const double t = exponent * log_b_;
    if (!(t >= kMinLogValue)) return 0.0;
    return std::exp(t);
}

double ReferenceDent::value_or_zero(double x, double y) const noexcept {
    if (!(std::abs(x) < 0.5)) return 0.0;
    const double f = half_width_unchecked(x, p_);
    if (!(std::abs(y) < f)) return 0.0;
    const double q = 1.0 - ratio_squared(x, y, f);
    if (!(q > 0.0)) return 0.0;
    const double inner = -(1.0 / q);
    if (!shifted_) return exponent_to_value(1.0 + inner);
    // The slope terms cancel exactly at the shift, leaving -offset + offset.
    const double exponent = inner + (slope_x_ * (x - s_x_) + slope_y_ * (y - s_y_)) + offset_;
    return exponent_to_value(exponent);
}

std::optional<double> ReferenceDent::operator()(RefPoint pt) const noexcept {
    if (!(std::abs(pt.x) < 0.5)) return std::nullopt;
    if (!(std::abs(pt.y) < half_width_unchecked(pt.x, p_))) return std::nullopt;
    return value_or_zero(pt.x, pt.y);
}

std::optional<double> ref_dent(RefPoint pt, double b, double p, double s_x, double s_y) {
    return ReferenceDent(b, p, s_x, s_y)(pt);
}

std::optional<double> dent_depth(double x, double y, const DentParams& params) {
    validate(params);
    const ReferenceDent ref(params.b, params.p, params.s_x, params.s_y);
    const auto v = ref({x / params.l, y / params.w});
    if (!v) return std::nullopt;
    return params.d * *v;
}

DepthPoint max_depth_point(const DentParams& params) {
    validate(params);
    return {params.s_x * params.l, params.s_y * params.w, params.d};
}

const std::array<NamedExample, 8>& example_gallery() {
    static const std::array<NamedExample, 8> gallery{{
        {"round-b2", {30, 30, 5, 2.0, 1.0, 0.0, 0.0}},
        {"round-b10", {30, 30, 5, 10.0, 1.0, 0.0, 0.0}},
        {"egg-p0.8", {30, 30, 5, kEuler, 0.8, 0.0, 0.0}},
        {"egg-p1.2", {30, 30, 5, kEuler, 1.2, 0.0, 0.0}},
        {"oval", {30, 15, 5, kEuler, 1.0, 0.0, 0.0}},
        {"oval-shift-x", {30, 15, 5, kEuler, 1.0, 0.2, 0.0}},
        {"oval-shift-y", {30, 15, 5, kEuler, 1.0, 0.0, 0.2}},
        {"egg-shift-xy", {30, 30, 5, kEuler, 0.7, -0.2, -0.1}},
    }};
    return gallery;
}

}  // namespace dentfit
