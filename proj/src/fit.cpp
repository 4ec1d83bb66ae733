#include "dentfit/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <set>

#include "dentfit/errors.hpp"
#include "dentfit/height_field.hpp"
#include "dentfit/nelder_mead.hpp"

namespace dentfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kShiftLimit = 0.45;
constexpr double kGuessShiftLimit = 0.3;
constexpr double kWeakBase = 50.0;
constexpr double kGuessDepthFraction = 0.05;
constexpr double kGuessRimAllowance = 1.1;

struct Candidate {
    DentParams params;
    Pose pose;
};

// Sum of squared residuals; +inf for parameters outside the model's domain.
double sum_squares(std::span<const LocalPoint> points, const DentParams& params, const Pose& pose) noexcept {
    if (!(params.l > 0.0 && params.w > 0.0 && params.d > 0.0) || !std::isfinite(params.l) ||
        !std::isfinite(params.w) || !std::isfinite(params.d) || !std::isfinite(pose.c_x) ||
        !std::isfinite(pose.c_y) || !std::isfinite(pose.theta)) {
        return kInf;
    }
    const auto ref = ReferenceDent::make(params.b, params.p, params.s_x, params.s_y);
    if (!ref) return kInf;
    const double c = std::cos(pose.theta), s = std::sin(pose.theta);
    const double inv_l = 1.0 / params.l, inv_w = 1.0 / params.w;
    double sum = 0.0;
    for (const auto& pt : points) {
        const double dx = pt.x - pose.c_x, dy = pt.y - pose.c_y;
        const double xr = (c * dx + s * dy) * inv_l;
        const double yr = (-s * dx + c * dy) * inv_w;
        const double r = pt.h + params.d * ref->value_or_zero(xr, yr);
        sum += r * r;
    }
    return sum;
}

// Unconstrained coordinates: centre and angle as-is, logs for the positive
// scales and b - 1, tanh maps for p in (0, 2) and s in (-0.45, 0.45).
std::vector<double> encode(const Candidate& c, FitMode mode) {
    std::vector<double> z{c.pose.c_x, c.pose.c_y, c.pose.theta, std::log(c.params.l), std::log(c.params.w),
                          std::log(c.params.d)};
    if (mode == FitMode::full7) {
        z.push_back(std::log(c.params.b - 1.0));
        z.push_back(2.0 * std::atanh(c.params.p - 1.0));
        z.push_back(2.0 * std::atanh(c.params.s_x / kShiftLimit));
        z.push_back(2.0 * std::atanh(c.params.s_y / kShiftLimit));
    }
    return z;
}

Candidate decode(std::span<const double> z, FitMode mode) {
    Candidate c;
    c.pose = {z[0], z[1], z[2]};
    c.params.l = std::exp(z[3]);
    c.params.w = std::exp(z[4]);
    c.params.d = std::exp(z[5]);
    if (mode == FitMode::full7) {
        c.params.b = 1.0 + std::exp(z[6]);
        c.params.p = 1.0 + std::tanh(z[7] / 2.0);
        c.params.s_x = kShiftLimit * std::tanh(z[8] / 2.0);
        c.params.s_y = kShiftLimit * std::tanh(z[9] / 2.0);
    } else {
        c.params.b = kEuler;
        c.params.p = 1.0;
        c.params.s_x = 0.0;
        c.params.s_y = 0.0;
    }
    return c;
}

std::vector<double> initial_steps(const Candidate& c, FitMode mode) {
    std::vector<double> steps{0.05 * c.params.l, 0.05 * c.params.w, 0.1, 0.1, 0.1, 0.1};
    if (mode == FitMode::full7) {
        steps.insert(steps.end(), {0.3, 0.3, 0.2, 0.2});
    }
    return steps;
}

// Pulls a start inside the optimiser's open box and the egg boundary.
Candidate sanitize(Candidate c) {
    c.params.p = std::clamp(c.params.p, 0.05, 1.95);
    c.params.b = std::max(c.params.b, 1.0 + 1e-6);
    c.params.s_x = std::clamp(c.params.s_x, -kGuessShiftLimit, kGuessShiftLimit);
    c.params.s_y = std::clamp(c.params.s_y, -kGuessShiftLimit, kGuessShiftLimit);
    for (int i = 0; i < 60 && !is_valid(c.params); ++i) {
        c.params.s_x *= 0.5;
        c.params.s_y *= 0.5;
    }
    if (!is_valid(c.params)) c.params.s_x = c.params.s_y = 0.0;
    c.pose.theta = canonical_angle(c.pose.theta);
    return c;
}

struct StartResult {
    Candidate best;
    double value = kInf;
    int evaluations = 0;
    bool converged = false;
};

StartResult run_start(std::span<const LocalPoint> points, FitMode mode, const Candidate& start,
                      const FitConfig& config) {
    const Candidate clean = sanitize(start);
    const auto f = [&](std::span<const double> z) {
        const Candidate c = decode(z, mode);
        return sum_squares(points, c.params, c.pose);
    };
    NelderMeadOptions options;
    options.max_evaluations = config.max_evaluations;
    options.f_tolerance = config.tolerance * static_cast<double>(points.size());
    const auto nm = minimize_nelder_mead(f, encode(clean, mode), initial_steps(clean, mode), options);

    StartResult out;
    out.best = decode(nm.x, mode);
    out.best.pose.theta = canonical_angle(out.best.pose.theta);
    out.value = nm.value;
    out.evaluations = nm.evaluations;
    out.converged = nm.converged;
    return out;
}

Candidate perturb(const Candidate& base, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> scale(0.85, 1.15);
    std::uniform_real_distribution<double> turn(-15.0, 15.0);
    Candidate c = base;
    c.params.l *= scale(rng);
    c.params.w *= scale(rng);
    c.params.d *= scale(rng);
    c.pose.theta += turn(rng) * std::numbers::pi / 180.0;
    return c;
}

// The base start turned by phi, with l and w traded past a quarter turn and
// the deepest point kept where it was.
Candidate turned(const Candidate& base, double phi) {
    Candidate c = base;
    const double cp = std::cos(phi), sp = std::sin(phi);
    const double du = base.params.s_x * base.params.l, dv = base.params.s_y * base.params.w;
    if (std::abs(sp) > std::abs(cp)) std::swap(c.params.l, c.params.w);
    c.pose.theta = canonical_angle(base.pose.theta + phi);
    c.params.s_x = (cp * du + sp * dv) / c.params.l;
    c.params.s_y = (-sp * du + cp * dv) / c.params.w;
    return sanitize(c);
}

// Least-squares depth for an otherwise fixed shape and pose (the model is
// linear in d).
double best_depth(std::span<const LocalPoint> points, const Candidate& c) {
    const auto ref = ReferenceDent::make(c.params.b, c.params.p, c.params.s_x, c.params.s_y);
    if (!ref) return c.params.d;
    const double cs = std::cos(c.pose.theta), sn = std::sin(c.pose.theta);
    double hg = 0.0, gg = 0.0;
    for (const auto& pt : points) {
        const double dx = pt.x - c.pose.c_x, dy = pt.y - c.pose.c_y;
        const double g = ref->value_or_zero((cs * dx + sn * dy) / c.params.l, (-sn * dx + cs * dy) / c.params.w);
        hg += -pt.h * g;
        gg += g * g;
    }
    return gg > 0.0 && hg > 0.0 ? hg / gg : c.params.d;
}

// Egg and shift have no rotational symmetry, and the moment axis of a
// near-round dent says little about its heading. A dent turned half way with
// the egg factor mirrored fits almost as well as the truth, so the best
// screened headings are taken in pairs with their half-turn partners. Returns
// up to `count` starts.
std::vector<Candidate> screen_headings(std::span<const LocalPoint> points, const Candidate& base, int count) {
    static constexpr int kHeadings = 24;
    static constexpr std::array<double, 5> kEgg{0.7, 0.85, 1.0, 1.2, 1.4};
    std::vector<std::pair<double, Candidate>> best(kHeadings, {kInf, base});
    for (int j = 0; j < kHeadings; ++j) {
        for (double p : kEgg) {
            Candidate c = turned(base, 2.0 * std::numbers::pi * j / kHeadings);
            c.params.p = p;
            c = sanitize(c);
            c.params.d = best_depth(points, c);
            const double value = sum_squares(points, c.params, c.pose);
            if (value < best[static_cast<std::size_t>(j)].first) best[static_cast<std::size_t>(j)] = {value, c};
        }
    }
    std::vector<int> order(kHeadings);
    for (int j = 0; j < kHeadings; ++j) order[static_cast<std::size_t>(j)] = j;
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return best[static_cast<std::size_t>(x)].first < best[static_cast<std::size_t>(y)].first;
    });

    std::vector<Candidate> out;
    std::vector<int> taken;
    const auto near = [&](int j) {
        return std::any_of(taken.begin(), taken.end(), [&](int t) {
            const int gap = std::abs(j - t) % kHeadings;
            return std::min(gap, kHeadings - gap) < 2;  // closer than 30 degrees
        });
    };
    for (int j : order) {
        if (near(j)) continue;
        for (int h : {j, (j + kHeadings / 2) % kHeadings}) {
            if (static_cast<int>(out.size()) >= count) return out;
            taken.push_back(h);
            out.push_back(best[static_cast<std::size_t>(h)].second);
        }
    }
    return out;
}

FitReport finish(const DentSegment& segment, FitMode mode, const std::vector<StartResult>& runs) {
    std::size_t winner = 0;
    for (std::size_t i = 1; i < runs.size(); ++i) {
        const auto& a = runs[i];
        const auto& b = runs[winner];
        if (a.value < b.value || (a.value == b.value && a.evaluations < b.evaluations)) winner = i;
    }
    const StartResult& best = runs[winner];

    FitReport report;
    report.params = best.best.params;
    report.pose = best.best.pose;
    report.mode = mode;
    report.objective = best.value;
    report.n_points = segment.size();
    report.converged = best.converged;
    report.evaluations = best.evaluations;
    for (const auto& r : runs) report.total_evaluations += r.evaluations;
    report.best_start = static_cast<int>(winner);
    const auto stats = residual_stats(segment, report.params, report.pose);
    report.mae = stats.mae;
    report.rmse = stats.rmse;
    report.max_residual = stats.max_residual;
    report.weakly_identified_b = mode == FitMode::full7 && report.params.b > kWeakBase;
    report.multimodal = segment.multimodal;
    report.srm = model_srm(report.params);
    return report;
}

void require_fittable(const DentSegment& segment) {
    if (segment.points.empty()) throw DegenerateGeometryError("cannot fit an empty segment");
}

}  // namespace

double canonical_angle(double theta) noexcept {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double t = std::remainder(theta, two_pi);  // [-pi, pi]
    if (t <= -std::numbers::pi) t += two_pi;
    return t;
}

std::string to_string(FitMode mode) { return mode == FitMode::full7 ? "full7" : "simplified3"; }

FitMode parse_fit_mode(const std::string& text) {
    if (text == "full7") return FitMode::full7;
    if (text == "simplified3") return FitMode::simplified3;
    throw DomainError("unknown fit mode '" + text + "' (expected full7 or simplified3)");
}

void validate(const FitConfig& config) {
    if (config.multistart < 1) throw DomainError("multistart count must be positive");
    if (config.max_evaluations < 1) throw DomainError("evaluation budget must be positive");
    if (!(config.tolerance > 0.0)) throw DomainError("convergence tolerance must be positive");
    if (!(config.ring_width >= 0.0)) throw DomainError("ring width must be non-negative");
}

double model_height(double x, double y, const DentParams& params, const Pose& pose) {
    validate(params);
    const ReferenceDent ref(params.b, params.p, params.s_x, params.s_y);
    const double c = std::cos(pose.theta), s = std::sin(pose.theta);
    const double dx = x - pose.c_x, dy = y - pose.c_y;
    return -params.d * ref.value_or_zero((c * dx + s * dy) / params.l, (-s * dx + c * dy) / params.w);
}

InitialGuess initial_guess(const DentSegment& segment) {
    require_fittable(segment);
    const LocalPoint* deepest = &segment.points.front();
    for (const auto& p : segment.points) {
        if (p.h < deepest->h) deepest = &p;
    }
    // Flat context and noise would drag the moments toward the patch; only
    // points clearly inside the dent take part.
    const double floor = deepest->h < 0.0 ? kGuessDepthFraction * deepest->h : 0.0;
    auto weight = [&](const LocalPoint& p) { return deepest->h < 0.0 ? std::max(floor - p.h, 0.0) : std::abs(p.h); };

    double wsum = 0.0, cx = 0.0, cy = 0.0;
    for (const auto& p : segment.points) {
        const double wt = weight(p);
        wsum += wt;
        cx += wt * p.x;
        cy += wt * p.y;
    }
    if (!(wsum > 0.0)) {
        if (deepest->h == 0.0) throw DegenerateGeometryError("segment heights are all zero");
        // A single deepest value: nothing but the point itself.
        cx = deepest->x;
        cy = deepest->y;
        wsum = 1.0;
    } else {
        cx /= wsum;
        cy /= wsum;
    }

    double mxx = 0.0, myy = 0.0, mxy = 0.0;
    for (const auto& p : segment.points) {
        const double wt = weight(p);
        mxx += wt * (p.x - cx) * (p.x - cx);
        myy += wt * (p.y - cy) * (p.y - cy);
        mxy += wt * (p.x - cx) * (p.y - cy);
    }
    const double theta = 0.5 * std::atan2(2.0 * mxy, mxx - myy);
    const double c = std::cos(theta), s = std::sin(theta);

    double lo_u = kInf, hi_u = -kInf, lo_v = kInf, hi_v = -kInf;
    for (const auto& p : segment.points) {
        if (p.h > floor && &p != deepest) continue;
        const double u = c * (p.x - cx) + s * (p.y - cy);
        const double v = -s * (p.x - cx) + c * (p.y - cy);
        lo_u = std::min(lo_u, u);
        hi_u = std::max(hi_u, u);
        lo_v = std::min(lo_v, v);
        hi_v = std::max(hi_v, v);
    }

    // The support touches all four sides of its box, so the box midpoint is
    // a better centre than the depth-weighted one (which leans toward the
    // deepest point of a shifted dent).
    const double mu = 0.5 * (lo_u + hi_u), mv = 0.5 * (lo_v + hi_v);
    cx += c * mu - s * mv;
    cy += s * mu + c * mv;

    InitialGuess guess;
    guess.pose = {cx, cy, canonical_angle(theta)};
    // The shallow rim is cut off above; a single point has no extent at all.
    guess.params.l = std::max(kGuessRimAllowance * (hi_u - lo_u), 1e-6);
    guess.params.w = std::max(kGuessRimAllowance * (hi_v - lo_v), 1e-6);
    guess.params.d = std::abs(deepest->h);
    guess.params.b = kEuler;
    guess.params.p = 1.0;
    const double du = c * (deepest->x - cx) + s * (deepest->y - cy);
    const double dv = -s * (deepest->x - cx) + c * (deepest->y - cy);
    guess.params.s_x = std::clamp(du / guess.params.l, -kGuessShiftLimit, kGuessShiftLimit);
    guess.params.s_y = std::clamp(dv / guess.params.w, -kGuessShiftLimit, kGuessShiftLimit);
    return guess;
}

double objective(const DentSegment& segment, const DentParams& params, const Pose& pose) {
    validate(params);
    return sum_squares(segment.points, params, pose);
}

ResidualStats residual_stats(std::span<const LocalPoint> points, const DentParams& params, const Pose& pose) {
    if (points.empty()) throw DegenerateGeometryError("residual statistics need at least one point");
    validate(params);
    const ReferenceDent ref(params.b, params.p, params.s_x, params.s_y);
    const double c = std::cos(pose.theta), s = std::sin(pose.theta);
    ResidualStats stats;
    stats.residuals.reserve(points.size());
    double abs_sum = 0.0, sq_sum = 0.0;
    for (const auto& pt : points) {
        const double dx = pt.x - pose.c_x, dy = pt.y - pose.c_y;
        const double model = -params.d * ref.value_or_zero((c * dx + s * dy) / params.l, (-s * dx + c * dy) / params.w);
        const double r = pt.h - model;
        stats.residuals.push_back(r);
        abs_sum += std::abs(r);
        sq_sum += r * r;
        stats.max_residual = std::max(stats.max_residual, std::abs(r));
    }
    const double n = static_cast<double>(points.size());
    stats.mae = abs_sum / n;
    stats.rmse = std::sqrt(sq_sum / n);
    return stats;
}

ResidualStats residual_stats(const DentSegment& segment, const DentParams& params, const Pose& pose) {
    return residual_stats(std::span<const LocalPoint>(segment.points), params, pose);
}

FitReport fit_simplified(const DentSegment& segment, const FitConfig& config) {
    validate(config);
    require_fittable(segment);
    const InitialGuess guess = initial_guess(segment);
    Candidate base{guess.params, guess.pose};
    base.params.b = kEuler;
    base.params.p = 1.0;
    base.params.s_x = base.params.s_y = 0.0;

    std::mt19937_64 rng(config.seed);
    std::vector<StartResult> runs;
    for (int k = 0; k < config.multistart; ++k) {
        const Candidate start = k == 0 ? base : perturb(base, rng);
        runs.push_back(run_start(segment.points, FitMode::simplified3, start, config));
    }
    return finish(segment, FitMode::simplified3, runs);
}

FitReport fit(const DentSegment& segment, const FitConfig& config) {
    if (config.mode == FitMode::simplified3) return fit_simplified(segment, config);
    return fit_full(segment, config, fit_simplified(segment, config));
}

FitReport fit_full(const DentSegment& segment, const FitConfig& config, const FitReport& restricted) {
    validate(config);
    require_fittable(segment);
    if (restricted.mode != FitMode::simplified3) throw DomainError("full fit must be seeded with a simplified3 result");

    // The restricted optimum is always one of the starts, so the full fit
    // can never end above it.
    const InitialGuess guess = initial_guess(segment);
    const Candidate base{guess.params, guess.pose};

    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    const auto headings = screen_headings(segment.points, base, std::max(config.multistart - 2, 0));
    std::vector<StartResult> runs;
    for (int k = 0; k < config.multistart; ++k) {
        Candidate start;
        if (k == 0) {
            start = {restricted.params, restricted.pose};
        } else if (k == 1) {
            start = base;
        } else {
            static constexpr std::array<double, 3> kBase{2.0, kEuler, 6.0};
            const auto h = static_cast<std::size_t>(k - 2);
            start = perturb(h < headings.size() ? headings[h] : base, rng);
            start.params.b = kBase[static_cast<std::size_t>(k) % 3];
        }
        runs.push_back(run_start(segment.points, FitMode::full7, start, config));
    }
    FitReport report = finish(segment, FitMode::full7, runs);
    report.total_evaluations += restricted.total_evaluations;
    return report;
}

DentSegment anchor_ring(const DentSegment& segment, std::span<const LocalPoint> context, double width,
                        double depth_threshold) {
    if (!(width >= 0.0)) throw DomainError("ring width must be non-negative");
    if (width == 0.0) return segment;
    const std::int64_t reach = static_cast<std::int64_t>(std::ceil(width / segment.cell));

    const std::set<CellKey> footprint(segment.footprint.begin(), segment.footprint.end());
    std::set<CellKey> ring;
    for (const auto& c : footprint) {
        for (std::int64_t dx = -reach; dx <= reach; ++dx) {
            for (std::int64_t dy = -reach; dy <= reach; ++dy) {
                const CellKey n{c.first + dx, c.second + dy};
                if (!footprint.count(n)) ring.insert(n);
            }
        }
    }

    std::vector<bool> taken(context.size(), false);
    for (auto i : segment.indices) {
        if (i < taken.size()) taken[i] = true;
    }
    DentSegment out = segment;
    for (std::size_t i = 0; i < context.size(); ++i) {
        if (taken[i]) continue;
        const auto& p = context[i];
        if (std::abs(p.h) > depth_threshold) continue;
        if (!ring.count(cell_of(p.x, p.y, segment.cell))) continue;
        out.points.push_back(p);
        out.indices.push_back(i);
        out.min_x = std::min(out.min_x, p.x);
        out.max_x = std::max(out.max_x, p.x);
        out.min_y = std::min(out.min_y, p.y);
        out.max_y = std::max(out.max_y, p.y);
    }
    return out;
}

SrmMeasures model_srm(const DentParams& params) {
    const double spacing = std::min(params.l, params.w) / 200.0;
    return srm_box_measures(sample_height_field(params, spacing, 0.0));
}

}  // namespace dentfit
