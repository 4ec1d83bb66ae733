#include "dentfit/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dentfit/errors.hpp"

namespace dentfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Simplex {
    std::vector<std::vector<double>> x;
    std::vector<double> f;
};

}  // namespace

NelderMeadResult minimize_nelder_mead(const Objective& f, std::vector<double> x0, const std::vector<double>& steps,
                                      const NelderMeadOptions& options) {
    const std::size_t n = x0.size();
    if (n == 0) throw DomainError("Nelder-Mead needs at least one variable");
    if (steps.size() != n) throw DomainError("Nelder-Mead step vector size mismatch");
    if (options.max_evaluations < 1) throw DomainError("Nelder-Mead evaluation budget must be positive");

    const double dim = static_cast<double>(n);
    const double alpha = 1.0;
    const double gamma = 1.0 + 2.0 / dim;
    const double rho = 0.75 - 1.0 / (2.0 * dim);
    const double sigma = n > 1 ? 1.0 - 1.0 / dim : 0.5;

    NelderMeadResult result;
    auto eval = [&](const std::vector<double>& x) {
        ++result.evaluations;
        const double v = f(x);
        return std::isfinite(v) ? v : kInf;
    };
    auto budget_left = [&] { return result.evaluations < options.max_evaluations; };

    result.x = x0;
    result.value = eval(x0);
    if (!std::isfinite(result.value)) throw DomainError("Nelder-Mead start point has a non-finite objective");

    Simplex s;
    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    for (int pass = 0; pass <= options.max_restarts && budget_left(); ++pass) {
        const double pass_start_value = result.value;
        s.x.assign(n + 1, result.x);
        s.f.assign(n + 1, result.value);
        for (std::size_t i = 0; i < n && budget_left(); ++i) {
            s.x[i + 1][i] += steps[i];
            s.f[i + 1] = eval(s.x[i + 1]);
        }

        bool pass_converged = false;
        while (budget_left()) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.f[a] < s.f[b]; });
            const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

            if (s.f[worst] - s.f[best] <= options.f_tolerance) {
                pass_converged = true;
                break;
            }

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t k = 0; k < n; ++k) {
                const auto& v = s.x[order[k]];
                for (std::size_t i = 0; i < n; ++i) centroid[i] += v[i];
            }
            for (auto& c : centroid) c /= dim;

            const auto& xw = s.x[worst];
            for (std::size_t i = 0; i < n; ++i) xr[i] = centroid[i] + alpha * (centroid[i] - xw[i]);
            const double fr = eval(xr);

            if (fr < s.f[best]) {
                for (std::size_t i = 0; i < n; ++i) xe[i] = centroid[i] + gamma * (xr[i] - centroid[i]);
                const double fe = budget_left() ? eval(xe) : kInf;
                if (fe < fr) {
                    s.x[worst] = xe;
                    s.f[worst] = fe;
                } else {
                    s.x[worst] = xr;
                    s.f[worst] = fr;
                }
                continue;
            }
            if (fr < s.f[second]) {
                s.x[worst] = xr;
                s.f[worst] = fr;
                continue;
            }

            bool accepted = false;
            if (fr < s.f[worst]) {
                for (std::size_t i = 0; i < n; ++i) xc[i] = centroid[i] + rho * (xr[i] - centroid[i]);
                const double fc = eval(xc);
                if (fc <= fr) {
                    s.x[worst] = xc;
                    s.f[worst] = fc;
                    accepted = true;
                }
            } else {
                for (std::size_t i = 0; i < n; ++i) xc[i] = centroid[i] + rho * (xw[i] - centroid[i]);
                const double fc = eval(xc);
                if (fc < s.f[worst]) {
                    s.x[worst] = xc;
                    s.f[worst] = fc;
                    accepted = true;
                }
            }
            if (accepted) continue;

            const auto xb = s.x[best];
            for (std::size_t k = 0; k < n + 1 && budget_left(); ++k) {
                if (k == best) continue;
                for (std::size_t i = 0; i < n; ++i) s.x[k][i] = xb[i] + sigma * (s.x[k][i] - xb[i]);
                s.f[k] = eval(s.x[k]);
            }
        }

        const auto it = std::min_element(s.f.begin(), s.f.end());
        const auto idx = static_cast<std::size_t>(it - s.f.begin());
        if (s.f[idx] < result.value) {
            result.value = s.f[idx];
            result.x = s.x[idx];
        }
        result.converged = pass_converged;
        if (!pass_converged) break;
        if (pass_start_value - result.value <= options.f_tolerance && pass > 0) break;
    }
    return result;
}

}  // namespace dentfit
