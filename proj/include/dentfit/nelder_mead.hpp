#pragma once

#include <functional>
#include <span>
#include <vector>

namespace dentfit {

struct NelderMeadOptions {
    int max_evaluations = 20000;
    // Stop when f(worst) - f(best) over the simplex drops below this.
    double f_tolerance = 1e-10;
    // Re-expansions around the best vertex after a converged pass; one is
    // spent only if the previous pass improved on the best value.
    int max_restarts = 4;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

// Unconstrained simplex minimisation with the dimension-adaptive
// coefficients of Gao and Han (2012). Non-finite objective values are
// treated as +infinity. `steps` sets the initial edge length per coordinate.
NelderMeadResult minimize_nelder_mead(const Objective& f, std::vector<double> x0, const std::vector<double>& steps,
                                      const NelderMeadOptions& options = {});

}  // namespace dentfit
