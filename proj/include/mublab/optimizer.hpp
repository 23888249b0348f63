// optimizer.hpp
// Box-bounded quasi-Newton minimization (projected L-BFGS with central
// difference gradients and Armijo backtracking).

#pragma once

#include "mublab/numcore.hpp"

#include <functional>
#include <vector>

namespace mublab {

struct OptimizerSpec {
    int max_evals = 400;  // per restart
    double h = 1e-3;
    int restarts = 2;
    int memory = 10;
    double grad_tol = 1e-6;
    double rel_tol = 1e-10;
    std::vector<double> lower;
    std::vector<double> upper;
    // initial points are drawn uniformly from [init_lower, init_upper]
    std::vector<double> init_lower;
    std::vector<double> init_upper;

    std::size_t dim() const { return lower.size(); }
    void validate() const;
};

struct OptimizerResult {
    std::vector<double> x;
    double value = 0.0;
    long n_evals = 0;
};

using Objective = std::function<double(const std::vector<double>&)>;

/// Best point over `spec.restarts` starts. The first starts are taken from
/// `starts` (clipped to the box) when given, the rest are random. Throws
/// Error on a non-finite objective value.
OptimizerResult minimize(const Objective& f, const OptimizerSpec& spec, SeededRng& rng,
                         const std::vector<std::vector<double>>& starts = {});

}  // namespace mublab
