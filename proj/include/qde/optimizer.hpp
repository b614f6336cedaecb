// Multi-restart Nelder-Mead maximization.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace qde {

struct NelderMeadConfig {
    int restarts = 20;
    int iterations = 500;
    double initial_step = 0.5;
    double spread_tolerance = 1e-12;  // stop when max - min over the simplex falls below this
    double start_range = 3.14159265358979323846;  // random starts uniform in [-range, range]
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct RestartTrace {
    double best = 0;
    int iterations = 0;
    int evaluations = 0;
};

struct OptimizationResult {
    std::vector<double> x;
    double value = 0;
    int best_restart = 0;
    std::vector<RestartTrace> restarts;
};

using Objective = std::function<double(const std::vector<double>&)>;

// Maximizes f over R^dim. Restart r starts at `first_start` when r == 0 and
// one is given, otherwise at a point drawn from derive_seed(seed, r). Ties
// between restarts go to the lowest index, so results do not depend on the
// thread count.
OptimizationResult maximize(const Objective& f, std::size_t dim, const NelderMeadConfig& config,
                            const std::optional<std::vector<double>>& first_start = std::nullopt);

}  // namespace qde
