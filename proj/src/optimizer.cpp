#include "qde/optimizer.hpp"

#include <algorithm>
#include <numeric>

#include "qde/errors.hpp"
#include "qde/parallel.hpp"
#include "qde/random.hpp"

namespace qde {

namespace {

struct Vertex {
    std::vector<double> x;
    double f = 0;  // value of -objective (the simplex minimizes)
};

std::vector<double> affine(const std::vector<double>& a, const std::vector<double>& b, double t) {
    // a + t (b - a)
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + t * (b[i] - a[i]);
    return r;
}

struct RunResult {
    Vertex best;
    RestartTrace trace;
};

RunResult run_simplex(const Objective& f, std::vector<double> start, const NelderMeadConfig& cfg) {
    const std::size_t n = start.size();
    RunResult out;
    auto eval = [&](const std::vector<double>& x) {
        ++out.trace.evaluations;
        return -f(x);
    };

    std::vector<Vertex> s(n + 1);
    s[0].x = start;
    s[0].f = eval(start);
    for (std::size_t i = 0; i < n; ++i) {
        s[i + 1].x = start;
        s[i + 1].x[i] += cfg.initial_step;
        s[i + 1].f = eval(s[i + 1].x);
    }

    std::vector<double> centroid(n);
    for (int it = 0; it < cfg.iterations; ++it) {
        std::stable_sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        out.trace.iterations = it + 1;
        if (s.back().f - s.front().f <= cfg.spread_tolerance) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t v = 0; v < n; ++v)
            for (std::size_t i = 0; i < n; ++i) centroid[i] += s[v].x[i] / static_cast<double>(n);

        Vertex& worst = s.back();
        const std::vector<double> xr = affine(centroid, worst.x, -1.0);
        const double fr = eval(xr);
        if (fr < s.front().f) {
            const std::vector<double> xe = affine(centroid, worst.x, -2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                worst = {xe, fe};
            } else {
                worst = {xr, fr};
            }
            continue;
        }
        if (fr < s[n - 1].f) {
            worst = {xr, fr};
            continue;
        }
        // contraction: outside if the reflection improved on the worst vertex
        const bool outside = fr < worst.f;
        const std::vector<double> xc = outside ? affine(centroid, xr, 0.5) : affine(centroid, worst.x, 0.5);
        const double fc = eval(xc);
        if (fc < std::min(fr, worst.f)) {
            worst = {xc, fc};
            continue;
        }
        for (std::size_t v = 1; v <= n; ++v) {
            s[v].x = affine(s[0].x, s[v].x, 0.5);
            s[v].f = eval(s[v].x);
        }
    }
    const auto best = std::min_element(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    out.best = *best;
    out.trace.best = -best->f;
    return out;
}

}  // namespace

OptimizationResult maximize(const Objective& f, std::size_t dim, const NelderMeadConfig& config,
                            const std::optional<std::vector<double>>& first_start) {
    if (dim == 0) throw Error(ErrorKind::validation, "maximize: zero-dimensional search space");
    if (config.restarts < 1 || config.iterations < 1)
        throw Error(ErrorKind::validation, "maximize: restarts and iterations must be >= 1");
    if (first_start && first_start->size() != dim)
        throw Error(ErrorKind::dimension_mismatch, "maximize: starting point has the wrong dimension");

    const auto runs = parallel_map(static_cast<std::size_t>(config.restarts), config.threads, [&](std::size_t r) {
        std::vector<double> start(dim);
        if (r == 0 && first_start) {
            start = *first_start;
        } else {
            Rng rng(derive_seed(config.seed, r));
            std::uniform_real_distribution<double> u(-config.start_range, config.start_range);
            for (auto& v : start) v = u(rng);
        }
        return run_simplex(f, std::move(start), config);
    });

    OptimizationResult result;
    result.value = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < runs.size(); ++r) {
        result.restarts.push_back(runs[r].trace);
        if (runs[r].trace.best > result.value) {
            result.value = runs[r].trace.best;
            result.x = runs[r].best.x;
            result.best_restart = static_cast<int>(r);
        }
    }
    return result;
}

}  // namespace qde
