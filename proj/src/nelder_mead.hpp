#pragma once

// Internal derivative-free minimizer (Nelder-Mead) used by the likelihood
// fits. Works on unconstrained coordinates; callers apply their own
// parameter transforms.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace evar::detail {

struct NmResult {
    std::vector<double> x;
    double fmin = 0.0;
    int evaluations = 0;
    bool converged = false;
};

inline NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                            std::vector<double> x0, double step = 0.25, double ftol = 1e-10,
                            int max_eval = 20000) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    std::vector<double> fx(n + 1);
    NmResult res;
    for (std::size_t i = 1; i <= n; ++i) simplex[i][i - 1] += step;
    for (std::size_t i = 0; i <= n; ++i) {
        fx[i] = f(simplex[i]);
        ++res.evaluations;
    }

    auto order = [&]() {
        std::vector<std::size_t> idx(n + 1);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        std::vector<std::vector<double>> s2;
        std::vector<double> f2;
        for (auto i : idx) {
            s2.push_back(simplex[i]);
            f2.push_back(fx[i]);
        }
        simplex = std::move(s2);
        fx = std::move(f2);
    };

    order();
    while (res.evaluations < max_eval) {
        if (std::abs(fx[n] - fx[0]) <= ftol * (std::abs(fx[0]) + ftol)) {
            res.converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);

        auto point = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + coef * (simplex[n][j] - centroid[j]);
            return p;
        };

        auto xr = point(-1.0);
        double fr = f(xr);
        ++res.evaluations;
        if (fr < fx[0]) {
            auto xe = point(-2.0);
            double fe = f(xe);
            ++res.evaluations;
            if (fe < fr) {
                simplex[n] = xe;
                fx[n] = fe;
            } else {
                simplex[n] = xr;
                fx[n] = fr;
            }
        } else if (fr < fx[n - 1]) {
            simplex[n] = xr;
            fx[n] = fr;
        } else {
            auto xc = point(fr < fx[n] ? -0.5 : 0.5);
            double fc = f(xc);
            ++res.evaluations;
            if (fc < std::min(fr, fx[n])) {
                simplex[n] = xc;
                fx[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    fx[i] = f(simplex[i]);
                    ++res.evaluations;
                }
            }
        }
        order();
    }
    res.x = simplex[0];
    res.fmin = fx[0];
    return res;
}

}  // namespace evar::detail
