#include "evar/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "ols.hpp"

namespace evar {
namespace {

double chi2_sf(double x, int df) {
    if (x <= 0.0) return 1.0;
    boost::math::chi_squared dist(df);
    return boost::math::cdf(boost::math::complement(dist, x));
}

// Dickey-Fuller critical values, constant-only regression (Fuller 1976,
// tau_mu). Rows: sample sizes 25, 50, 100, 250, 500, inf.
constexpr double kAdfSizes[] = {25, 50, 100, 250, 500, 1e9};
constexpr double kAdfCrit1[] = {-3.75, -3.58, -3.51, -3.46, -3.44, -3.43};
constexpr double kAdfCrit5[] = {-3.00, -2.93, -2.89, -2.88, -2.87, -2.86};
constexpr double kAdfCrit10[] = {-2.63, -2.60, -2.58, -2.57, -2.57, -2.57};

double interp_crit(const double* crit, double n) {
    if (n <= kAdfSizes[0]) return crit[0];
    for (int i = 1; i < 6; ++i) {
        if (n <= kAdfSizes[i]) {
            const double w = (n - kAdfSizes[i - 1]) / (kAdfSizes[i] - kAdfSizes[i - 1]);
            return crit[i - 1] + w * (crit[i] - crit[i - 1]);
        }
    }
    return crit[5];
}

}  // namespace

DescriptiveStats descriptive_stats(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    if (n < 2) throw std::invalid_argument("descriptive_stats: series too short");
    DescriptiveStats s;
    s.n = n;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    s.min = s.max = xs[0];
    for (double x : xs) {
        const double d = x - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    const double dn = static_cast<double>(n);
    s.std_dev = std::sqrt(m2 / (dn - 1.0));
    const double var_pop = m2 / dn;
    if (var_pop <= 0.0) throw std::invalid_argument("descriptive_stats: zero variance");
    s.skewness = (m3 / dn) / std::pow(var_pop, 1.5);
    s.kurtosis = (m4 / dn) / (var_pop * var_pop);
    return s;
}

DescriptiveStats descriptive_stats(const ReturnSeries& r) { return descriptive_stats(r.returns); }

TestResult jarque_bera(const std::vector<double>& xs) {
    if (xs.size() < 8) throw std::invalid_argument("jarque_bera: need n >= 8");
    const auto s = descriptive_stats(xs);
    const double n = static_cast<double>(s.n);
    TestResult t;
    t.df = 2;
    t.statistic = n / 6.0 * (s.skewness * s.skewness + std::pow(s.kurtosis - 3.0, 2) / 4.0);
    t.p_value = chi2_sf(t.statistic, 2);
    t.reject_at_5pct = t.p_value < 0.05;
    return t;
}

TestResult jarque_bera(const ReturnSeries& r) { return jarque_bera(r.returns); }

TestResult adf_test(const std::vector<double>& xs, int lags) {
    const int n = static_cast<int>(xs.size());
    if (lags < 0) throw std::invalid_argument("adf_test: negative lag order");
    if (n <= lags + 11) throw std::invalid_argument("adf_test: insufficient observations");

    // dy_t = c + rho*y_{t-1} + sum phi_i dy_{t-i} + e_t
    const int start = lags + 1;
    const int rows = n - 1 - lags;
    const int cols = 2 + lags;
    Eigen::MatrixXd X(rows, cols);
    Eigen::VectorXd y(rows);
    for (int t = start; t < n; ++t) {
        const int i = t - start;
        y(i) = xs[t] - xs[t - 1];
        X(i, 0) = 1.0;
        X(i, 1) = xs[t - 1];
        for (int j = 1; j <= lags; ++j) X(i, 1 + j) = xs[t - j] - xs[t - j - 1];
    }
    detail::OlsFit f;
    try {
        f = detail::ols(X, y);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("adf_test: degenerate regression");
    }
    TestResult t;
    t.df = lags;
    t.statistic = detail::ols_t_ratio(X, y, f, 1);

    const double c1 = interp_crit(kAdfCrit1, rows);
    const double c5 = interp_crit(kAdfCrit5, rows);
    const double c10 = interp_crit(kAdfCrit10, rows);
    t.reject_at_5pct = t.statistic < c5;

    // Piecewise-linear p-value through the tabulated points, exponential
    // tails beyond them. Approximate by construction.
    const double s = t.statistic;
    if (s <= c1)
        t.p_value = 0.01 * std::exp(s - c1);
    else if (s <= c5)
        t.p_value = 0.01 + (s - c1) / (c5 - c1) * 0.04;
    else if (s <= c10)
        t.p_value = 0.05 + (s - c5) / (c10 - c5) * 0.05;
    else
        t.p_value = std::min(1.0, 0.10 + (s - c10) * 0.25);
    return t;
}

TestResult adf_test(const ReturnSeries& r, int lags) { return adf_test(r.returns, lags); }

TestResult arch_lm_test(const std::vector<double>& xs, int lags) {
    const int n = static_cast<int>(xs.size());
    if (lags < 1) throw std::invalid_argument("arch_lm_test: need lags >= 1");
    if (n <= lags + 10) throw std::invalid_argument("arch_lm_test: insufficient observations");

    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    std::vector<double> sq(xs.size());
    for (int i = 0; i < n; ++i) sq[i] = (xs[i] - mean) * (xs[i] - mean);

    const int rows = n - lags;
    Eigen::MatrixXd X(rows, lags + 1);
    Eigen::VectorXd y(rows);
    for (int t = lags; t < n; ++t) {
        const int i = t - lags;
        y(i) = sq[t];
        X(i, 0) = 1.0;
        for (int j = 1; j <= lags; ++j) X(i, j) = sq[t - j];
    }
    detail::OlsFit f;
    try {
        f = detail::ols(X, y);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("arch_lm_test: degenerate regression");
    }
    TestResult t;
    t.df = lags;
    t.statistic = static_cast<double>(rows) * f.r_squared;
    t.p_value = chi2_sf(t.statistic, lags);
    t.reject_at_5pct = t.p_value < 0.05;
    return t;
}

TestResult arch_lm_test(const ReturnSeries& r, int lags) { return arch_lm_test(r.returns, lags); }

}  // namespace evar
