#pragma once

#include <vector>

#include "evar/series.hpp"

namespace evar {

struct DescriptiveStats {
    std::size_t n = 0;
    double mean = 0.0;
    double std_dev = 0.0;   // n-1 denominator
    double skewness = 0.0;  // standardized third central moment
    double kurtosis = 0.0;  // non-excess (normal = 3)
    double min = 0.0;
    double max = 0.0;
};

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int df = 0;  // degrees of freedom, or lag order for ADF
    bool reject_at_5pct = false;
    std::string note;  // degenerate-regressor flags etc.
};

DescriptiveStats descriptive_stats(const std::vector<double>& xs);
DescriptiveStats descriptive_stats(const ReturnSeries& r);

// JB = n/6 * (S^2 + (K-3)^2/4), chi-square with 2 df.
TestResult jarque_bera(const std::vector<double>& xs);
TestResult jarque_bera(const ReturnSeries& r);

// Augmented Dickey-Fuller with constant. Statistic is the t-ratio on the
// level coefficient; the 5% decision comes from tabulated critical values
// (constant-only case) interpolated in sample size. The p-value is an
// interpolation between the tabulated 1/5/10% points and should be read as
// approximate.
TestResult adf_test(const std::vector<double>& xs, int lags = 1);
TestResult adf_test(const ReturnSeries& r, int lags = 1);

// Engle's LM test: squared demeaned series regressed on its own lags,
// statistic n*R^2 against chi-square with `lags` df.
TestResult arch_lm_test(const std::vector<double>& xs, int lags = 5);
TestResult arch_lm_test(const ReturnSeries& r, int lags = 5);

}  // namespace evar
