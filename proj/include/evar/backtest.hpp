#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evar/garch.hpp"
#include "evar/series.hpp"
#include "evar/stats.hpp"

namespace evar {

enum class VarFamily { historical_sim, parametric_normal, garch_t, filtered_hs, evar };

std::string to_string(VarFamily f);
VarFamily var_family_from_string(const std::string& s);

struct VarModelSpec {
    VarFamily family = VarFamily::historical_sim;
    std::size_t window = 250;    // trailing estimation window
    double alpha = 0.95;         // confidence level, violations target 1-alpha
    int refit_every = 25;        // GARCH-family refit cadence in observations

    void validate() const;
};

struct VarForecastSeries {
    std::vector<Date> dates;
    std::vector<double> var_forecasts;  // return units, lower tail => typically negative
    std::string model_id;
    double alpha = 0.95;
    std::size_t carried_forward = 0;  // forecasts reusing the last successful fit
};

struct HitSequence {
    std::vector<bool> hits;  // hit_t = 1{r_t < VaR_t}
    [[nodiscard]] std::size_t count() const;
};

// One-step-ahead out-of-sample forecasts over [eval_start, eval_end]
// (dates present in `data`). Requires `window` observations of history
// before the first evaluation date.
VarForecastSeries forecast_var(const VarModelSpec& spec, const AlignedDataset& data, Date eval_start,
                               Date eval_end);

HitSequence hit_sequence(const std::vector<double>& returns, const VarForecastSeries& forecasts);

// Kupiec unconditional coverage likelihood ratio, chi-square 1 df.
TestResult kupiec_uc(const HitSequence& hits, double alpha);

// Christoffersen conditional coverage: LR_uc + first-order independence LR,
// chi-square 2 df.
TestResult christoffersen_cc(const HitSequence& hits, double alpha);

// Dynamic quantile test: hit deviations regressed on their own lags and the
// VaR forecast; Wald statistic against chi-square (lags+2) df. A constant
// forecast regressor is dropped and flagged in the result note.
TestResult dq_test(const HitSequence& hits, const VarForecastSeries& forecasts, double alpha, int lags = 4);

// Check-style loss with weight `1-alpha` bound to the target violation rate:
// sum (rate - 1{r < VaR}) (r - VaR). Lower is better.
double asymmetric_linear_loss(const std::vector<double>& returns, const VarForecastSeries& forecasts,
                              double alpha);

// Mean squared exceedance over violation observations only; 0 with no
// violations.
double quadratic_loss(const std::vector<double>& returns, const VarForecastSeries& forecasts);

struct BacktestCell {
    std::string model_id;
    double alpha = 0.95;
    std::size_t n_obs = 0;
    std::size_t n_violations = 0;
    double violation_rate = 0.0;
    TestResult uc, cc, dq;
    double loss_all = 0.0;
    double loss_all_mean = 0.0;
    double loss_quadratic = 0.0;
    bool failed = false;
    std::string error;
};

struct BacktestReport {
    std::uint64_t seed = 0;  // echoed for reproducibility; the battery itself is deterministic
    std::vector<BacktestCell> cells;
    [[nodiscard]] bool any_failed() const;
};

// Full battery: forecasts, hits, UC/CC/DQ and both losses for every
// spec x alpha cell. Cells are independent; `workers` > 1 runs them
// concurrently. A failing cell is recorded, not fatal.
BacktestReport run_backtest(const AlignedDataset& data, const std::vector<VarModelSpec>& specs,
                            const std::vector<double>& alphas, Date eval_start, Date eval_end,
                            int workers = 1);

}  // namespace evar
