#pragma once

#include <Eigen/Dense>
#include <vector>

#include "evar/expectile.hpp"
#include "evar/series.hpp"
#include "evar/stats.hpp"

namespace evar {

// Tsay's arranged-autoregression F test for threshold nonlinearity. Cases
// are ordered by the threshold variable r_{t-d}, one-step-ahead standardized
// predictive residuals are produced by recursive least squares, and the F
// statistic tests whether those residuals are explained by the AR regressors.
TestResult tsay_threshold_test(const std::vector<double>& r, int delay_d = 1, int p = 1);
TestResult tsay_threshold_test(const ReturnSeries& r, int delay_d = 1, int p = 1);

struct ThresholdModel {
    double gamma = 0.0;
    int delay_d = 1;
    int p = 1;
    Eigen::VectorXd lower_coefficients;  // regime r_{t-d} <= gamma
    Eigen::VectorXd upper_coefficients;  // regime r_{t-d} >  gamma
    double aic = 0.0;
    double combined_loss = 0.0;
    std::size_t n_lower = 0;
    std::size_t n_upper = 0;
};

// Per-candidate AIC over the grid, kept for reporting.
struct ThresholdCandidate {
    double gamma = 0.0;
    double aic = 0.0;
    bool admissible = false;
};

// Fits the two-regime expectile model for every candidate threshold and
// returns the AIC minimizer. AIC(gamma) = T ln(SSR(gamma)) + 2k with SSR the
// combined asymmetric squared loss and k = 2(p+1). Candidates leaving fewer
// than 10(p+1) points on either side are skipped. Ties break toward the
// candidate nearest the sample median of the threshold variable.
ThresholdModel threshold_expectile_grid_search(const std::vector<double>& r, ExpectileLevel tau, int delay_d,
                                               int p, const std::vector<double>& grid,
                                               std::vector<ThresholdCandidate>* candidates_out = nullptr);

struct RegimeModel {
    int k_regimes = 1;
    double tau = 0.5;
    int p = 1;
    std::vector<std::vector<double>> transition;       // row-stochastic
    std::vector<Eigen::VectorXd> coefficients;         // per regime, intercept first
    std::vector<double> scales;                        // pseudo-density scale per regime
    std::vector<std::vector<double>> smoothed_probs;   // [t][j]
    double log_likelihood_proxy = 0.0;
    std::vector<double> ll_trace;  // per-iteration objective, nondecreasing
    int iterations = 0;
    bool converged = false;
};

// Hidden-Markov expectile regression estimated by EM. The per-regime
// emission is the normalized asymmetric-normal kernel
// exp(-loss/b) / Z(b), so forward-backward smoothing and the weighted
// expectile regressions form a proper EM whose objective is monotone. Regimes
// are relabeled with intercepts ascending.
RegimeModel fit_regime_switching_expectile(const std::vector<double>& r, int k_regimes, ExpectileLevel tau,
                                           int p, int max_iter = 500, double tol = 1e-6);

struct DynamicTauParams {
    double delta0 = 0.0, delta1 = 0.0, delta2 = 0.0, delta3 = 0.0;
};

// tau_t = Phi(d0 + d1*tau_{t-1} + d2*sigma2_{t-1} + d3*|r_{t-1}|). The paths
// hold the lagged drivers; outputs are strictly inside (0,1).
std::vector<double> dynamic_tau_path(const DynamicTauParams& params, double tau0,
                                     const std::vector<double>& sigma2_path,
                                     const std::vector<double>& abs_return_path);

struct AdaptiveThresholdPath {
    std::vector<double> gamma;
    std::size_t clamp_events = 0;  // inner argument forced back into (0,1)
};

// gamma_t = Phi^{-1}(d0 + d1*gamma_{t-1} + d2*vix_{t-1} + d3*|r_{t-1}|), with
// the inner argument clamped to [1e-6, 1-1e-6] before the inverse CDF.
AdaptiveThresholdPath adaptive_threshold_path(const DynamicTauParams& params, double gamma0,
                                              const std::vector<double>& vix_path,
                                              const std::vector<double>& abs_return_path);

struct MeanExcessPoint {
    double threshold = 0.0;
    double mean_excess = 0.0;
    std::size_t count = 0;
    bool valid = false;  // false when no observation exceeds the threshold
};

// Mean residual life table: e(u) = mean(x - u | x > u).
std::vector<MeanExcessPoint> mean_excess_curve(const std::vector<double>& xs,
                                               const std::vector<double>& thresholds);

struct GpdFit {
    double xi = 0.0;       // shape
    double sigma = 1.0;    // scale, > 0
    std::size_t n_exceedances = 0;
    double log_likelihood = 0.0;
};

// Maximum-likelihood generalized Pareto fit to positive excesses, via a
// profile over theta = xi/sigma with closed-form conditional shape.
GpdFit gpd_fit(const std::vector<double>& excesses);

}  // namespace evar
