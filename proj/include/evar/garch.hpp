#pragma once

#include <cstdint>
#include <vector>

#include "evar/expectile.hpp"
#include "evar/series.hpp"

namespace evar {

enum class Innovation { normal, student_t };

struct GarchParams {
    double omega = 1e-6;   // > 0
    double alpha_g = 0.05;  // >= 0
    double beta_g = 0.90;   // >= 0, alpha_g + beta_g < 1
    double mean_mu = 0.0;
    double nu = 8.0;  // student-t degrees of freedom, used when dist == student_t

    void validate() const;
};

struct GarchFit {
    GarchParams params;
    Innovation dist = Innovation::normal;
    std::vector<double> cond_variance;   // sigma_t^2, same length as sample
    std::vector<double> std_residuals;   // (r_t - mu) / sigma_t
    double log_likelihood = 0.0;
    bool at_boundary = false;  // persistence pinned near the stationarity edge
};

// Log-likelihood of a parameter set on a sample (sigma_0^2 at the sample
// variance, as in garch_fit).
double garch_log_likelihood(const std::vector<double>& returns, const GarchParams& params, Innovation dist);

// Quasi-maximum-likelihood GARCH(1,1) fit with constant conditional mean.
// sigma_0^2 is initialized at the sample variance. Requires n >= 250.
GarchFit garch_fit(const std::vector<double>& returns, Innovation dist = Innovation::normal);
GarchFit garch_fit(const ReturnSeries& r, Innovation dist = Innovation::normal);

// Simulates r_t = mu + sigma_t z_t with the GARCH(1,1) variance recursion.
// Deterministic for a fixed seed.
std::vector<double> garch_simulate(const GarchParams& params, std::size_t n, Innovation dist,
                                   std::uint64_t seed);

// Variance forecasts sigma^2_{T+1..T+horizon} continuing the recursion from
// the end of the fitted sample.
std::vector<double> garch_forecast(const GarchFit& fit, const std::vector<double>& returns, int horizon);

// One-step variance update with fixed parameters.
double garch_variance_step(const GarchParams& p, double prev_return, double prev_variance);

struct CareFit {
    GarchFit garch;
    double tau = 0.5;
    double xi_tau = 0.0;              // sample expectile of standardized residuals
    std::vector<double> evar_path;    // mu + sigma_t * xi_tau
};

// Two-step conditional autoregressive expectile fit: GARCH QMLE, then the
// standardized expectile of the residuals scaled back by the volatility path.
CareFit care_fit(const std::vector<double>& returns, ExpectileLevel tau,
                 Innovation dist = Innovation::normal);
CareFit care_fit(const ReturnSeries& r, ExpectileLevel tau, Innovation dist = Innovation::normal);

}  // namespace evar
