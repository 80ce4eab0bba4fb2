#include "evar/garch.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "nelder_mead.hpp"

namespace evar {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMinNu = 2.1;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

struct Transformed {
    GarchParams p;
};

// Unconstrained coordinates -> admissible parameters. Persistence is kept
// strictly below 1 via s = logistic(.), split between alpha and beta.
GarchParams decode(const std::vector<double>& x, Innovation dist) {
    GarchParams p;
    p.mean_mu = x[0];
    p.omega = std::exp(x[1]);
    const double s = logistic(x[2]) * 0.9999;
    const double v = logistic(x[3]);
    p.alpha_g = s * v;
    p.beta_g = s * (1.0 - v);
    if (dist == Innovation::student_t) p.nu = kMinNu + std::exp(x[4]);
    return p;
}

// Negative log-likelihood; also fills the variance path when requested.
double garch_nll(const std::vector<double>& r, const GarchParams& p, Innovation dist,
                 std::vector<double>* var_out = nullptr) {
    const std::size_t n = r.size();
    double mean = 0.0, var0 = 0.0;
    for (double x : r) mean += x;
    mean /= static_cast<double>(n);
    for (double x : r) var0 += (x - mean) * (x - mean);
    var0 /= static_cast<double>(n);

    double tconst = 0.0;
    if (dist == Innovation::student_t)
        tconst = std::lgamma((p.nu + 1.0) / 2.0) - std::lgamma(p.nu / 2.0) -
                 0.5 * std::log(kPi * (p.nu - 2.0));

    double nll = 0.0;
    double sigma2 = var0;
    double prev_eps2 = var0;
    if (var_out) var_out->resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) sigma2 = p.omega + p.alpha_g * prev_eps2 + p.beta_g * sigma2;
        if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) return 1e30;
        if (var_out) (*var_out)[t] = sigma2;
        const double eps = r[t] - p.mean_mu;
        if (dist == Innovation::normal) {
            nll += 0.5 * (std::log(2.0 * kPi) + std::log(sigma2) + eps * eps / sigma2);
        } else {
            const double z2 = eps * eps / sigma2;
            nll -= tconst - 0.5 * std::log(sigma2) -
                   (p.nu + 1.0) / 2.0 * std::log1p(z2 / (p.nu - 2.0));
        }
        prev_eps2 = eps * eps;
    }
    return std::isfinite(nll) ? nll : 1e30;
}

}  // namespace

void GarchParams::validate() const {
    if (!(omega > 0.0)) throw std::invalid_argument("GarchParams: omega must be positive");
    if (alpha_g < 0.0 || beta_g < 0.0) throw std::invalid_argument("GarchParams: negative arch/garch term");
    if (!(alpha_g + beta_g < 1.0)) throw std::invalid_argument("GarchParams: persistence must be below 1");
    if (!(nu > 2.0)) throw std::invalid_argument("GarchParams: nu must exceed 2");
}

double garch_log_likelihood(const std::vector<double>& returns, const GarchParams& params,
                            Innovation dist) {
    if (returns.size() < 2) throw std::invalid_argument("garch_log_likelihood: series too short");
    params.validate();
    return -garch_nll(returns, params, dist);
}

GarchFit garch_fit(const std::vector<double>& returns, Innovation dist) {
    const std::size_t n = returns.size();
    if (n < 250) throw std::invalid_argument("garch_fit: series too short (need n >= 250)");

    if (*std::min_element(returns.begin(), returns.end()) ==
        *std::max_element(returns.begin(), returns.end()))
        throw std::invalid_argument("garch_fit: degenerate series");
    double mean = 0.0, var = 0.0;
    for (double x : returns) mean += x;
    mean /= static_cast<double>(n);
    for (double x : returns) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n - 1);
    if (!(var > 0.0)) throw std::invalid_argument("garch_fit: degenerate series");

    // Moment-matched start: alpha 0.05, beta 0.90, omega 5% of sample variance.
    std::vector<double> x0 = {mean, std::log(0.05 * var), logit(0.95), logit(0.05 / 0.95)};
    if (dist == Innovation::student_t) x0.push_back(std::log(8.0 - kMinNu));

    auto objective = [&](const std::vector<double>& x) { return garch_nll(returns, decode(x, dist), dist); };

    auto res = detail::nelder_mead(objective, x0, 0.5, 1e-12, 40000);
    // Polish from the first optimum with a smaller simplex.
    auto res2 = detail::nelder_mead(objective, res.x, 0.05, 1e-13, 20000);
    if (res2.fmin < res.fmin) res = res2;

    GarchFit fit;
    fit.dist = dist;
    fit.params = decode(res.x, dist);
    std::vector<double> varpath;
    fit.log_likelihood = -garch_nll(returns, fit.params, dist, &varpath);
    fit.cond_variance = std::move(varpath);
    fit.std_residuals.resize(n);
    for (std::size_t t = 0; t < n; ++t)
        fit.std_residuals[t] = (returns[t] - fit.params.mean_mu) / std::sqrt(fit.cond_variance[t]);
    fit.at_boundary = fit.params.alpha_g + fit.params.beta_g > 0.998;
    return fit;
}

GarchFit garch_fit(const ReturnSeries& r, Innovation dist) { return garch_fit(r.returns, dist); }

std::vector<double> garch_simulate(const GarchParams& params, std::size_t n, Innovation dist,
                                   std::uint64_t seed) {
    params.validate();
    if (n < 1) throw std::invalid_argument("garch_simulate: n must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::chi_squared_distribution<double> chi2(params.nu);

    auto draw = [&]() {
        if (dist == Innovation::normal) return normal(rng);
        // standardized student-t (unit variance)
        const double z = normal(rng);
        const double w = chi2(rng);
        return z / std::sqrt(w / params.nu) * std::sqrt((params.nu - 2.0) / params.nu);
    };

    std::vector<double> r(n);
    double sigma2 = params.omega / (1.0 - params.alpha_g - params.beta_g);
    double prev_eps = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) sigma2 = params.omega + params.alpha_g * prev_eps * prev_eps + params.beta_g * sigma2;
        const double eps = std::sqrt(sigma2) * draw();
        r[t] = params.mean_mu + eps;
        prev_eps = eps;
    }
    return r;
}

double garch_variance_step(const GarchParams& p, double prev_return, double prev_variance) {
    const double eps = prev_return - p.mean_mu;
    return p.omega + p.alpha_g * eps * eps + p.beta_g * prev_variance;
}

std::vector<double> garch_forecast(const GarchFit& fit, const std::vector<double>& returns, int horizon) {
    if (horizon < 1) throw std::invalid_argument("garch_forecast: horizon must be >= 1");
    if (returns.empty() || fit.cond_variance.size() != returns.size())
        throw std::invalid_argument("garch_forecast: fit/sample mismatch");
    const GarchParams& p = fit.params;
    std::vector<double> out(static_cast<std::size_t>(horizon));
    double s2 = garch_variance_step(p, returns.back(), fit.cond_variance.back());
    out[0] = s2;
    for (int h = 1; h < horizon; ++h) {
        s2 = p.omega + (p.alpha_g + p.beta_g) * s2;
        out[static_cast<std::size_t>(h)] = s2;
    }
    return out;
}

CareFit care_fit(const std::vector<double>& returns, ExpectileLevel tau, Innovation dist) {
    CareFit c;
    c.garch = garch_fit(returns, dist);
    c.tau = tau;
    c.xi_tau = sample_expectile(c.garch.std_residuals, tau);
    c.evar_path.resize(returns.size());
    for (std::size_t t = 0; t < returns.size(); ++t)
        c.evar_path[t] = c.garch.params.mean_mu + std::sqrt(c.garch.cond_variance[t]) * c.xi_tau;
    return c;
}

CareFit care_fit(const ReturnSeries& r, ExpectileLevel tau, Innovation dist) {
    return care_fit(r.returns, tau, dist);
}

}  // namespace evar
