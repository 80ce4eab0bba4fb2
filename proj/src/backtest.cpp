#include "evar/backtest.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "ols.hpp"

namespace evar {
namespace {

double chi2_sf(double x, int df) {
    if (x <= 0.0) return 1.0;
    boost::math::chi_squared dist(df);
    return boost::math::cdf(boost::math::complement(dist, x));
}

// Empirical quantile with linear interpolation between order statistics.
double empirical_quantile(std::vector<double> xs, double p) {
    std::sort(xs.begin(), xs.end());
    const double h = p * (static_cast<double>(xs.size()) - 1.0);
    const auto lo = static_cast<std::size_t>(h);
    const auto hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

double xlogy(double x, double y) { return x > 0.0 ? x * std::log(y) : 0.0; }

}  // namespace

std::string to_string(VarFamily f) {
    switch (f) {
        case VarFamily::historical_sim: return "historical_sim";
        case VarFamily::parametric_normal: return "parametric_normal";
        case VarFamily::garch_t: return "garch_t";
        case VarFamily::filtered_hs: return "filtered_hs";
        case VarFamily::evar: return "evar";
    }
    return "unknown";
}

VarFamily var_family_from_string(const std::string& s) {
    if (s == "historical_sim" || s == "hs") return VarFamily::historical_sim;
    if (s == "parametric_normal" || s == "normal") return VarFamily::parametric_normal;
    if (s == "garch_t") return VarFamily::garch_t;
    if (s == "filtered_hs" || s == "fhs") return VarFamily::filtered_hs;
    if (s == "evar") return VarFamily::evar;
    throw std::invalid_argument("unknown VaR model family '" + s + "'");
}

void VarModelSpec::validate() const {
    if (window < 250) throw std::invalid_argument("VarModelSpec: window must be >= 250");
    if (!(alpha > 0.5 && alpha < 1.0)) throw std::invalid_argument("VarModelSpec: alpha must lie in (0.5, 1)");
    if (refit_every < 1) throw std::invalid_argument("VarModelSpec: refit_every must be >= 1");
}

std::size_t HitSequence::count() const {
    return static_cast<std::size_t>(std::count(hits.begin(), hits.end(), true));
}

VarForecastSeries forecast_var(const VarModelSpec& spec, const AlignedDataset& data, Date eval_start,
                               Date eval_end) {
    spec.validate();
    const auto& r = data.returns;
    const auto n = data.size();

    std::size_t i0 = n, i1 = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (i0 == n && !(data.dates[i] < eval_start)) i0 = i;
        if (!(eval_end < data.dates[i])) i1 = i;
    }
    if (i0 == n || i1 == n || i1 < i0) throw std::invalid_argument("forecast_var: empty evaluation range");
    if (i0 < spec.window)
        throw std::invalid_argument("forecast_var: insufficient history before the evaluation range");

    VarForecastSeries out;
    out.model_id = to_string(spec.family);
    out.alpha = spec.alpha;
    const double rate = 1.0 - spec.alpha;

    if (spec.family == VarFamily::historical_sim) {
        for (std::size_t t = i0; t <= i1; ++t) {
            std::vector<double> w(r.begin() + static_cast<long>(t - spec.window), r.begin() + static_cast<long>(t));
            out.dates.push_back(data.dates[t]);
            out.var_forecasts.push_back(empirical_quantile(std::move(w), rate));
        }
        return out;
    }

    const Innovation dist =
        spec.family == VarFamily::garch_t ? Innovation::student_t : Innovation::normal;

    // GARCH-family rolling forecast: refit on the trailing window every
    // `refit_every` steps, advance the variance recursion with fixed
    // parameters in between.
    std::optional<GarchFit> fit;
    double sigma2_next = 0.0;  // one-step-ahead variance for the current t
    double tail_scale = 0.0;   // quantile/expectile multiplier on sigma

    for (std::size_t t = i0; t <= i1; ++t) {
        const bool refit_due = (t - i0) % static_cast<std::size_t>(spec.refit_every) == 0;
        if (refit_due || !fit) {
            std::vector<double> w(r.begin() + static_cast<long>(t - spec.window), r.begin() + static_cast<long>(t));
            try {
                GarchFit f = garch_fit(w, dist);
                switch (spec.family) {
                    case VarFamily::parametric_normal:
                        tail_scale = boost::math::quantile(boost::math::normal(), rate);
                        break;
                    case VarFamily::garch_t: {
                        const double nu = f.params.nu;
                        tail_scale = boost::math::quantile(boost::math::students_t(nu), rate) *
                                     std::sqrt((nu - 2.0) / nu);
                        break;
                    }
                    case VarFamily::filtered_hs:
                        tail_scale = empirical_quantile(f.std_residuals, rate);
                        break;
                    case VarFamily::evar: {
                        const auto tau = calibrate_tau(f.std_residuals, spec.alpha);
                        tail_scale = sample_expectile(f.std_residuals, tau);
                        break;
                    }
                    default: break;
                }
                sigma2_next = garch_variance_step(f.params, r[t - 1], f.cond_variance.back());
                fit = std::move(f);
            } catch (const std::exception&) {
                if (!fit) throw;  // no earlier fit to carry forward
                ++out.carried_forward;
                sigma2_next = garch_variance_step(fit->params, r[t - 1], sigma2_next);
            }
        } else {
            sigma2_next = garch_variance_step(fit->params, r[t - 1], sigma2_next);
        }
        out.dates.push_back(data.dates[t]);
        out.var_forecasts.push_back(fit->params.mean_mu + std::sqrt(sigma2_next) * tail_scale);
    }
    return out;
}

HitSequence hit_sequence(const std::vector<double>& returns, const VarForecastSeries& forecasts) {
    if (returns.size() != forecasts.var_forecasts.size())
        throw std::invalid_argument("hit_sequence: length mismatch");
    HitSequence h;
    h.hits.resize(returns.size());
    for (std::size_t i = 0; i < returns.size(); ++i) h.hits[i] = returns[i] < forecasts.var_forecasts[i];
    return h;
}

TestResult kupiec_uc(const HitSequence& hits, double alpha) {
    const auto n = hits.hits.size();
    if (n < 1) throw std::invalid_argument("kupiec_uc: empty hit sequence");
    const double x = static_cast<double>(hits.count());
    const double dn = static_cast<double>(n);
    const double p0 = 1.0 - alpha;
    const double ph = x / dn;

    TestResult t;
    t.df = 1;
    const double ll0 = xlogy(x, p0) + xlogy(dn - x, 1.0 - p0);
    const double ll1 = xlogy(x, ph) + xlogy(dn - x, 1.0 - ph);
    t.statistic = std::max(0.0, -2.0 * (ll0 - ll1));
    if (ph == p0) t.statistic = 0.0;
    t.p_value = chi2_sf(t.statistic, 1);
    t.reject_at_5pct = t.p_value < 0.05;
    return t;
}

TestResult christoffersen_cc(const HitSequence& hits, double alpha) {
    const auto n = hits.hits.size();
    if (n < 2) throw std::invalid_argument("christoffersen_cc: need at least 2 observations");
    double n00 = 0, n01 = 0, n10 = 0, n11 = 0;
    for (std::size_t t = 1; t < n; ++t) {
        const bool a = hits.hits[t - 1], b = hits.hits[t];
        if (!a && !b) ++n00;
        else if (!a && b) ++n01;
        else if (a && !b) ++n10;
        else ++n11;
    }
    const double pi01 = (n00 + n01) > 0 ? n01 / (n00 + n01) : 0.0;
    const double pi11 = (n10 + n11) > 0 ? n11 / (n10 + n11) : 0.0;
    const double pi = (n01 + n11) / (n00 + n01 + n10 + n11);

    const double ll_ind = xlogy(n01, pi01) + xlogy(n00, 1.0 - pi01) + xlogy(n11, pi11) + xlogy(n10, 1.0 - pi11);
    const double ll_null = xlogy(n01 + n11, pi) + xlogy(n00 + n10, 1.0 - pi);
    const double lr_ind = std::max(0.0, -2.0 * (ll_null - ll_ind));

    TestResult t;
    t.df = 2;
    t.statistic = kupiec_uc(hits, alpha).statistic + lr_ind;
    t.p_value = chi2_sf(t.statistic, 2);
    t.reject_at_5pct = t.p_value < 0.05;
    return t;
}

TestResult dq_test(const HitSequence& hits, const VarForecastSeries& forecasts, double alpha, int lags) {
    const int n = static_cast<int>(hits.hits.size());
    if (hits.hits.size() != forecasts.var_forecasts.size())
        throw std::invalid_argument("dq_test: length mismatch");
    if (lags < 1) throw std::invalid_argument("dq_test: need lags >= 1");
    if (n <= lags + 10) throw std::invalid_argument("dq_test: insufficient observations");

    const double p0 = 1.0 - alpha;
    std::vector<double> dev(hits.hits.size());
    for (std::size_t i = 0; i < dev.size(); ++i) dev[i] = (hits.hits[i] ? 1.0 : 0.0) - p0;

    const double f0 = forecasts.var_forecasts[0];
    bool const_forecast = true;
    for (double f : forecasts.var_forecasts)
        if (f != f0) { const_forecast = false; break; }

    const int q = lags + (const_forecast ? 1 : 2);
    const int rows = n - lags;
    Eigen::MatrixXd X(rows, q);
    Eigen::VectorXd v(rows);
    for (int t = lags; t < n; ++t) {
        const int i = t - lags;
        v(i) = dev[static_cast<std::size_t>(t)];
        X(i, 0) = 1.0;
        for (int j = 1; j <= lags; ++j) X(i, j) = dev[static_cast<std::size_t>(t - j)];
        if (!const_forecast) X(i, lags + 1) = forecasts.var_forecasts[static_cast<std::size_t>(t)];
    }

    TestResult t;
    t.df = q;
    if (const_forecast) t.note = "forecast regressor dropped (constant forecasts)";
    Eigen::VectorXd beta = (X.transpose() * X).ldlt().solve(X.transpose() * v);
    t.statistic = beta.dot(X.transpose() * X * beta) / (p0 * (1.0 - p0));
    t.p_value = chi2_sf(t.statistic, q);
    t.reject_at_5pct = t.p_value < 0.05;
    return t;
}

double asymmetric_linear_loss(const std::vector<double>& returns, const VarForecastSeries& forecasts,
                              double alpha) {
    if (returns.size() != forecasts.var_forecasts.size())
        throw std::invalid_argument("asymmetric_linear_loss: length mismatch");
    const double rate = 1.0 - alpha;
    double loss = 0.0;
    for (std::size_t i = 0; i < returns.size(); ++i) {
        const double d = returns[i] - forecasts.var_forecasts[i];
        const double ind = returns[i] < forecasts.var_forecasts[i] ? 1.0 : 0.0;
        loss += (rate - ind) * d;
    }
    return loss;
}

double quadratic_loss(const std::vector<double>& returns, const VarForecastSeries& forecasts) {
    if (returns.size() != forecasts.var_forecasts.size())
        throw std::invalid_argument("quadratic_loss: length mismatch");
    double sum = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < returns.size(); ++i) {
        if (returns[i] < forecasts.var_forecasts[i]) {
            const double d = returns[i] - forecasts.var_forecasts[i];
            sum += d * d;
            ++k;
        }
    }
    return k > 0 ? sum / static_cast<double>(k) : 0.0;
}

bool BacktestReport::any_failed() const {
    return std::any_of(cells.begin(), cells.end(), [](const BacktestCell& c) { return c.failed; });
}

BacktestReport run_backtest(const AlignedDataset& data, const std::vector<VarModelSpec>& specs,
                            const std::vector<double>& alphas, Date eval_start, Date eval_end, int workers) {
    if (specs.empty() || alphas.empty()) throw std::invalid_argument("run_backtest: empty specs or alphas");
    BacktestReport report;
    report.cells.resize(specs.size() * alphas.size());

    auto run_cell = [&](std::size_t si, std::size_t ai) {
        VarModelSpec spec = specs[si];
        spec.alpha = alphas[ai];
        BacktestCell& cell = report.cells[si * alphas.size() + ai];
        cell.model_id = to_string(spec.family);
        cell.alpha = spec.alpha;
        try {
            auto fc = forecast_var(spec, data, eval_start, eval_end);
            std::vector<double> realized;
            realized.reserve(fc.dates.size());
            std::size_t di = 0;
            for (const auto& d : fc.dates) {
                while (di < data.size() && data.dates[di] < d) ++di;
                realized.push_back(data.returns[di]);
            }
            auto hits = hit_sequence(realized, fc);
            cell.n_obs = hits.hits.size();
            cell.n_violations = hits.count();
            cell.violation_rate = static_cast<double>(cell.n_violations) / static_cast<double>(cell.n_obs);
            cell.uc = kupiec_uc(hits, spec.alpha);
            cell.cc = christoffersen_cc(hits, spec.alpha);
            cell.dq = dq_test(hits, fc, spec.alpha);
            cell.loss_all = asymmetric_linear_loss(realized, fc, spec.alpha);
            cell.loss_all_mean = cell.loss_all / static_cast<double>(cell.n_obs);
            cell.loss_quadratic = quadratic_loss(realized, fc);
        } catch (const std::exception& e) {
            cell.failed = true;
            cell.error = e.what();
        }
    };

    std::vector<std::pair<std::size_t, std::size_t>> jobs;
    for (std::size_t si = 0; si < specs.size(); ++si)
        for (std::size_t ai = 0; ai < alphas.size(); ++ai) jobs.emplace_back(si, ai);

    if (workers <= 1 || jobs.size() <= 1) {
        for (auto [si, ai] : jobs) run_cell(si, ai);
    } else {
        std::mutex mtx;
        std::size_t next = 0;
        auto worker = [&]() {
            for (;;) {
                std::size_t j;
                {
                    std::lock_guard lock(mtx);
                    if (next >= jobs.size()) return;
                    j = next++;
                }
                run_cell(jobs[j].first, jobs[j].second);
            }
        };
        std::vector<std::thread> pool;
        const int nthreads = std::min<int>(workers, static_cast<int>(jobs.size()));
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return report;
}

}  // namespace evar
