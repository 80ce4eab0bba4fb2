#include "evar/regime.hpp"

#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ols.hpp"

namespace evar {
namespace {

constexpr double kPi = 3.14159265358979323846;

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double norm_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

// Lagged AR design: y_t = r[t], x_t = (1, r[t-1], ..., r[t-p]), threshold
// variable r[t-d]. Cases start at max(p, d).
struct ArCases {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<double> threshold_var;
};

ArCases build_ar_cases(const std::vector<double>& r, int p, int d) {
    const int n = static_cast<int>(r.size());
    const int start = std::max(p, d);
    const int rows = n - start;
    if (rows <= 0) throw std::invalid_argument("insufficient data for lag structure");
    ArCases c;
    c.X.resize(rows, p + 1);
    c.y.resize(rows);
    c.threshold_var.resize(static_cast<std::size_t>(rows));
    for (int t = start; t < n; ++t) {
        const int i = t - start;
        c.y(i) = r[static_cast<std::size_t>(t)];
        c.X(i, 0) = 1.0;
        for (int j = 1; j <= p; ++j) c.X(i, j) = r[static_cast<std::size_t>(t - j)];
        c.threshold_var[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(t - d)];
    }
    return c;
}

}  // namespace

TestResult tsay_threshold_test(const std::vector<double>& r, int delay_d, int p) {
    if (p < 1 || delay_d < 1) throw std::invalid_argument("tsay_threshold_test: need p >= 1 and d >= 1");
    const int k = p + 1;
    const int n = static_cast<int>(r.size());
    if (n <= 4 * k + 20) throw std::invalid_argument("tsay_threshold_test: insufficient data");

    auto c = build_ar_cases(r, p, delay_d);
    const int rows = static_cast<int>(c.X.rows());

    std::vector<int> order(static_cast<std::size_t>(rows));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return c.threshold_var[static_cast<std::size_t>(a)] <
                                         c.threshold_var[static_cast<std::size_t>(b)]; });

    // Start-up regression on the first b arranged cases.
    const int b = rows / 10 + k;
    if (b + k + 10 >= rows) throw std::invalid_argument("tsay_threshold_test: insufficient data");

    Eigen::MatrixXd Xb(b, k);
    Eigen::VectorXd yb(b);
    for (int i = 0; i < b; ++i) {
        Xb.row(i) = c.X.row(order[static_cast<std::size_t>(i)]);
        yb(i) = c.y(order[static_cast<std::size_t>(i)]);
    }
    Eigen::MatrixXd XtX = Xb.transpose() * Xb;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(XtX);
    if (!lu.isInvertible()) throw std::invalid_argument("tsay_threshold_test: degenerate regression");
    Eigen::MatrixXd P = lu.inverse();
    Eigen::VectorXd beta = P * (Xb.transpose() * yb);

    // Recursive least squares over the remaining arranged cases, collecting
    // standardized one-step-ahead predictive residuals.
    const int m = rows - b;
    Eigen::MatrixXd Xe(m, k);
    Eigen::VectorXd e(m);
    for (int i = b; i < rows; ++i) {
        const Eigen::VectorXd x = c.X.row(order[static_cast<std::size_t>(i)]).transpose();
        const double yv = c.y(order[static_cast<std::size_t>(i)]);
        const Eigen::VectorXd Px = P * x;
        const double denom = 1.0 + x.dot(Px);
        const double resid = yv - x.dot(beta);
        e(i - b) = resid / std::sqrt(denom);
        Xe.row(i - b) = x.transpose();
        beta += Px * (resid / denom);
        P -= (Px * Px.transpose()) / denom;
    }

    // F test of the predictive residuals against the AR regressors.
    const double ssr0 = e.squaredNorm();
    auto aux = detail::ols(Xe, e);
    const double ssr1 = aux.ssr;
    const double df2 = static_cast<double>(m) - 2.0 * k - 1.0;
    TestResult t;
    t.df = k;
    t.statistic = ((ssr0 - ssr1) / k) / (ssr1 / df2);
    if (t.statistic <= 0.0) {
        t.statistic = std::max(t.statistic, 0.0);
        t.p_value = 1.0;
    } else {
        boost::math::fisher_f fdist(k, df2);
        t.p_value = boost::math::cdf(boost::math::complement(fdist, t.statistic));
    }
    t.reject_at_5pct = t.p_value < 0.05;
    return t;
}

TestResult tsay_threshold_test(const ReturnSeries& r, int delay_d, int p) {
    return tsay_threshold_test(r.returns, delay_d, p);
}

ThresholdModel threshold_expectile_grid_search(const std::vector<double>& r, ExpectileLevel tau, int delay_d,
                                               int p, const std::vector<double>& grid,
                                               std::vector<ThresholdCandidate>* candidates_out) {
    if (grid.empty()) throw std::invalid_argument("threshold_expectile_grid_search: empty grid");
    if (p < 1 || delay_d < 1) throw std::invalid_argument("threshold_expectile_grid_search: need p,d >= 1");
    auto c = build_ar_cases(r, p, delay_d);
    const int rows = static_cast<int>(c.X.rows());
    const std::size_t min_side = 10 * static_cast<std::size_t>(p + 1);
    const int k = 2 * (p + 1);

    std::vector<double> sorted_thr = c.threshold_var;
    std::sort(sorted_thr.begin(), sorted_thr.end());
    const double median = sorted_thr[sorted_thr.size() / 2];

    bool found = false;
    ThresholdModel best;
    double best_aic = 0.0;
    if (candidates_out) candidates_out->clear();

    for (double gamma : grid) {
        std::vector<int> lower_idx, upper_idx;
        for (int i = 0; i < rows; ++i)
            (c.threshold_var[static_cast<std::size_t>(i)] <= gamma ? lower_idx : upper_idx).push_back(i);
        ThresholdCandidate cand{gamma, 0.0, false};
        if (lower_idx.size() >= min_side && upper_idx.size() >= min_side) {
            auto fit_side = [&](const std::vector<int>& idx) {
                Eigen::MatrixXd Xs(idx.size(), p + 1);
                std::vector<double> ys(idx.size());
                for (std::size_t i = 0; i < idx.size(); ++i) {
                    Xs.row(static_cast<Eigen::Index>(i)) = c.X.row(idx[i]);
                    ys[i] = c.y(idx[i]);
                }
                return expectile_regression(Xs, ys, tau);
            };
            try {
                auto lo = fit_side(lower_idx);
                auto hi = fit_side(upper_idx);
                const double ssr = lo.loss + hi.loss;
                const double T = static_cast<double>(rows);
                cand.aic = T * std::log(ssr) + 2.0 * k;
                cand.admissible = true;
                const bool better =
                    !found || cand.aic < best_aic - 1e-12 ||
                    (std::abs(cand.aic - best_aic) <= 1e-12 &&
                     std::abs(gamma - median) < std::abs(best.gamma - median));
                if (better) {
                    found = true;
                    best_aic = cand.aic;
                    best.gamma = gamma;
                    best.delay_d = delay_d;
                    best.p = p;
                    best.lower_coefficients = lo.coefficients;
                    best.upper_coefficients = hi.coefficients;
                    best.aic = cand.aic;
                    best.combined_loss = ssr;
                    best.n_lower = lower_idx.size();
                    best.n_upper = upper_idx.size();
                }
            } catch (const std::invalid_argument&) {
                cand.admissible = false;  // rank-deficient side, skip candidate
            }
        }
        if (candidates_out) candidates_out->push_back(cand);
    }
    if (!found)
        throw std::invalid_argument(
            "threshold_expectile_grid_search: every candidate violates the per-side minimum");
    return best;
}

RegimeModel fit_regime_switching_expectile(const std::vector<double>& r, int k_regimes, ExpectileLevel tau,
                                           int p, int max_iter, double tol) {
    if (k_regimes < 1 || k_regimes > 4)
        throw std::invalid_argument("fit_regime_switching_expectile: K must be in [1,4]");
    if (static_cast<int>(r.size()) < 100 * k_regimes)
        throw std::invalid_argument("fit_regime_switching_expectile: need n >= 100*K");
    auto c = build_ar_cases(r, p, p);
    const int n = static_cast<int>(c.X.rows());
    const int K = k_regimes;
    std::vector<double> y(c.y.data(), c.y.data() + n);

    RegimeModel model;
    model.k_regimes = K;
    model.tau = tau;
    model.p = p;

    if (K == 1) {
        auto fit = expectile_regression(c.X, y, tau);
        model.coefficients = {fit.coefficients};
        model.scales = {2.0 * fit.loss / n};
        model.transition = {{1.0}};
        model.smoothed_probs.assign(static_cast<std::size_t>(n), {1.0});
        model.converged = fit.converged;
        model.iterations = fit.iterations;
        model.log_likelihood_proxy = -fit.loss;
        model.ll_trace = {-fit.loss};
        return model;
    }

    // Emission: normalized asymmetric-normal kernel with scale b.
    const double zc = 0.5 * std::sqrt(kPi) * (1.0 / std::sqrt(tau.tau) + 1.0 / std::sqrt(1.0 - tau.tau));
    auto loss_of = [&](double resid) {
        return (resid <= 0.0 ? 1.0 - tau.tau : tau.tau) * resid * resid;
    };
    auto log_density = [&](double resid, double b) {
        return -loss_of(resid) / b - 0.5 * std::log(b) - std::log(zc);
    };

    // Initialization: common slope fit, intercepts spread by the residual
    // scale so the regimes start distinct.
    auto base = expectile_regression(c.X, y, tau);
    double rsd = std::sqrt(base.loss / n);
    std::vector<Eigen::VectorXd> theta(static_cast<std::size_t>(K), base.coefficients);
    std::vector<double> b(static_cast<std::size_t>(K), std::max(2.0 * base.loss / n, 1e-12));
    for (int j = 0; j < K; ++j)
        theta[static_cast<std::size_t>(j)](0) += rsd * (static_cast<double>(j) - (K - 1) / 2.0);

    std::vector<std::vector<double>> P(static_cast<std::size_t>(K),
                                       std::vector<double>(static_cast<std::size_t>(K), 0.1 / (K - 1)));
    for (int j = 0; j < K; ++j) P[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = 0.9;
    std::vector<double> init(static_cast<std::size_t>(K), 1.0 / K);

    std::vector<std::vector<double>> smoothed(static_cast<std::size_t>(n),
                                              std::vector<double>(static_cast<std::size_t>(K), 0.0));
    std::vector<std::vector<double>> prev_smoothed = smoothed;
    double prev_ll = -1e300;

    Eigen::MatrixXd resid(n, K);
    std::vector<std::vector<double>> logf(static_cast<std::size_t>(n),
                                          std::vector<double>(static_cast<std::size_t>(K)));
    std::vector<std::vector<double>> fwd(static_cast<std::size_t>(n),
                                         std::vector<double>(static_cast<std::size_t>(K)));
    std::vector<std::vector<double>> bwd = fwd;
    std::vector<double> scale(static_cast<std::size_t>(n));

    for (int iter = 1; iter <= max_iter; ++iter) {
        model.iterations = iter;

        for (int j = 0; j < K; ++j) resid.col(j) = c.y - c.X * theta[static_cast<std::size_t>(j)];
        for (int t = 0; t < n; ++t)
            for (int j = 0; j < K; ++j)
                logf[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] =
                    log_density(resid(t, j), b[static_cast<std::size_t>(j)]);

        // Hamilton filter with scaling.
        double ll = 0.0;
        for (int t = 0; t < n; ++t) {
            double norm = 0.0;
            double maxlf = *std::max_element(logf[static_cast<std::size_t>(t)].begin(),
                                             logf[static_cast<std::size_t>(t)].end());
            for (int j = 0; j < K; ++j) {
                double pred = 0.0;
                if (t == 0)
                    pred = init[static_cast<std::size_t>(j)];
                else
                    for (int i = 0; i < K; ++i)
                        pred += fwd[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(i)] *
                                P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                fwd[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] =
                    pred * std::exp(logf[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] - maxlf);
                norm += fwd[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)];
            }
            if (!(norm > 0.0)) throw std::runtime_error("fit_regime_switching_expectile: filter underflow");
            for (int j = 0; j < K; ++j) fwd[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] /= norm;
            scale[static_cast<std::size_t>(t)] = norm;
            ll += std::log(norm) + maxlf;
        }

        // Backward pass.
        for (int j = 0; j < K; ++j) bwd[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(j)] = 1.0;
        for (int t = n - 2; t >= 0; --t) {
            double maxlf = *std::max_element(logf[static_cast<std::size_t>(t + 1)].begin(),
                                             logf[static_cast<std::size_t>(t + 1)].end());
            double norm = 0.0;
            for (int i = 0; i < K; ++i) {
                double s = 0.0;
                for (int j = 0; j < K; ++j)
                    s += P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                         std::exp(logf[static_cast<std::size_t>(t + 1)][static_cast<std::size_t>(j)] - maxlf) *
                         bwd[static_cast<std::size_t>(t + 1)][static_cast<std::size_t>(j)];
                bwd[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] = s;
                norm += s;
            }
            for (int i = 0; i < K; ++i) bwd[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] /= norm;
        }

        // Smoothed state probabilities and expected transition counts.
        double max_change = 0.0;
        for (int t = 0; t < n; ++t) {
            double norm = 0.0;
            for (int j = 0; j < K; ++j) {
                smoothed[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] =
                    fwd[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] *
                    bwd[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)];
                norm += smoothed[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)];
            }
            for (int j = 0; j < K; ++j) {
                smoothed[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] /= norm;
                if (iter > 1)
                    max_change = std::max(max_change,
                                          std::abs(smoothed[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] -
                                                   prev_smoothed[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)]));
            }
        }

        std::vector<std::vector<double>> counts(static_cast<std::size_t>(K),
                                                std::vector<double>(static_cast<std::size_t>(K), 0.0));
        for (int t = 0; t < n - 1; ++t) {
            double maxlf = *std::max_element(logf[static_cast<std::size_t>(t + 1)].begin(),
                                             logf[static_cast<std::size_t>(t + 1)].end());
            double norm = 0.0;
            Eigen::MatrixXd xi(K, K);
            for (int i = 0; i < K; ++i)
                for (int j = 0; j < K; ++j) {
                    xi(i, j) = fwd[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] *
                               P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                               std::exp(logf[static_cast<std::size_t>(t + 1)][static_cast<std::size_t>(j)] - maxlf) *
                               bwd[static_cast<std::size_t>(t + 1)][static_cast<std::size_t>(j)];
                    norm += xi(i, j);
                }
            for (int i = 0; i < K; ++i)
                for (int j = 0; j < K; ++j)
                    counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += xi(i, j) / norm;
        }

        // M-step.
        for (int j = 0; j < K; ++j) {
            std::vector<double> w(static_cast<std::size_t>(n));
            double wsum = 0.0;
            for (int t = 0; t < n; ++t) {
                w[static_cast<std::size_t>(t)] = smoothed[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)];
                wsum += w[static_cast<std::size_t>(t)];
            }
            if (wsum < static_cast<double>(p) + 2.0) continue;  // starved regime, keep parameters
            auto fit = weighted_expectile_regression(c.X, y, w, tau);
            theta[static_cast<std::size_t>(j)] = fit.coefficients;
            b[static_cast<std::size_t>(j)] = std::max(2.0 * fit.loss / wsum, 1e-14);
        }
        for (int i = 0; i < K; ++i) {
            double rowsum = 0.0;
            for (int j = 0; j < K; ++j) rowsum += counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (rowsum > 0.0)
                for (int j = 0; j < K; ++j)
                    P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                        counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] / rowsum;
        }
        for (int j = 0; j < K; ++j) init[static_cast<std::size_t>(j)] = smoothed[0][static_cast<std::size_t>(j)];

        model.log_likelihood_proxy = ll;
        model.ll_trace.push_back(ll);
        if (iter > 1 && max_change < tol) {
            model.converged = true;
            break;
        }
        prev_smoothed = smoothed;
        prev_ll = ll;
    }
    (void)prev_ll;

    // Canonical labeling: intercepts ascending.
    std::vector<int> perm(static_cast<std::size_t>(K));
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](int a, int b2) {
        return theta[static_cast<std::size_t>(a)](0) < theta[static_cast<std::size_t>(b2)](0);
    });
    model.coefficients.resize(static_cast<std::size_t>(K));
    model.scales.resize(static_cast<std::size_t>(K));
    model.transition.assign(static_cast<std::size_t>(K), std::vector<double>(static_cast<std::size_t>(K)));
    model.smoothed_probs.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(K)));
    for (int a = 0; a < K; ++a) {
        model.coefficients[static_cast<std::size_t>(a)] = theta[static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])];
        model.scales[static_cast<std::size_t>(a)] = b[static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])];
        for (int b2 = 0; b2 < K; ++b2)
            model.transition[static_cast<std::size_t>(a)][static_cast<std::size_t>(b2)] =
                P[static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])][static_cast<std::size_t>(perm[static_cast<std::size_t>(b2)])];
    }
    for (int t = 0; t < n; ++t)
        for (int a = 0; a < K; ++a)
            model.smoothed_probs[static_cast<std::size_t>(t)][static_cast<std::size_t>(a)] =
                smoothed[static_cast<std::size_t>(t)][static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])];
    return model;
}

std::vector<double> dynamic_tau_path(const DynamicTauParams& params, double tau0,
                                     const std::vector<double>& sigma2_path,
                                     const std::vector<double>& abs_return_path) {
    if (sigma2_path.size() != abs_return_path.size())
        throw std::invalid_argument("dynamic_tau_path: length mismatch");
    if (!(tau0 > 0.0 && tau0 < 1.0)) throw std::invalid_argument("dynamic_tau_path: tau0 must lie in (0,1)");
    std::vector<double> out(sigma2_path.size());
    double prev = tau0;
    for (std::size_t t = 0; t < out.size(); ++t) {
        const double arg = params.delta0 + params.delta1 * prev + params.delta2 * sigma2_path[t] +
                           params.delta3 * abs_return_path[t];
        double tau = norm_cdf(arg);
        tau = std::clamp(tau, 1e-12, 1.0 - 1e-12);
        out[t] = tau;
        prev = tau;
    }
    return out;
}

AdaptiveThresholdPath adaptive_threshold_path(const DynamicTauParams& params, double gamma0,
                                              const std::vector<double>& vix_path,
                                              const std::vector<double>& abs_return_path) {
    if (vix_path.size() != abs_return_path.size())
        throw std::invalid_argument("adaptive_threshold_path: length mismatch");
    AdaptiveThresholdPath out;
    out.gamma.resize(vix_path.size());
    double prev = gamma0;
    for (std::size_t t = 0; t < out.gamma.size(); ++t) {
        double arg = params.delta0 + params.delta1 * prev + params.delta2 * vix_path[t] +
                     params.delta3 * abs_return_path[t];
        if (arg < 1e-6 || arg > 1.0 - 1e-6) {
            arg = std::clamp(arg, 1e-6, 1.0 - 1e-6);
            ++out.clamp_events;
        }
        prev = norm_quantile(arg);
        out.gamma[t] = prev;
    }
    return out;
}

std::vector<MeanExcessPoint> mean_excess_curve(const std::vector<double>& xs,
                                               const std::vector<double>& thresholds) {
    if (xs.empty()) throw std::invalid_argument("mean_excess_curve: empty sample");
    std::vector<MeanExcessPoint> out;
    out.reserve(thresholds.size());
    for (double u : thresholds) {
        MeanExcessPoint p;
        p.threshold = u;
        double sum = 0.0;
        for (double x : xs)
            if (x > u) {
                sum += x - u;
                ++p.count;
            }
        if (p.count > 0) {
            p.mean_excess = sum / static_cast<double>(p.count);
            p.valid = true;
        }
        out.push_back(p);
    }
    return out;
}

GpdFit gpd_fit(const std::vector<double>& excesses) {
    const std::size_t n = excesses.size();
    if (n < 30) throw std::invalid_argument("gpd_fit: too few exceedances (need >= 30)");
    double xmax = 0.0, xmin = 1e300, mean = 0.0;
    for (double x : excesses) {
        if (!(x > 0.0)) throw std::invalid_argument("gpd_fit: excesses must be positive");
        xmax = std::max(xmax, x);
        xmin = std::min(xmin, x);
        mean += x;
    }
    mean /= static_cast<double>(n);
    if (xmax == xmin) throw std::invalid_argument("gpd_fit: degenerate sample");

    // Profile log-likelihood over theta = xi/sigma: for fixed theta the
    // conditional shape is xi(theta) = mean(log(1 + theta*x)) and
    // l(theta) = -n*log(xi/theta) - n*(1 + xi). theta -> 0 is the
    // exponential limit.
    const double dn = static_cast<double>(n);
    auto profile_ll = [&](double theta) {
        if (theta == 0.0) return -dn * std::log(mean) - dn;
        if (theta <= -1.0 / xmax) return -1e300;
        double xi = 0.0;
        for (double x : excesses) xi += std::log1p(theta * x);
        xi /= dn;
        if (xi == 0.0) return -1e300;
        if (xi / theta <= 0.0) return -1e300;
        return -dn * std::log(xi / theta) - dn * (1.0 + xi);
    };

    // Coarse grid, then golden-section refinement around the best point.
    std::vector<double> grid;
    const double lo = -1.0 / xmax + 1e-8 / xmax;
    for (int i = 1; i <= 40; ++i) grid.push_back(lo * (1.0 - static_cast<double>(i) / 41.0));
    grid.push_back(0.0);
    for (int i = -40; i <= 60; ++i) grid.push_back(std::pow(10.0, static_cast<double>(i) / 10.0) / mean * 1e-2);

    double best_theta = 0.0, best_ll = profile_ll(0.0);
    for (double th : grid) {
        const double ll = profile_ll(th);
        if (ll > best_ll) {
            best_ll = ll;
            best_theta = th;
        }
    }
    {
        double a = best_theta - std::abs(best_theta) * 0.5 - 1e-4 / mean;
        double bq = best_theta + std::abs(best_theta) * 0.5 + 1e-4 / mean;
        a = std::max(a, lo);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double c1 = bq - gr * (bq - a), c2 = a + gr * (bq - a);
        double f1 = profile_ll(c1), f2 = profile_ll(c2);
        for (int it = 0; it < 200; ++it) {
            if (f1 < f2) {
                a = c1;
                c1 = c2;
                f1 = f2;
                c2 = a + gr * (bq - a);
                f2 = profile_ll(c2);
            } else {
                bq = c2;
                c2 = c1;
                f2 = f1;
                c1 = bq - gr * (bq - a);
                f1 = profile_ll(c1);
            }
        }
        const double th = 0.5 * (a + bq);
        if (profile_ll(th) > best_ll) {
            best_ll = profile_ll(th);
            best_theta = th;
        }
    }

    GpdFit fit;
    fit.n_exceedances = n;
    fit.log_likelihood = best_ll;
    if (best_theta == 0.0) {
        fit.xi = 0.0;
        fit.sigma = mean;
    } else {
        double xi = 0.0;
        for (double x : excesses) xi += std::log1p(best_theta * x);
        xi /= dn;
        fit.xi = xi;
        fit.sigma = xi / best_theta;
    }
    return fit;
}

}  // namespace evar
