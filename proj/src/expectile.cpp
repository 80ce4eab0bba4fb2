#include "evar/expectile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evar {

ExpectileLevel::ExpectileLevel(double t) : tau(t) {
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("ExpectileLevel: tau must lie in (0,1)");
}

double asymmetric_squared_loss(const std::vector<double>& xs, double m, double tau) {
    double loss = 0.0;
    for (double x : xs) {
        const double d = x - m;
        loss += (x <= m ? 1.0 - tau : tau) * d * d;
    }
    return loss;
}

double sample_expectile(const std::vector<double>& xs, ExpectileLevel tau) {
    if (xs.empty()) throw std::invalid_argument("sample_expectile: empty input");
    double lo = xs[0], hi = xs[0], mean = 0.0;
    for (double x : xs) {
        if (!std::isfinite(x)) throw std::invalid_argument("sample_expectile: non-finite value");
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        mean += x;
    }
    mean /= static_cast<double>(xs.size());
    if (lo == hi) return lo;  // degenerate sample: every expectile is the constant

    const double t = tau;
    // Fixed point of the first-order condition: m is the weighted mean with
    // weight tau above m and 1-tau at or below m. The partition can only move
    // monotonically, so this terminates.
    double m = mean;
    for (int iter = 0; iter < 200; ++iter) {
        double wsum = 0.0, wx = 0.0;
        for (double x : xs) {
            const double w = (x <= m) ? 1.0 - t : t;
            wsum += w;
            wx += w * x;
        }
        const double next = wx / wsum;
        if (next == m) break;
        m = next;
    }
    return m;
}

std::vector<double> expectile_curve(const std::vector<double>& xs, const std::vector<double>& taus) {
    for (std::size_t i = 1; i < taus.size(); ++i)
        if (taus[i] < taus[i - 1]) throw std::invalid_argument("expectile_curve: taus must be sorted");
    std::vector<double> out;
    out.reserve(taus.size());
    for (double t : taus) out.push_back(sample_expectile(xs, ExpectileLevel(t)));
    return out;
}

namespace {

ExpectileFit irls(const Eigen::MatrixXd& X, const std::vector<double>& response,
                  const std::vector<double>* obs_weights, double tau, int max_iter, double tol) {
    const auto n = X.rows();
    const auto p = X.cols();
    if (n != static_cast<Eigen::Index>(response.size()))
        throw std::invalid_argument("expectile_regression: design/response length mismatch");
    if (n <= p) throw std::invalid_argument("expectile_regression: need more rows than columns");
    {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
        if (qr.rank() < p) throw std::invalid_argument("expectile_regression: rank-deficient design");
    }
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(response.data(), n);

    Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);  // OLS start
    std::vector<char> signs(n, 0), prev_signs(n, 0);

    ExpectileFit fit;
    fit.tau = tau;
    for (int iter = 1; iter <= max_iter; ++iter) {
        fit.iterations = iter;
        Eigen::VectorXd res = y - X * beta;
        Eigen::VectorXd w(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            signs[i] = res(i) <= 0.0 ? 1 : 0;
            w(i) = signs[i] ? 1.0 - tau : tau;
            if (obs_weights) w(i) *= (*obs_weights)[i];
        }
        Eigen::VectorXd sw = w.array().sqrt();
        Eigen::MatrixXd Xw = sw.asDiagonal() * X;
        Eigen::VectorXd yw = sw.asDiagonal() * y;
        Eigen::VectorXd next = (Xw.transpose() * Xw).ldlt().solve(Xw.transpose() * yw);

        const double change = (next - beta).cwiseAbs().maxCoeff();
        beta = next;
        if (iter > 1 && (change < tol || signs == prev_signs)) {
            fit.converged = true;
            break;
        }
        prev_signs = signs;
    }

    fit.coefficients = beta;
    Eigen::VectorXd mu = X * beta;
    fit.fitted.assign(mu.data(), mu.data() + n);
    fit.loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = y(i) - mu(i);
        double w = d <= 0.0 ? 1.0 - tau : tau;
        if (obs_weights) w *= (*obs_weights)[i];
        fit.loss += w * d * d;
    }
    return fit;
}

}  // namespace

ExpectileFit expectile_regression(const Eigen::MatrixXd& design, const std::vector<double>& response,
                                  ExpectileLevel tau, int max_iter, double tol) {
    return irls(design, response, nullptr, tau, max_iter, tol);
}

ExpectileFit weighted_expectile_regression(const Eigen::MatrixXd& design, const std::vector<double>& response,
                                           const std::vector<double>& obs_weights, ExpectileLevel tau,
                                           int max_iter, double tol) {
    if (obs_weights.size() != response.size())
        throw std::invalid_argument("weighted_expectile_regression: weight length mismatch");
    return irls(design, response, &obs_weights, tau, max_iter, tol);
}

CoherenceReport check_coherence(const std::vector<double>& x, const std::vector<double>& y, ExpectileLevel tau,
                                double c, double lambda) {
    if (x.size() != y.size()) throw std::invalid_argument("check_coherence: mismatched lengths");
    if (!(lambda > 0.0)) throw std::invalid_argument("check_coherence: lambda must be positive");

    CoherenceReport rep;
    const double ex = sample_expectile(x, tau);

    std::vector<double> shifted(x), scaled(x), lower(x.size()), upper(x.size()), sum(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        shifted[i] += c;
        scaled[i] *= lambda;
        lower[i] = std::min(x[i], y[i]);
        upper[i] = std::max(x[i], y[i]);
        sum[i] = x[i] + y[i];
    }
    rep.translation_error = std::abs(sample_expectile(shifted, tau) - (ex + c));
    rep.homogeneity_error = std::abs(sample_expectile(scaled, tau) - lambda * ex);
    rep.monotone = sample_expectile(lower, tau) <= sample_expectile(upper, tau) + 1e-12;

    if (tau.tau >= 0.5) {
        rep.subadditivity_checked = true;
        rep.subadditivity_slack =
            sample_expectile(x, tau) + sample_expectile(y, tau) - sample_expectile(sum, tau);
        rep.subadditive = rep.subadditivity_slack >= -1e-10;
    }
    return rep;
}

ExpectileLevel calibrate_tau(const std::vector<double>& xs, double alpha) {
    const std::size_t n = xs.size();
    if (n < 100) throw std::invalid_argument("calibrate_tau: need at least 100 observations");
    if (!(alpha >= 0.5 && alpha < 1.0)) throw std::invalid_argument("calibrate_tau: alpha must lie in [0.5, 1)");
    if (*std::min_element(xs.begin(), xs.end()) == *std::max_element(xs.begin(), xs.end()))
        throw std::invalid_argument("calibrate_tau: degenerate sample, target unreachable");

    const double target = 1.0 - alpha;
    auto rate = [&](double tau) {
        const double e = sample_expectile(xs, ExpectileLevel(tau));
        std::size_t below = 0;
        for (double x : xs)
            if (x < e) ++below;
        return static_cast<double>(below) / static_cast<double>(n);
    };

    // The expectile is strictly increasing in tau, so the empirical rate is a
    // nondecreasing step function of tau; bisect to the jump nearest the
    // target.
    double lo = 1e-9, hi = 1.0 - 1e-9;
    double best_tau = 0.5, best_err = std::abs(rate(0.5) - target);
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double r = rate(mid);
        const double err = std::abs(r - target);
        if (err < best_err) {
            best_err = err;
            best_tau = mid;
        }
        if (r < target)
            lo = mid;
        else
            hi = mid;
    }
    return ExpectileLevel(best_tau);
}

}  // namespace evar
