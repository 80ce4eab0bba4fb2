#pragma once

// Internal least-squares helpers shared across modules.

#include <Eigen/Dense>
#include <stdexcept>

namespace evar::detail {

struct OlsFit {
    Eigen::VectorXd beta;
    Eigen::VectorXd residuals;
    double ssr = 0.0;
    double tss = 0.0;  // around the mean of y
    double r_squared = 0.0;
};

inline OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() != y.size()) throw std::invalid_argument("ols: row mismatch");
    if (X.rows() <= X.cols()) throw std::invalid_argument("ols: not enough observations");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < X.cols()) throw std::invalid_argument("ols: rank-deficient design");
    OlsFit f;
    f.beta = qr.solve(y);
    f.residuals = y - X * f.beta;
    f.ssr = f.residuals.squaredNorm();
    const double ym = y.mean();
    f.tss = (y.array() - ym).matrix().squaredNorm();
    f.r_squared = f.tss > 0.0 ? 1.0 - f.ssr / f.tss : 0.0;
    return f;
}

// t-ratio of coefficient j using the usual OLS variance estimate.
inline double ols_t_ratio(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const OlsFit& f, int j) {
    const double s2 = f.ssr / static_cast<double>(X.rows() - X.cols());
    Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
    const double se = std::sqrt(s2 * xtx_inv(j, j));
    return f.beta(j) / se;
}

}  // namespace evar::detail
