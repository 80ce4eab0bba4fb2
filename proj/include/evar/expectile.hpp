#pragma once

#include <Eigen/Dense>
#include <vector>

namespace evar {

// Expectile level tau, required to lie strictly inside (0,1).
struct ExpectileLevel {
    double tau;
    explicit ExpectileLevel(double t);
    operator double() const { return tau; }
};

// Asymmetric squared loss sum: sum |tau - 1{x <= m}| (x - m)^2.
double asymmetric_squared_loss(const std::vector<double>& xs, double m, double tau);

// Unique minimizer of the asymmetric squared loss. Satisfies the first-order
// balance condition tau * sum_{x>m}(x-m) = (1-tau) * sum_{x<=m}(m-x).
double sample_expectile(const std::vector<double>& xs, ExpectileLevel tau);

// Elementwise sample expectiles for a sorted list of levels; output is
// non-decreasing.
std::vector<double> expectile_curve(const std::vector<double>& xs, const std::vector<double>& taus);

struct ExpectileFit {
    double tau = 0.5;
    Eigen::VectorXd coefficients;
    std::vector<double> fitted;
    double loss = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Linear expectile regression by iteratively reweighted least squares with
// weights |tau - 1{residual <= 0}|. The design matrix must include any
// intercept column and have full column rank.
ExpectileFit expectile_regression(const Eigen::MatrixXd& design, const std::vector<double>& response,
                                  ExpectileLevel tau, int max_iter = 200, double tol = 1e-8);

// Same, with nonnegative per-observation weights (used by the regime module).
ExpectileFit weighted_expectile_regression(const Eigen::MatrixXd& design, const std::vector<double>& response,
                                           const std::vector<double>& obs_weights, ExpectileLevel tau,
                                           int max_iter = 200, double tol = 1e-8);

struct CoherenceReport {
    double translation_error = 0.0;   // |E(X+c) - (E(X)+c)|
    double homogeneity_error = 0.0;   // |E(lambda X) - lambda E(X)|
    bool monotone = true;             // on the dominated pair max(X,Y) vs min(X,Y)
    bool subadditive = true;          // E(X+Y) <= E(X)+E(Y), checked for tau >= 0.5
    bool subadditivity_checked = false;
    double subadditivity_slack = 0.0;  // E(X)+E(Y)-E(X+Y) when checked
};

// Numerical verification of the coherence axioms on a pair of equal-length
// samples. Subadditivity is only asserted for tau >= 0.5; below one half the
// property does not hold in general.
CoherenceReport check_coherence(const std::vector<double>& x, const std::vector<double>& y, ExpectileLevel tau,
                                double c, double lambda);

// Finds tau such that the empirical frequency of observations below
// sample_expectile(xs, tau) matches the target violation rate 1 - alpha as
// closely as achievable (within 1/n). alpha is a confidence level in
// [0.5, 1).
ExpectileLevel calibrate_tau(const std::vector<double>& xs, double alpha);

}  // namespace evar
