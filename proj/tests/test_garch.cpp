#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "evar/expectile.hpp"
#include "evar/garch.hpp"
#include "test_util.hpp"

using namespace evar;
namespace tu = test_util;

namespace {

double sample_variance(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double v = 0.0;
    for (double x : xs) v += (x - mean) * (x - mean);
    return v / (n - 1.0);
}

}  // namespace

TEST_CASE("GarchParams validation") {
    GarchParams p;
    CHECK_NOTHROW(p.validate());
    p.omega = 0.0;
    CHECK_THROWS(p.validate());
    p.omega = 1e-6;
    p.alpha_g = 0.6;
    p.beta_g = 0.5;
    CHECK_THROWS(p.validate());  // persistence >= 1
    p.alpha_g = -0.1;
    p.beta_g = 0.5;
    CHECK_THROWS(p.validate());
}

TEST_CASE("garch_simulate: constant variance when alpha = beta = 0") {
    GarchParams p;
    p.omega = 4e-4;
    p.alpha_g = 0.0;
    p.beta_g = 0.0;
    auto r = garch_simulate(p, 50000, Innovation::normal, 11);
    CHECK(sample_variance(r) == doctest::Approx(4e-4).epsilon(0.05));
}

TEST_CASE("garch_simulate is deterministic for a fixed seed") {
    GarchParams p;
    p.omega = 2e-6;
    p.alpha_g = 0.08;
    p.beta_g = 0.90;
    auto a = garch_simulate(p, 1000, Innovation::student_t, 77);
    auto b = garch_simulate(p, 1000, Innovation::student_t, 77);
    CHECK(a == b);
    auto c = garch_simulate(p, 1000, Innovation::student_t, 78);
    CHECK(a != c);
}

TEST_CASE("garch_simulate long-run variance matches omega/(1-alpha-beta)") {
    GarchParams p;
    p.omega = 2e-6;
    p.alpha_g = 0.08;
    p.beta_g = 0.90;
    auto r = garch_simulate(p, 100000, Innovation::normal, 5);
    const double target = p.omega / (1.0 - p.alpha_g - p.beta_g);
    CHECK(sample_variance(r) == doctest::Approx(target).epsilon(0.05));
}

TEST_CASE("garch_fit recovers simulated parameters") {
    GarchParams truth;
    truth.omega = 2e-6;
    truth.alpha_g = 0.08;
    truth.beta_g = 0.90;
    auto r = garch_simulate(truth, 20000, Innovation::normal, 42);
    auto fit = garch_fit(r, Innovation::normal);
    CHECK_ABS(fit.params.alpha_g, 0.08, 0.02);
    CHECK_ABS(fit.params.beta_g, 0.90, 0.02);
    CHECK(fit.params.omega == doctest::Approx(2e-6).epsilon(0.5));
    CHECK_FALSE(fit.at_boundary);
    for (double v : fit.cond_variance) CHECK(v > 0.0);
    CHECK(std::isfinite(fit.log_likelihood));
}

TEST_CASE("garch_fit on iid data finds little ARCH") {
    int small_alpha = 0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        auto r = tu::normal_draws(6000 + rep, 2000, 0.0, 0.01);
        auto fit = garch_fit(r, Innovation::normal);
        if (fit.params.alpha_g <= 0.03) ++small_alpha;
    }
    CHECK(small_alpha >= (reps * 9) / 10);
}

TEST_CASE("garch_fit preconditions") {
    CHECK_THROWS(garch_fit(tu::normal_draws(1, 50), Innovation::normal));
    CHECK_THROWS(garch_fit(std::vector<double>(300, 0.001), Innovation::normal));
}

TEST_CASE("garch_fit is scale covariant") {
    GarchParams truth;
    truth.omega = 2e-6;
    truth.alpha_g = 0.07;
    truth.beta_g = 0.88;
    auto r = garch_simulate(truth, 5000, Innovation::normal, 9);
    std::vector<double> scaled(r);
    const double c = 100.0;
    for (auto& x : scaled) x *= c;
    auto f1 = garch_fit(r, Innovation::normal);
    auto f2 = garch_fit(scaled, Innovation::normal);
    CHECK_ABS(f2.params.alpha_g, f1.params.alpha_g, 1e-3);
    CHECK_ABS(f2.params.beta_g, f1.params.beta_g, 1e-3);
    CHECK(f2.params.omega == doctest::Approx(f1.params.omega * c * c).epsilon(0.02));
}

TEST_CASE("garch_fit likelihood improves on the moment-matched start") {
    auto r = garch_simulate(GarchParams{2e-6, 0.08, 0.90, 0.0, 8.0}, 3000, Innovation::normal, 21);
    auto fit = garch_fit(r, Innovation::normal);

    GarchParams start;
    start.alpha_g = 0.05;
    start.beta_g = 0.90;
    start.omega = 0.05 * sample_variance(r);
    start.mean_mu = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    const double ll_start = garch_log_likelihood(r, start, Innovation::normal);
    CHECK(fit.log_likelihood >= ll_start - 1e-9);
    CHECK(fit.log_likelihood ==
          doctest::Approx(garch_log_likelihood(r, fit.params, Innovation::normal)).epsilon(1e-12));
}

TEST_CASE("student-t fit recovers heavier tails than normal on t data") {
    GarchParams truth;
    truth.omega = 2e-6;
    truth.alpha_g = 0.08;
    truth.beta_g = 0.90;
    truth.nu = 5.0;
    auto r = garch_simulate(truth, 10000, Innovation::student_t, 33);
    auto fit = garch_fit(r, Innovation::student_t);
    CHECK(fit.params.nu > 3.0);
    CHECK(fit.params.nu < 9.0);
    CHECK_ABS(fit.params.alpha_g, 0.08, 0.03);
    CHECK_ABS(fit.params.beta_g, 0.90, 0.03);
}

TEST_CASE("garch_forecast: flat at omega when alpha = beta = 0") {
    GarchParams p;
    p.omega = 3e-4;
    p.alpha_g = 0.0;
    p.beta_g = 0.0;
    GarchFit fit;
    fit.params = p;
    std::vector<double> r = {0.01, -0.02, 0.005};
    fit.cond_variance = {3e-4, 3e-4, 3e-4};
    auto fc = garch_forecast(fit, r, 5);
    for (double v : fc) CHECK(v == doctest::Approx(3e-4).epsilon(1e-12));
}

TEST_CASE("garch_forecast matches a hand recursion and its fixed point") {
    GarchParams p;
    p.omega = 1e-5;
    p.alpha_g = 0.1;
    p.beta_g = 0.8;
    p.mean_mu = 0.001;
    GarchFit fit;
    fit.params = p;
    std::vector<double> r = {0.01, -0.02, 0.005};
    fit.cond_variance = {2e-4, 2.1e-4, 2.2e-4};

    auto fc = garch_forecast(fit, r, 10000);
    const double eps = r.back() - p.mean_mu;
    const double one_step = p.omega + p.alpha_g * eps * eps + p.beta_g * fit.cond_variance.back();
    CHECK(fc[0] == doctest::Approx(one_step).epsilon(1e-14));
    CHECK(fc[1] == doctest::Approx(p.omega + 0.9 * one_step).epsilon(1e-14));

    const double uncond = p.omega / (1.0 - p.alpha_g - p.beta_g);
    CHECK(fc.back() == doctest::Approx(uncond).epsilon(1e-6));
    CHECK_THROWS(garch_forecast(fit, r, 0));
}

TEST_CASE("simulate -> fit -> simulate preserves the unconditional variance") {
    GarchParams truth;
    truth.omega = 2e-6;
    truth.alpha_g = 0.08;
    truth.beta_g = 0.90;
    auto r = garch_simulate(truth, 50000, Innovation::normal, 3);
    auto fit = garch_fit(r, Innovation::normal);
    auto r2 = garch_simulate(fit.params, 50000, Innovation::normal, 4);
    CHECK(sample_variance(r2) == doctest::Approx(sample_variance(r)).epsilon(0.10));
}

TEST_CASE("care_fit: tau = 0.5 gives a near-zero standardized expectile") {
    GarchParams truth;
    truth.omega = 2e-6;
    truth.alpha_g = 0.08;
    truth.beta_g = 0.90;
    auto r = garch_simulate(truth, 5000, Innovation::normal, 17);
    auto care = care_fit(r, ExpectileLevel(0.5), Innovation::normal);
    CHECK(std::abs(care.xi_tau) < 0.05);

    // Definitional identity of the EVaR path.
    for (std::size_t t = 0; t < r.size(); ++t) {
        const double expected =
            care.garch.params.mean_mu + std::sqrt(care.garch.cond_variance[t]) * care.xi_tau;
        CHECK_ABS(care.evar_path[t], expected, 1e-12);
    }
}

TEST_CASE("care_fit with calibrated tau hits the in-sample violation rate") {
    GarchParams truth;
    truth.omega = 2e-6;
    truth.alpha_g = 0.08;
    truth.beta_g = 0.90;
    auto r = garch_simulate(truth, 10000, Innovation::normal, 2718);
    auto base = garch_fit(r, Innovation::normal);
    auto tau = calibrate_tau(base.std_residuals, 0.95);
    auto care = care_fit(r, tau, Innovation::normal);

    std::size_t hits = 0;
    for (std::size_t t = 0; t < r.size(); ++t)
        if (r[t] < care.evar_path[t]) ++hits;
    const double rate = static_cast<double>(hits) / static_cast<double>(r.size());
    CHECK_ABS(rate, 0.05, 0.007);
    CHECK(care.xi_tau < 0.0);  // tau < 0.5 on symmetric residuals
}
