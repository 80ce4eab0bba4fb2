// Command-line front end: ingestion, estimation, threshold analysis,
// simulation, calibration and backtesting, wired for reproducible runs.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "evar/backtest.hpp"
#include "evar/csv_io.hpp"
#include "evar/expectile.hpp"
#include "evar/garch.hpp"
#include "evar/regime.hpp"
#include "evar/report.hpp"
#include "evar/series.hpp"
#include "evar/stats.hpp"

namespace {

using namespace evar;

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

Date next_date(Date d) {
    static const int mdays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int dim = mdays[d.month - 1] + (d.month == 2 && is_leap(d.year) ? 1 : 0);
    if (++d.day > dim) {
        d.day = 1;
        if (++d.month > 12) {
            d.month = 1;
            ++d.year;
        }
    }
    return d;
}

ReturnSeries load_returns(const std::string& path, bool prices, const std::string& date_col,
                          const std::string& value_col) {
    CsvConfig cfg;
    cfg.date_column = date_col;
    cfg.value_column = value_col.empty() ? (prices ? "price" : "return") : value_col;
    if (prices) return to_log_returns(load_price_series(path, cfg));
    return load_return_series(path, cfg);
}

ReturnSeries date_filter(const ReturnSeries& r, const std::string& from, const std::string& to) {
    if (from.empty() && to.empty()) return r;
    ReturnSeries out;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!from.empty() && r.dates[i] < Date::parse(from)) continue;
        if (!to.empty() && Date::parse(to) < r.dates[i]) continue;
        out.dates.push_back(r.dates[i]);
        out.returns.push_back(r.returns[i]);
    }
    return out;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot write output file: " + path);
    return file;
}

void print_config(const CLI::App& sub) {
    std::cout << "# resolved config: " << sub.get_name();
    for (const auto* opt : sub.get_options())
        if (!opt->get_name().empty() && opt->count() + opt->get_default_str().size() > 0)
            std::cout << " " << opt->get_name() << "="
                      << (opt->count() ? opt->results()[0] : opt->get_default_str());
    std::cout << "\n";
}

int cmd_stats(const ReturnSeries& r, int adf_lags, int arch_lags, const std::string& format,
              std::ostream& out) {
    auto s = descriptive_stats(r);
    auto jb = jarque_bera(r);
    auto adf = adf_test(r, adf_lags);
    auto arch = arch_lm_test(r, arch_lags);
    auto outliers = flag_outliers(r.returns);

    out.precision(6);
    if (format == "csv") {
        out << "statistic,value,p_value\n"
            << "observations," << s.n << ",\n"
            << "mean," << s.mean << ",\n"
            << "std_dev," << s.std_dev << ",\n"
            << "skewness," << s.skewness << ",\n"
            << "kurtosis," << s.kurtosis << ",\n"
            << "excess_kurtosis," << s.kurtosis - 3.0 << ",\n"
            << "min," << s.min << ",\n"
            << "max," << s.max << ",\n"
            << "jarque_bera," << jb.statistic << "," << jb.p_value << "\n"
            << "adf(" << adf_lags << ")," << adf.statistic << "," << adf.p_value << "\n"
            << "arch_lm(" << arch_lags << ")," << arch.statistic << "," << arch.p_value << "\n"
            << "outliers_flagged," << outliers.size() << ",\n";
    } else {
        out << "Observations     " << s.n << "\n"
            << "Mean             " << s.mean << "\n"
            << "Std. Deviation   " << s.std_dev << "\n"
            << "Skewness         " << s.skewness << "\n"
            << "Kurtosis         " << s.kurtosis << "  (excess " << s.kurtosis - 3.0 << ")\n"
            << "Minimum          " << s.min << "\n"
            << "Maximum          " << s.max << "\n"
            << "Jarque-Bera      " << jb.statistic << "  (p " << jb.p_value << ")\n"
            << "ADF(" << adf_lags << ")           " << adf.statistic << "  (p~ " << adf.p_value << ")\n"
            << "ARCH-LM(" << arch_lags << ")      " << arch.statistic << "  (p " << arch.p_value << ")\n"
            << "Outliers flagged " << outliers.size() << "  (|x - median| > 3.5 IQR, diagnostic only)\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Expectile-based Value-at-Risk toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file (flags take precedence)");
    app.failure_message(CLI::FailureMessage::help);

    // common input options, replicated per subcommand
    struct InputOpts {
        std::string input, date_col = "date", value_col;
        bool prices = false;
        std::string from, to;
    };
    auto add_input = [](CLI::App* sub, InputOpts& o) {
        sub->add_option("-i,--input", o.input, "input CSV")->required();
        sub->add_flag("--prices", o.prices, "input column holds prices; take log returns");
        sub->add_option("--date-col", o.date_col, "date column name");
        sub->add_option("--value-col", o.value_col, "value column name (default: price/return)");
        sub->add_option("--from", o.from, "start date filter (YYYY-MM-DD)");
        sub->add_option("--to", o.to, "end date filter (YYYY-MM-DD)");
    };

    // ---- stats ----
    auto* stats = app.add_subcommand("stats", "descriptive statistics and diagnostic tests");
    InputOpts stats_in;
    add_input(stats, stats_in);
    int adf_lags = 1, arch_lags = 5;
    std::string stats_format = "text", stats_out;
    stats->add_option("--adf-lags", adf_lags, "ADF lag order");
    stats->add_option("--arch-lags", arch_lags, "ARCH-LM lag order");
    stats->add_option("-f,--format", stats_format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
    stats->add_option("-o,--output", stats_out, "output path (default stdout)");

    // ---- fit-expectile ----
    auto* fitexp = app.add_subcommand("fit-expectile", "expectile regression on lagged returns and exogenous columns");
    InputOpts fe_in;
    add_input(fitexp, fe_in);
    std::vector<double> fe_taus{0.01, 0.05, 0.95, 0.99};
    int fe_lags = 2;
    std::string fe_exog_path, fe_out;
    std::vector<std::string> fe_exog_cols;
    fitexp->add_option("--tau", fe_taus, "expectile levels")->delimiter(',');
    fitexp->add_option("-p,--lags", fe_lags, "autoregressive lag order");
    fitexp->add_option("--exog", fe_exog_path, "exogenous panel CSV (entered with a one-period lag)");
    fitexp->add_option("--exog-cols", fe_exog_cols, "exogenous columns to use (default: all)")->delimiter(',');
    fitexp->add_option("-o,--output", fe_out, "coefficient table CSV (default stdout)");

    // ---- fit-garch ----
    auto* fitgarch = app.add_subcommand("fit-garch", "GARCH(1,1) quasi-maximum-likelihood fit");
    InputOpts fg_in;
    add_input(fitgarch, fg_in);
    std::string fg_dist = "normal", fg_out;
    fitgarch->add_option("--dist", fg_dist, "innovation distribution")->check(CLI::IsMember({"normal", "t"}));
    fitgarch->add_option("-o,--output", fg_out, "conditional variance path CSV");

    // ---- fit-care ----
    auto* fitcare = app.add_subcommand("fit-care", "conditional autoregressive expectile (GARCH + standardized expectile)");
    InputOpts fc_in;
    add_input(fitcare, fc_in);
    double fc_tau = 0.0, fc_alpha = 0.0;
    std::string fc_dist = "normal", fc_out;
    fitcare->add_option("--tau", fc_tau, "expectile level (mutually exclusive with --alpha)");
    fitcare->add_option("--alpha", fc_alpha, "confidence level; tau is calibrated to it");
    fitcare->add_option("--dist", fc_dist, "innovation distribution")->check(CLI::IsMember({"normal", "t"}));
    fitcare->add_option("-o,--output", fc_out, "EVaR path CSV");

    // ---- threshold ----
    auto* thr = app.add_subcommand("threshold", "threshold nonlinearity tests and EVT diagnostics");
    InputOpts th_in;
    add_input(thr, th_in);
    std::string th_mode = "tsay", th_out;
    int th_d = 1, th_p = 1;
    double th_tau = 0.05, th_gmin = 0.0, th_gmax = 0.0, th_gstep = 0.0, th_gpd_u = 0.0;
    bool th_gpd = false;
    std::vector<double> th_levels;
    thr->add_option("--mode", th_mode, "tsay, grid, or evt")->check(CLI::IsMember({"tsay", "grid", "evt"}));
    thr->add_option("-d,--delay", th_d, "threshold delay");
    thr->add_option("-p,--lags", th_p, "autoregressive lag order");
    thr->add_option("--tau", th_tau, "expectile level for grid mode");
    thr->add_option("--gamma-min", th_gmin, "grid lower bound");
    thr->add_option("--gamma-max", th_gmax, "grid upper bound");
    thr->add_option("--gamma-step", th_gstep, "grid step");
    thr->add_option("--thresholds", th_levels, "mean-excess thresholds (evt mode; default: deciles)")->delimiter(',');
    thr->add_flag("--gpd", th_gpd, "fit a GPD to losses above --gpd-threshold (evt mode)");
    thr->add_option("--gpd-threshold", th_gpd_u, "loss threshold for the GPD fit");
    thr->add_option("-o,--output", th_out, "output CSV (default stdout)");

    // ---- calibrate ----
    auto* cal = app.add_subcommand("calibrate", "calibrate tau to a VaR confidence level");
    InputOpts cal_in;
    add_input(cal, cal_in);
    double cal_alpha = 0.95;
    cal->add_option("--alpha", cal_alpha, "confidence level in [0.5, 1)")->required();

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "simulate a GARCH(1,1) return series");
    double s_omega = 2e-6, s_alpha = 0.08, s_beta = 0.90, s_mu = 0.0, s_nu = 8.0;
    std::size_t s_n = 1000;
    std::uint64_t s_seed = 0;
    std::string s_dist = "normal", s_out, s_start = "2000-01-03";
    sim->add_option("--omega", s_omega, "variance intercept");
    sim->add_option("--alpha", s_alpha, "ARCH coefficient");
    sim->add_option("--beta", s_beta, "GARCH coefficient");
    sim->add_option("--mu", s_mu, "constant mean");
    sim->add_option("--nu", s_nu, "student-t degrees of freedom");
    sim->add_option("--dist", s_dist, "innovation distribution")->check(CLI::IsMember({"normal", "t"}));
    sim->add_option("-n", s_n, "number of observations");
    sim->add_option("--seed", s_seed, "RNG seed")->required();
    sim->add_option("--start-date", s_start, "first synthetic date");
    sim->add_option("-o,--output", s_out, "output CSV")->required();

    // ---- backtest ----
    auto* bt = app.add_subcommand("backtest", "rolling out-of-sample VaR backtest battery");
    InputOpts bt_in;
    add_input(bt, bt_in);
    std::vector<std::string> bt_models{"historical_sim", "parametric_normal", "garch_t", "filtered_hs", "evar"};
    std::vector<double> bt_alphas{0.95};
    std::size_t bt_window = 1000, bt_hs_window = 250;
    int bt_refit = 25;
    int bt_workers = 0;
    std::uint64_t bt_seed = 0;
    std::string bt_eval_start, bt_eval_end, bt_out, bt_format = "json", bt_exog;
    bt->add_option("--models", bt_models, "model families to run")->delimiter(',');
    bt->add_option("--alphas", bt_alphas, "confidence levels")->delimiter(',');
    bt->add_option("--window", bt_window, "trailing estimation window for GARCH-family models (>= 250)");
    bt->add_option("--hs-window", bt_hs_window, "historical-simulation window (>= 250)");
    bt->add_option("--refit-every", bt_refit, "GARCH-family refit cadence");
    bt->add_option("--eval-start", bt_eval_start, "first evaluation date")->required();
    bt->add_option("--eval-end", bt_eval_end, "last evaluation date")->required();
    bt->add_option("--exog", bt_exog, "exogenous panel CSV (aligned, not used by the five families)");
    bt->add_option("--workers", bt_workers, "worker pool size (default: EVAR_WORKERS or 1)");
    bt->add_option("--seed", bt_seed, "seed echoed into the report")->required();
    bt->add_option("-o,--output", bt_out, "report path")->required();
    bt->add_option("-f,--format", bt_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // --help exits 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // usage errors exit 1, message already on stderr
    }

    try {
        if (*stats) {
            print_config(*stats);
            auto r = date_filter(load_returns(stats_in.input, stats_in.prices, stats_in.date_col, stats_in.value_col),
                                 stats_in.from, stats_in.to);
            std::ofstream file;
            return cmd_stats(r, adf_lags, arch_lags, stats_format, open_output(file, stats_out));
        }

        if (*fitexp) {
            print_config(*fitexp);
            auto r = date_filter(load_returns(fe_in.input, fe_in.prices, fe_in.date_col, fe_in.value_col),
                                 fe_in.from, fe_in.to);
            std::vector<std::string> exog_names;
            std::vector<std::vector<double>> exog_cols;
            if (!fe_exog_path.empty()) {
                auto panel = load_exogenous_panel(fe_exog_path, fe_in.date_col);
                auto aligned = align_exogenous(r, panel);
                r.dates = aligned.dates;
                r.returns = aligned.returns;
                for (std::size_t j = 0; j < aligned.exog_names.size(); ++j) {
                    if (!fe_exog_cols.empty() &&
                        std::find(fe_exog_cols.begin(), fe_exog_cols.end(), aligned.exog_names[j]) ==
                            fe_exog_cols.end())
                        continue;
                    exog_names.push_back(aligned.exog_names[j]);
                    exog_cols.push_back(aligned.exog[j]);
                }
            }
            const int p = fe_lags;
            const int n = static_cast<int>(r.size());
            const int start = p + 1;  // exogenous columns enter lagged by one
            if (n <= start + p + static_cast<int>(exog_cols.size()) + 5)
                throw std::runtime_error("fit-expectile: series too short for requested lag structure");
            const int rows = n - start;
            Eigen::MatrixXd X(rows, 1 + p + static_cast<int>(exog_cols.size()));
            std::vector<double> y(static_cast<std::size_t>(rows));
            for (int t = start; t < n; ++t) {
                const int i = t - start;
                y[static_cast<std::size_t>(i)] = r.returns[static_cast<std::size_t>(t)];
                X(i, 0) = 1.0;
                for (int j = 1; j <= p; ++j) X(i, j) = r.returns[static_cast<std::size_t>(t - j)];
                for (std::size_t j = 0; j < exog_cols.size(); ++j)
                    X(i, 1 + p + static_cast<int>(j)) = exog_cols[j][static_cast<std::size_t>(t - 1)];
            }
            std::vector<ExpectileFit> fits;
            std::vector<double> taus = fe_taus;
            std::sort(taus.begin(), taus.end());
            for (double tau : taus) fits.push_back(expectile_regression(X, y, ExpectileLevel(tau)));

            std::ofstream file;
            auto& out = open_output(file, fe_out);
            out.precision(10);
            out << "parameter";
            for (double tau : taus) out << ",tau=" << tau;
            out << "\n";
            std::vector<std::string> names{"intercept"};
            for (int j = 1; j <= p; ++j) names.push_back("lag" + std::to_string(j));
            for (const auto& nm : exog_names) names.push_back(nm + "_lag1");
            for (std::size_t row = 0; row < names.size(); ++row) {
                out << names[row];
                for (const auto& f : fits) out << "," << f.coefficients(static_cast<Eigen::Index>(row));
                out << "\n";
            }
            out << "loss";
            for (const auto& f : fits) out << "," << f.loss;
            out << "\nconverged";
            for (const auto& f : fits) out << "," << (f.converged ? 1 : 0);
            out << "\n";
            return 0;
        }

        if (*fitgarch) {
            print_config(*fitgarch);
            auto r = date_filter(load_returns(fg_in.input, fg_in.prices, fg_in.date_col, fg_in.value_col),
                                 fg_in.from, fg_in.to);
            auto fit = garch_fit(r, fg_dist == "t" ? Innovation::student_t : Innovation::normal);
            std::cout.precision(10);
            std::cout << "mu " << fit.params.mean_mu << "\nomega " << fit.params.omega << "\nalpha "
                      << fit.params.alpha_g << "\nbeta " << fit.params.beta_g;
            if (fit.dist == Innovation::student_t) std::cout << "\nnu " << fit.params.nu;
            std::cout << "\nlog_likelihood " << fit.log_likelihood
                      << "\nat_boundary " << (fit.at_boundary ? 1 : 0) << "\n";
            if (!fg_out.empty()) {
                std::ofstream file(fg_out);
                if (!file) throw std::runtime_error("cannot write " + fg_out);
                file.precision(17);
                file << "date,cond_variance,std_residual\n";
                for (std::size_t i = 0; i < r.size(); ++i)
                    file << r.dates[i].to_string() << "," << fit.cond_variance[i] << ","
                         << fit.std_residuals[i] << "\n";
            }
            return 0;
        }

        if (*fitcare) {
            print_config(*fitcare);
            auto r = date_filter(load_returns(fc_in.input, fc_in.prices, fc_in.date_col, fc_in.value_col),
                                 fc_in.from, fc_in.to);
            const auto dist = fc_dist == "t" ? Innovation::student_t : Innovation::normal;
            double tau = fc_tau;
            if (tau <= 0.0) {
                if (fc_alpha <= 0.0) throw std::runtime_error("fit-care: provide --tau or --alpha");
                auto g = garch_fit(r, dist);
                tau = calibrate_tau(g.std_residuals, fc_alpha);
            }
            auto care = care_fit(r, ExpectileLevel(tau), dist);
            std::cout.precision(10);
            std::cout << "tau " << care.tau << "\nxi_tau " << care.xi_tau << "\nmu "
                      << care.garch.params.mean_mu << "\nomega " << care.garch.params.omega << "\nalpha "
                      << care.garch.params.alpha_g << "\nbeta " << care.garch.params.beta_g << "\n";
            if (!fc_out.empty()) {
                std::ofstream file(fc_out);
                if (!file) throw std::runtime_error("cannot write " + fc_out);
                file.precision(17);
                file << "date,evar\n";
                for (std::size_t i = 0; i < r.size(); ++i)
                    file << r.dates[i].to_string() << "," << care.evar_path[i] << "\n";
            }
            return 0;
        }

        if (*thr) {
            print_config(*thr);
            auto r = date_filter(load_returns(th_in.input, th_in.prices, th_in.date_col, th_in.value_col),
                                 th_in.from, th_in.to);
            std::ofstream file;
            auto& out = open_output(file, th_out);
            out.precision(10);
            if (th_mode == "tsay") {
                auto t = tsay_threshold_test(r, th_d, th_p);
                out << "statistic,p_value,df,reject_at_5pct\n"
                    << t.statistic << "," << t.p_value << "," << t.df << "," << t.reject_at_5pct << "\n";
            } else if (th_mode == "grid") {
                if (!(th_gstep > 0.0) || !(th_gmax > th_gmin))
                    throw std::runtime_error("threshold grid mode needs --gamma-min/max/step");
                std::vector<double> grid;
                for (double g = th_gmin; g <= th_gmax + 1e-12; g += th_gstep) grid.push_back(g);
                std::vector<ThresholdCandidate> cands;
                auto model =
                    threshold_expectile_grid_search(r.returns, ExpectileLevel(th_tau), th_d, th_p, grid, &cands);
                out << "gamma,aic,admissible\n";
                for (const auto& c : cands) out << c.gamma << "," << c.aic << "," << c.admissible << "\n";
                out << "# selected gamma=" << model.gamma << " aic=" << model.aic
                    << " n_lower=" << model.n_lower << " n_upper=" << model.n_upper << "\n";
            } else {  // evt: work on losses = negated returns
                std::vector<double> losses(r.returns.size());
                for (std::size_t i = 0; i < losses.size(); ++i) losses[i] = -r.returns[i];
                std::vector<double> levels = th_levels;
                if (levels.empty()) {
                    std::vector<double> s = losses;
                    std::sort(s.begin(), s.end());
                    for (int i = 50; i <= 95; i += 5)
                        levels.push_back(s[s.size() * static_cast<std::size_t>(i) / 100]);
                }
                out << "threshold,mean_excess,count\n";
                for (const auto& p : mean_excess_curve(losses, levels))
                    out << p.threshold << "," << (p.valid ? p.mean_excess : 0.0) << "," << p.count << "\n";
                if (th_gpd) {
                    std::vector<double> exc;
                    for (double x : losses)
                        if (x > th_gpd_u) exc.push_back(x - th_gpd_u);
                    auto g = gpd_fit(exc);
                    out << "# gpd threshold=" << th_gpd_u << " xi=" << g.xi << " sigma=" << g.sigma
                        << " n_exceedances=" << g.n_exceedances << "\n";
                }
            }
            return 0;
        }

        if (*cal) {
            print_config(*cal);
            auto r = date_filter(load_returns(cal_in.input, cal_in.prices, cal_in.date_col, cal_in.value_col),
                                 cal_in.from, cal_in.to);
            auto tau = calibrate_tau(r.returns, cal_alpha);
            std::cout.precision(10);
            std::cout << "alpha " << cal_alpha << "\ntau " << tau.tau << "\nexpectile "
                      << sample_expectile(r.returns, tau) << "\n";
            return 0;
        }

        if (*sim) {
            print_config(*sim);
            GarchParams p;
            p.omega = s_omega;
            p.alpha_g = s_alpha;
            p.beta_g = s_beta;
            p.mean_mu = s_mu;
            p.nu = s_nu;
            auto rs = garch_simulate(p, s_n, s_dist == "t" ? Innovation::student_t : Innovation::normal, s_seed);
            ReturnSeries series;
            Date d = Date::parse(s_start);
            for (double x : rs) {
                series.dates.push_back(d);
                series.returns.push_back(x);
                d = next_date(d);
            }
            write_return_series_csv(series, s_out);
            std::cout << "# wrote " << s_n << " observations to " << s_out << " (seed " << s_seed << ")\n";
            return 0;
        }

        if (*bt) {
            print_config(*bt);
            auto r = date_filter(load_returns(bt_in.input, bt_in.prices, bt_in.date_col, bt_in.value_col),
                                 bt_in.from, bt_in.to);
            AlignedDataset data;
            if (!bt_exog.empty()) {
                data = align_exogenous(r, load_exogenous_panel(bt_exog, bt_in.date_col));
            } else {
                data.dates = r.dates;
                data.returns = r.returns;
            }
            std::vector<VarModelSpec> specs;
            for (const auto& m : bt_models) {
                VarModelSpec s;
                s.family = var_family_from_string(m);
                s.window = s.family == VarFamily::historical_sim ? bt_hs_window : bt_window;
                s.refit_every = bt_refit;
                specs.push_back(s);
            }
            int workers = bt_workers;
            if (workers <= 0) {
                const char* env = std::getenv("EVAR_WORKERS");
                workers = env ? std::max(1, std::atoi(env)) : 1;
            }
            auto report = run_backtest(data, specs, bt_alphas, Date::parse(bt_eval_start),
                                       Date::parse(bt_eval_end), workers);
            report.seed = bt_seed;
            write_report(report, bt_out, bt_format == "json" ? ReportFormat::json : ReportFormat::csv);
            for (const auto& c : report.cells)
                std::cout << c.model_id << " alpha=" << c.alpha
                          << (c.failed ? " FAILED: " + c.error
                                       : " violations=" + std::to_string(c.n_violations) + "/" +
                                             std::to_string(c.n_obs))
                          << "\n";
            return report.any_failed() ? 2 : 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
