#include "evar/report.hpp"

#include <fstream>
#include <json.hpp>

namespace evar {
namespace {

using nlohmann::json;

json test_to_json(const TestResult& t) {
    json j{{"stat", t.statistic}, {"p_value", t.p_value}, {"df", t.df}, {"reject_at_5pct", t.reject_at_5pct}};
    if (!t.note.empty()) j["note"] = t.note;
    return j;
}

TestResult test_from_json(const json& j) {
    TestResult t;
    t.statistic = j.at("stat").get<double>();
    t.p_value = j.at("p_value").get<double>();
    t.df = j.at("df").get<int>();
    t.reject_at_5pct = j.at("reject_at_5pct").get<bool>();
    if (j.contains("note")) t.note = j.at("note").get<std::string>();
    return t;
}

}  // namespace

std::string report_to_json(const BacktestReport& report) {
    json j;
    j["seed"] = report.seed;
    j["results"] = json::array();
    for (const auto& c : report.cells) {
        json cell{{"model_id", c.model_id},
                  {"alpha", c.alpha},
                  {"n_obs", c.n_obs},
                  {"n_violations", c.n_violations},
                  {"violation_rate", c.violation_rate},
                  {"tests", {{"uc", test_to_json(c.uc)}, {"cc", test_to_json(c.cc)}, {"dq", test_to_json(c.dq)}}},
                  {"losses",
                   {{"all", c.loss_all}, {"all_mean", c.loss_all_mean}, {"quadratic", c.loss_quadratic}}}};
        if (c.failed) {
            cell["failed"] = true;
            cell["error"] = c.error;
        }
        j["results"].push_back(std::move(cell));
    }
    return j.dump(2);
}

void write_report(const BacktestReport& report, const std::string& path, ReportFormat format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_report: cannot write " + path);
    if (format == ReportFormat::json) {
        out << report_to_json(report) << "\n";
    } else {
        out.precision(17);
        out << "model_id,alpha,n_obs,n_violations,violation_rate,"
               "uc_stat,uc_p,cc_stat,cc_p,dq_stat,dq_p,loss_all,loss_all_mean,loss_quadratic,failed\n";
        for (const auto& c : report.cells)
            out << c.model_id << ',' << c.alpha << ',' << c.n_obs << ',' << c.n_violations << ','
                << c.violation_rate << ',' << c.uc.statistic << ',' << c.uc.p_value << ',' << c.cc.statistic
                << ',' << c.cc.p_value << ',' << c.dq.statistic << ',' << c.dq.p_value << ',' << c.loss_all
                << ',' << c.loss_all_mean << ',' << c.loss_quadratic << ',' << (c.failed ? 1 : 0) << "\n";
    }
    if (!out) throw std::runtime_error("write_report: write failed for " + path);
}

BacktestReport read_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_report: cannot open " + path);
    json j = json::parse(in);
    BacktestReport r;
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& cell : j.at("results")) {
        BacktestCell c;
        c.model_id = cell.at("model_id").get<std::string>();
        c.alpha = cell.at("alpha").get<double>();
        c.n_obs = cell.at("n_obs").get<std::size_t>();
        c.n_violations = cell.at("n_violations").get<std::size_t>();
        c.violation_rate = cell.at("violation_rate").get<double>();
        c.uc = test_from_json(cell.at("tests").at("uc"));
        c.cc = test_from_json(cell.at("tests").at("cc"));
        c.dq = test_from_json(cell.at("tests").at("dq"));
        c.loss_all = cell.at("losses").at("all").get<double>();
        c.loss_all_mean = cell.at("losses").at("all_mean").get<double>();
        c.loss_quadratic = cell.at("losses").at("quadratic").get<double>();
        if (cell.contains("failed")) {
            c.failed = cell.at("failed").get<bool>();
            c.error = cell.value("error", "");
        }
        r.cells.push_back(std::move(c));
    }
    return r;
}

}  // namespace evar
