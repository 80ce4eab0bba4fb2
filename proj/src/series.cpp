#include "evar/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

namespace evar {

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

Date Date::parse(const std::string& s) {
    int y = 0, m = 0, d = 0;
    char trailing = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%d%c", &y, &m, &d, &trailing) != 3)
        throw std::invalid_argument("bad date '" + s + "': expected YYYY-MM-DD");
    if (m < 1 || m > 12 || d < 1 || d > 31)
        throw std::invalid_argument("bad date '" + s + "': out-of-range month/day");
    return Date{y, m, d};
}

static void check_increasing(const std::vector<Date>& dates, const char* what) {
    for (std::size_t i = 1; i < dates.size(); ++i)
        if (!(dates[i - 1] < dates[i]))
            throw std::invalid_argument(std::string(what) + ": dates not strictly increasing at row " +
                                        std::to_string(i) + " (" + dates[i].to_string() + ")");
}

void PriceSeries::validate() const {
    if (dates.size() != prices.size()) throw std::invalid_argument("PriceSeries: dates/prices length mismatch");
    if (size() < 2) throw std::invalid_argument("PriceSeries: too short (need length >= 2)");
    check_increasing(dates, "PriceSeries");
    for (std::size_t i = 0; i < prices.size(); ++i)
        if (!(prices[i] > 0.0) || !std::isfinite(prices[i]))
            throw std::invalid_argument("PriceSeries: non-positive price at row " + std::to_string(i));
}

void ReturnSeries::validate() const {
    if (dates.size() != returns.size()) throw std::invalid_argument("ReturnSeries: dates/returns length mismatch");
    check_increasing(dates, "ReturnSeries");
    for (std::size_t i = 0; i < returns.size(); ++i)
        if (!std::isfinite(returns[i]))
            throw std::invalid_argument("ReturnSeries: non-finite return at row " + std::to_string(i));
}

void ExogenousPanel::validate() const {
    check_increasing(dates, "ExogenousPanel");
    if (names.size() != columns.size()) throw std::invalid_argument("ExogenousPanel: names/columns mismatch");
    std::unordered_set<std::string> seen;
    for (const auto& n : names)
        if (!seen.insert(n).second) throw std::invalid_argument("ExogenousPanel: duplicate column name '" + n + "'");
    for (const auto& c : columns)
        if (c.size() != dates.size()) throw std::invalid_argument("ExogenousPanel: ragged columns");
}

ReturnSeries to_log_returns(const PriceSeries& p) {
    p.validate();
    ReturnSeries r;
    r.dates.assign(p.dates.begin() + 1, p.dates.end());
    r.returns.resize(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i)
        r.returns[i - 1] = std::log(p.prices[i]) - std::log(p.prices[i - 1]);
    return r;
}

AlignedDataset align_exogenous(const ReturnSeries& r, const ExogenousPanel& x) {
    if (r.size() == 0 || x.size() == 0) throw std::invalid_argument("align_exogenous: empty input");
    r.validate();
    x.validate();

    std::unordered_set<int> xkeys;
    for (const auto& d : x.dates) xkeys.insert(d.key());

    AlignedDataset out;
    out.exog_names = x.names;
    out.exog.resize(x.columns.size());

    std::size_t xi = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!xkeys.count(r.dates[i].key())) continue;
        while (xi < x.size() && x.dates[xi] < r.dates[i]) ++xi;
        if (xi >= x.size() || !(x.dates[xi] == r.dates[i])) continue;
        bool complete = true;
        for (const auto& c : x.columns)
            if (!std::isfinite(c[xi])) { complete = false; break; }
        if (!complete) continue;  // rows with missing exogenous cells are dropped
        out.dates.push_back(r.dates[i]);
        out.returns.push_back(r.returns[i]);
        for (std::size_t j = 0; j < x.columns.size(); ++j) out.exog[j].push_back(x.columns[j][xi]);
    }
    if (out.dates.empty()) throw std::invalid_argument("align_exogenous: empty date intersection");
    return out;
}

std::vector<std::size_t> flag_outliers(const std::vector<double>& xs, double mult) {
    if (xs.empty()) return {};
    std::vector<double> s = xs;
    std::sort(s.begin(), s.end());
    auto q = [&](double p) {
        double h = p * (static_cast<double>(s.size()) - 1.0);
        auto lo = static_cast<std::size_t>(h);
        auto hi = std::min(lo + 1, s.size() - 1);
        return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
    };
    const double med = q(0.5), iqr = q(0.75) - q(0.25);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::abs(xs[i] - med) > mult * iqr) out.push_back(i);
    return out;
}

}  // namespace evar
