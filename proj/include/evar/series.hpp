#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace evar {

// Calendar date, no timezone. Ordering is by (year, month, day).
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    [[nodiscard]] int key() const { return year * 10000 + month * 100 + day; }
    auto operator<=>(const Date& o) const { return key() <=> o.key(); }
    bool operator==(const Date& o) const { return key() == o.key(); }

    [[nodiscard]] std::string to_string() const;

    // Parses ISO-8601 "YYYY-MM-DD". Throws std::invalid_argument on bad input.
    static Date parse(const std::string& s);
};

struct PriceSeries {
    std::vector<Date> dates;
    std::vector<double> prices;

    [[nodiscard]] std::size_t size() const { return dates.size(); }

    // Enforces: strictly increasing dates, prices > 0, length >= 2.
    void validate() const;
};

struct ReturnSeries {
    std::vector<Date> dates;
    std::vector<double> returns;

    [[nodiscard]] std::size_t size() const { return dates.size(); }
    void validate() const;
};

struct ExogenousPanel {
    std::vector<Date> dates;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;  // columns[j][t]

    [[nodiscard]] std::size_t size() const { return dates.size(); }
    void validate() const;
};

struct AlignedDataset {
    std::vector<Date> dates;
    std::vector<double> returns;
    std::vector<std::string> exog_names;
    std::vector<std::vector<double>> exog;  // exog[j][t]

    [[nodiscard]] std::size_t size() const { return dates.size(); }
};

// r_t = ln(P_t) - ln(P_{t-1}), dated by the later observation.
ReturnSeries to_log_returns(const PriceSeries& p);

// Restrict both inputs to the intersection of their date sets (order preserved).
// No lagging is applied; models lag their regressors explicitly.
AlignedDataset align_exogenous(const ReturnSeries& r, const ExogenousPanel& x);

// Diagnostic only: indices of observations farther than mult * IQR from the
// median. Flagged rows are never excluded by any model in this library.
std::vector<std::size_t> flag_outliers(const std::vector<double>& xs, double mult = 3.5);

}  // namespace evar
