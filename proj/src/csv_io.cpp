#include "evar/csv_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace evar {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace and CR
        auto b = field.find_first_not_of(" \t\r");
        auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back("");
    return out;
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // row-major, data rows only
};

RawTable read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    RawTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
    t.header = split_csv_line(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != t.header.size())
            throw std::runtime_error(path + ": row " + std::to_string(lineno) + " has " +
                                     std::to_string(fields.size()) + " fields, header has " +
                                     std::to_string(t.header.size()));
        t.rows.push_back(std::move(fields));
    }
    return t;
}

std::size_t find_column(const RawTable& t, const std::string& name, const std::string& path) {
    auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) throw std::runtime_error(path + ": missing column '" + name + "'");
    return static_cast<std::size_t>(it - t.header.begin());
}

double parse_double(const std::string& s, std::size_t row, const std::string& path) {
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(path + ": unparseable number '" + s + "' at data row " + std::to_string(row + 1));
    }
}

// Sort rows of a dated table by date, rejecting duplicates.
template <typename T>
void sort_by_date(std::vector<Date>& dates, std::vector<T>& values, const std::string& path) {
    std::vector<std::size_t> idx(dates.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return dates[a] < dates[b]; });
    std::vector<Date> d2;
    std::vector<T> v2;
    d2.reserve(dates.size());
    v2.reserve(values.size());
    for (auto i : idx) {
        if (!d2.empty() && d2.back() == dates[i])
            throw std::runtime_error(path + ": duplicate date " + dates[i].to_string());
        d2.push_back(dates[i]);
        v2.push_back(values[i]);
    }
    dates = std::move(d2);
    values = std::move(v2);
}

}  // namespace

PriceSeries load_price_series(const std::string& path, const CsvConfig& config) {
    auto t = read_table(path);
    auto dc = find_column(t, config.date_column, path);
    auto pc = find_column(t, config.value_column, path);
    PriceSeries p;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        Date d;
        try {
            d = Date::parse(t.rows[i][dc]);
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ": data row " + std::to_string(i + 1) + ": " + e.what());
        }
        double v = parse_double(t.rows[i][pc], i, path);
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::runtime_error(path + ": non-positive price at data row " + std::to_string(i + 1));
        p.dates.push_back(d);
        p.prices.push_back(v);
    }
    sort_by_date(p.dates, p.prices, path);
    p.validate();
    return p;
}

ReturnSeries load_return_series(const std::string& path, const CsvConfig& config) {
    auto t = read_table(path);
    auto dc = find_column(t, config.date_column, path);
    auto rc = find_column(t, config.value_column, path);
    ReturnSeries r;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        Date d;
        try {
            d = Date::parse(t.rows[i][dc]);
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ": data row " + std::to_string(i + 1) + ": " + e.what());
        }
        double v = parse_double(t.rows[i][rc], i, path);
        if (!std::isfinite(v))
            throw std::runtime_error(path + ": non-finite return at data row " + std::to_string(i + 1));
        r.dates.push_back(d);
        r.returns.push_back(v);
    }
    sort_by_date(r.dates, r.returns, path);
    r.validate();
    return r;
}

ExogenousPanel load_exogenous_panel(const std::string& path, const std::string& date_column) {
    auto t = read_table(path);
    auto dc = find_column(t, date_column, path);
    ExogenousPanel x;
    for (std::size_t j = 0; j < t.header.size(); ++j) {
        if (j == dc) continue;
        x.names.push_back(t.header[j]);
        x.columns.emplace_back();
    }
    std::vector<std::vector<double>> rows;  // row-major scratch
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        Date d;
        try {
            d = Date::parse(t.rows[i][dc]);
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ": data row " + std::to_string(i + 1) + ": " + e.what());
        }
        x.dates.push_back(d);
        std::vector<double> row;
        for (std::size_t j = 0; j < t.header.size(); ++j) {
            if (j == dc) continue;
            row.push_back(parse_double(t.rows[i][j], i, path));
        }
        rows.push_back(std::move(row));
    }
    sort_by_date(x.dates, rows, path);
    for (const auto& row : rows)
        for (std::size_t j = 0; j < row.size(); ++j) x.columns[j].push_back(row[j]);
    x.validate();
    return x;
}

void write_return_series_csv(const ReturnSeries& r, const std::string& path, const std::string& value_header) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "date," << value_header << "\n";
    out.precision(17);
    for (std::size_t i = 0; i < r.size(); ++i) out << r.dates[i].to_string() << "," << r.returns[i] << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace evar
