#pragma once

#include <string>
#include <vector>

#include "evar/series.hpp"

namespace evar {

// Column-name mapping for CSV ingestion. Comma-separated, header row
// required, ISO-8601 dates.
struct CsvConfig {
    std::string date_column = "date";
    std::string value_column = "price";
};

// Loads a dated price series. Rows are sorted by date after parsing;
// duplicate dates and non-positive prices are rejected with the offending
// row number.
PriceSeries load_price_series(const std::string& path, const CsvConfig& config = {});

// Loads every non-date column as a named exogenous series. Blank cells
// become NaN and are dropped later during alignment.
ExogenousPanel load_exogenous_panel(const std::string& path, const std::string& date_column = "date");

ReturnSeries load_return_series(const std::string& path, const CsvConfig& config = {.value_column = "return"});

void write_return_series_csv(const ReturnSeries& r, const std::string& path,
                             const std::string& value_header = "return");

}  // namespace evar
