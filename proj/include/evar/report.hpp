#pragma once

#include <string>

#include "evar/backtest.hpp"

namespace evar {

enum class ReportFormat { json, csv };

// Writes the backtest report. JSON round-trips all numeric fields losslessly
// (shortest-round-trip double formatting); CSV uses 17 significant digits.
void write_report(const BacktestReport& report, const std::string& path, ReportFormat format);

// Reads back a JSON report written by write_report.
BacktestReport read_report(const std::string& path);

std::string report_to_json(const BacktestReport& report);

}  // namespace evar
