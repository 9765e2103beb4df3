#pragma once

#include <string>
#include <vector>

#include "fbmtp/report.hpp"

namespace fbmtp {

// Full round-trip precision formatting for CSV output.
std::string fmt_full(double v);

std::string reports_csv(const std::vector<BoundReport>& reports);
std::string rate_table_csv(const RateTable& table);

// Minimal self-contained log-log scatter of a rate table with its fitted line.
std::string rate_table_svg(const RateTable& table, const std::string& title);

} // namespace fbmtp
