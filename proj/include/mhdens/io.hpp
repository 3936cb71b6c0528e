// CSV emission for convergence tables.
#pragma once

#include <string>

#include "mhdens/mms.hpp"

namespace mhdens {

/// Writes "h,dt,err_v,rate_v,err_w,rate_w" rows with 6 significant digits;
/// the rate columns are blank on the first row. Throws std::runtime_error on
/// an unwritable path.
void emit_rate_table(const RateTable& table, const std::string& path);

/// Same content as a string (used for stdout echoes and tests).
std::string format_rate_table(const RateTable& table);

/// Parses a CSV produced by emit_rate_table (round-trip checks).
RateTable parse_rate_table(const std::string& csv_text);

}  // namespace mhdens
