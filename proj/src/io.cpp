#include "mhdens/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mhdens {

namespace {

std::string sig6(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

}  // namespace

std::string format_rate_table(const RateTable& table) {
  if (table.rows.empty()) throw std::invalid_argument("format_rate_table: empty table");
  std::ostringstream out;
  out << "h,dt,err_v,rate_v,err_w,rate_w\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    out << sig6(row.h) << "," << sig6(row.dt) << "," << sig6(row.err_v) << ",";
    if (i > 0) out << sig6(row.rate_v);
    out << "," << sig6(row.err_w) << ",";
    if (i > 0) out << sig6(row.rate_w);
    out << "\n";
  }
  return out.str();
}

void emit_rate_table(const RateTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_rate_table: cannot open " + path);
  out << format_rate_table(table);
  if (!out) throw std::runtime_error("emit_rate_table: write failed for " + path);
}

RateTable parse_rate_table(const std::string& csv_text) {
  RateTable table;
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line) || line != "h,dt,err_v,rate_v,err_w,rate_w")
    throw std::runtime_error("parse_rate_table: bad header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row_in(line);
    std::string field;
    RateRow row;
    double* slots[6] = {&row.h, &row.dt, &row.err_v, &row.rate_v, &row.err_w, &row.rate_w};
    for (int i = 0; i < 6; ++i) {
      if (!std::getline(row_in, field, ',') && i < 5)
        throw std::runtime_error("parse_rate_table: short row");
      *slots[i] = field.empty() ? std::nan("") : std::stod(field);
    }
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace mhdens
