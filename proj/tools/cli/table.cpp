#include "table.hpp"

#include <algorithm>
#include <cstdio>

namespace unsaid::cli {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void csv_row(std::ostream& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << csv_field(row[i]);
  }
  out << "\r\n";
}

}  // namespace

std::string num(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

void Table::write_csv(std::ostream& out) const {
  csv_row(out, header_);
  for (const auto& r : rows_) csv_row(out, r);
}

void Table::write_text(std::ostream& out) const {
  std::vector<std::size_t> width(header_.size());
  auto widen = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) {
      width[i] = std::max(width[i], row[i].size());
    }
  };
  widen(header_);
  for (const auto& r : rows_) widen(r);
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << "  ";
      out << row[i];
      if (i + 1 < row.size()) out << std::string(width[i] - row[i].size(), ' ');
    }
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

}  // namespace unsaid::cli
