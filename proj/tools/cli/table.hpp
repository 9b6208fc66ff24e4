#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace unsaid::cli {

/// Rows of cells rendered either as RFC-4180 CSV or as aligned columns.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  void write_csv(std::ostream& out) const;
  void write_text(std::ostream& out) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// 6 significant digits.
std::string num(double value);

}  // namespace unsaid::cli
