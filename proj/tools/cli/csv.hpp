#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

namespace gridflex::cli {

/// Six significant digits, `.` decimal, no negative zero. NaN becomes an
/// empty field.
std::string format_number(double v);

/// Quotes a field when it holds a comma, quote or line break.
std::string csv_field(const std::string& s);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add(std::vector<std::string> row);
  std::string str() const;
  /// Writes with LF line endings.
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace gridflex::cli
