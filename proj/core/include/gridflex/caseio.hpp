#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gridflex/model.hpp"

namespace gridflex {

inline constexpr const char* kSchemaVersion = "1.0";

struct CaseFile {
  std::string schema_version = kSchemaVersion;
  Network network;
  /// Fraction u; demands written without bounds get (1 - u, 1 + u) * forecast.
  std::optional<double> default_uncertainty;
  // Annotations; carried through round trips, ignored by the solvers.
  std::string name;
  bool reconstructed = false;
  std::string notes;

  friend bool operator==(const CaseFile&, const CaseFile&) = default;
};

/// Malformed text. `line` and `column` are 1-based; 0 for semantic errors.
class CaseError : public std::runtime_error {
 public:
  CaseError(const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct ParseOptions {
  /// Unknown fields become warnings instead of errors.
  bool lenient = false;
  std::vector<std::string>* warnings = nullptr;
};

/// Parses and validates a case. Throws CaseError.
CaseFile parse_case(std::string_view text, const ParseOptions& options = {});

/// Serializes with every field explicit and full double precision.
std::string write_case(const CaseFile& c);

/// Reads a file and parses it; I/O failures are reported as CaseError.
CaseFile load_case(const std::filesystem::path& path, const ParseOptions& options = {});

}  // namespace gridflex
