#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cracc/data_model.hpp"

namespace cracc {

/// Malformed input file. `line()` is 1-based and counts the header.
class CsvParseError : public std::runtime_error {
 public:
  CsvParseError(const std::string& source, std::size_t line, const std::string& message);
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Reads `time,status,score` rows (header required, blank lines ignored).
/// Only checks syntax and per-field sanity; validate_sample does the rest.
std::vector<SubjectRecord> parse_sample_csv(std::istream& in, const std::string& source = "input");
std::vector<SubjectRecord> read_sample_csv(const std::filesystem::path& path);

/// Writes with shortest round-trip formatting, so reading back is exact.
void write_sample_csv(std::ostream& out, std::span<const SubjectRecord> records);
void write_sample_csv(const std::filesystem::path& path, std::span<const SubjectRecord> records);

}  // namespace cracc
