#include "cracc/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include <fmt/format.h>

#include "cracc/error.hpp"

namespace cracc {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == line.npos ? line.npos : comma - start)));
    if (comma == line.npos) break;
    start = comma + 1;
  }
  return fields;
}

template <class T>
bool parse_number(std::string_view text, T& value) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc() && ptr == end && !text.empty();
}

}  // namespace

CsvParseError::CsvParseError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(fmt::format("{}:{}: {}", source, line, message)), line_(line) {}

std::vector<SubjectRecord> parse_sample_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  std::vector<SubjectRecord> records;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (lineno == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    if (view.empty()) continue;
    const auto fields = split(view);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "time" || fields[1] != "status" || fields[2] != "score") {
        throw CsvParseError(source, lineno, "expected header 'time,status,score'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) {
      throw CsvParseError(source, lineno,
                          fmt::format("expected 3 fields, found {}", fields.size()));
    }
    SubjectRecord r;
    if (!parse_number(fields[0], r.time) || !std::isfinite(r.time)) {
      throw CsvParseError(source, lineno, fmt::format("time '{}' is not a finite number", fields[0]));
    }
    if (r.time < 0.0) throw CsvParseError(source, lineno, "time is negative");
    if (!parse_number(fields[1], r.status) || r.status < 0) {
      throw CsvParseError(source, lineno,
                          fmt::format("status '{}' is not 0 (censored) or a cause number", fields[1]));
    }
    if (!parse_number(fields[2], r.score) || !std::isfinite(r.score)) {
      throw CsvParseError(source, lineno, fmt::format("score '{}' is not a finite number", fields[2]));
    }
    records.push_back(r);
  }
  if (!header_seen) throw CsvParseError(source, lineno == 0 ? 1 : lineno, "file is empty");
  if (records.empty()) throw CsvParseError(source, lineno, "no data rows");
  return records;
}

std::vector<SubjectRecord> read_sample_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open " + path.string());
  return parse_sample_csv(in, path.string());
}

void write_sample_csv(std::ostream& out, std::span<const SubjectRecord> records) {
  out << "time,status,score\n";
  for (const auto& r : records) out << fmt::format("{},{},{}\n", r.time, r.status, r.score);
}

void write_sample_csv(const std::filesystem::path& path, std::span<const SubjectRecord> records) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + path.string());
  write_sample_csv(out, records);
}

}  // namespace cracc
