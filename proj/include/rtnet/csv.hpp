#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rtnet {

/// Shortest round-trip representation; stable across runs.
std::string format_double(double value);

/// Splits one CSV record. Double-quoted fields may contain commas and "".
std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a field only when it needs it.
std::string csv_field(std::string_view text);

/// Minimal row writer: comma separated, '\n' terminated.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  CsvWriter& field(std::string_view text);
  CsvWriter& field(double value);
  CsvWriter& field(std::int64_t value);
  CsvWriter& field(std::uint64_t value);
  CsvWriter& field(int value) { return field(static_cast<std::int64_t>(value)); }
  CsvWriter& field(unsigned value) { return field(static_cast<std::uint64_t>(value)); }
  CsvWriter& field(const char* text) { return field(std::string_view(text)); }
  CsvWriter& field(const std::string& text) { return field(std::string_view(text)); }
  CsvWriter& empty();
  void end_row();

  void header(std::initializer_list<std::string_view> names);

 private:
  void separator();

  std::ostream& out_;
  bool first_ = true;
};

}  // namespace rtnet
