#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cesarolab {

// Shortest text that round-trips a double exactly.
std::string fmt_g17(double x);

// Compact human-oriented formatting ("%g"), for labels and messages.
std::string fmt_g(double x);

std::string rfc3339_utc_now();

// Write-then-rename so readers never observe a half-written file.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

// Accumulates a CSV document.  The preamble pins the schema and isolates the
// only run-dependent bytes (the timestamp) in one comment line.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(const std::vector<std::string>& cells);
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::string body_;
};

}  // namespace cesarolab
