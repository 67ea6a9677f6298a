#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace spreadnet::csv {

// Shortest round-trip decimal form, '.' separator, locale-independent.
std::string fmt(double value);
std::string fmt(long long value);
inline std::string fmt(int value) { return fmt(static_cast<long long>(value)); }
inline std::string fmt(std::uint64_t value) { return std::to_string(value); }

// CSV writer with a header row and LF line endings; the file is opened in
// binary mode so output is byte-identical across runs.
class Writer {
 public:
  Writer(const std::string& path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& fields);
  bool good() const { return out_.good(); }

 private:
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace spreadnet::csv
