#include "spreadnet/csv.hpp"

#include <charconv>
#include <stdexcept>

namespace spreadnet::csv {

std::string fmt(double value) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string fmt(long long value) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

Writer::Writer(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
  row(header);
}

void Writer::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_)
    throw std::logic_error("csv row width mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
}

}  // namespace spreadnet::csv
