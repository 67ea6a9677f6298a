#include "spreadnet/strand.hpp"

#include <stdexcept>

namespace spreadnet {

StrandId StrandId::intra(int m) { return StrandId{Kind::Intra, m, 0}; }

StrandId StrandId::inter(int m, int n) { return StrandId{Kind::Inter, m, n}; }

StrandId StrandId::combined() { return StrandId{Kind::Combined, 0, 0}; }

void StrandId::validate(int layer_count) const {
  switch (kind) {
    case Kind::Intra:
      if (m < 1 || m > layer_count)
        throw std::invalid_argument("strand " + label() + ": layer index out of range");
      return;
    case Kind::Inter:
      if (m < 1 || m > layer_count || n < 1 || n > layer_count)
        throw std::invalid_argument("strand " + label() + ": layer index out of range");
      if (m == n)
        throw std::invalid_argument("strand " + label() + ": inter strand needs two distinct layers");
      return;
    case Kind::Combined:
      if (layer_count < 1) throw std::invalid_argument("combined strand needs at least one layer");
      return;
  }
  throw std::invalid_argument("unknown strand kind");
}

std::string StrandId::label() const {
  switch (kind) {
    case Kind::Intra:
      return "intra:" + std::to_string(m);
    case Kind::Inter:
      return "inter:" + std::to_string(m) + "," + std::to_string(n);
    case Kind::Combined:
      return "combined";
  }
  return "?";
}

StrandId StrandId::parse(const std::string& text) {
  if (text == "combined" || text == "o") return combined();
  const auto bad = [&] {
    return std::invalid_argument(
        "cannot parse strand '" + text + "' (expected intra:M, inter:M,N or combined)");
  };
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw bad();
  const std::string head = text.substr(0, colon);
  const std::string tail = text.substr(colon + 1);
  try {
    if (head == "intra") {
      std::size_t used = 0;
      const int m = std::stoi(tail, &used);
      if (used != tail.size()) throw bad();
      return intra(m);
    }
    if (head == "inter") {
      const auto comma = tail.find(',');
      if (comma == std::string::npos) throw bad();
      std::size_t used = 0;
      const int m = std::stoi(tail.substr(0, comma), &used);
      if (used != comma) throw bad();
      const std::string rest = tail.substr(comma + 1);
      const int n = std::stoi(rest, &used);
      if (used != rest.size()) throw bad();
      return inter(m, n);
    }
  } catch (const std::invalid_argument&) {
    throw bad();
  } catch (const std::out_of_range&) {
    throw bad();
  }
  throw bad();
}

}  // namespace spreadnet
