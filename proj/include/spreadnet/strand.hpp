#pragma once

#include <string>

namespace spreadnet {

// An information strand: a message class spreading within one layer
// (intra), across an ordered pair of layers (inter), or shared by every
// device (combined).  Layer indices are 1-based.  Inter strands are
// ordered: (m, n) counts neighbours within layer m's range, so (m, n) and
// (n, m) are different strands.
struct StrandId {
  enum class Kind { Intra, Inter, Combined };

  Kind kind = Kind::Combined;
  int m = 0;
  int n = 0;

  static StrandId intra(int m);
  static StrandId inter(int m, int n);
  static StrandId combined();

  // Throws std::invalid_argument if indices fall outside 1..layer_count
  // or an inter strand has m == n.
  void validate(int layer_count) const;

  std::string label() const;  // "intra:1", "inter:1,2", "combined"
  static StrandId parse(const std::string& text);

  bool operator==(const StrandId&) const = default;
};

}  // namespace spreadnet
