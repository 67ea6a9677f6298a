#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spreadnet/strand.hpp"

namespace spreadnet {

// Finite sampling window.  Wraparound (torus) distances remove boundary
// truncation so degree statistics match the infinite-plane formulas.
struct Window {
  double width_km = 1.0;
  double height_km = 1.0;
  bool wraparound = true;

  double area_km2() const { return width_km * height_km; }
  void validate() const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct PointSet {
  int layer_id = 1;  // 1-based
  std::vector<Point> points;
};

// Homogeneous Poisson point process restricted to the window.  Each layer
// draws from its own RNG stream of the seed, so layers are independent.
PointSet sample_ppp(double intensity, const Window& window, std::uint64_t seed,
                    int layer_id = 1);

// One PointSet per entry of `intensities`, layer ids 1..M.
std::vector<PointSet> sample_layers(const std::vector<double>& intensities,
                                    const Window& window, std::uint64_t seed);

// Multi-layer random geometric graph.  A link (u, v) exists iff
// dist(u, v) <= r(u) or <= r(v) (reciprocal communication); each directed
// arc additionally records whether the target sits within the source's own
// range, which is what the per-strand degree definitions count.
class MultiLayerGraph {
 public:
  struct Arc {
    std::int32_t target;
    bool within_own;  // dist(source, target) <= range of source's layer
  };

  static MultiLayerGraph build(const std::vector<PointSet>& layers,
                               const std::vector<double>& ranges_km,
                               const Window& window);

  int node_count() const { return static_cast<int>(layer_of_.size()); }
  int layer_count() const { return static_cast<int>(ranges_km_.size()); }
  int layer_of(int node) const { return layer_of_[node]; }       // 1-based
  int index_in_layer(int node) const { return node - layer_start_[layer_of_[node] - 1]; }
  int layer_size(int layer) const;                               // 1-based
  Point position(int node) const { return positions_[node]; }
  double range_km(int layer) const { return ranges_km_[layer - 1]; }
  const Window& window() const { return window_; }
  const std::vector<Arc>& arcs(int node) const { return arcs_[node]; }

  // Degree counts for one strand, pooled over the strand's node set:
  // intra m   — layer-m nodes, same-layer neighbours within r_m;
  // inter m,n — layer-m nodes, neighbours of layers m and n within r_m;
  // combined  — every node, all neighbours within its own range.
  // Index k of the result is the number of nodes with degree k.
  std::vector<std::uint64_t> degree_histogram(const StrandId& strand) const;

 private:
  Window window_;
  std::vector<double> ranges_km_;
  std::vector<int> layer_start_;  // size M+1
  std::vector<int> layer_of_;
  std::vector<Point> positions_;
  std::vector<std::vector<Arc>> arcs_;
};

// CSV dumps (header row, LF endings).
void write_points_csv(const std::vector<PointSet>& layers, const std::string& path);
void write_edges_csv(const MultiLayerGraph& graph, const std::string& path);

}  // namespace spreadnet
