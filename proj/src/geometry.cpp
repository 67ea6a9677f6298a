#include "spreadnet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spreadnet/csv.hpp"
#include "spreadnet/rng.hpp"

namespace spreadnet {

void Window::validate() const {
  if (!(width_km > 0.0) || !(height_km > 0.0))
    throw std::invalid_argument("window dimensions must be positive");
}

PointSet sample_ppp(double intensity, const Window& window, std::uint64_t seed,
                    int layer_id) {
  window.validate();
  if (!(intensity >= 0.0))
    throw std::invalid_argument("sample_ppp: intensity must be >= 0");
  if (layer_id < 1) throw std::invalid_argument("sample_ppp: layer_id must be >= 1");

  rng::CounterRng gen(seed, static_cast<std::uint64_t>(layer_id));
  const int count = rng::poisson(gen, intensity * window.area_km2());

  PointSet set;
  set.layer_id = layer_id;
  set.points.resize(count);
  for (auto& p : set.points) {
    p.x = gen.uniform() * window.width_km;
    p.y = gen.uniform() * window.height_km;
  }
  return set;
}

std::vector<PointSet> sample_layers(const std::vector<double>& intensities,
                                    const Window& window, std::uint64_t seed) {
  std::vector<PointSet> layers;
  layers.reserve(intensities.size());
  for (std::size_t m = 0; m < intensities.size(); ++m)
    layers.push_back(sample_ppp(intensities[m], window, seed, static_cast<int>(m) + 1));
  return layers;
}

namespace {

double axis_delta(double a, double b, double extent, bool wrap) {
  double d = std::fabs(a - b);
  if (wrap) d = std::min(d, extent - d);
  return d;
}

}  // namespace

MultiLayerGraph MultiLayerGraph::build(const std::vector<PointSet>& layers,
                                       const std::vector<double>& ranges_km,
                                       const Window& window) {
  window.validate();
  if (layers.size() != ranges_km.size())
    throw std::invalid_argument("build: one range per layer required");
  for (double r : ranges_km)
    if (!(r >= 0.0)) throw std::invalid_argument("build: ranges must be >= 0");

  MultiLayerGraph g;
  g.window_ = window;
  g.ranges_km_ = ranges_km;

  const int m_layers = static_cast<int>(layers.size());
  g.layer_start_.resize(m_layers + 1, 0);
  for (int m = 0; m < m_layers; ++m)
    g.layer_start_[m + 1] = g.layer_start_[m] + static_cast<int>(layers[m].points.size());

  const int n = g.layer_start_[m_layers];
  g.layer_of_.resize(n);
  g.positions_.resize(n);
  g.arcs_.assign(n, {});
  for (int m = 0; m < m_layers; ++m) {
    for (std::size_t i = 0; i < layers[m].points.size(); ++i) {
      const int id = g.layer_start_[m] + static_cast<int>(i);
      g.layer_of_[id] = m + 1;
      g.positions_[id] = layers[m].points[i];
    }
  }

  const double max_range = ranges_km.empty()
                               ? 0.0
                               : *std::max_element(ranges_km.begin(), ranges_km.end());
  if (n == 0 || max_range <= 0.0) return g;

  // Uniform grid with cell size >= max range, so all candidate neighbours of
  // a node live in its 3x3 cell block.
  const int ncx = std::max(1, static_cast<int>(std::floor(window.width_km / max_range)));
  const int ncy = std::max(1, static_cast<int>(std::floor(window.height_km / max_range)));
  const double cw = window.width_km / ncx;
  const double ch = window.height_km / ncy;

  std::vector<std::vector<int>> cells(static_cast<std::size_t>(ncx) * ncy);
  const auto cell_of = [&](const Point& p) {
    int cx = std::min(ncx - 1, static_cast<int>(p.x / cw));
    int cy = std::min(ncy - 1, static_cast<int>(p.y / ch));
    return cy * ncx + cx;
  };
  for (int u = 0; u < n; ++u) cells[cell_of(g.positions_[u])].push_back(u);

  std::vector<int> block;
  block.reserve(9);
  for (int u = 0; u < n; ++u) {
    const Point pu = g.positions_[u];
    const double ru = ranges_km[g.layer_of_[u] - 1];
    const int cx = std::min(ncx - 1, static_cast<int>(pu.x / cw));
    const int cy = std::min(ncy - 1, static_cast<int>(pu.y / ch));

    block.clear();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        int bx = cx + dx;
        int by = cy + dy;
        if (window.wraparound) {
          bx = (bx + ncx) % ncx;
          by = (by + ncy) % ncy;
        } else if (bx < 0 || bx >= ncx || by < 0 || by >= ncy) {
          continue;
        }
        block.push_back(by * ncx + bx);
      }
    }
    std::sort(block.begin(), block.end());
    block.erase(std::unique(block.begin(), block.end()), block.end());

    for (int cell : block) {
      for (int v : cells[cell]) {
        if (v <= u) continue;  // each pair once
        const Point pv = g.positions_[v];
        const double dx = axis_delta(pu.x, pv.x, window.width_km, window.wraparound);
        const double dy = axis_delta(pu.y, pv.y, window.height_km, window.wraparound);
        const double d2 = dx * dx + dy * dy;
        const double rv = ranges_km[g.layer_of_[v] - 1];
        const bool in_u = d2 <= ru * ru;
        const bool in_v = d2 <= rv * rv;
        if (!in_u && !in_v) continue;  // Assumption 1: either range links both ways
        g.arcs_[u].push_back({static_cast<std::int32_t>(v), in_u});
        g.arcs_[v].push_back({static_cast<std::int32_t>(u), in_v});
      }
    }
  }

  for (auto& list : g.arcs_)
    std::sort(list.begin(), list.end(),
              [](const Arc& a, const Arc& b) { return a.target < b.target; });
  return g;
}

int MultiLayerGraph::layer_size(int layer) const {
  if (layer < 1 || layer > layer_count())
    throw std::invalid_argument("layer index out of range");
  return layer_start_[layer] - layer_start_[layer - 1];
}

std::vector<std::uint64_t> MultiLayerGraph::degree_histogram(const StrandId& strand) const {
  strand.validate(layer_count());

  std::vector<std::uint64_t> hist;
  const auto bump = [&hist](int k) {
    if (static_cast<std::size_t>(k) >= hist.size()) hist.resize(k + 1, 0);
    ++hist[k];
  };

  for (int u = 0; u < node_count(); ++u) {
    const int lu = layer_of_[u];
    bool participates = false;
    switch (strand.kind) {
      case StrandId::Kind::Intra:
        participates = lu == strand.m;
        break;
      case StrandId::Kind::Inter:
        participates = lu == strand.m;  // K_mn is seen from layer m
        break;
      case StrandId::Kind::Combined:
        participates = true;
        break;
    }
    if (!participates) continue;

    int k = 0;
    for (const Arc& a : arcs_[u]) {
      if (!a.within_own) continue;
      const int lv = layer_of_[a.target];
      switch (strand.kind) {
        case StrandId::Kind::Intra:
          if (lv == strand.m) ++k;
          break;
        case StrandId::Kind::Inter:
          if (lv == strand.m || lv == strand.n) ++k;
          break;
        case StrandId::Kind::Combined:
          ++k;
          break;
      }
    }
    bump(k);
  }
  return hist;
}

void write_points_csv(const std::vector<PointSet>& layers, const std::string& path) {
  csv::Writer w(path, {"layer", "x_km", "y_km"});
  for (const auto& set : layers)
    for (const auto& p : set.points)
      w.row({csv::fmt(set.layer_id), csv::fmt(p.x), csv::fmt(p.y)});
}

void write_edges_csv(const MultiLayerGraph& graph, const std::string& path) {
  csv::Writer w(path, {"layer_a", "idx_a", "layer_b", "idx_b"});
  for (int u = 0; u < graph.node_count(); ++u) {
    for (const auto& arc : graph.arcs(u)) {
      if (arc.target < u) continue;  // each undirected edge once
      w.row({csv::fmt(graph.layer_of(u)), csv::fmt(graph.index_in_layer(u)),
             csv::fmt(graph.layer_of(arc.target)),
             csv::fmt(graph.index_in_layer(arc.target))});
    }
  }
}

}  // namespace spreadnet
