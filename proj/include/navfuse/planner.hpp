// Shortest-path planning on the static map: 8-connected occupancy grid A*
// with an octile heuristic, followed by string-pulling smoothing. The same
// planner computes L_opt for SPL at episode start.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <vector>

#include "navfuse/geometry.hpp"

namespace navfuse {

struct PlannedPath {
  std::vector<Vec2> waypoints;  // consecutive points > 1e-6 m apart
  double length = 0.0;          // sum of segment lengths
};

namespace planner_detail {

class Grid {
 public:
  // Cells within `inflation` of an obstacle are blocked; free cells within a
  // narrow band beyond it carry a cost penalty so routes prefer the middle
  // of corridors over boundary-hugging ones. The band is kept short so path
  // lengths stay within the planner's optimality tolerance.
  static constexpr double kPenaltyBand = 0.3;   // m beyond the inflation
  static constexpr double kPenaltyWeight = 0.5;  // extra cost at the boundary

  Grid(const MapGeometry& map, double inflation, double resolution)
      : map_(&map), inflation_(inflation), res_(resolution) {
    nx_ = std::max(1, static_cast<int>(std::ceil(map.bounds.width() / res_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(map.bounds.height() / res_)));
    blocked_.assign(static_cast<std::size_t>(nx_) * ny_, false);
    penalty_.assign(blocked_.size(), 0.0);
    for (int iy = 0; iy < ny_; ++iy) {
      for (int ix = 0; ix < nx_; ++ix) {
        double c = clearance(center(ix, iy), *map_);
        blocked_[index(ix, iy)] = c <= inflation_;
        if (c > inflation_ && c < inflation_ + kPenaltyBand) {
          penalty_[index(ix, iy)] =
              kPenaltyWeight * (inflation_ + kPenaltyBand - c) / kPenaltyBand;
        }
      }
    }
  }

  double penalty(int ix, int iy) const {
    return in_range(ix, iy) ? penalty_[index(ix, iy)] : 0.0;
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * nx_ + ix;
  }
  Vec2 center(int ix, int iy) const {
    return {map_->bounds.xmin + (ix + 0.5) * res_,
            map_->bounds.ymin + (iy + 0.5) * res_};
  }
  bool in_range(int ix, int iy) const {
    return ix >= 0 && ix < nx_ && iy >= 0 && iy < ny_;
  }
  bool blocked(int ix, int iy) const {
    return !in_range(ix, iy) || blocked_[index(ix, iy)];
  }
  std::pair<int, int> to_cell(const Vec2& p) const {
    int ix = static_cast<int>((p.x - map_->bounds.xmin) / res_);
    int iy = static_cast<int>((p.y - map_->bounds.ymin) / res_);
    return {std::clamp(ix, 0, nx_ - 1), std::clamp(iy, 0, ny_ - 1)};
  }
  double resolution() const { return res_; }

 private:
  const MapGeometry* map_;
  double inflation_;
  double res_;
  int nx_ = 0, ny_ = 0;
  std::vector<bool> blocked_;
  std::vector<double> penalty_;
};

inline bool line_of_sight(const Vec2& a, const Vec2& b, const MapGeometry& map,
                          double inflation, double step) {
  double len = distance(a, b);
  int n = std::max(1, static_cast<int>(std::ceil(len / step)));
  for (int i = 0; i <= n; ++i) {
    Vec2 p = a + (b - a) * (static_cast<double>(i) / n);
    if (clearance(p, map) <= inflation) return false;
  }
  return true;
}

}  // namespace planner_detail

// Plans a collision-free path from `from` to `to` against obstacles inflated
// by `inflation`. Returns nullopt when no path exists (including endpoints
// inside inflated obstacles). Never throws for unreachable goals.
inline std::optional<PlannedPath> plan_shortest_path(const MapGeometry& map,
                                                     const Vec2& from,
                                                     const Vec2& to,
                                                     double inflation,
                                                     double resolution = 0.1) {
  using planner_detail::Grid;
  if (clearance(from, map) <= inflation || clearance(to, map) <= inflation) {
    return std::nullopt;
  }

  Grid grid(map, inflation, resolution);
  auto [sx, sy] = grid.to_cell(from);
  auto [gx, gy] = grid.to_cell(to);
  // Endpoint cells can be marginally blocked by quantization even though the
  // exact endpoints are free; search from the nearest free cell instead.
  auto nearest_free = [&](int& cx, int& cy) {
    if (!grid.blocked(cx, cy)) return true;
    for (int radius = 1; radius <= 3; ++radius) {
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          if (!grid.blocked(cx + dx, cy + dy)) {
            cx += dx;
            cy += dy;
            return true;
          }
        }
      }
    }
    return false;
  };
  if (!nearest_free(sx, sy) || !nearest_free(gx, gy)) return std::nullopt;

  const std::size_t total = static_cast<std::size_t>(grid.nx()) * grid.ny();
  std::vector<double> cost(total, std::numeric_limits<double>::infinity());
  std::vector<int> parent(total, -1);
  auto heuristic = [&](int ix, int iy) {
    double dx = std::abs(ix - gx), dy = std::abs(iy - gy);
    return (std::max(dx, dy) + (std::sqrt(2.0) - 1.0) * std::min(dx, dy)) *
           grid.resolution();
  };

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::size_t start_idx = grid.index(sx, sy);
  cost[start_idx] = 0.0;
  open.push({heuristic(sx, sy), start_idx});

  static const int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static const int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

  std::size_t goal_idx = grid.index(gx, gy);
  bool found = false;
  while (!open.empty()) {
    auto [f, idx] = open.top();
    open.pop();
    if (idx == goal_idx) {
      found = true;
      break;
    }
    int ix = static_cast<int>(idx % grid.nx());
    int iy = static_cast<int>(idx / grid.nx());
    if (f > cost[idx] + heuristic(ix, iy) + 1e-12) continue;
    for (int d = 0; d < 8; ++d) {
      int nx2 = ix + kDx[d], ny2 = iy + kDy[d];
      if (grid.blocked(nx2, ny2)) continue;
      // No corner cutting: a diagonal move needs both orthogonal neighbors.
      if (d >= 4 && (grid.blocked(ix + kDx[d], iy) || grid.blocked(ix, iy + kDy[d]))) {
        continue;
      }
      double step = (d < 4 ? 1.0 : std::sqrt(2.0)) * grid.resolution();
      std::size_t nidx = grid.index(nx2, ny2);
      double c = cost[idx] + step * (1.0 + grid.penalty(nx2, ny2));
      if (c < cost[nidx]) {
        cost[nidx] = c;
        parent[nidx] = static_cast<int>(idx);
        open.push({c + heuristic(nx2, ny2), nidx});
      }
    }
  }
  if (!found) return std::nullopt;

  std::vector<Vec2> raw;
  raw.push_back(to);
  for (std::size_t idx = goal_idx; idx != start_idx;
       idx = static_cast<std::size_t>(parent[idx])) {
    int ix = static_cast<int>(idx % grid.nx());
    int iy = static_cast<int>(idx / grid.nx());
    raw.push_back(grid.center(ix, iy));
  }
  raw.push_back(from);
  std::reverse(raw.begin(), raw.end());

  // String pulling: greedily connect each point to the farthest visible one.
  // Visibility is checked with a small extra margin so smoothed chords do
  // not graze the inflation boundary; where the margin is too tight the grid
  // path is kept as is.
  std::vector<Vec2> smooth;
  smooth.push_back(raw.front());
  std::size_t i = 0;
  double los_step = resolution * 0.5;
  double los_inflation = inflation + 0.1;
  while (i + 1 < raw.size()) {
    std::size_t j = raw.size() - 1;
    for (; j > i + 1; --j) {
      if (planner_detail::line_of_sight(raw[i], raw[j], map, los_inflation,
                                        los_step)) {
        break;
      }
    }
    smooth.push_back(raw[j]);
    i = j;
  }

  PlannedPath path;
  for (const auto& p : smooth) {
    if (!path.waypoints.empty() && distance(path.waypoints.back(), p) <= 1e-6) {
      continue;
    }
    path.waypoints.push_back(p);
  }
  if (path.waypoints.size() < 2) {
    // Degenerate start == goal case.
    path.waypoints = {from, to};
  }
  path.length = polyline_length(path.waypoints);
  return path;
}

}  // namespace navfuse
