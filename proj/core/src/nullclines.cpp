#include "patchdyn/nullclines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>

#include "patchdyn/errors.hpp"

namespace patchdyn {

std::string_view to_string(NullclineFamily family) {
  return family == NullclineFamily::X ? "x" : "y";
}

namespace {

struct Residuals {
  double gx = std::numeric_limits<double>::quiet_NaN();
  double gy = std::numeric_limits<double>::quiet_NaN();
};

Residuals residuals_at(const CoupledParams& cp, int iterate, double x,
                       double y) {
  Residuals res;
  if (x < 0.0 || y < 0.0) return res;
  PatchState s{x, y};
  try {
    for (int k = 0; k < iterate; ++k) s = step(cp, s);
  } catch (const std::exception&) {
    return res;  // non-finite residual cell, skipped by the marcher
  }
  res.gx = s.x - x;
  res.gy = s.y - y;
  return res;
}

void check_iterate(int iterate) {
  if (iterate != 1 && iterate != 2) {
    throw std::invalid_argument("nullclines: iterate must be 1 or 2");
  }
}

struct MarchAxes {
  Axis ax;  // x axis with `resolution` points
  Axis ay;
};

MarchAxes march_axes(const GridSpec& domain, long resolution) {
  if (!domain.axis2) {
    throw std::invalid_argument("nullclines: domain must be two-dimensional");
  }
  if (resolution < 2) {
    throw std::invalid_argument("nullclines: resolution must be >= 2");
  }
  MarchAxes axes;
  axes.ax = Axis{"x", domain.axis1.min, domain.axis1.max, resolution, {}};
  axes.ay = Axis{"y", domain.axis2->min, domain.axis2->max, resolution, {}};
  axes.ax.validate();
  axes.ay.validate();
  return axes;
}

// One crossing vertex per grid edge. Edges are keyed globally so the two
// cells sharing an edge agree on the vertex coordinates exactly.
using EdgeId = std::uint64_t;

EdgeId edge_id(long i, long j, int horizontal, long resolution) {
  return (static_cast<EdgeId>(i * resolution + j) << 1) |
         static_cast<EdgeId>(horizontal);
}

struct FieldMarcher {
  const CoupledParams& cp;
  int iterate;
  bool use_x_family;  // which residual component defines this field
  const MarchAxes& axes;
  long resolution;
  double curve_tol;
  const std::vector<Residuals>& grid;  // resolution*resolution point values

  double value(long i, long j) const {
    const Residuals& r = grid[static_cast<std::size_t>(i * resolution + j)];
    return use_x_family ? r.gx : r.gy;
  }

  double residual(double x, double y) const {
    const Residuals r = residuals_at(cp, iterate, x, y);
    return use_x_family ? r.gx : r.gy;
  }

  // Vertex on the edge between grid points a and b (residuals va, vb of
  // opposite sign): linear interpolation, then bisection along the edge until
  // the residual meets curve_tol.
  PatchState edge_vertex(double ax_, double ay_, double bx, double by,
                         double va, double vb) const {
    double t = va / (va - vb);
    PatchState v{ax_ + t * (bx - ax_), ay_ + t * (by - ay_)};
    double g = residual(v.x, v.y);
    if (std::isfinite(g) && std::abs(g) < curve_tol) return v;
    double lo = 0.0, hi = 1.0, glo = va;
    for (int it = 0; it < 60; ++it) {
      t = 0.5 * (lo + hi);
      v = PatchState{ax_ + t * (bx - ax_), ay_ + t * (by - ay_)};
      g = residual(v.x, v.y);
      if (!std::isfinite(g)) break;
      if (std::abs(g) < curve_tol) return v;
      if ((g < 0.0) == (glo < 0.0)) {
        lo = t;
        glo = g;
      } else {
        hi = t;
      }
    }
    return v;
  }
};

struct SegmentGraph {
  std::map<EdgeId, PatchState> vertices;
  std::map<EdgeId, std::vector<EdgeId>> adjacency;
  // Segments bucketed by marching cell, for intersection queries.
  std::map<long, std::vector<std::pair<EdgeId, EdgeId>>> cell_segments;

  void add_segment(long cell, EdgeId a, EdgeId b) {
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
    cell_segments[cell].emplace_back(a, b);
  }
};

// Marching squares over one residual field. Corner values >= 0 count as
// positive, which pins on-grid zeros to exact grid coordinates.
SegmentGraph march(const FieldMarcher& fm, long* skipped) {
  SegmentGraph graph;
  const long res = fm.resolution;
  auto corner_x = [&](long i) { return fm.axes.ax.at(i); };
  auto corner_y = [&](long j) { return fm.axes.ay.at(j); };
  for (long i = 0; i + 1 < res; ++i) {
    for (long j = 0; j + 1 < res; ++j) {
      const double v00 = fm.value(i, j);
      const double v10 = fm.value(i + 1, j);
      const double v01 = fm.value(i, j + 1);
      const double v11 = fm.value(i + 1, j + 1);
      if (!std::isfinite(v00) || !std::isfinite(v10) || !std::isfinite(v01) ||
          !std::isfinite(v11)) {
        ++*skipped;
        continue;
      }
      const int config = (v00 >= 0.0 ? 1 : 0) | (v10 >= 0.0 ? 2 : 0) |
                         (v01 >= 0.0 ? 4 : 0) | (v11 >= 0.0 ? 8 : 0);
      if (config == 0 || config == 15) continue;

      // Crossing edges of this cell. Horizontal edges run along x.
      const EdgeId bottom = edge_id(i, j, 1, res);      // (i,j)-(i+1,j)
      const EdgeId top = edge_id(i, j + 1, 1, res);     // (i,j+1)-(i+1,j+1)
      const EdgeId left = edge_id(i, j, 0, res);        // (i,j)-(i,j+1)
      const EdgeId right = edge_id(i + 1, j, 0, res);   // (i+1,j)-(i+1,j+1)

      auto ensure_vertex = [&](EdgeId id, double ax_, double ay_, double bx,
                               double by, double va, double vb) {
        if (!graph.vertices.count(id)) {
          graph.vertices.emplace(id,
                                 fm.edge_vertex(ax_, ay_, bx, by, va, vb));
        }
      };
      auto connect = [&](EdgeId a, EdgeId b) {
        graph.add_segment(i * res + j, a, b);
      };
      auto on_bottom = [&] {
        ensure_vertex(bottom, corner_x(i), corner_y(j), corner_x(i + 1),
                      corner_y(j), v00, v10);
        return bottom;
      };
      auto on_top = [&] {
        ensure_vertex(top, corner_x(i), corner_y(j + 1), corner_x(i + 1),
                      corner_y(j + 1), v01, v11);
        return top;
      };
      auto on_left = [&] {
        ensure_vertex(left, corner_x(i), corner_y(j), corner_x(i),
                      corner_y(j + 1), v00, v01);
        return left;
      };
      auto on_right = [&] {
        ensure_vertex(right, corner_x(i + 1), corner_y(j), corner_x(i + 1),
                      corner_y(j + 1), v10, v11);
        return right;
      };

      switch (config) {
        case 1:
        case 14:
          connect(on_bottom(), on_left());
          break;
        case 2:
        case 13:
          connect(on_bottom(), on_right());
          break;
        case 3:
        case 12:
          connect(on_left(), on_right());
          break;
        case 4:
        case 11:
          connect(on_left(), on_top());
          break;
        case 8:
        case 7:
          connect(on_right(), on_top());
          break;
        case 5:
        case 10:
          connect(on_bottom(), on_top());
          break;
        case 6:
        case 9: {
          // Opposite corners share a sign: disambiguate with the cell center.
          const double cx = 0.5 * (corner_x(i) + corner_x(i + 1));
          const double cy = 0.5 * (corner_y(j) + corner_y(j + 1));
          const double center = fm.residual(cx, cy);
          const bool center_positive = std::isfinite(center) && center >= 0.0;
          const bool corner00_positive = (config == 9);
          if (center_positive == corner00_positive) {
            connect(on_left(), on_top());
            connect(on_bottom(), on_right());
          } else {
            connect(on_left(), on_bottom());
            connect(on_top(), on_right());
          }
          break;
        }
        default:
          break;
      }
    }
  }
  return graph;
}

// Walks the edge graph into polylines: open chains first (from degree-1
// nodes in ascending id order), then remaining closed loops.
std::vector<Polyline> stitch(const SegmentGraph& graph) {
  std::vector<Polyline> out;
  std::map<EdgeId, std::vector<EdgeId>> pending = graph.adjacency;
  auto take_neighbor = [&](EdgeId from) -> std::optional<EdgeId> {
    auto it = pending.find(from);
    if (it == pending.end() || it->second.empty()) return std::nullopt;
    const EdgeId next = it->second.back();
    it->second.pop_back();
    auto back = pending.find(next);
    if (back != pending.end()) {
      auto& v = back->second;
      const auto pos = std::find(v.begin(), v.end(), from);
      if (pos != v.end()) v.erase(pos);
    }
    return next;
  };
  auto walk = [&](EdgeId start) {
    Polyline line;
    line.vertices.push_back(graph.vertices.at(start));
    EdgeId node = start;
    while (auto next = take_neighbor(node)) {
      line.vertices.push_back(graph.vertices.at(*next));
      node = *next;
    }
    if (line.vertices.size() >= 2) out.push_back(std::move(line));
  };
  for (const auto& [id, neighbors] : graph.adjacency) {
    if (neighbors.size() == 1 && !pending.at(id).empty()) walk(id);
  }
  for (const auto& [id, neighbors] : graph.adjacency) {
    if (!pending.at(id).empty()) walk(id);  // closed loops
  }
  return out;
}

std::vector<Residuals> evaluate_grid(const CoupledParams& cp, int iterate,
                                     const MarchAxes& axes, long resolution) {
  std::vector<Residuals> grid(
      static_cast<std::size_t>(resolution * resolution));
  for (long i = 0; i < resolution; ++i) {
    for (long j = 0; j < resolution; ++j) {
      grid[static_cast<std::size_t>(i * resolution + j)] =
          residuals_at(cp, iterate, axes.ax.at(i), axes.ay.at(j));
    }
  }
  return grid;
}

bool segments_intersect(const PatchState& a, const PatchState& b,
                        const PatchState& c, const PatchState& d,
                        PatchState* where) {
  const double rx = b.x - a.x, ry = b.y - a.y;
  const double sx = d.x - c.x, sy = d.y - c.y;
  const double denom = rx * sy - ry * sx;
  if (denom == 0.0) return false;
  const double qpx = c.x - a.x, qpy = c.y - a.y;
  const double t = (qpx * sy - qpy * sx) / denom;
  const double u = (qpx * ry - qpy * rx) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return false;
  where->x = a.x + t * rx;
  where->y = a.y + t * ry;
  return true;
}

}  // namespace

NullclineSet nullclines(const CoupledParams& cp, int iterate,
                        const GridSpec& domain, long resolution,
                        double curve_tol) {
  check_iterate(iterate);
  if (!(curve_tol > 0.0)) {
    throw std::invalid_argument("nullclines: curve_tol must be > 0");
  }
  const MarchAxes axes = march_axes(domain, resolution);
  const std::vector<Residuals> grid =
      evaluate_grid(cp, iterate, axes, resolution);

  NullclineSet set;
  set.domain = domain;
  set.resolution = resolution;
  for (const bool x_family : {true, false}) {
    FieldMarcher fm{cp, iterate, x_family, axes, resolution, curve_tol, grid};
    CurveSet& target = x_family ? set.x_family : set.y_family;
    target.family = x_family ? NullclineFamily::X : NullclineFamily::Y;
    target.iterate = iterate;
    const SegmentGraph graph = march(fm, &target.skipped_cells);
    target.curves = stitch(graph);
  }
  return set;
}

std::vector<PatchState> nullcline_intersections(const CoupledParams& cp,
                                                int iterate,
                                                const GridSpec& domain,
                                                long resolution) {
  check_iterate(iterate);
  const MarchAxes axes = march_axes(domain, resolution);
  const std::vector<Residuals> grid =
      evaluate_grid(cp, iterate, axes, resolution);
  const double tol = std::numeric_limits<double>::infinity();  // no polishing
  long skipped = 0;
  FieldMarcher fx{cp, iterate, true, axes, resolution, tol, grid};
  FieldMarcher fy{cp, iterate, false, axes, resolution, tol, grid};
  const SegmentGraph gx = march(fx, &skipped);
  const SegmentGraph gy = march(fy, &skipped);
  std::vector<PatchState> crossings;
  for (const auto& [cell, segs_x] : gx.cell_segments) {
    const auto it = gy.cell_segments.find(cell);
    if (it == gy.cell_segments.end()) continue;
    for (const auto& [a1, a2] : segs_x) {
      for (const auto& [b1, b2] : it->second) {
        PatchState where;
        if (segments_intersect(gx.vertices.at(a1), gx.vertices.at(a2),
                               gy.vertices.at(b1), gy.vertices.at(b2),
                               &where)) {
          crossings.push_back(where);
        }
      }
    }
  }
  return crossings;
}

FixedPointResult fixed_points(const CoupledParams& cp, int iterate,
                              std::span<const PatchState> seeds,
                              double residual_tol, double dedup_tol) {
  check_iterate(iterate);
  if (!(residual_tol > 0.0) || !(dedup_tol > 0.0)) {
    throw std::invalid_argument("fixed_points: tolerances must be > 0");
  }
  FixedPointResult result;

  auto map_and_jacobian = [&](const PatchState& s, PatchState* image,
                              Mat2* jac) -> bool {
    PatchState cur = s;
    Mat2 product;
    try {
      for (int k = 0; k < iterate; ++k) {
        product = jacobian(cp, cur) * product;
        cur = step(cp, cur);
      }
    } catch (const std::exception&) {
      return false;
    }
    *image = cur;
    *jac = product;
    return true;
  };

  for (const PatchState& seed : seeds) {
    PatchState s{std::max(seed.x, 0.0), std::max(seed.y, 0.0)};
    bool converged = false;
    double res_norm = std::numeric_limits<double>::infinity();
    Mat2 jac;
    for (int it = 0; it < 100; ++it) {
      PatchState image;
      if (!map_and_jacobian(s, &image, &jac)) break;
      const double rx = image.x - s.x;
      const double ry = image.y - s.y;
      res_norm = std::max(std::abs(rx), std::abs(ry));
      if (res_norm < residual_tol) {
        converged = true;
        break;
      }
      // Newton direction for F^k(s) - s = 0.
      const double axx = jac.xx - 1.0, axy = jac.xy;
      const double ayx = jac.yx, ayy = jac.yy - 1.0;
      const double det = axx * ayy - axy * ayx;
      if (det == 0.0 || !std::isfinite(det)) break;
      const double dx = (-rx * ayy + ry * axy) / det;
      const double dy = (-axx * ry + ayx * rx) / det;
      // Step halving until the residual improves (at most 30 halvings).
      double scale = 1.0;
      bool improved = false;
      for (int h = 0; h <= 30; ++h) {
        const PatchState trial{std::max(s.x + scale * dx, 0.0),
                               std::max(s.y + scale * dy, 0.0)};
        PatchState t_image;
        Mat2 t_jac;
        if (map_and_jacobian(trial, &t_image, &t_jac)) {
          const double t_norm = std::max(std::abs(t_image.x - trial.x),
                                         std::abs(t_image.y - trial.y));
          if (t_norm < res_norm) {
            s = trial;
            improved = true;
            break;
          }
        }
        scale *= 0.5;
      }
      if (!improved) break;
    }
    if (!converged) {
      result.non_converged.push_back(seed);
      continue;
    }
    const bool duplicate = std::any_of(
        result.points.begin(), result.points.end(),
        [&](const FixedPointRecord& other) {
          return std::max(std::abs(other.point.x - s.x),
                          std::abs(other.point.y - s.y)) < dedup_tol;
        });
    if (duplicate) continue;
    FixedPointRecord record;
    record.point = s;
    record.residual = res_norm;
    record.spectral_radius = jac.spectral_radius();
    record.stable = record.spectral_radius < 1.0;
    result.points.push_back(record);
  }
  return result;
}

}  // namespace patchdyn
