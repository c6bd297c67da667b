#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "patchdyn/coupled_map.hpp"
#include "patchdyn/sweep.hpp"

namespace patchdyn {

// Which residual a curve set annihilates: the x family solves
// (F^k(x,y))_x = x, the y family (F^k(x,y))_y = y.
enum class NullclineFamily { X, Y };

std::string_view to_string(NullclineFamily family);

struct Polyline {
  std::vector<PatchState> vertices;
};

// Zero set of one family's residual, extracted as polylines whose every
// vertex satisfies |residual| < curve_tol.
struct CurveSet {
  NullclineFamily family = NullclineFamily::X;
  int iterate = 1;
  std::vector<Polyline> curves;
  long skipped_cells = 0;  // marching cells with non-finite residuals
};

struct NullclineSet {
  CurveSet x_family;
  CurveSet y_family;
  GridSpec domain;
  long resolution = 0;
};

// Extracts both nullcline families of F^iterate over the rectangle described
// by `domain` (only the axis bounds are used) by sign-change cell marching on
// a resolution x resolution point grid, linear interpolation along edges, and
// bisection refinement of any vertex whose residual misses curve_tol.
// An empty family is a valid result.
NullclineSet nullclines(const CoupledParams& cp, int iterate,
                        const GridSpec& domain, long resolution = 800,
                        double curve_tol = 1e-3);

// Crossing points of the two families on the same marching grid; the natural
// seeds for fixed_points.
std::vector<PatchState> nullcline_intersections(const CoupledParams& cp,
                                                int iterate,
                                                const GridSpec& domain,
                                                long resolution = 800);

struct FixedPointRecord {
  PatchState point;
  double residual = 0.0;         // max-norm of F^iterate(point) - point
  double spectral_radius = 0.0;  // of the Jacobian of F^iterate at the point
  bool stable = false;
};

struct FixedPointResult {
  std::vector<FixedPointRecord> points;
  std::vector<PatchState> non_converged;  // seeds Newton could not refine
};

// Damped Newton refinement of each seed towards a fixed point of F^iterate
// (residual < residual_tol), with step halving up to 30 times per iteration.
// Converged points are deduplicated; failed seeds are reported, not fatal.
FixedPointResult fixed_points(const CoupledParams& cp, int iterate,
                              std::span<const PatchState> seeds,
                              double residual_tol = 1e-10,
                              double dedup_tol = 1e-8);

}  // namespace patchdyn
