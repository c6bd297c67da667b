#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "patchdyn/attractor.hpp"
#include "patchdyn/coupled_map.hpp"

namespace patchdyn {

// One sweep axis. Uniform axes place point i at min + i*(max-min)/(count-1),
// computed with exactly this expression so cell coordinates never depend on
// evaluation order. A non-empty `values` list overrides the uniform rule.
struct Axis {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  long count = 2;
  std::vector<double> values;  // explicit sampling when non-empty

  long size() const {
    return values.empty() ? count : static_cast<long>(values.size());
  }
  double at(long i) const {
    return values.empty()
               ? min + static_cast<double>(i) * (max - min) /
                           static_cast<double>(count - 1)
               : values[static_cast<std::size_t>(i)];
  }
  void validate() const;
};

struct GridSpec {
  Axis axis1;
  std::optional<Axis> axis2;
};

// Cell codes shared by the sweep products and the CLI output formats.
namespace codes {
// basin_grid labels
inline constexpr std::int32_t kBasinExtinction = 0;
inline constexpr std::int32_t kBasinAsymmetricXHigh = 1;
inline constexpr std::int32_t kBasinAsymmetricYHigh = 2;
inline constexpr std::int32_t kBasinSymmetric = 3;
inline constexpr std::int32_t kBasinUnresolved = 4;
// parameter_plane codes: 1..max_period for cycles, 0 for longer periods or
// chaos, -1 for extinction
inline constexpr std::int32_t kPlaneExtinction = -1;
inline constexpr std::int32_t kPlaneAperiodic = 0;
// any per-cell numeric failure
inline constexpr std::int32_t kCellError = -9;
}  // namespace codes

std::int32_t basin_code(AttractorCategory category);

// Rectangular lattice of per-cell results. Rows follow axis1, columns axis2;
// cells are written exactly once each and never depend on thread scheduling.
struct ClassifiedGrid {
  GridSpec spec;
  long rows = 0;
  long cols = 0;
  std::vector<std::int32_t> cells;  // row-major
  std::vector<std::int32_t> aux;    // optional second channel (e.g. period)
  std::vector<std::pair<std::string, std::string>> meta;

  std::int32_t at(long i, long j) const {
    return cells[static_cast<std::size_t>(i * cols + j)];
  }
};

// --- bifurcation diagrams -------------------------------------------------

struct BifurcationSample {
  long r_index = 0;  // index into the r axis
  int ic_index = 0;  // index into the initial-condition list
  long t = 0;        // time step of the recorded state
  double x = 0.0;
  double y = 0.0;
};

struct BifurcationResult {
  Axis r_axis;
  std::vector<PatchState> initial_conditions;
  long steps = 0;
  long tail = 0;
  std::vector<BifurcationSample> samples;  // tail per (r, ic), cell-major
  std::vector<std::string> cell_errors;    // one message per failed cell
};

// For each r on the axis and each initial condition, iterates `steps` times
// and emits the final `tail` states of both patches. Numeric failures are
// recorded per cell and do not abort the sweep.
BifurcationResult bifurcation_sweep(double K, double A, double d,
                                    const Axis& r_axis,
                                    std::span<const PatchState> ics,
                                    long steps, long tail, int workers = 0);

// --- parameter plane and region probe --------------------------------------

// Initial-condition policy for parameter_plane. FixedList runs the listed
// states and keeps the first non-extinct verdict (extinction only when every
// listed state dies). RandomPerCell draws one state per cell from a keyed
// counter-based generator, so reruns and any evaluation order give identical
// grids.
struct IcPolicy {
  enum class Kind { FixedList, RandomPerCell } kind = Kind::RandomPerCell;
  std::vector<PatchState> ics;   // FixedList
  std::uint64_t seed = 0;        // RandomPerCell
  double ic_min = 0.0;           // RandomPerCell box, both coordinates
  double ic_max = 1.0;
};

// Periodicity map over the (r, d) plane: per cell the detector's period
// (1..max_period), 0 for longer periods or chaos, -1 for extinction.
ClassifiedGrid parameter_plane(double K, double A, const Axis& r_axis,
                               const Axis& d_axis, const IcPolicy& policy,
                               const DetectorSettings& settings = {},
                               int workers = 0);

// Boolean map over the (r, d) plane: 1 when any of n_random keyed-random
// initial conditions in [ic_min, ic_max]^2 reaches an asymmetric attractor.
ClassifiedGrid asymmetric_region_probe(double K, double A, const Axis& r_axis,
                                       const Axis& d_axis, long n_random,
                                       std::uint64_t seed, double ic_min,
                                       double ic_max,
                                       const DetectorSettings& settings = {},
                                       int workers = 0);

// --- initial-condition grids ------------------------------------------------

// Basin-of-attraction labels over a grid of initial conditions. The detector
// budget is `cap` total steps per cell (transient plus classification
// window); unresolved cells keep the distinct kBasinUnresolved code. aux
// holds the detected period per cell.
ClassifiedGrid basin_grid(const CoupledParams& cp, const GridSpec& ic_grid,
                          long cap = 2000, DetectorSettings settings = {},
                          int workers = 0);

// Time to extinction per initial condition, with cap+1 encoding "not extinct
// within cap steps".
ClassifiedGrid extinction_time_grid(const CoupledParams& cp,
                                    const GridSpec& ic_grid, long cap,
                                    double extinct_tol = 1e-4,
                                    int workers = 0);

}  // namespace patchdyn
