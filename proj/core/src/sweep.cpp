#include "patchdyn/sweep.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "patchdyn/errors.hpp"
#include "patchdyn/rng.hpp"

namespace patchdyn {

void Axis::validate() const {
  if (!values.empty()) return;
  if (count < 2) throw std::invalid_argument("Axis: count must be >= 2");
  if (!(min < max)) throw std::invalid_argument("Axis: need min < max");
  if (!std::isfinite(min) || !std::isfinite(max)) {
    throw std::invalid_argument("Axis: bounds must be finite");
  }
}

std::int32_t basin_code(AttractorCategory category) {
  switch (category) {
    case AttractorCategory::Extinction:
      return codes::kBasinExtinction;
    case AttractorCategory::AsymmetricXHigh:
      return codes::kBasinAsymmetricXHigh;
    case AttractorCategory::AsymmetricYHigh:
      return codes::kBasinAsymmetricYHigh;
    case AttractorCategory::Symmetric:
      return codes::kBasinSymmetric;
    case AttractorCategory::Transitional:
      return codes::kBasinUnresolved;
  }
  return codes::kCellError;
}

namespace {

// Runs body(i) for i in [0, n). Work is handed out cell by cell through an
// atomic counter; every cell writes only its own slot, so output is
// independent of the worker count and schedule. body must not throw.
void parallel_for(long n, int workers, const std::function<void(long)>& body) {
  if (workers <= 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
  }
  if (workers < 1) workers = 1;
  if (workers > n) workers = static_cast<int>(n);
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        body(i);
      }
    });
  }
  for (std::thread& th : pool) th.join();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void append_detector_meta(std::vector<std::pair<std::string, std::string>>& m,
                          const DetectorSettings& s) {
  m.emplace_back("transient", std::to_string(s.transient));
  m.emplace_back("max_period", std::to_string(s.max_period));
  m.emplace_back("match_tol", fmt(s.match_tol));
  m.emplace_back("extinct_tol", fmt(s.extinct_tol));
  m.emplace_back("dedup_tol", fmt(s.dedup_tol));
}

std::int32_t plane_code(const AttractorRecord& record, int max_period) {
  if (record.category == AttractorCategory::Extinction) {
    return codes::kPlaneExtinction;
  }
  if (record.period >= 1 && record.period <= max_period) {
    return record.period;
  }
  return codes::kPlaneAperiodic;
}

}  // namespace

BifurcationResult bifurcation_sweep(double K, double A, double d,
                                    const Axis& r_axis,
                                    std::span<const PatchState> ics,
                                    long steps, long tail, int workers) {
  r_axis.validate();
  if (ics.empty()) {
    throw std::invalid_argument("bifurcation_sweep: no initial conditions");
  }
  if (tail < 1 || steps <= tail) {
    throw std::invalid_argument("bifurcation_sweep: need steps > tail >= 1");
  }
  BifurcationResult result;
  result.r_axis = r_axis;
  result.initial_conditions.assign(ics.begin(), ics.end());
  result.steps = steps;
  result.tail = tail;
  const long n_r = r_axis.size();
  const long n_ic = static_cast<long>(ics.size());
  const long n_cells = n_r * n_ic;
  result.samples.resize(static_cast<std::size_t>(n_cells * tail));
  std::vector<std::string> errors(static_cast<std::size_t>(n_cells));
  parallel_for(n_cells, workers, [&](long cell) {
    const long ri = cell / n_ic;
    const int ici = static_cast<int>(cell % n_ic);
    const std::size_t base = static_cast<std::size_t>(cell * tail);
    try {
      const CoupledParams cp(LocalParams(r_axis.at(ri), K, A), d);
      const OrbitSegment seg =
          iterate(cp, ics[static_cast<std::size_t>(ici)], steps,
                  steps - tail + 1);
      for (long k = 0; k < tail; ++k) {
        const PatchState& s = seg.states[static_cast<std::size_t>(k)];
        result.samples[base + static_cast<std::size_t>(k)] = {
            ri, ici, seg.start_index + k, s.x, s.y};
      }
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(cell)] =
          "r_index=" + std::to_string(ri) + " ic=" + std::to_string(ici) +
          ": " + e.what();
      for (long k = 0; k < tail; ++k) {
        result.samples[base + static_cast<std::size_t>(k)] = {
            ri, ici, -1, std::nan(""), std::nan("")};
      }
    }
  });
  for (std::string& msg : errors) {
    if (!msg.empty()) result.cell_errors.push_back(std::move(msg));
  }
  return result;
}

ClassifiedGrid parameter_plane(double K, double A, const Axis& r_axis,
                               const Axis& d_axis, const IcPolicy& policy,
                               const DetectorSettings& settings, int workers) {
  r_axis.validate();
  d_axis.validate();
  if (policy.kind == IcPolicy::Kind::FixedList && policy.ics.empty()) {
    throw std::invalid_argument("parameter_plane: FixedList policy needs ics");
  }
  if (policy.kind == IcPolicy::Kind::RandomPerCell &&
      !(policy.ic_min < policy.ic_max)) {
    throw std::invalid_argument("parameter_plane: need ic_min < ic_max");
  }
  ClassifiedGrid grid;
  grid.spec = GridSpec{r_axis, d_axis};
  grid.rows = r_axis.size();
  grid.cols = d_axis.size();
  grid.cells.resize(static_cast<std::size_t>(grid.rows * grid.cols));
  grid.meta = {{"K", fmt(K)}, {"A", fmt(A)},
               {"ic_policy", policy.kind == IcPolicy::Kind::FixedList
                                 ? "fixed"
                                 : "random-per-cell"},
               {"seed", std::to_string(policy.seed)}};
  append_detector_meta(grid.meta, settings);
  const long n = grid.rows * grid.cols;
  parallel_for(n, workers, [&](long cell) {
    const long i = cell / grid.cols;
    const long j = cell % grid.cols;
    std::int32_t code = codes::kCellError;
    try {
      const CoupledParams cp(LocalParams(r_axis.at(i), K, A), d_axis.at(j));
      if (policy.kind == IcPolicy::Kind::RandomPerCell) {
        const double span = policy.ic_max - policy.ic_min;
        const PatchState s0{
            policy.ic_min + span * keyed_uniform(policy.seed,
                                                 static_cast<std::uint64_t>(cell), 0),
            policy.ic_min + span * keyed_uniform(policy.seed,
                                                 static_cast<std::uint64_t>(cell), 1)};
        code = plane_code(detect_attractor(cp, s0, settings),
                          settings.max_period);
      } else {
        // Periodicity of a persisting orbit when any listed state survives;
        // extinction only when all of them die.
        code = codes::kPlaneExtinction;
        for (const PatchState& s0 : policy.ics) {
          const AttractorRecord record = detect_attractor(cp, s0, settings);
          if (record.category != AttractorCategory::Extinction) {
            code = plane_code(record, settings.max_period);
            break;
          }
        }
      }
    } catch (const std::exception&) {
      code = codes::kCellError;
    }
    grid.cells[static_cast<std::size_t>(cell)] = code;
  });
  return grid;
}

ClassifiedGrid asymmetric_region_probe(double K, double A, const Axis& r_axis,
                                       const Axis& d_axis, long n_random,
                                       std::uint64_t seed, double ic_min,
                                       double ic_max,
                                       const DetectorSettings& settings,
                                       int workers) {
  r_axis.validate();
  d_axis.validate();
  if (n_random < 1) {
    throw std::invalid_argument("asymmetric_region_probe: n_random must be >= 1");
  }
  if (!(ic_min < ic_max)) {
    throw std::invalid_argument("asymmetric_region_probe: need ic_min < ic_max");
  }
  ClassifiedGrid grid;
  grid.spec = GridSpec{r_axis, d_axis};
  grid.rows = r_axis.size();
  grid.cols = d_axis.size();
  grid.cells.resize(static_cast<std::size_t>(grid.rows * grid.cols));
  grid.meta = {{"K", fmt(K)},
               {"A", fmt(A)},
               {"n_random", std::to_string(n_random)},
               {"seed", std::to_string(seed)},
               {"ic_min", fmt(ic_min)},
               {"ic_max", fmt(ic_max)}};
  append_detector_meta(grid.meta, settings);
  const long n = grid.rows * grid.cols;
  const double span = ic_max - ic_min;
  parallel_for(n, workers, [&](long cell) {
    const long i = cell / grid.cols;
    const long j = cell % grid.cols;
    std::int32_t code = 0;
    try {
      const CoupledParams cp(LocalParams(r_axis.at(i), K, A), d_axis.at(j));
      for (long k = 0; k < n_random; ++k) {
        const PatchState s0{
            ic_min + span * keyed_uniform(seed, static_cast<std::uint64_t>(cell),
                                          static_cast<std::uint64_t>(2 * k)),
            ic_min + span * keyed_uniform(seed, static_cast<std::uint64_t>(cell),
                                          static_cast<std::uint64_t>(2 * k + 1))};
        const AttractorRecord record = detect_attractor(cp, s0, settings);
        if (record.category == AttractorCategory::AsymmetricXHigh ||
            record.category == AttractorCategory::AsymmetricYHigh) {
          code = 1;
          break;
        }
      }
    } catch (const std::exception&) {
      code = codes::kCellError;
    }
    grid.cells[static_cast<std::size_t>(cell)] = code;
  });
  return grid;
}

ClassifiedGrid basin_grid(const CoupledParams& cp, const GridSpec& ic_grid,
                          long cap, DetectorSettings settings, int workers) {
  ic_grid.axis1.validate();
  if (!ic_grid.axis2) {
    throw std::invalid_argument("basin_grid: ic_grid must be two-dimensional");
  }
  ic_grid.axis2->validate();
  const long window = std::max(3L * settings.max_period + 1, 100L);
  if (cap <= window) {
    throw std::invalid_argument(
        "basin_grid: cap must exceed the classification window of " +
        std::to_string(window) + " steps");
  }
  settings.transient = cap - window;
  ClassifiedGrid grid;
  grid.spec = ic_grid;
  grid.rows = ic_grid.axis1.size();
  grid.cols = ic_grid.axis2->size();
  grid.cells.resize(static_cast<std::size_t>(grid.rows * grid.cols));
  grid.aux.resize(grid.cells.size());
  grid.meta = {{"r", fmt(cp.local.r)},
               {"K", fmt(cp.local.K)},
               {"A", fmt(cp.local.A)},
               {"d", fmt(cp.d)},
               {"cap", std::to_string(cap)}};
  append_detector_meta(grid.meta, settings);
  const Axis& ax = ic_grid.axis1;
  const Axis& ay = *ic_grid.axis2;
  parallel_for(grid.rows * grid.cols, workers, [&](long cell) {
    const long i = cell / grid.cols;
    const long j = cell % grid.cols;
    try {
      const AttractorRecord record =
          detect_attractor(cp, PatchState{ax.at(i), ay.at(j)}, settings);
      grid.cells[static_cast<std::size_t>(cell)] = basin_code(record.category);
      grid.aux[static_cast<std::size_t>(cell)] = record.period;
    } catch (const std::exception&) {
      grid.cells[static_cast<std::size_t>(cell)] = codes::kCellError;
      grid.aux[static_cast<std::size_t>(cell)] = -1;
    }
  });
  return grid;
}

ClassifiedGrid extinction_time_grid(const CoupledParams& cp,
                                    const GridSpec& ic_grid, long cap,
                                    double extinct_tol, int workers) {
  ic_grid.axis1.validate();
  if (!ic_grid.axis2) {
    throw std::invalid_argument(
        "extinction_time_grid: ic_grid must be two-dimensional");
  }
  ic_grid.axis2->validate();
  if (cap < 1) {
    throw std::invalid_argument("extinction_time_grid: cap must be >= 1");
  }
  ClassifiedGrid grid;
  grid.spec = ic_grid;
  grid.rows = ic_grid.axis1.size();
  grid.cols = ic_grid.axis2->size();
  grid.cells.resize(static_cast<std::size_t>(grid.rows * grid.cols));
  grid.meta = {{"r", fmt(cp.local.r)},
               {"K", fmt(cp.local.K)},
               {"A", fmt(cp.local.A)},
               {"d", fmt(cp.d)},
               {"cap", std::to_string(cap)},
               {"extinct_tol", fmt(extinct_tol)}};
  const Axis& ax = ic_grid.axis1;
  const Axis& ay = *ic_grid.axis2;
  parallel_for(grid.rows * grid.cols, workers, [&](long cell) {
    const long i = cell / grid.cols;
    const long j = cell % grid.cols;
    try {
      const std::optional<long> t = time_to_extinction(
          cp, PatchState{ax.at(i), ay.at(j)}, cap, extinct_tol);
      grid.cells[static_cast<std::size_t>(cell)] =
          static_cast<std::int32_t>(t.value_or(cap + 1));
    } catch (const std::exception&) {
      grid.cells[static_cast<std::size_t>(cell)] = codes::kCellError;
    }
  });
  return grid;
}

}  // namespace patchdyn
