// Command-line frontend: one subcommand per library operation, CSV/PGM
// output, and a key=value manifest next to every data file so any run can be
// reproduced from its recorded flags.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "patchdyn/attractor.hpp"
#include "patchdyn/coupled_map.hpp"
#include "patchdyn/errors.hpp"
#include "patchdyn/io.hpp"
#include "patchdyn/local_map.hpp"
#include "patchdyn/nullclines.hpp"
#include "patchdyn/sweep.hpp"
#include "patchdyn/version.hpp"

namespace {

using namespace patchdyn;

std::vector<PatchState> parse_states(const std::string& text) {
  std::vector<PatchState> states;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("expected x:y pairs separated by commas, got '" +
                                  item + "'");
    }
    states.push_back(
        {std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
  }
  if (states.empty()) {
    throw std::invalid_argument("no states in '" + text + "'");
  }
  return states;
}

std::vector<PatchState> read_states_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open seeds file: " + path);
  std::vector<PatchState> states;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (first && line.find_first_not_of("0123456789+-.,eE \t") !=
                     std::string::npos) {
      first = false;  // header row
      continue;
    }
    first = false;
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) {
      throw std::runtime_error("seeds file: expected two columns per row");
    }
    states.push_back({std::stod(a), std::stod(b)});
  }
  if (states.empty()) throw std::runtime_error("seeds file is empty");
  return states;
}

// Collects the flags that define a run and writes them as the manifest.
class RunRecorder {
 public:
  explicit RunRecorder(std::string command)
      : start_(std::chrono::steady_clock::now()) {
    entries_.emplace_back("command", std::move(command));
  }

  void add(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
  }
  void add(const std::string& key, double value) {
    entries_.emplace_back(key, format_double(value));
  }
  void add(const std::string& key, long value) {
    entries_.emplace_back(key, std::to_string(value));
  }
  void add(const std::string& key, int value) {
    entries_.emplace_back(key, std::to_string(value));
  }
  void add(const std::string& key, unsigned long long value) {
    entries_.emplace_back(key, std::to_string(value));
  }

  // Writes the manifest if a path was chosen; duration and version are
  // recorded for the log but ignored by replays.
  void finish(const std::optional<std::string>& path) {
    if (!path) return;
    ManifestEntries out = entries_;
    out.emplace_back("version", kVersion);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    out.emplace_back("duration_s", format_double(secs));
    write_manifest(*path, out);
  }

 private:
  ManifestEntries entries_;
  std::chrono::steady_clock::time_point start_;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  return os;
}

std::optional<std::string> manifest_path(const std::string& explicit_path,
                                         const std::string& out_path) {
  if (!explicit_path.empty()) return explicit_path;
  if (!out_path.empty()) return out_path + ".manifest";
  return std::nullopt;
}

void add_detector_flags(CLI::App* sub, DetectorSettings* ds,
                        bool with_transient = true) {
  if (with_transient) {
    sub->add_option("--transient", ds->transient,
                    "steps discarded before classification");
  }
  sub->add_option("--max-period", ds->max_period, "largest period searched")
      ->check(CLI::Range(1, 64));
  sub->add_option("--match-tol", ds->match_tol, "cycle recurrence tolerance");
  sub->add_option("--extinct-tol", ds->extinct_tol,
                  "total density counted as extinct");
  sub->add_option("--dedup-tol", ds->dedup_tol,
                  "orbit matching tolerance in censuses");
}

void record_detector(RunRecorder& rec, const DetectorSettings& ds,
                     bool with_transient = true) {
  if (with_transient) rec.add("transient", ds.transient);
  rec.add("max-period", ds.max_period);
  rec.add("match-tol", ds.match_tol);
  rec.add("extinct-tol", ds.extinct_tol);
  rec.add("dedup-tol", ds.dedup_tol);
}

void write_grid_pgm(const std::string& path, bool binary,
                    const ClassifiedGrid& grid, int (*shade)(std::int32_t)) {
  std::vector<int> pixels;
  pixels.reserve(grid.cells.size());
  for (std::int32_t code : grid.cells) pixels.push_back(shade(code));
  auto os = open_output(path);
  write_pgm(os, grid.cols, grid.rows, pixels, binary);
}

// ---------------------------------------------------------------------------

struct ParamOpts {
  double r = 0.5, K = 1.0, A = 0.2, d = 0.0;
};

void add_local_flags(CLI::App* sub, ParamOpts* p, bool r_required = true) {
  auto* r = sub->add_option("--r", p->r, "intrinsic per-capita growth");
  if (r_required) r->required();
  sub->add_option("--K", p->K, "carrying capacity (default 1)");
  sub->add_option("--A", p->A, "Allee threshold (default 0.2)");
}

void add_dispersal_flag(CLI::App* sub, ParamOpts* p, bool required = true) {
  auto* d = sub->add_option("--d", p->d, "dispersal fraction in [0, 0.5]")
                ->check(CLI::Range(0.0, 0.5));
  if (required) d->required();
}

struct DomainOpts {
  double x_min = 0.0, x_max = 1.5, y_min = 0.0, y_max = 1.5;
  long grid = 500;
};

void add_domain_flags(CLI::App* sub, DomainOpts* dom) {
  sub->add_option("--grid", dom->grid, "grid points per axis")
      ->check(CLI::Range(2L, 20000L));
  sub->add_option("--x-min", dom->x_min, "domain lower bound, x axis");
  sub->add_option("--x-max", dom->x_max, "domain upper bound, x axis");
  sub->add_option("--y-min", dom->y_min, "domain lower bound, y axis");
  sub->add_option("--y-max", dom->y_max, "domain upper bound, y axis");
}

GridSpec domain_grid(const DomainOpts& dom) {
  return GridSpec{Axis{"x0", dom.x_min, dom.x_max, dom.grid, {}},
                  Axis{"y0", dom.y_min, dom.y_max, dom.grid, {}}};
}

void record_domain(RunRecorder& rec, const DomainOpts& dom) {
  rec.add("grid", dom.grid);
  rec.add("x-min", dom.x_min);
  rec.add("x-max", dom.x_max);
  rec.add("y-min", dom.y_min);
  rec.add("y-max", dom.y_max);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-patch Ricker-Allee map: regimes, attractors, sweeps"};
  app.set_version_flag("--version", patchdyn::kVersion);
  app.require_subcommand(1);

  int exit_code = 0;

  // ---- regime ------------------------------------------------------------
  {
    auto p = std::make_shared<ParamOpts>();
    auto tol = std::make_shared<double>(1e-9);
    auto* sub = app.add_subcommand(
        "regime", "classify the isolated map (bistable / essential extinction)");
    add_local_flags(sub, p.get());
    sub->add_option("--tol", *tol, "equality band for the chaotic boundary");
    sub->callback([p, tol] {
      const LocalParams lp(p->r, p->K, p->A);
      const RegimeReport rep = regime(lp, *tol);
      std::cout << "regime=" << to_string(rep.regime) << '\n'
                << "D=" << format_double(rep.D) << '\n'
                << "M=" << format_double(rep.M) << '\n'
                << "A_star=" << format_double(rep.A_star) << '\n'
                << "r_th_side=" << format_double(rep.r_th_side) << '\n';
    });
  }

  // ---- rth ---------------------------------------------------------------
  {
    auto p = std::make_shared<ParamOpts>();
    auto tol = std::make_shared<double>(1e-10);
    auto* sub = app.add_subcommand(
        "rth", "growth threshold r_th solving f(f(D)) = A");
    add_local_flags(sub, p.get(), /*r_required=*/false);
    sub->add_option("--tol", *tol, "residual tolerance");
    sub->callback([p, tol] {
      const double rth = solve_r_th(p->K, p->A, *tol);
      const LocalParams lp(rth, p->K, p->A);
      const double residual = eval_f(lp, eval_f(lp, critical_point(lp))) - p->A;
      std::cout << "r_th=" << format_double(rth) << '\n'
                << "residual=" << format_double(residual) << '\n';
    });
  }

  // ---- orbit ---------------------------------------------------------------
  {
    struct Opts {
      ParamOpts p;
      double x0 = 0.5, y0 = 0.5;
      long steps = 2000, record_from = 0;
      std::string out, manifest;
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand("orbit", "iterate the coupled map, CSV orbit");
    add_local_flags(sub, &o->p);
    add_dispersal_flag(sub, &o->p);
    sub->add_option("--x0", o->x0, "initial density, patch x")->required();
    sub->add_option("--y0", o->y0, "initial density, patch y")->required();
    sub->add_option("--steps", o->steps, "steps to iterate");
    sub->add_option("--record-from", o->record_from, "first recorded step");
    sub->add_option("--out", o->out, "output CSV path")->required();
    sub->add_option("--manifest", o->manifest, "manifest path");
    sub->callback([o] {
      RunRecorder rec("orbit");
      rec.add("r", o->p.r);
      rec.add("K", o->p.K);
      rec.add("A", o->p.A);
      rec.add("d", o->p.d);
      rec.add("x0", o->x0);
      rec.add("y0", o->y0);
      rec.add("steps", o->steps);
      rec.add("record-from", o->record_from);
      rec.add("out", o->out);
      const CoupledParams cp(LocalParams(o->p.r, o->p.K, o->p.A), o->p.d);
      const OrbitSegment orbit =
          iterate(cp, {o->x0, o->y0}, o->steps, o->record_from);
      auto os = open_output(o->out);
      write_orbit_csv(os, orbit);
      const PatchState& last = orbit.states.back();
      std::cout << "final_x=" << format_double(last.x) << '\n'
                << "final_y=" << format_double(last.y) << '\n';
      rec.finish(manifest_path(o->manifest, o->out));
    });
  }

  // ---- attractor -----------------------------------------------------------
  {
    struct Opts {
      ParamOpts p;
      double x0 = 0.5, y0 = 0.5;
      DetectorSettings ds;
      std::string out, manifest;
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand(
        "attractor", "detect the limit set reached from one initial condition");
    add_local_flags(sub, &o->p);
    add_dispersal_flag(sub, &o->p);
    sub->add_option("--x0", o->x0)->required();
    sub->add_option("--y0", o->y0)->required();
    add_detector_flags(sub, &o->ds);
    sub->add_option("--out", o->out, "optional CSV with the orbit points");
    sub->add_option("--manifest", o->manifest, "manifest path");
    sub->callback([o] {
      RunRecorder rec("attractor");
      rec.add("r", o->p.r);
      rec.add("K", o->p.K);
      rec.add("A", o->p.A);
      rec.add("d", o->p.d);
      rec.add("x0", o->x0);
      rec.add("y0", o->y0);
      record_detector(rec, o->ds);
      const CoupledParams cp(LocalParams(o->p.r, o->p.K, o->p.A), o->p.d);
      const AttractorRecord record = detect_attractor(cp, {o->x0, o->y0}, o->ds);
      std::cout << "category=" << to_string(record.category)
                << " period=" << record.period
                << " phase=" << to_string(record.phase);
      if (record.stability) {
        std::cout << " spectral_radius=" << format_double(*record.stability);
      }
      std::cout << '\n';
      for (std::size_t k = 0; k < record.orbit_points.size(); ++k) {
        std::cout << "point" << k << '='
                  << format_double(record.orbit_points[k].x) << ':'
                  << format_double(record.orbit_points[k].y) << '\n';
      }
      if (!o->out.empty()) {
        rec.add("out", o->out);
        auto os = open_output(o->out);
        const std::vector<AttractorRecord> one{record};
        write_census_csv(os, one);
      }
      rec.finish(manifest_path(o->manifest, o->out));
    });
  }

  // ---- census ----------------------------------------------------------------
  {
    struct Opts {
      ParamOpts p;
      DetectorSettings ds;
      std::string seeds, seeds_file, out, manifest;
      bool uncoupled_seeds = false;
      double perturb = 1e-3;
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand(
        "census", "distinct attractors reached from a set of seeds");
    add_local_flags(sub, &o->p);
    add_dispersal_flag(sub, &o->p);
    add_detector_flags(sub, &o->ds);
    auto* seeds = sub->add_option("--seeds", o->seeds, "seed states x:y,x:y,...");
    auto* seeds_file =
        sub->add_option("--seeds-file", o->seeds_file, "CSV of seed states");
    auto* th2 = sub->add_flag(
        "--uncoupled-seeds", o->uncoupled_seeds,
        "seed near the stable periodic points of the uncoupled system");
    sub->add_option("--perturb", o->perturb,
                    "offset applied to the uncoupled-cycle seed points");
    seeds->excludes(seeds_file)->excludes(th2);
    seeds_file->excludes(th2);
    sub->add_option("--out", o->out, "output CSV path");
    sub->add_option("--manifest", o->manifest, "manifest path");
    sub->callback([o] {
      RunRecorder rec("census");
      rec.add("r", o->p.r);
      rec.add("K", o->p.K);
      rec.add("A", o->p.A);
      rec.add("d", o->p.d);
      record_detector(rec, o->ds);
      const LocalParams lp(o->p.r, o->p.K, o->p.A);
      const CoupledParams cp(lp, o->p.d);
      std::vector<PatchState> seed_states;
      if (o->uncoupled_seeds) {
        rec.add("uncoupled-seeds", std::string("1"));
        rec.add("perturb", o->perturb);
        seed_states = uncoupled_cycle_seeds(lp, o->ds, o->perturb);
      } else if (!o->seeds_file.empty()) {
        rec.add("seeds-file", o->seeds_file);
        seed_states = read_states_csv(o->seeds_file);
      } else if (!o->seeds.empty()) {
        rec.add("seeds", o->seeds);
        seed_states = parse_states(o->seeds);
      } else {
        throw std::invalid_argument(
            "census: provide --seeds, --seeds-file or --uncoupled-seeds");
      }
      const std::vector<AttractorRecord> records =
          census(cp, seed_states, o->ds);
      std::cout << "distinct=" << records.size() << '\n';
      for (std::size_t i = 0; i < records.size(); ++i) {
        std::cout << "attractor" << i << '='
                  << to_string(records[i].category)
                  << " period=" << records[i].period
                  << " phase=" << to_string(records[i].phase);
        if (records[i].stability) {
          std::cout << " spectral_radius="
                    << format_double(*records[i].stability);
        }
        std::cout << '\n';
      }
      if (!o->out.empty()) {
        rec.add("out", o->out);
        auto os = open_output(o->out);
        write_census_csv(os, records);
      }
      rec.finish(manifest_path(o->manifest, o->out));
    });
  }

  // ---- bifurcation -------------------------------------------------------------
  {
    struct Opts {
      ParamOpts p;
      double r_min = 0.3, r_max = 1.0;
      long r_count = 400;
      std::string ics = "0.08:0.19,0.44:0.14,0.73:0.11,0.76:0.73,0.99:0.17";
      long steps = 8000, tail = 300;
      int workers = 0;
      std::string out, manifest;
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand(
        "bifurcation", "tail states of both patches along an r sweep");
    sub->add_option("--K", o->p.K);
    sub->add_option("--A", o->p.A);
    add_dispersal_flag(sub, &o->p);
    sub->add_option("--r-min", o->r_min)->required();
    sub->add_option("--r-max", o->r_max)->required();
    sub->add_option("--r-count", o->r_count)->check(CLI::Range(2L, 1000000L));
    sub->add_option("--ics", o->ics, "initial conditions x:y,x:y,...");
    sub->add_option("--steps", o->steps, "steps per orbit");
    sub->add_option("--tail", o->tail, "recorded tail length");
    sub->add_option("--workers", o->workers, "worker threads (0 = hardware)");
    sub->add_option("--out", o->out)->required();
    sub->add_option("--manifest", o->manifest);
    sub->callback([o] {
      RunRecorder rec("bifurcation");
      rec.add("K", o->p.K);
      rec.add("A", o->p.A);
      rec.add("d", o->p.d);
      rec.add("r-min", o->r_min);
      rec.add("r-max", o->r_max);
      rec.add("r-count", o->r_count);
      rec.add("ics", o->ics);
      rec.add("steps", o->steps);
      rec.add("tail", o->tail);
      rec.add("workers", o->workers);
      rec.add("out", o->out);
      const std::vector<PatchState> ics = parse_states(o->ics);
      const Axis r_axis{"r", o->r_min, o->r_max, o->r_count, {}};
      const BifurcationResult result = bifurcation_sweep(
          o->p.K, o->p.A, o->p.d, r_axis, ics, o->steps, o->tail, o->workers);
      auto os = open_output(o->out);
      write_bifurcation_csv(os, result);
      std::cout << "samples=" << result.samples.size() << '\n';
      for (const std::string& err : result.cell_errors) {
        std::cerr << "cell error: " << err << '\n';
      }
      rec.finish(manifest_path(o->manifest, o->out));
    });
  }

  // ---- plane -------------------------------------------------------------------
  {
    struct Opts {
      ParamOpts p;
      double r_min = 0.3, r_max = 1.0, d_min = 0.0, d_max = 0.5;
      long r_count = 71, d_count = 51;
      std::string ics;
      unsigned long long seed = 1;
      double ic_min = 0.2, ic_max = 1.0;
      DetectorSettings ds;
      int workers = 0;
      std::string out, pgm, manifest;
      bool pgm_binary = false;
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand(
        "plane", "periodicity codes over the (r, d) parameter plane");
    sub->add_option("--K", o->p.K);
    sub->add_option("--A", o->p.A);
    sub->add_option("--r-min", o->r_min);
    sub->add_option("--r-max", o->r_max);
    sub->add_option("--r-count", o->r_count)->check(CLI::Range(2L, 100000L));
    sub->add_option("--d-min", o->d_min)->check(CLI::Range(0.0, 0.5));
    sub->add_option("--d-max", o->d_max)->check(CLI::Range(0.0, 0.5));
    sub->add_option("--d-count", o->d_count)->check(CLI::Range(2L, 100000L));
    sub->add_option("--ics", o->ics,
                    "fixed initial conditions x:y,... (default: one random "
                    "state per cell)");
    sub->add_option("--seed", o->seed, "random-state seed");
    sub->add_option("--ic-min", o->ic_min, "random-state box lower bound");
    sub->add_option("--ic-max", o->ic_max, "random-state box upper bound");
    add_detector_flags(sub, &o->ds);
    sub->add_option("--workers", o->workers);
    sub->add_option("--out", o->out)->required();
    sub->add_option("--pgm", o->pgm, "optional graymap path");
    sub->add_flag("--pgm-binary", o->pgm_binary, "write raw P5 instead of P2");
    sub->add_option("--manifest", o->manifest);
    sub->callback([o] {
      RunRecorder rec("plane");
      rec.add("K", o->p.K);
      rec.add("A", o->p.A);
      rec.add("r-min", o->r_min);
      rec.add("r-max", o->r_max);
      rec.add("r-count", o->r_count);
      rec.add("d-min", o->d_min);
      rec.add("d-max", o->d_max);
      rec.add("d-count", o->d_count);
      if (!o->ics.empty()) rec.add("ics", o->ics);
      rec.add("seed", o->seed);
      rec.add("ic-min", o->ic_min);
      rec.add("ic-max", o->ic_max);
      record_detector(rec, o->ds);
      rec.add("workers", o->workers);
      rec.add("out", o->out);
      IcPolicy policy;
      if (!o->ics.empty()) {
        policy.kind = IcPolicy::Kind::FixedList;
        policy.ics = parse_states(o->ics);
      } else {
        policy.kind = IcPolicy::Kind::RandomPerCell;
        policy.seed = o->seed;
        policy.ic_min = o->ic_min;
        policy.ic_max = o->ic_max;
      }
      const Axis r_axis{"r", o->r_min, o->r_max, o->r_count, {}};
      const Axis d_axis{"d", o->d_min, o->d_max, o->d_count, {}};
      const ClassifiedGrid grid = parameter_plane(
          o->p.K, o->p.A, r_axis, d_axis, policy, o->ds, o->workers);
      auto os = open_output(o->out);
      write_grid_csv(os, grid, "r", "d", "code");
      if (!o->pgm.empty()) {
        rec.add("pgm", o->pgm);
        rec.add("pgm-binary", o->pgm_binary ? 1 : 0);
        std::vector<int> pixels;
        pixels.reserve(grid.cells.size());
        for (std::int32_t code : grid.cells) {
          pixels.push_back(plane_gray(code, o->ds.max_period));
        }
        auto pgm = open_output(o->pgm);
        write_pgm(pgm, grid.cols, grid.rows, pixels, o->pgm_binary);
      }
      std::cout << "cells=" << grid.cells.size() << '\n';
      rec.finish(manifest_path(o->manifest, o->out));
    });
  }

  // ---- region-probe ---------------------------------------------------------
  {
    struct Opts {
      ParamOpts p;
      double r_min = 0.3, r_max = 1.0, d_min = 0.0, d_max = 0.5;
      long r_count = 36, d_count = 26;
      long n_random = 100;
      unsigned long long seed = 1;
      double ic_min = 0.0, ic_max = 1.5;
      DetectorSettings ds;
      int workers = 0;
      std::string out, pgm, manifest;
      bool pgm_binary = false;
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand(
        "region-probe",
        "where asymmetric attractors appear in the (r, d) plane");
    sub->add_option("--K", o->p.K);
    sub->add_option("--A", o->p.A);
    sub->add_option("--r-min", o->r_min);
    sub->add_option("--r-max", o->r_max);
    sub->add_option("--r-count", o->r_count)->check(CLI::Range(2L, 100000L));
    sub->add_option("--d-min", o->d_min)->check(CLI::Range(0.0, 0.5));
    sub->add_option("--d-max", o->d_max)->check(CLI::Range(0.0, 0.5));
    sub->add_option("--d-count", o->d_count)->check(CLI::Range(2L, 100000L));
    sub->add_option("--n-random", o->n_random, "random states per cell")
        ->check(CLI::Range(1L, 1000000L));
    sub->add_option("--seed", o->seed);
    sub->add_option("--ic-min", o->ic_min);
    sub->add_option("--ic-max", o->ic_max);
    add_detector_flags(sub, &o->ds);
    sub->add_option("--workers", o->workers);
    sub->add_option("--out", o->out)->required();
    sub->add_option("--pgm", o->pgm);
    sub->add_flag("--pgm-binary", o->pgm_binary);
    sub->add_option("--manifest", o->manifest);
    sub->callback([o] {
      RunRecorder rec("region-probe");
      rec.add("K", o->p.K);
      rec.add("A", o->p.A);
      rec.add("r-min", o->r_min);
      rec.add("r-max", o->r_max);
      rec.add("r-count", o->r_count);
      rec.add("d-min", o->d_min);
      rec.add("d-max", o->d_max);
      rec.add("d-count", o->d_count);
      rec.add("n-random", o->n_random);
      rec.add("seed", o->seed);
      rec.add("ic-min", o->ic_min);
      rec.add("ic-max", o->ic_max);
      record_detector(rec, o->ds);
      rec.add("workers", o->workers);
      rec.add("out", o->out);
      const Axis r_axis{"r", o->r_min, o->r_max, o->r_count, {}};
      const Axis d_axis{"d", o->d_min, o->d_max, o->d_count, {}};
      const ClassifiedGrid grid = asymmetric_region_probe(
          o->p.K, o->p.A, r_axis, d_axis, o->n_random, o->seed, o->ic_min,
          o->ic_max, o->ds, o->workers);
      auto os = open_output(o->out);
      write_grid_csv(os, grid, "r", "d", "asymmetric");
      if (!o->pgm.empty()) {
        rec.add("pgm", o->pgm);
        rec.add("pgm-binary", o->pgm_binary ? 1 : 0);
        write_grid_pgm(o->pgm, o->pgm_binary, grid, probe_gray);
      }
      std::cout << "cells=" << grid.cells.size() << '\n';
      rec.finish(manifest_path(o->manifest, o->out));
    });
  }

  // ---- basin ---------------------------------------------------------------
  {
    struct Opts {
      ParamOpts p;
      DomainOpts dom;
      long cap = 2000;
      DetectorSettings ds;
      int workers = 0;
      std::string out, pgm, manifest;
      bool pgm_binary = false;
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand(
        "basin", "basin-of-attraction labels over an initial-condition grid");
    add_local_flags(sub, &o->p);
    add_dispersal_flag(sub, &o->p);
    add_domain_flags(sub, &o->dom);
    sub->add_option("--cap", o->cap, "iteration budget per cell");
    add_detector_flags(sub, &o->ds, /*with_transient=*/false);
    sub->add_option("--workers", o->workers);
    sub->add_option("--out", o->out)->required();
    sub->add_option("--pgm", o->pgm);
    sub->add_flag("--pgm-binary", o->pgm_binary);
    sub->add_option("--manifest", o->manifest);
    sub->callback([o] {
      RunRecorder rec("basin");
      rec.add("r", o->p.r);
      rec.add("K", o->p.K);
      rec.add("A", o->p.A);
      rec.add("d", o->p.d);
      record_domain(rec, o->dom);
      rec.add("cap", o->cap);
      record_detector(rec, o->ds, false);
      rec.add("workers", o->workers);
      rec.add("out", o->out);
      const CoupledParams cp(LocalParams(o->p.r, o->p.K, o->p.A), o->p.d);
      const ClassifiedGrid grid =
          basin_grid(cp, domain_grid(o->dom), o->cap, o->ds, o->workers);
      auto os = open_output(o->out);
      write_grid_csv(os, grid, "x0", "y0", "label", "period");
      if (!o->pgm.empty()) {
        rec.add("pgm", o->pgm);
        rec.add("pgm-binary", o->pgm_binary ? 1 : 0);
        write_grid_pgm(o->pgm, o->pgm_binary, grid, basin_gray);
      }
      std::cout << "cells=" << grid.cells.size() << '\n';
      rec.finish(manifest_path(o->manifest, o->out));
    });
  }

  // ---- ext-time ---------------------------------------------------------------
  {
    struct Opts {
      ParamOpts p;
      DomainOpts dom;
      long cap = 2000;
      double extinct_tol = 1e-4;
      int workers = 0;
      std::string out, pgm, manifest;
      bool pgm_binary = false;
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand(
        "ext-time", "time to extinction over an initial-condition grid");
    add_local_flags(sub, &o->p);
    add_dispersal_flag(sub, &o->p);
    add_domain_flags(sub, &o->dom);
    sub->add_option("--cap", o->cap, "step cap; cap+1 encodes not extinct");
    sub->add_option("--extinct-tol", o->extinct_tol);
    sub->add_option("--workers", o->workers);
    sub->add_option("--out", o->out)->required();
    sub->add_option("--pgm", o->pgm);
    sub->add_flag("--pgm-binary", o->pgm_binary);
    sub->add_option("--manifest", o->manifest);
    sub->callback([o] {
      RunRecorder rec("ext-time");
      rec.add("r", o->p.r);
      rec.add("K", o->p.K);
      rec.add("A", o->p.A);
      rec.add("d", o->p.d);
      record_domain(rec, o->dom);
      rec.add("cap", o->cap);
      rec.add("extinct-tol", o->extinct_tol);
      rec.add("workers", o->workers);
      rec.add("out", o->out);
      const CoupledParams cp(LocalParams(o->p.r, o->p.K, o->p.A), o->p.d);
      const ClassifiedGrid grid = extinction_time_grid(
          cp, domain_grid(o->dom), o->cap, o->extinct_tol, o->workers);
      auto os = open_output(o->out);
      write_grid_csv(os, grid, "x0", "y0", "t");
      if (!o->pgm.empty()) {
        rec.add("pgm", o->pgm);
        rec.add("pgm-binary", o->pgm_binary ? 1 : 0);
        std::vector<int> pixels;
        pixels.reserve(grid.cells.size());
        for (std::int32_t t : grid.cells) {
          pixels.push_back(extinction_time_gray(t, o->cap));
        }
        auto pgm = open_output(o->pgm);
        write_pgm(pgm, grid.cols, grid.rows, pixels, o->pgm_binary);
      }
      std::cout << "cells=" << grid.cells.size() << '\n';
      rec.finish(manifest_path(o->manifest, o->out));
    });
  }

  // ---- nullclines -------------------------------------------------------------
  {
    struct Opts {
      ParamOpts p;
      DomainOpts dom{0.0, 1.5, 0.0, 1.5, 800};
      int iterate = 1;
      double curve_tol = 1e-3;
      std::string out, manifest;
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand(
        "nullclines", "zero contours of the first or second iterate");
    add_local_flags(sub, &o->p);
    add_dispersal_flag(sub, &o->p);
    o->dom.grid = 800;
    add_domain_flags(sub, &o->dom);
    sub->add_option("--iterate", o->iterate)->check(CLI::Range(1, 2));
    sub->add_option("--curve-tol", o->curve_tol, "residual bound at vertices");
    sub->add_option("--out", o->out)->required();
    sub->add_option("--manifest", o->manifest);
    sub->callback([o] {
      RunRecorder rec("nullclines");
      rec.add("r", o->p.r);
      rec.add("K", o->p.K);
      rec.add("A", o->p.A);
      rec.add("d", o->p.d);
      record_domain(rec, o->dom);
      rec.add("iterate", o->iterate);
      rec.add("curve-tol", o->curve_tol);
      rec.add("out", o->out);
      const CoupledParams cp(LocalParams(o->p.r, o->p.K, o->p.A), o->p.d);
      GridSpec domain = domain_grid(o->dom);
      const NullclineSet set =
          nullclines(cp, o->iterate, domain, o->dom.grid, o->curve_tol);
      auto os = open_output(o->out);
      write_nullclines_csv(os, set);
      std::cout << "x_curves=" << set.x_family.curves.size()
                << " y_curves=" << set.y_family.curves.size() << '\n';
      rec.finish(manifest_path(o->manifest, o->out));
    });
  }

  // ---- fixed-points -----------------------------------------------------------
  {
    struct Opts {
      ParamOpts p;
      DomainOpts dom{0.0, 1.5, 0.0, 1.5, 400};
      int iterate = 1;
      double residual_tol = 1e-10;
      std::string seeds, out, manifest;
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand(
        "fixed-points",
        "Newton-refined fixed points of the first or second iterate");
    add_local_flags(sub, &o->p);
    add_dispersal_flag(sub, &o->p);
    o->dom.grid = 400;
    add_domain_flags(sub, &o->dom);
    sub->add_option("--iterate", o->iterate)->check(CLI::Range(1, 2));
    sub->add_option("--residual-tol", o->residual_tol);
    sub->add_option("--seeds", o->seeds,
                    "explicit seeds x:y,... (default: nullcline crossings)");
    sub->add_option("--out", o->out)->required();
    sub->add_option("--manifest", o->manifest);
    sub->callback([o] {
      RunRecorder rec("fixed-points");
      rec.add("r", o->p.r);
      rec.add("K", o->p.K);
      rec.add("A", o->p.A);
      rec.add("d", o->p.d);
      record_domain(rec, o->dom);
      rec.add("iterate", o->iterate);
      rec.add("residual-tol", o->residual_tol);
      if (!o->seeds.empty()) rec.add("seeds", o->seeds);
      rec.add("out", o->out);
      const CoupledParams cp(LocalParams(o->p.r, o->p.K, o->p.A), o->p.d);
      std::vector<PatchState> seeds;
      if (!o->seeds.empty()) {
        seeds = parse_states(o->seeds);
      } else {
        seeds = nullcline_intersections(cp, o->iterate, domain_grid(o->dom),
                                        o->dom.grid);
      }
      const FixedPointResult result =
          fixed_points(cp, o->iterate, seeds, o->residual_tol);
      auto os = open_output(o->out);
      write_fixed_points_csv(os, result.points);
      std::cout << "fixed_points=" << result.points.size()
                << " non_converged=" << result.non_converged.size() << '\n';
      rec.finish(manifest_path(o->manifest, o->out));
    });
  }

  // ---- transient ------------------------------------------------------------
  {
    struct Opts {
      ParamOpts p;
      double x0 = 0.5, y0 = 0.5;
      long cap = 100000, persistence = 50;
      double extinct_tol = 1e-4;
      std::string out, segments_out, manifest;
    };
    auto o = std::make_shared<Opts>();
    auto* sub = app.add_subcommand(
        "transient", "orbit with regime segmentation and ghost switches");
    add_local_flags(sub, &o->p);
    add_dispersal_flag(sub, &o->p);
    sub->add_option("--x0", o->x0)->required();
    sub->add_option("--y0", o->y0)->required();
    sub->add_option("--cap", o->cap);
    sub->add_option("--extinct-tol", o->extinct_tol);
    sub->add_option("--persistence", o->persistence,
                    "steps a new label must persist to open a segment");
    sub->add_option("--out", o->out, "orbit CSV path");
    sub->add_option("--segments-out", o->segments_out, "segments CSV path");
    sub->add_option("--manifest", o->manifest);
    sub->callback([o] {
      RunRecorder rec("transient");
      rec.add("r", o->p.r);
      rec.add("K", o->p.K);
      rec.add("A", o->p.A);
      rec.add("d", o->p.d);
      rec.add("x0", o->x0);
      rec.add("y0", o->y0);
      rec.add("cap", o->cap);
      rec.add("extinct-tol", o->extinct_tol);
      rec.add("persistence", o->persistence);
      const CoupledParams cp(LocalParams(o->p.r, o->p.K, o->p.A), o->p.d);
      const TransientTrace trace = transient_trace(
          cp, {o->x0, o->y0}, o->cap, o->extinct_tol, o->persistence);
      if (trace.extinction_step) {
        std::cout << "extinction_step=" << *trace.extinction_step << '\n';
      } else {
        std::cout << "extinction_step=none\n";
      }
      std::cout << "ghost_switches=" << trace.ghost_switches << '\n';
      for (const TransientSegment& seg : trace.segments) {
        std::cout << "segment=" << to_string(seg.label) << ':' << seg.first
                  << ':' << seg.last << '\n';
      }
      if (!o->out.empty()) {
        rec.add("out", o->out);
        auto os = open_output(o->out);
        write_transient_csv(os, trace);
      }
      if (!o->segments_out.empty()) {
        rec.add("segments-out", o->segments_out);
        auto os = open_output(o->segments_out);
        write_segments_csv(os, trace);
      }
      rec.finish(manifest_path(o->manifest, o->out));
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const patchdyn::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return exit_code;
}
