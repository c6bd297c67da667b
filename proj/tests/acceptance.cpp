// Acceptance suite: every release gate in one binary, one PASS/FAIL line per
// criterion, nonzero exit when any gate fails. Tolerances and runtime
// budgets are fixed here, not configurable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "patchdyn/attractor.hpp"
#include "patchdyn/coupled_map.hpp"
#include "patchdyn/errors.hpp"
#include "patchdyn/io.hpp"
#include "patchdyn/local_map.hpp"
#include "patchdyn/rng.hpp"
#include "patchdyn/sweep.hpp"

using namespace patchdyn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

GridSpec square_grid(long n, double lo, double hi) {
  return GridSpec{Axis{"x0", lo, hi, n, {}}, Axis{"y0", lo, hi, n, {}}};
}

std::map<std::int32_t, long> label_counts(const ClassifiedGrid& g) {
  std::map<std::int32_t, long> counts;
  for (const std::int32_t c : g.cells) ++counts[c];
  return counts;
}

// Fraction of cells with at least one differently-labeled 4-neighbor.
double boundary_fraction(const ClassifiedGrid& g) {
  long boundary = 0;
  for (long i = 0; i < g.rows; ++i) {
    for (long j = 0; j < g.cols; ++j) {
      const std::int32_t c = g.at(i, j);
      const bool edge = (i > 0 && g.at(i - 1, j) != c) ||
                        (i + 1 < g.rows && g.at(i + 1, j) != c) ||
                        (j > 0 && g.at(i, j - 1) != c) ||
                        (j + 1 < g.cols && g.at(i, j + 1) != c);
      boundary += edge ? 1 : 0;
    }
  }
  return static_cast<double>(boundary) /
         static_cast<double>(g.rows * g.cols);
}

std::string describe(const AttractorRecord& r) {
  std::ostringstream ss;
  ss << to_string(r.category) << "/p" << r.period << "/"
     << to_string(r.phase);
  return ss.str();
}

// --- criterion 1: r_th reproduction ---------------------------------------

Outcome threshold_reproduction() {
  const double rth = solve_r_th(1.0, 0.2, 1e-10);
  Outcome out;
  out.pass = rth >= 0.875 && rth <= 0.885;
  out.detail = "r_th=" + format_double(rth) + " required [0.875, 0.885]";
  return out;
}

// --- criterion 2: the six coexisting attractors ----------------------------

Outcome attractor_taxonomy() {
  const CoupledParams cp(LocalParams(0.63, 1.0, 0.2), 0.01);
  const std::vector<PatchState> seeds = {{0.03, 0.04}, {0.16, 0.86},
                                         {0.86, 0.16}, {0.64, 0.38},
                                         {0.82, 0.98}, {0.38, 0.58}};
  const auto records = census(cp, seeds);
  // Required: exactly six distinct attractors with
  //   (Extinction, -, -), (AsymmetricYHigh, 4, -), (AsymmetricXHigh, 4, -),
  //   (Symmetric, 4, InPhase), (Symmetric, 4, OutOfPhase),
  //   (Symmetric, 2, OutOfPhase).
  auto key = [](const AttractorRecord& r) {
    if (r.category == AttractorCategory::Extinction) return std::string("Ext");
    std::string k = std::string(to_string(r.category)) + "/" +
                    std::to_string(r.period);
    if (r.category == AttractorCategory::Symmetric) {
      k += "/" + std::string(to_string(r.phase));
    }
    return k;
  };
  std::multiset<std::string> got;
  for (const auto& r : records) got.insert(key(r));
  const std::multiset<std::string> expected = {
      "Ext",
      "AsymmetricYHigh/4",
      "AsymmetricXHigh/4",
      "Symmetric/4/InPhase",
      "Symmetric/4/OutOfPhase",
      "Symmetric/2/OutOfPhase"};
  Outcome out;
  out.pass = records.size() == 6 && got == expected;
  std::ostringstream ss;
  ss << "distinct=" << records.size() << " got={";
  for (const auto& r : records) ss << describe(r) << ' ';
  ss << "}";
  if (!out.pass) {
    ss << " expected={Ext AsymmetricYHigh/p4 AsymmetricXHigh/p4 "
          "Symmetric/p4/InPhase Symmetric/p4/OutOfPhase "
          "Symmetric/p2/OutOfPhase}";
  }
  out.detail = ss.str();
  return out;
}

// --- criterion 3: n+3 orbits near the uncoupled periodic points -------------

Outcome uncoupled_cycle_census() {
  const LocalParams local(0.63, 1.0, 0.2);
  const CoupledParams cp(local, 1e-3);
  const auto seeds = uncoupled_cycle_seeds(local);
  const auto records = census(cp, seeds);
  bool all_stable = true;
  double worst = 0.0;
  for (const auto& r : records) {
    if (!r.stability || *r.stability >= 1.0) all_stable = false;
    if (r.stability) worst = std::max(worst, *r.stability);
  }
  Outcome out;
  out.pass = records.size() == 7 && all_stable;
  out.detail = "d=0.001 distinct=" + std::to_string(records.size()) +
               " (need 7) max_spectral_radius=" + format_double(worst) +
               " (need < 1)";
  return out;
}

// --- criteria 4 and 5: basin structure -------------------------------------

Outcome weak_coupling_rescue() {
  Outcome out;
  std::ostringstream ss;
  bool ok = true;
  const GridSpec grid = square_grid(300, 0.0, 1.5);
  {
    const ClassifiedGrid g =
        basin_grid(CoupledParams(LocalParams(0.87, 1.0, 0.2), 0.01), grid);
    const auto counts = label_counts(g);
    const bool all_four = counts.count(codes::kBasinExtinction) &&
                          counts.count(codes::kBasinAsymmetricXHigh) &&
                          counts.count(codes::kBasinAsymmetricYHigh) &&
                          counts.count(codes::kBasinSymmetric);
    ok = ok && all_four;
    ss << "r=0.87 all-four=" << (all_four ? "yes" : "NO");
  }
  {
    const ClassifiedGrid g =
        basin_grid(CoupledParams(LocalParams(0.887, 1.0, 0.2), 0.01), grid);
    const auto counts = label_counts(g);
    const long symmetric =
        counts.count(codes::kBasinSymmetric)
            ? counts.at(codes::kBasinSymmetric)
            : 0;
    const bool cond = symmetric == 0 &&
                      counts.count(codes::kBasinAsymmetricXHigh) &&
                      counts.count(codes::kBasinAsymmetricYHigh) &&
                      counts.count(codes::kBasinExtinction);
    ok = ok && cond;
    ss << "; r=0.887 symmetric_cells=" << symmetric
       << " both-asym+ext=" << (cond ? "yes" : "NO");
  }
  {
    const ClassifiedGrid g =
        basin_grid(CoupledParams(LocalParams(0.888, 1.0, 0.2), 0.01), grid);
    const auto counts = label_counts(g);
    const long extinct = counts.count(codes::kBasinExtinction)
                             ? counts.at(codes::kBasinExtinction)
                             : 0;
    const double fraction =
        static_cast<double>(extinct) / static_cast<double>(g.cells.size());
    ok = ok && fraction >= 0.99;
    ss << "; r=0.888 extinction_fraction=" << fraction << " (need >= 0.99)";
  }
  out.pass = ok;
  out.detail = ss.str();
  return out;
}

Outcome strong_coupling_rescue() {
  const GridSpec grid = square_grid(300, 0.0, 1.5);
  const ClassifiedGrid smooth =
      basin_grid(CoupledParams(LocalParams(0.87, 1.0, 0.2), 0.23), grid);
  const ClassifiedGrid fractal =
      basin_grid(CoupledParams(LocalParams(0.887, 1.0, 0.2), 0.23), grid);
  const auto counts_smooth = label_counts(smooth);
  const auto counts_fractal = label_counts(fractal);
  const bool labels_ok = counts_smooth.count(codes::kBasinSymmetric) &&
                         counts_smooth.count(codes::kBasinExtinction) &&
                         counts_fractal.count(codes::kBasinSymmetric) &&
                         counts_fractal.count(codes::kBasinExtinction);
  const double bf_smooth = boundary_fraction(smooth);
  const double bf_fractal = boundary_fraction(fractal);
  Outcome out;
  out.pass = labels_ok && bf_fractal >= 3.0 * bf_smooth;
  std::ostringstream ss;
  ss << "labels=" << (labels_ok ? "yes" : "NO")
     << " boundary_fraction r=0.87: " << bf_smooth
     << ", r=0.887: " << bf_fractal << " ratio=" << bf_fractal / bf_smooth
     << " (need >= 3)";
  out.detail = ss.str();
  return out;
}

// --- criterion 6: no rescue at intermediate coupling ------------------------

Outcome no_rescue() {
  const LocalParams local(0.884, 1.0, 0.2);
  const CoupledParams cp(local, 0.1);
  const double a_star = allee_upper_bound(local);
  const long n = 10000;
  long extinct = 0;
  for (long k = 0; k < n; ++k) {
    const PatchState s0{
        0.2 + (a_star - 0.2) * keyed_uniform(20250810, k, 0),
        0.2 + (a_star - 0.2) * keyed_uniform(20250810, k, 1)};
    if (time_to_extinction(cp, s0, 5000).has_value()) ++extinct;
  }
  const double fraction = static_cast<double>(extinct) / n;
  Outcome out;
  out.pass = fraction >= 0.99;
  out.detail = "extinct_fraction=" + format_double(fraction) +
               " of 1e4 states in [A, A*]^2 within 5000 steps (need >= 0.99)";
  return out;
}

// --- criterion 7: extinction-time map ----------------------------------------

Outcome extinction_time_map() {
  const GridSpec grid = square_grid(300, 0.0, 1.5);
  const ClassifiedGrid g = extinction_time_grid(
      CoupledParams(LocalParams(0.89, 1.0, 0.2), 0.186), grid, 2000);
  std::int32_t shortest = 1 << 30, longest = -1;
  for (const std::int32_t t : g.cells) {
    shortest = std::min(shortest, t);
    longest = std::max(longest, t);
  }
  Outcome out;
  out.pass = shortest <= 5 && longest >= 2000;
  out.detail = "min_time=" + std::to_string(shortest) + " (need <= 5), max_time=" +
               std::to_string(longest) + " (need >= 2000; 2001 = not extinct)";
  return out;
}

// --- criterion 8: long transient with ghost switching ------------------------

Outcome long_transient() {
  const CoupledParams cp(LocalParams(0.898, 1.0, 0.2), 0.0415);
  const TransientTrace trace =
      transient_trace(cp, {0.07381, 0.53102}, 200000);
  const long t = trace.extinction_step.value_or(-1);
  Outcome out;
  out.pass = trace.extinction_step.has_value() && t > 10000 &&
             trace.ghost_switches >= 2;
  out.detail = "extinction_step=" +
               (trace.extinction_step ? std::to_string(t) : std::string("none")) +
               " (need > 1e4), ghost_switches=" +
               std::to_string(trace.ghost_switches) + " (need >= 2)";
  return out;
}

// --- criterion 9: property suite ---------------------------------------------

Outcome property_suite() {
  std::vector<std::string> failures;
  auto expect = [&](bool cond, const std::string& what) {
    if (!cond) failures.push_back(what);
  };

  // Local fixed points are exact.
  for (const double r : {0.3, 0.63, 0.88, 1.0}) {
    const LocalParams p(r, 1.0, 0.2);
    expect(eval_f(p, 0.0) == 0.0, "f(0) != 0");
    expect(eval_f(p, p.A) == p.A, "f(A) != A");
    expect(eval_f(p, p.K) == p.K, "f(K) != K");
  }

  // Exchange symmetry (exact) and production conservation at 1e3 states.
  {
    const LocalParams local(0.63, 1.0, 0.2);
    const CoupledParams cp(local, 0.17);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.5);
    for (int k = 0; k < 1000; ++k) {
      const PatchState s{u(rng), u(rng)};
      const PatchState fwd = step(cp, s);
      const PatchState swp = step(cp, {s.y, s.x});
      expect(swp.x == fwd.y && swp.y == fwd.x, "exchange symmetry broken");
      const double total = eval_f(local, s.x) + eval_f(local, s.y);
      expect(std::abs(fwd.x + fwd.y - total) <= 4.0 * 2.22e-16 * total,
             "production not conserved");
    }
  }

  // d = 0 reduces to two independent local orbits, bitwise.
  {
    const LocalParams local(0.63, 1.0, 0.2);
    const OrbitSegment seg = iterate(CoupledParams(local, 0.0), {0.5, 0.9}, 500);
    const auto ox = iterate_local(local, 0.5, 500);
    const auto oy = iterate_local(local, 0.9, 500);
    for (std::size_t t = 0; t < seg.states.size(); ++t) {
      expect(seg.states[t].x == ox[t] && seg.states[t].y == oy[t],
             "d=0 reduction not exact");
    }
  }

  // Schwartzian negativity on the parameter/state grid.
  for (const double r : {0.3, 0.63, 0.88, 1.0}) {
    for (const double A : {0.1, 0.2, 0.4}) {
      const LocalParams p(r, 1.0, A);
      for (int i = 1; i <= 120; ++i) {
        const double x = 3.0 * i / 120.0;
        try {
          expect(schwartzian(p, x) < 0.0, "Schwartzian not negative");
        } catch (const NumericError&) {
          // pole at the critical point
        }
      }
    }
  }

  // Derivative and Jacobian agree with finite differences to 1e-6.
  {
    const LocalParams p(0.63, 1.0, 0.2);
    for (int i = 1; i <= 40; ++i) {
      const double x = 3.0 * i / 40.0;
      const double h = 6e-6 * (1.0 + x);
      const double fd = (eval_f(p, x + h) - eval_f(p, x - h)) / (2.0 * h);
      const double an = eval_f_prime(p, x);
      expect(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)),
             "f' finite-difference mismatch");
    }
    const CoupledParams cp(p, 0.21);
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.5);
    for (int k = 0; k < 100; ++k) {
      const PatchState s{u(rng), u(rng)};
      const Mat2 J = jacobian(cp, s);
      const double h = 1e-7;
      const PatchState xp = step(cp, {s.x + h, s.y});
      const PatchState xm = step(cp, {s.x - h, s.y});
      const PatchState yp = step(cp, {s.x, s.y + h});
      const PatchState ym = step(cp, {s.x, s.y - h});
      const double fd[4] = {(xp.x - xm.x) / (2 * h), (yp.x - ym.x) / (2 * h),
                            (xp.y - xm.y) / (2 * h), (yp.y - ym.y) / (2 * h)};
      const double an[4] = {J.xx, J.xy, J.yx, J.yy};
      for (int e = 0; e < 4; ++e) {
        expect(std::abs(fd[e] - an[e]) <= 1e-6 * std::max(1.0, std::abs(an[e])),
               "Jacobian finite-difference mismatch");
      }
    }
  }

  // Trapping and extinction intervals of the bistable local map.
  {
    const LocalParams p(0.87, 1.0, 0.2);
    const RegimeReport rep = regime(p);
    for (int i = 0; i <= 20; ++i) {
      const double x0 =
          (p.A + 1e-3) + (rep.A_star - p.A - 2e-3) * i / 20.0;
      double x = x0;
      bool trapped = true;
      for (int t = 0; t < 10000 && trapped; ++t) {
        x = eval_f(p, x);
        trapped = x >= p.A;
      }
      expect(trapped, "orbit left [A, inf) from inside [A, A*]");
    }
    for (const double x0 : {0.05, 0.15, rep.A_star + 1e-3, 2.0, 3.0}) {
      double x = x0;
      bool died = false;
      for (int t = 0; t < 10000 && !died; ++t) {
        x = eval_f(p, x);
        died = x < 1e-8;
      }
      expect(died, "orbit outside [A, A*] did not die");
    }
  }

  // Parallel sweeps are bit-identical across 1, 4 and 8 workers.
  {
    const CoupledParams cp(LocalParams(0.87, 1.0, 0.2), 0.01);
    const GridSpec grid = square_grid(100, 0.0, 1.5);
    const ClassifiedGrid g1 = basin_grid(cp, grid, 1000, {}, 1);
    const ClassifiedGrid g4 = basin_grid(cp, grid, 1000, {}, 4);
    const ClassifiedGrid g8 = basin_grid(cp, grid, 1000, {}, 8);
    expect(g1.cells == g4.cells && g1.cells == g8.cells &&
               g1.aux == g4.aux && g1.aux == g8.aux,
           "sweep output depends on worker count");
  }

  Outcome out;
  out.pass = failures.empty();
  if (out.pass) {
    out.detail = "fixed points, symmetry, conservation, d=0 reduction, "
                 "Schwartzian, finite differences, trapping, determinism";
  } else {
    std::set<std::string> unique(failures.begin(), failures.end());
    std::ostringstream ss;
    ss << failures.size() << " failures:";
    for (const auto& f : unique) ss << ' ' << f << ';';
    out.detail = ss.str();
  }
  return out;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  Outcome (*run)();
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "threshold-reproduction", 1.0, threshold_reproduction},
      {2, "attractor-taxonomy", 5.0, attractor_taxonomy},
      {3, "weak-coupling-census", 10.0, uncoupled_cycle_census},
      {4, "weak-coupling-rescue-basins", 360.0, weak_coupling_rescue},
      {5, "strong-coupling-rescue-fractalization", 240.0, strong_coupling_rescue},
      {6, "mid-coupling-no-rescue", 60.0, no_rescue},
      {7, "extinction-time-map", 120.0, extinction_time_map},
      {8, "long-transient-ghost-switching", 30.0, long_transient},
      {9, "property-suite", 60.0, property_suite},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const bool in_budget = secs <= c.budget_seconds;
    const bool pass = out.pass && in_budget;
    failures += pass ? 0 : 1;
    std::printf("%s  %d %s  [%.2fs of %.0fs]  %s%s\n", pass ? "PASS" : "FAIL",
                c.id, c.name, secs, c.budget_seconds, out.detail.c_str(),
                out.pass && !in_budget ? " (over time budget)" : "");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
