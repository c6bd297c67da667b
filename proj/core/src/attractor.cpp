#include "patchdyn/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "patchdyn/errors.hpp"

namespace patchdyn {

std::string_view to_string(AttractorCategory category) {
  switch (category) {
    case AttractorCategory::Extinction:
      return "Extinction";
    case AttractorCategory::AsymmetricXHigh:
      return "AsymmetricXHigh";
    case AttractorCategory::AsymmetricYHigh:
      return "AsymmetricYHigh";
    case AttractorCategory::Symmetric:
      return "Symmetric";
    case AttractorCategory::Transitional:
      return "Transitional";
  }
  return "?";
}

std::string_view to_string(CyclePhase phase) {
  switch (phase) {
    case CyclePhase::InPhase:
      return "InPhase";
    case CyclePhase::OutOfPhase:
      return "OutOfPhase";
    case CyclePhase::Undefined:
      return "Undefined";
  }
  return "?";
}

namespace {

void validate(const DetectorSettings& s) {
  if (s.transient < 1) {
    throw std::invalid_argument("DetectorSettings: transient must be >= 1");
  }
  if (s.max_period < 1 || s.max_period > 64) {
    throw std::invalid_argument("DetectorSettings: need 1 <= max_period <= 64");
  }
  if (!(s.match_tol > 0.0) || !(s.extinct_tol > 0.0) || !(s.dedup_tol > 0.0)) {
    throw std::invalid_argument("DetectorSettings: tolerances must be > 0");
  }
}

double max_norm(const PatchState& a, const PatchState& b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

long window_length(int max_period) {
  return std::max(3L * max_period + 1, 100L);
}

// Smallest n <= max_period whose recurrence |w[i+n] - w[i]| < tol holds for
// every i in [0, 2n], i.e. over three consecutive traversals of the cycle.
int detect_period(const std::vector<PatchState>& w, int max_period,
                  double tol) {
  for (int n = 1; n <= max_period; ++n) {
    bool ok = true;
    for (long i = 0; i <= 2L * n && ok; ++i) {
      ok = max_norm(w[static_cast<std::size_t>(i + n)],
                    w[static_cast<std::size_t>(i)]) < tol;
    }
    if (ok) return n;
  }
  return 0;
}

AttractorCategory classify_window(const std::vector<PatchState>& w, double A,
                                  double extinct_tol) {
  bool extinct = true, x_high = true, x_low = true, y_high = true,
       y_low = true;
  for (const PatchState& s : w) {
    extinct = extinct && (s.x + s.y < extinct_tol);
    x_high = x_high && s.x > A;
    x_low = x_low && s.x < A;
    y_high = y_high && s.y > A;
    y_low = y_low && s.y < A;
  }
  if (extinct) return AttractorCategory::Extinction;
  if (x_high && y_low) return AttractorCategory::AsymmetricXHigh;
  if (y_high && x_low) return AttractorCategory::AsymmetricYHigh;
  if (x_high && y_high) return AttractorCategory::Symmetric;
  return AttractorCategory::Transitional;
}

// The two patches are interchangeable, so a symmetric cycle traces the same
// value sequence in both patches up to a cyclic time shift. Zero shift is
// in-phase; any other shift (half a period for the cycles seen in practice)
// is out-of-phase.
CyclePhase cycle_phase(std::span<const PatchState> cycle, double tol) {
  const long n = static_cast<long>(cycle.size());
  if (n < 2) return CyclePhase::Undefined;
  for (long shift = 0; shift < n; ++shift) {
    bool ok = true;
    for (long i = 0; i < n && ok; ++i) {
      ok = std::abs(cycle[static_cast<std::size_t>(i)].y -
                    cycle[static_cast<std::size_t>((i + shift) % n)].x) <= tol;
    }
    if (ok) {
      return shift == 0 ? CyclePhase::InPhase : CyclePhase::OutOfPhase;
    }
  }
  return CyclePhase::Undefined;
}

AttractorRecord detect_impl(const CoupledParams& cp, const PatchState& s0,
                            const DetectorSettings& settings, bool may_retry) {
  PatchState s = s0;
  for (long t = 1; t <= settings.transient; ++t) {
    try {
      s = step(cp, s);
    } catch (const NumericError& e) {
      throw NumericError(e.what(), t);
    }
  }
  const long n_window = window_length(settings.max_period);
  std::vector<PatchState> window;
  window.reserve(static_cast<std::size_t>(n_window));
  window.push_back(s);
  for (long k = 1; k < n_window; ++k) {
    try {
      s = step(cp, s);
    } catch (const NumericError& e) {
      throw NumericError(e.what(), settings.transient + k);
    }
    window.push_back(s);
  }

  AttractorRecord record;
  record.period = detect_period(window, settings.max_period, settings.match_tol);
  record.category =
      classify_window(window, cp.local.A, settings.extinct_tol);

  // An unsettled tail (straddling A, or aperiodic and not extinct) may just
  // be a long transient; give it one more chance with a doubled transient.
  const bool unsettled =
      record.category == AttractorCategory::Transitional ||
      (record.period == 0 && record.category != AttractorCategory::Extinction);
  if (unsettled && may_retry) {
    DetectorSettings retry = settings;
    retry.transient *= 2;
    return detect_impl(cp, s0, retry, false);
  }

  if (record.category == AttractorCategory::Transitional) {
    record.period = 0;  // never report a cycle for an unconverged tail
  }
  if (record.period > 0) {
    record.orbit_points.assign(window.begin(), window.begin() + record.period);
    Mat2 product;
    for (int i = 0; i < record.period; ++i) {
      product = jacobian(cp, record.orbit_points[static_cast<std::size_t>(i)]) *
                product;
    }
    record.stability = product.spectral_radius();
    if (record.category == AttractorCategory::Symmetric && record.period >= 2) {
      record.phase = cycle_phase(record.orbit_points, 10.0 * settings.match_tol);
    }
  }
  return record;
}

}  // namespace

AttractorRecord detect_attractor(const CoupledParams& cp, const PatchState& s0,
                                 const DetectorSettings& settings) {
  validate(settings);
  return detect_impl(cp, s0, settings, true);
}

bool same_attractor(const AttractorRecord& a, const AttractorRecord& b,
                    double tol) {
  if (a.period != b.period) return false;
  if (a.period == 0) return a.category == b.category;
  const long n = a.period;
  for (long rot = 0; rot < n; ++rot) {
    bool ok = true;
    for (long i = 0; i < n && ok; ++i) {
      ok = max_norm(a.orbit_points[static_cast<std::size_t>((i + rot) % n)],
                    b.orbit_points[static_cast<std::size_t>(i)]) < tol;
    }
    if (ok) return true;
  }
  return false;
}

std::vector<AttractorRecord> census(const CoupledParams& cp,
                                    std::span<const PatchState> seeds,
                                    const DetectorSettings& settings) {
  if (seeds.empty()) throw std::invalid_argument("census: seeds are empty");
  std::vector<AttractorRecord> distinct;
  for (const PatchState& seed : seeds) {
    AttractorRecord record = detect_attractor(cp, seed, settings);
    const bool seen =
        std::any_of(distinct.begin(), distinct.end(),
                    [&](const AttractorRecord& other) {
                      return same_attractor(record, other, settings.dedup_tol);
                    });
    if (!seen) distinct.push_back(std::move(record));
  }
  return distinct;
}

std::vector<PatchState> uncoupled_cycle_seeds(const LocalParams& p,
                                       const DetectorSettings& settings,
                                       double offset) {
  validate(settings);
  // The critical orbit converges to the attracting cycle when one exists.
  double x = critical_point(p);
  for (long t = 1; t <= settings.transient; ++t) {
    x = eval_f(p, x);
    if (!std::isfinite(x)) {
      throw NumericError("uncoupled_cycle_seeds: local orbit became non-finite", t);
    }
  }
  const long n_window = window_length(settings.max_period);
  std::vector<double> window;
  window.reserve(static_cast<std::size_t>(n_window));
  window.push_back(x);
  for (long k = 1; k < n_window; ++k) {
    x = eval_f(p, x);
    window.push_back(x);
  }
  int period = 0;
  for (int n = 1; n <= settings.max_period && period == 0; ++n) {
    bool ok = true;
    for (long i = 0; i <= 2L * n && ok; ++i) {
      ok = std::abs(window[static_cast<std::size_t>(i + n)] -
                    window[static_cast<std::size_t>(i)]) < settings.match_tol;
    }
    if (ok) period = n;
  }
  if (period == 0) {
    throw NumericError(
        "uncoupled_cycle_seeds: no stable local cycle of period <= max_period");
  }
  const double p0 = window[0];
  std::vector<PatchState> seeds;
  seeds.reserve(static_cast<std::size_t>(period) + 3);
  seeds.push_back({offset, offset});
  seeds.push_back({offset, p0 + offset});
  seeds.push_back({p0 + offset, offset});
  for (int i = 0; i < period; ++i) {
    seeds.push_back({p0 + offset, window[static_cast<std::size_t>(i)] + offset});
  }
  return seeds;
}

std::optional<long> time_to_extinction(const CoupledParams& cp, PatchState s0,
                                       long cap, double extinct_tol) {
  if (cap < 1) throw std::invalid_argument("time_to_extinction: cap must be >= 1");
  if (s0.x + s0.y < extinct_tol) return 0;
  PatchState s = s0;
  for (long t = 1; t <= cap; ++t) {
    try {
      s = step(cp, s);
    } catch (const NumericError& e) {
      throw NumericError(e.what(), t);
    }
    if (s.x + s.y < extinct_tol) return t;
  }
  return std::nullopt;
}

namespace {

AttractorCategory state_label(const PatchState& s, double A,
                              double extinct_tol) {
  if (s.x + s.y < extinct_tol) return AttractorCategory::Extinction;
  if (s.x > A && s.y < A) return AttractorCategory::AsymmetricXHigh;
  if (s.y > A && s.x < A) return AttractorCategory::AsymmetricYHigh;
  if (s.x > A && s.y > A) return AttractorCategory::Symmetric;
  return AttractorCategory::Transitional;
}

}  // namespace

TransientTrace transient_trace(const CoupledParams& cp, const PatchState& s0,
                               long cap, double extinct_tol, long persistence) {
  if (cap < 1) throw std::invalid_argument("transient_trace: cap must be >= 1");
  if (persistence < 1) {
    throw std::invalid_argument("transient_trace: persistence must be >= 1");
  }
  TransientTrace trace;
  trace.orbit.start_index = 0;
  PatchState s = s0;
  for (long t = 0; t <= cap; ++t) {
    const AttractorCategory label = state_label(s, cp.local.A, extinct_tol);
    trace.orbit.states.push_back(s);
    trace.labels.push_back(label);
    if (label == AttractorCategory::Extinction) {
      trace.extinction_step = t;
      break;
    }
    if (t == cap) break;
    try {
      s = step(cp, s);
    } catch (const NumericError& e) {
      throw NumericError(e.what(), t + 1);
    }
  }

  // Persistence-filtered segmentation: a candidate label takes over only
  // after `persistence` consecutive occurrences.
  const long n = static_cast<long>(trace.labels.size());
  AttractorCategory current = trace.labels[0];
  long seg_start = 0;
  AttractorCategory candidate = current;
  long cand_start = 0, cand_run = 0;
  for (long i = 1; i < n; ++i) {
    const AttractorCategory l = trace.labels[static_cast<std::size_t>(i)];
    if (l == current) {
      cand_run = 0;
      continue;
    }
    if (cand_run == 0 || l != candidate) {
      candidate = l;
      cand_start = i;
      cand_run = 1;
    } else {
      ++cand_run;
    }
    if (cand_run >= persistence) {
      trace.segments.push_back({current, seg_start, cand_start - 1});
      current = candidate;
      seg_start = cand_start;
      cand_run = 0;
    }
  }
  // Report the terminal extinction step as its own segment even when it is
  // too short to pass the persistence filter.
  if (trace.extinction_step && current != AttractorCategory::Extinction) {
    const long ext = *trace.extinction_step;
    if (ext > seg_start) trace.segments.push_back({current, seg_start, ext - 1});
    trace.segments.push_back({AttractorCategory::Extinction, ext, n - 1});
  } else {
    trace.segments.push_back({current, seg_start, n - 1});
  }

  AttractorCategory last_ghost = AttractorCategory::Transitional;
  for (const TransientSegment& seg : trace.segments) {
    if (seg.label != AttractorCategory::AsymmetricXHigh &&
        seg.label != AttractorCategory::AsymmetricYHigh) {
      continue;
    }
    if ((last_ghost == AttractorCategory::AsymmetricXHigh ||
         last_ghost == AttractorCategory::AsymmetricYHigh) &&
        seg.label != last_ghost) {
      ++trace.ghost_switches;
    }
    last_ghost = seg.label;
  }
  return trace;
}

}  // namespace patchdyn
