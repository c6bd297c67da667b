#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "patchdyn/coupled_map.hpp"

namespace patchdyn {

// Taxonomy of limit sets by where the orbit tail sits relative to the Allee
// threshold A: asymmetric attractors keep exactly one patch above A,
// symmetric attractors keep both above. Transitional marks tails that are
// still crossing A (not converged by the detector's horizon).
enum class AttractorCategory {
  Extinction,
  AsymmetricXHigh,
  AsymmetricYHigh,
  Symmetric,
  Transitional,
};

std::string_view to_string(AttractorCategory category);

// Relation between the two patches over one detected cycle: InPhase when the
// y sequence matches the x sequence with no time shift, OutOfPhase when it
// matches only under a nonzero cyclic shift, Undefined otherwise.
enum class CyclePhase { InPhase, OutOfPhase, Undefined };

std::string_view to_string(CyclePhase phase);

struct DetectorSettings {
  long transient = 5000;     // steps discarded before any measurement
  int max_period = 8;        // largest period searched; longer counts as 0
  double match_tol = 1e-6;   // max-norm recurrence tolerance
  double extinct_tol = 1e-4; // total density below this counts as extinct
  double dedup_tol = 1e-4;   // orbit matching tolerance in census
};

struct AttractorRecord {
  AttractorCategory category = AttractorCategory::Transitional;
  // Detected period; 0 encodes "no period <= max_period" (chaos or an
  // unconverged tail).
  int period = 0;
  CyclePhase phase = CyclePhase::Undefined;
  std::vector<PatchState> orbit_points;   // the cycle, empty when period == 0
  std::optional<double> stability;        // spectral radius of the cycle's
                                          // Jacobian product, when period > 0
};

// Discards the transient, finds the smallest period n <= max_period whose
// recurrence holds over three consecutive cycle traversals, and classifies
// the tail window of max(3*max_period, 100) states. Tails that are neither
// extinct nor settled (period 0 or straddling A) are re-run once with a
// doubled transient before being reported.
// Never fails just because no period is found; numeric blow-up throws
// NumericError.
AttractorRecord detect_attractor(const CoupledParams& cp, const PatchState& s0,
                                 const DetectorSettings& settings = {});

// True when the two records describe the same limit set: equal periods and
// orbit point sets matching under some cyclic rotation within tol (period-0
// records compare by category).
bool same_attractor(const AttractorRecord& a, const AttractorRecord& b,
                    double tol);

// Runs the detector on every seed and keeps the distinct attractors in
// first-seen order.
std::vector<AttractorRecord> census(const CoupledParams& cp,
                                    std::span<const PatchState> seeds,
                                    const DetectorSettings& settings = {});

// Seeds near the n+3 periodic points assembled from the stable local cycle
// {p, f(p), ...}: (0,0), (0,p), (p,0) and (p, f^i(p)) for i = 0..n-1, each
// offset by `offset` in both coordinates. The local cycle is taken from the
// critical orbit of f. Throws NumericError when the local map has no stable
// cycle of period <= settings.max_period.
std::vector<PatchState> uncoupled_cycle_seeds(const LocalParams& p,
                                       const DetectorSettings& settings = {},
                                       double offset = 1e-3);

// First time t <= cap with x_t + y_t < extinct_tol (0 when the initial state
// already qualifies), or nullopt when the orbit outlives the cap.
std::optional<long> time_to_extinction(const CoupledParams& cp, PatchState s0,
                                       long cap, double extinct_tol = 1e-4);

// Run of consecutive time steps sharing one category label.
struct TransientSegment {
  AttractorCategory label;
  long first = 0;
  long last = 0;  // inclusive
};

struct TransientTrace {
  OrbitSegment orbit;                       // states 0..T
  std::vector<AttractorCategory> labels;    // per-state category label
  std::vector<TransientSegment> segments;   // persistence-filtered regimes
  std::optional<long> extinction_step;      // first step with x+y < extinct_tol
  // Transitions between AsymmetricXHigh and AsymmetricYHigh segments,
  // ignoring any other segments between them.
  int ghost_switches = 0;
};

// Full orbit until extinction or cap, segmented by the per-step category
// label. A label change only opens a new segment once the new label has
// persisted for `persistence` consecutive steps, so brief excursions do not
// fragment a regime.
TransientTrace transient_trace(const CoupledParams& cp, const PatchState& s0,
                               long cap, double extinct_tol = 1e-4,
                               long persistence = 50);

}  // namespace patchdyn
