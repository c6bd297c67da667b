#pragma once

#include <vector>

#include "patchdyn/local_map.hpp"

namespace patchdyn {

// Two identical patches coupled by a dispersing fraction d of each patch's
// production:
//
//   x' = (1-d) f(x) + d f(y)
//   y' = d f(x) + (1-d) f(y)
//
// d = 0.5 is complete mixing.
struct CoupledParams {
  LocalParams local;
  double d;  // dispersal fraction, 0 <= d <= 0.5

  CoupledParams(LocalParams local, double d);
};

// A point of the state space C = [0, inf)^2.
struct PatchState {
  double x = 0.0;
  double y = 0.0;
};

// Contiguous piece of an orbit; states[k] is the state at time
// start_index + k and consecutive entries satisfy states[k+1] = F(states[k]).
struct OrbitSegment {
  long start_index = 0;
  std::vector<PatchState> states;
};

// Row-major 2x2 matrix, just enough linear algebra for stability work.
struct Mat2 {
  double xx = 1.0, xy = 0.0;
  double yx = 0.0, yy = 1.0;

  Mat2 operator*(const Mat2& rhs) const;
  double trace() const { return xx + yy; }
  double det() const { return xx * yy - xy * yx; }
  // Largest eigenvalue modulus.
  double spectral_radius() const;
};

// Output densities below this are flushed to exactly zero, so the extinction
// state (0,0) is reachable in finite time and denormals never accumulate.
inline constexpr double kDensityFlush = 1e-300;

// One application of the coupled map F. Throws std::domain_error if the state
// is outside C, NumericError if a patch's production overflows.
PatchState step(const CoupledParams& cp, const PatchState& s);

// Orbit of F from s0, recording states with index in [record_from, steps].
OrbitSegment iterate(const CoupledParams& cp, const PatchState& s0, long steps,
                     long record_from = 0);

// Jacobian of F: mixing matrix times diag(f'(x), f'(y)). At symmetric states
// the eigenpairs are f'(x) along (1,1) and (1-2d) f'(x) along (1,-1).
Mat2 jacobian(const CoupledParams& cp, const PatchState& s);

}  // namespace patchdyn
