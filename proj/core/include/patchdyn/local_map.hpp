#pragma once

#include <string_view>
#include <vector>

namespace patchdyn {

// Parameters of the single-patch Ricker map with a strong Allee effect,
//
//   f(x) = x * exp(r * (1 - x/K) * (x/A - 1)).
//
// x = A and x = K are fixed points; densities below A decline to extinction,
// large densities overshoot to small ones (overcompensation).
struct LocalParams {
  double r;  // intrinsic per-capita growth, > 0
  double K;  // carrying capacity, > 0
  double A;  // Allee threshold, 0 < A < K

  LocalParams(double r, double K, double A);
};

// Long-term behaviour of the isolated map, selected by the sign of f(f(D)) - A
// where D is the critical point of f.
enum class Regime {
  Bistable,              // f(f(D)) > A: orbits in [A, A*] stay above A
  EssentialExtinction,   // f(f(D)) < A: almost every orbit dies out
  ChaoticSemistability,  // f(f(D)) = A (within tolerance)
};

std::string_view to_string(Regime regime);

struct RegimeReport {
  double D;          // unique positive critical point of f
  double M;          // maximum production f(D)
  double A_star;     // largest preimage of the Allee threshold, max f^-1(A)
  double r_th_side;  // f(f(D)) - A; its sign selects the regime
  Regime regime;
};

// f(x). Throws std::domain_error unless x is finite and >= 0.
double eval_f(const LocalParams& p, double x);

// Analytic df/dx. Same domain requirements as eval_f.
double eval_f_prime(const LocalParams& p, double x);

// Unique positive critical point of f. Closed form for K = 1, bracketed
// bisection on f' otherwise.
double critical_point(const LocalParams& p);

// Largest solution of f(x) = A (right of the critical point).
double allee_upper_bound(const LocalParams& p);

// Full report: D, M = f(D), A*, f(f(D)) - A and the regime label.
// |f(f(D)) - A| <= equality_tol classifies as ChaoticSemistability.
RegimeReport regime(const LocalParams& p, double equality_tol = 1e-9);

// Growth rate r_th with f(f(D)) = A for the given K and A, found by scanning
// r in (0, 5] in steps of 0.01 for a sign change and bisecting.
// Throws NumericError if the scan finds no sign change or the final residual
// exceeds residual_tol.
double solve_r_th(double K, double A, double residual_tol = 1e-10);

// Closed-form Schwartzian derivative of f, valid for the K = 1
// normalization and x > 0. Throws NumericError at the critical point where
// f'(x) = 0 (the expression has a pole there).
double schwartzian(const LocalParams& p, double x);

// Forward orbit (x0, f(x0), ..., f^steps(x0)); steps+1 entries.
// Throws NumericError with the step index if an iterate becomes non-finite.
std::vector<double> iterate_local(const LocalParams& p, double x0, long steps);

}  // namespace patchdyn
