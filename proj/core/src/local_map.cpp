#include "patchdyn/local_map.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "patchdyn/errors.hpp"

namespace patchdyn {

namespace {

double growth_exponent(const LocalParams& p, double x) {
  return p.r * (1.0 - x / p.K) * (x / p.A - 1.0);
}

// d/dx of the exponent above.
double growth_exponent_slope(const LocalParams& p, double x) {
  return p.r * (1.0 / p.A + 1.0 / p.K - 2.0 * x / (p.K * p.A));
}

void require_density(double x, const char* where) {
  if (!std::isfinite(x) || x < 0.0) {
    throw std::domain_error(std::string(where) +
                            ": density must be finite and >= 0");
  }
}

// Plain bisection: fn(lo) and fn(hi) must have opposite signs (flo = fn(lo)).
// Deterministic and derivative-free; runs until the bracket is narrower than
// `width`.
template <typename Fn>
double bisect(Fn&& fn, double lo, double hi, double flo, double width) {
  for (int i = 0; i < 200 && hi - lo > width; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = fn(mid);
    if (fmid == 0.0) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

LocalParams::LocalParams(double r_in, double K_in, double A_in)
    : r(r_in), K(K_in), A(A_in) {
  if (!std::isfinite(r) || !std::isfinite(K) || !std::isfinite(A)) {
    throw std::invalid_argument("LocalParams: parameters must be finite");
  }
  if (!(r > 0.0)) throw std::invalid_argument("LocalParams: r must be > 0");
  if (!(K > 0.0)) throw std::invalid_argument("LocalParams: K must be > 0");
  if (!(A > 0.0 && A < K)) {
    throw std::invalid_argument("LocalParams: need 0 < A < K");
  }
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::Bistable:
      return "Bistable";
    case Regime::EssentialExtinction:
      return "EssentialExtinction";
    case Regime::ChaoticSemistability:
      return "ChaoticSemistability";
  }
  return "?";
}

double eval_f(const LocalParams& p, double x) {
  require_density(x, "eval_f");
  return x * std::exp(growth_exponent(p, x));
}

double eval_f_prime(const LocalParams& p, double x) {
  require_density(x, "eval_f_prime");
  return std::exp(growth_exponent(p, x)) *
         (1.0 + x * growth_exponent_slope(p, x));
}

double critical_point(const LocalParams& p) {
  if (p.K == 1.0) {
    const double s =
        (8.0 * p.A + p.r + 2.0 * p.A * p.r + p.A * p.A * p.r) / p.r;
    return (1.0 + p.A) / 4.0 + std::sqrt(s) / 4.0;
  }
  // f' is positive on (0, D) and negative beyond; bracket the sign change
  // starting from (0, K + A] and widen until it flips.
  auto fprime = [&](double x) { return eval_f_prime(p, x); };
  const double lo0 = 1e-12 * p.K;
  double hi = p.K + p.A;
  double fhi = fprime(hi);
  int widenings = 0;
  while (fhi > 0.0) {
    hi *= 2.0;
    if (++widenings > 80) {
      throw NumericError("critical_point: cannot bracket the root of f'");
    }
    fhi = fprime(hi);
  }
  const double flo = fprime(lo0);
  if (flo <= 0.0) {
    throw NumericError("critical_point: f' not positive near the origin");
  }
  return bisect(fprime, lo0, hi, flo, 1e-12 * std::max(1.0, hi));
}

double allee_upper_bound(const LocalParams& p) {
  const double D = critical_point(p);
  auto residual = [&](double x) { return eval_f(p, x) - p.A; };
  const double at_peak = residual(D);  // M - A >= 0 since f(A) = A and D != A
  if (at_peak <= 0.0) return D;
  // f decreases monotonically beyond D towards 0, so the largest preimage of
  // A is the single root right of D.
  double hi = std::max(2.0 * D, p.K);
  int widenings = 0;
  while (residual(hi) >= 0.0) {
    hi *= 2.0;
    if (++widenings > 200) {
      throw NumericError("allee_upper_bound: cannot bracket f(x) = A");
    }
  }
  return bisect(residual, D, hi, at_peak, 1e-12 * std::max(1.0, hi));
}

RegimeReport regime(const LocalParams& p, double equality_tol) {
  RegimeReport report;
  report.D = critical_point(p);
  report.M = eval_f(p, report.D);
  report.A_star = allee_upper_bound(p);
  report.r_th_side = eval_f(p, report.M) - p.A;
  if (std::abs(report.r_th_side) <= equality_tol) {
    report.regime = Regime::ChaoticSemistability;
  } else if (report.r_th_side > 0.0) {
    report.regime = Regime::Bistable;
  } else {
    report.regime = Regime::EssentialExtinction;
  }
  return report;
}

double solve_r_th(double K, double A, double residual_tol) {
  if (!(K > 0.0 && A > 0.0 && A < K)) {
    throw std::invalid_argument("solve_r_th: need 0 < A < K");
  }
  auto residual = [&](double r) {
    const LocalParams p(r, K, A);
    const double M = eval_f(p, critical_point(p));
    return eval_f(p, M) - A;
  };
  // The bistable side (small r) has positive residual; scan upward for the
  // first sign change.
  const double step = 0.01;
  const int max_steps = 500;  // covers r in (0, 5]
  double lo = step;
  double flo = residual(lo);
  double hi = 0.0;
  bool bracketed = false;
  for (int i = 2; i <= max_steps; ++i) {
    const double r = step * i;
    const double fr = residual(r);
    if ((fr < 0.0) != (flo < 0.0) || fr == 0.0) {
      hi = r;
      bracketed = true;
      break;
    }
    lo = r;
    flo = fr;
  }
  if (!bracketed) {
    throw NumericError("solve_r_th: no sign change of f(f(D)) - A for r in (0, 5]");
  }
  const double root = bisect(residual, lo, hi, flo, 1e-12);
  if (std::abs(residual(root)) > residual_tol) {
    throw NumericError("solve_r_th: residual above tolerance at the root");
  }
  return root;
}

double schwartzian(const LocalParams& p, double x) {
  if (p.K != 1.0) {
    throw std::domain_error("schwartzian: closed form requires K = 1");
  }
  if (!std::isfinite(x) || x <= 0.0) {
    throw std::domain_error("schwartzian: need finite x > 0");
  }
  const double q1 = p.r * ((1.0 - 2.0 * x) / p.A + 1.0);
  const double denom = 1.0 + x * q1;  // vanishes exactly at the critical point
  if (std::abs(denom) < 1e-12) {
    throw NumericError("schwartzian: singular at the critical point of f");
  }
  const double q2 = 6.0 + x * x * q1 * q1 + 4.0 * x * q1;
  const double numer = q1 * q1 * q2 +
                       12.0 * p.r * p.r * x * x / (p.A * p.A) +
                       12.0 * p.r / p.A;
  return -numer / (2.0 * denom * denom);
}

std::vector<double> iterate_local(const LocalParams& p, double x0, long steps) {
  require_density(x0, "iterate_local");
  if (steps < 0) {
    throw std::invalid_argument("iterate_local: steps must be >= 0");
  }
  std::vector<double> orbit;
  orbit.reserve(static_cast<std::size_t>(steps) + 1);
  orbit.push_back(x0);
  double x = x0;
  for (long t = 1; t <= steps; ++t) {
    x = x * std::exp(growth_exponent(p, x));
    if (!std::isfinite(x)) {
      throw NumericError("iterate_local: orbit became non-finite", t);
    }
    orbit.push_back(x);
  }
  return orbit;
}

}  // namespace patchdyn
