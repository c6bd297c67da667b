#include "patchdyn/coupled_map.hpp"

#include <cmath>
#include <stdexcept>

#include "patchdyn/errors.hpp"

namespace patchdyn {

CoupledParams::CoupledParams(LocalParams local_in, double d_in)
    : local(local_in), d(d_in) {
  if (!std::isfinite(d) || d < 0.0 || d > 0.5) {
    throw std::invalid_argument("CoupledParams: need 0 <= d <= 0.5");
  }
}

Mat2 Mat2::operator*(const Mat2& rhs) const {
  return Mat2{xx * rhs.xx + xy * rhs.yx, xx * rhs.xy + xy * rhs.yy,
              yx * rhs.xx + yy * rhs.yx, yx * rhs.xy + yy * rhs.yy};
}

double Mat2::spectral_radius() const {
  const double tr = trace();
  const double de = det();
  const double disc = tr * tr - 4.0 * de;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    return std::max(std::abs(0.5 * (tr + s)), std::abs(0.5 * (tr - s)));
  }
  // Complex pair; disc < 0 forces det > 0.
  return std::sqrt(de);
}

namespace {

void require_state(const PatchState& s, const char* where) {
  if (!std::isfinite(s.x) || !std::isfinite(s.y) || s.x < 0.0 || s.y < 0.0) {
    throw std::domain_error(std::string(where) +
                            ": state must lie in the cone [0, inf)^2");
  }
}

}  // namespace

PatchState step(const CoupledParams& cp, const PatchState& s) {
  require_state(s, "step");
  const double fx = eval_f(cp.local, s.x);
  const double fy = eval_f(cp.local, s.y);
  if (!std::isfinite(fx)) {
    throw NumericError("step: non-finite production in patch x");
  }
  if (!std::isfinite(fy)) {
    throw NumericError("step: non-finite production in patch y");
  }
  PatchState out{(1.0 - cp.d) * fx + cp.d * fy,
                 cp.d * fx + (1.0 - cp.d) * fy};
  if (out.x < kDensityFlush) out.x = 0.0;
  if (out.y < kDensityFlush) out.y = 0.0;
  return out;
}

OrbitSegment iterate(const CoupledParams& cp, const PatchState& s0, long steps,
                     long record_from) {
  if (record_from < 0 || steps < record_from) {
    throw std::invalid_argument("iterate: need steps >= record_from >= 0");
  }
  OrbitSegment segment;
  segment.start_index = record_from;
  segment.states.reserve(static_cast<std::size_t>(steps - record_from) + 1);
  PatchState s = s0;
  if (record_from == 0) segment.states.push_back(s);
  for (long t = 1; t <= steps; ++t) {
    try {
      s = step(cp, s);
    } catch (const NumericError& e) {
      throw NumericError(e.what(), t);
    }
    if (t >= record_from) segment.states.push_back(s);
  }
  return segment;
}

Mat2 jacobian(const CoupledParams& cp, const PatchState& s) {
  require_state(s, "jacobian");
  const double fpx = eval_f_prime(cp.local, s.x);
  const double fpy = eval_f_prime(cp.local, s.y);
  if (!std::isfinite(fpx) || !std::isfinite(fpy)) {
    throw NumericError("jacobian: non-finite derivative");
  }
  return Mat2{(1.0 - cp.d) * fpx, cp.d * fpy,
              cp.d * fpx, (1.0 - cp.d) * fpy};
}

}  // namespace patchdyn
