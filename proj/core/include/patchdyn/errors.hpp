#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace patchdyn {

// Failure of an iterative numeric procedure: a root that cannot be bracketed,
// an orbit that leaves [0, inf), a residual that will not converge.
// Carries the orbit step index when one is meaningful.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}

  NumericError(const std::string& what, long step)
      : std::runtime_error(what + " (at step " + std::to_string(step) + ")"),
        step_(step) {}

  std::optional<long> step() const { return step_; }

 private:
  std::optional<long> step_;
};

}  // namespace patchdyn
