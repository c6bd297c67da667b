#pragma once

namespace patchdyn {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace patchdyn
