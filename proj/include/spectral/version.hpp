#pragma once

namespace spectral {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace spectral
