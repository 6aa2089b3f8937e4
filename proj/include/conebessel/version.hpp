#pragma once

namespace conebessel {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace conebessel
