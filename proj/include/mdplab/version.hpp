#pragma once

namespace mdplab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mdplab
