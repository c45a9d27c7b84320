#pragma once

namespace cprt {

inline constexpr const char* kVersion = "0.1.0";

} // namespace cprt
