#pragma once

namespace iccon {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace iccon
