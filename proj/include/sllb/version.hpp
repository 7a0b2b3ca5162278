#pragma once

namespace sllb {

inline constexpr const char* kVersion = "0.3.0";

}  // namespace sllb
