#pragma once

namespace tergm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tergm
