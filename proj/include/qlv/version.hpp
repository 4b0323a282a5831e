#pragma once

namespace qlv {

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace qlv
