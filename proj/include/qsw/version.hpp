#pragma once

namespace qsw {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace qsw
