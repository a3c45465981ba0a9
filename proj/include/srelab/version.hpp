#pragma once

namespace srelab {
inline constexpr const char* kVersion = "0.1.0";
}
