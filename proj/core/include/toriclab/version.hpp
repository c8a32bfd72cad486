#pragma once

namespace toriclab {
inline constexpr const char* kVersion = "0.1.0";
}
