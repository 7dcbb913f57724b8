#pragma once

namespace warpreg {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace warpreg
