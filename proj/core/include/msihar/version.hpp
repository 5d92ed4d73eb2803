#pragma once

namespace msihar {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace msihar
