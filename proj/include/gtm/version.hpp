#pragma once

namespace gtm {

inline constexpr const char* version = "1.0.0";

}  // namespace gtm
