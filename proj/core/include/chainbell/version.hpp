#pragma once

#include <string_view>

namespace chainbell {

inline constexpr std::string_view kToolkitName = "chainbell";
inline constexpr std::string_view kToolkitVersion = "0.1.0";

}  // namespace chainbell
