#ifndef FOURFOLD_VERSION_HPP
#define FOURFOLD_VERSION_HPP

#include <string_view>

namespace fourfold {

inline constexpr std::string_view kVersion = "0.1.0";

}

#endif
