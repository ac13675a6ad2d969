#pragma once

#include <string_view>
#include <utility>
#include <vector>

namespace insitu::embedded {

// Defined in the build-generated embedded_data.cpp.
const std::vector<std::pair<std::string_view, std::string_view>>& designs();
std::string_view ergonomics();

}  // namespace insitu::embedded
