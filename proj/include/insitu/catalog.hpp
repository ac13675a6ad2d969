#pragma once

#include <string_view>
#include <vector>

#include "insitu/design.hpp"
#include "insitu/dsl.hpp"

namespace insitu {

/// The built-in designs, parsed once from the embedded documents and
/// ordered by id.
const std::vector<Design>& list_builtin();

/// Throws UnknownDesign.
const Design& builtin_design(std::string_view id);

/// Embedded source of a built-in design.
DesignSource builtin_source(std::string_view id);

}  // namespace insitu
