#pragma once

#include <string>
#include <string_view>

#include "insitu/design.hpp"

namespace insitu {

/// A design document and where it came from (file path or builtin name).
struct DesignSource {
    std::string text;
    std::string origin;
};

/// Parses one `.pdsl` document.
///
/// Failures are SourceErrors carrying the offending position: SyntaxError,
/// DuplicateParameter, UnknownReference, InvalidDefault, UnboundGeneratorSlot
/// and KindMismatch (a constraint or binding on an incompatible parameter).
Design parse_design(const DesignSource& src);
Design parse_design(std::string_view text);

/// Canonical text: parameters in declaration order, every constraint as a
/// standalone statement sorted by target, all lengths in meters.
DesignSource serialize_design(const Design& design);

/// Text form of a single value as it appears after `default`.
std::string value_to_text(const Value& value);

}  // namespace insitu
