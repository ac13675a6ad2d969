#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "insitu/design.hpp"

namespace insitu {

enum class Build { slim, average, broad };

std::string_view to_string(Build build);
std::optional<Build> parse_build(std::string_view text);

struct BodyProfile {
    double stature = 1.75;  // meters
    Build build = Build::average;

    bool operator==(const BodyProfile&) const = default;
};

struct RecommendedRange {
    double lo = 0.0;
    double hi = 0.0;
    bool compromise = false;  // produced by the empty-intersection fallback
};

/// Coefficient table: stature-proportional bands, fixed bands scaled by a
/// build multiplier, and the admissible stature range.
class ErgonomicTable {
public:
    /// The table shipped in data/ergonomics.json.
    static const ErgonomicTable& builtin();

    /// Throws ParseError on malformed documents.
    static ErgonomicTable from_json(std::string_view text);

    /// Throws InvalidProfile when the stature is outside the table's range
    /// or not finite, and UnknownTag when the tag has no entry.
    RecommendedRange recommend(ErgonomicTag tag, const BodyProfile& profile) const;

    /// Intersection of the individual ranges; when empty, the band between
    /// the two nearest endpoints (compromise). Widths per person are summed.
    /// Throws EmptyProfileList.
    RecommendedRange reconcile(ErgonomicTag tag, const std::vector<BodyProfile>& profiles) const;

    bool is_additive(ErgonomicTag tag) const { return fixed_.contains(tag); }
    double min_stature() const { return stature_lo_; }
    double max_stature() const { return stature_hi_; }

private:
    std::map<ErgonomicTag, std::pair<double, double>> proportional_;
    std::map<ErgonomicTag, std::pair<double, double>> fixed_;
    std::map<Build, double> multiplier_;
    double stature_lo_ = 1.0;
    double stature_hi_ = 2.3;
};

RecommendedRange recommend(ErgonomicTag tag, const BodyProfile& profile);
RecommendedRange reconcile(ErgonomicTag tag, const std::vector<BodyProfile>& profiles);

/// Tag lookup by name. Throws UnknownTag.
ErgonomicTag ergonomic_tag_from_string(std::string_view name);

/// Recommended slider range for a tagged parameter, shifted by its offset
/// parameter's current value when it has one. nullopt for untagged
/// parameters or an empty profile list.
std::optional<RecommendedRange> recommended_range(const Configuration& config,
                                                  const ParameterDef& def,
                                                  const std::vector<BodyProfile>& profiles);

}  // namespace insitu
