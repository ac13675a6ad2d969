#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "insitu/design.hpp"
#include "insitu/editor.hpp"
#include "insitu/environment.hpp"
#include "insitu/ergonomics.hpp"
#include "insitu/lighting.hpp"
#include "insitu/mesh.hpp"
#include "insitu/requirements.hpp"
#include "insitu/sketch.hpp"
#include "insitu/stability.hpp"

namespace insitu {

using Json = nlohmann::json;

// Malformed documents raise Error(InvalidArgument) unless noted.

Json vec_to_json(const Vec3& v);
Vec3 vec_from_json(const Json& j);

Json path_to_json(const BezierPath& path);
BezierPath path_from_json(const Json& j);

Json value_to_json(const Value& value);
/// Reads a value in the representation of the parameter's kind. Throws
/// KindMismatch when the JSON type does not fit.
Value value_from_json(const ParameterDef& def, const Json& j);

Json kind_to_json(const ParameterKind& kind);
Json parameter_to_json(const ParameterDef& def);
/// Catalog entry: id, title, parameter schema, groups, constraints and
/// ergonomic tags.
Json design_summary_json(const Design& design);

Json pose_to_json(const Pose& pose);
Json config_to_json(const Configuration& config);
Configuration config_from_json(const Design& design, const Json& j);

Json violation_to_json(const Violation& v);
Json validity_to_json(const ValidityReport& report);
Json edit_result_to_json(const EditResult& result);

Json mesh_to_json(const TriangleMesh& mesh);

Stroke stroke_from_json(const Json& j);
Json fit_to_json(const FitResult& fit);

BodyProfile profile_from_json(const Json& j);
Json profile_to_json(const BodyProfile& profile);
Json range_to_json(const RecommendedRange& range);

Json plane_to_json(const SupportPlane& plane);
Json scene_summary_json(const EnvironmentScene& scene);

Json transform_to_json(const RigidTransform& t);
Json stability_to_json(const StabilityReport& report);
/// The raster is embedded as base64 PGM; samples only when asked for.
Json lighting_to_json(const LightingReport& report, bool include_samples);

RequirementSpec requirement_spec_from_json(const Json& j);
Json requirement_spec_to_json(const RequirementSpec& spec);
Json requirement_result_to_json(const RequirementResult& result);

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

}  // namespace insitu
