#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "insitu/catalog.hpp"
#include "insitu/editor.hpp"
#include "insitu/json_io.hpp"

using namespace insitu;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::InvalidArgument;
}

Json through_text(const Json& j) { return Json::parse(j.dump()); }

}  // namespace

TEST_CASE("base64 test vectors") {
    // RFC 4648 section 10.
    const std::pair<const char*, const char*> vectors[] = {
        {"", ""},         {"f", "Zg=="},         {"fo", "Zm8="},         {"foo", "Zm9v"},
        {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="}, {"foobar", "Zm9vYmFy"},
    };
    for (const auto& [plain, coded] : vectors) {
        CHECK(base64_encode(plain) == coded);
        CHECK(base64_decode(coded) == plain);
    }
    std::mt19937_64 rng(51);
    for (int i = 0; i < 200; ++i) {
        std::string bytes(rng() % 300, '\0');
        for (auto& b : bytes) b = static_cast<char>(rng() & 0xFF);
        CHECK(base64_decode(base64_encode(bytes)) == bytes);
    }
    CHECK(code_of([] { base64_decode("Zm9v*"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("configurations survive a JSON round trip") {
    std::mt19937_64 rng(52);
    for (const auto& d : list_builtin()) {
        auto config = default_configuration(d);
        for (int s = 0; s < 20; ++s) {
            const auto& p = d.parameters[rng() % d.parameters.size()];
            if (const auto* k = std::get_if<ContinuousKind>(&p.kind)) {
                config = set_parameter(d, config, p.name, testing::uniform(rng, k->min, k->max), EditMode::commit).config;
            }
        }
        config = set_pose(config, Vec3(testing::uniform(rng, -3, 3), 0.7, testing::uniform(rng, -3, 3)),
                          testing::uniform(rng, -7, 7));
        const auto back = config_from_json(d, through_text(config_to_json(config)));
        CHECK(back == config);
    }
    const Design& bench = builtin_design("bench");
    const auto partial = config_from_json(bench, Json::parse(R"({"values": {"width": 1.5}})"));
    CHECK(partial.number("width") == 1.5);
    CHECK(partial.number("seat_height") == default_configuration(bench).number("seat_height"));
    CHECK(code_of([&] { config_from_json(bench, Json::parse(R"({"design_id": "bookholder"})")); }) ==
          ErrorCode::UnknownDesign);
    CHECK(code_of([&] { config_from_json(bench, Json::parse(R"({"values": {"width": "wide"}})")); }) ==
          ErrorCode::KindMismatch);
    CHECK(code_of([&] { config_from_json(bench, Json::parse(R"({"values": {"legs": 4}})")); }) ==
          ErrorCode::UnknownParameter);
}

TEST_CASE("curve values round trip") {
    const Design& tulip = builtin_design("lampshade_tulip");
    const auto config = default_configuration(tulip);
    for (const auto& p : tulip.parameters) {
        if (!std::holds_alternative<CurveKind>(p.kind)) continue;
        const auto& path = config.curve(p.name);
        CHECK(path_from_json(through_text(path_to_json(path))) == path);
        CHECK(std::get<BezierPath>(value_from_json(p, through_text(value_to_json(path)))) == path);
    }
}

TEST_CASE("requirement specs round trip") {
    RequirementSpec spec;
    Clause a;
    a.kind = ClauseKind::max_extent;
    a.label = "E";
    a.axis = 2;
    a.reference = Reference{Vec3(0, 0, 0), Vec3(0.1, 0.2, 0.3)};
    Clause b;
    b.kind = ClauseKind::align;
    b.param = "seat_height";
    b.target = 0.45;
    b.tol = 0.01;
    Clause c;
    c.kind = ClauseKind::fits_inside_cavity;
    c.radius = 0.02;
    c.height = 0.15;
    Clause d;
    d.kind = ClauseKind::stable;
    d.release_tilt_deg = 5.0;
    Clause e;
    e.kind = ClauseKind::max_height;
    e.limit = 0.4;
    spec.clauses = {a, b, c, d, e};
    CHECK(requirement_spec_from_json(through_text(requirement_spec_to_json(spec))) == spec);

    CHECK(code_of([] { requirement_spec_from_json(Json::parse(R"({"clauses": [{"type": "taller"}]})")); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([] {
              requirement_spec_from_json(Json::parse(R"({"clauses": [{"type": "max_extent", "limit": 1, "axis": "w"}]})"));
          }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { requirement_spec_from_json(Json::parse(R"({"clauses": {}})")); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("body profiles round trip") {
    for (auto build : {Build::slim, Build::average, Build::broad}) {
        const BodyProfile p{1.64, build};
        const auto back = profile_from_json(through_text(profile_to_json(p)));
        CHECK(back.stature == p.stature);
        CHECK(back.build == p.build);
    }
    CHECK(profile_from_json(Json::parse(R"({"stature": 1.7})")).build == Build::average);
    CHECK(code_of([] { profile_from_json(Json::parse(R"({"stature": 1.7, "build": "tall"})")); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([] { profile_from_json(Json::parse(R"({"build": "slim"})")); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("catalog summaries describe every parameter") {
    for (const auto& d : list_builtin()) {
        const auto j = design_summary_json(d);
        CHECK(j["id"] == d.id);
        CHECK(j["parameters"].size() == d.parameters.size());
    }
}
