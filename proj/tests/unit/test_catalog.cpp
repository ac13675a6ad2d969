#include <doctest.h>

#include <algorithm>
#include <map>

#include "insitu/catalog.hpp"
#include "insitu/editor.hpp"
#include "insitu/generators.hpp"

using namespace insitu;

namespace {

bool has_ergonomic_tag(const Design& d) {
    return std::any_of(d.parameters.begin(), d.parameters.end(),
                       [](const ParameterDef& p) { return p.ergonomic.has_value(); });
}

std::size_t curve_count(const Design& d) {
    return std::count_if(d.parameters.begin(), d.parameters.end(), [](const ParameterDef& p) {
        return std::holds_alternative<CurveKind>(p.kind);
    });
}

}  // namespace

TEST_CASE("catalog composition") {
    const auto& all = list_builtin();
    REQUIRE(all.size() == 15);
    std::map<GeneratorKind, int> by_kind;
    for (const auto& d : all) ++by_kind[d.generator.generator];
    CHECK(by_kind[GeneratorKind::lathe] == 8);
    CHECK(by_kind[GeneratorKind::panel_table] == 2);
    CHECK(by_kind[GeneratorKind::panel_shelf] == 3);
    CHECK(by_kind[GeneratorKind::panel_bench] == 1);
    CHECK(by_kind[GeneratorKind::panel_bookholder] == 1);
    CHECK(builtin_design("bookholder").parameters.size() == 3);
    CHECK(std::is_sorted(all.begin(), all.end(), [](const Design& a, const Design& b) { return a.id < b.id; }));
}

TEST_CASE("catalog designs carry their expected annotations") {
    for (const auto& d : list_builtin()) {
        CAPTURE(d.id);
        CHECK_FALSE(d.constraints.empty());
        CHECK_FALSE(d.title.empty());
        switch (d.generator.generator) {
            case GeneratorKind::lathe: CHECK(curve_count(d) == 1); break;
            case GeneratorKind::panel_bench:
            case GeneratorKind::panel_table: CHECK(has_ergonomic_tag(d)); break;
            default: break;
        }
    }
}

TEST_CASE("catalog defaults are valid and generate diagnosable meshes") {
    for (const auto& d : list_builtin()) {
        CAPTURE(d.id);
        const auto config = default_configuration(d);
        CHECK(validate(d, config).valid());
        const auto mesh = generate_mesh(d, config);
        CHECK_FALSE(mesh.empty());
        const auto diag = diagnose(mesh);
        CHECK(diag.volume > 0.0);
        CHECK(diag.com_from_volume);
        CHECK(diag.bbox_min.y() >= -1e-12);
    }
}

TEST_CASE("catalog lookups") {
    CHECK(builtin_design("bench").id == "bench");
    CHECK(builtin_source("bench").text.find("design \"bench\"") != std::string::npos);
    try {
        builtin_design("sofa");
        FAIL("expected UnknownDesign");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownDesign);
    }
    CHECK_THROWS_AS(builtin_source("sofa"), Error);
    // Parsed once: repeated lookups return the same object.
    CHECK(&builtin_design("vase_bulb") == &builtin_design("vase_bulb"));
}
