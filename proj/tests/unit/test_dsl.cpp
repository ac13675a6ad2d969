#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "insitu/catalog.hpp"
#include "insitu/dsl.hpp"
#include "insitu/editor.hpp"

using namespace insitu;

namespace {

constexpr const char* kMinimal = R"(design "tiny" {
    param height : continuous m [0.1, 0.5] default 0.3;
    param profile : curve 1 lathe-profile default path { (0.05, 0) (0.05, 0.1) (0.05, 0.2) (0.05, 0.3); };
    generator lathe { profile = profile; height = height; }
})";

template <typename F>
SourceError source_error(F&& f) {
    try {
        f();
    } catch (const SourceError& e) {
        return e;
    }
    FAIL("expected a SourceError");
    return SourceError(ErrorCode::SyntaxError, 0, 0, "");
}

/// A well-formed design built directly as a value, exercising every
/// parameter kind, both constraint forms, handles and ergonomic bindings.
Design random_design(std::mt19937_64& rng, int index) {
    using testing::uniform;
    Design d;
    d.id = "fuzz_" + std::to_string(index);
    d.title = "Fuzz \"design\" " + std::to_string(index);
    std::vector<std::string> continuous;
    const int n = 2 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
        ParameterDef p;
        p.name = "p" + std::to_string(i);
        if (rng() % 3 == 0) p.group = "advanced";
        switch (rng() % 5) {
            case 0:
            case 1: {
                const double lo = uniform(rng, -1, 1);
                const double hi = lo + uniform(rng, 0.01, 2);
                p.kind = ContinuousKind{lo, hi, rng() % 2 ? Unit::meters : Unit::degrees};
                p.default_value = uniform(rng, lo, hi);
                if (rng() % 2) {
                    p.handle = HandleDef{{LinearForm::constant(uniform(rng, -1, 1)),
                                          LinearForm::of(p.name, 0.5), LinearForm::constant(0.0)},
                                         Vec3::UnitY(),
                                         uniform(rng, 0.5, 3)};
                }
                if (rng() % 3 == 0) p.ergonomic = ErgonomicBinding{ErgonomicTag::seat_depth, std::nullopt};
                continuous.push_back(p.name);
                break;
            }
            case 2: {
                DiscreteKind k;
                double v = uniform(rng, 0, 1);
                for (int l = 0; l < 2 + static_cast<int>(rng() % 4); ++l) {
                    k.levels.push_back(v);
                    v += uniform(rng, 0.01, 0.5);
                }
                k.unit = Unit::count;
                p.default_value = k.levels[rng() % k.levels.size()];
                p.kind = k;
                break;
            }
            case 3:
                p.kind = OptionKind{{"a b", "c\\d", "e"}};
                p.default_value = std::string("c\\d");
                break;
            default:
                if (rng() % 2) {
                    p.kind = BooleanKind{};
                    p.default_value = static_cast<bool>(rng() % 2);
                } else {
                    p.kind = TextKind{12};
                    p.default_value = std::string("hi\tthere");
                }
        }
        d.parameters.push_back(std::move(p));
    }
    if (continuous.empty()) {
        d.parameters.push_back({"len", ContinuousKind{0.1, 0.9, Unit::meters}, 0.5});
        continuous.push_back("len");
    }
    const double r = uniform(rng, 0.01, 0.1);
    ParameterDef curve{"profile", CurveKind{2, CurvePlane::lathe_profile},
                       BezierPath{{{{Vec2(r, 0), Vec2(r * 1.5, 0.1), Vec2(r, 0.2), Vec2(r, 0.3)}}}}};
    d.parameters.push_back(curve);

    for (const auto& name : continuous) {
        const auto& k = std::get<ContinuousKind>(d.at(name).kind);
        if (rng() % 2) d.constraints.push_back({name, LinearForm::constant(k.min), LinearForm::constant(k.max)});
    }
    if (continuous.size() >= 2) {
        // t <= ref + (max_t - min_ref) holds at any ref value in range.
        const auto& t = continuous[0];
        const auto& ref = continuous[1];
        const auto& kt = std::get<ContinuousKind>(d.at(t).kind);
        const auto& kr = std::get<ContinuousKind>(d.at(ref).kind);
        d.constraints.push_back({t, LinearForm::constant(kt.min), LinearForm::of(ref, 1.0, kt.max - kr.min)});
    }
    sort_constraints(d.constraints);
    d.generator.generator = GeneratorKind::lathe;
    d.generator.bindings = {{"profile", ParamRef{"profile"}},
                            {"height", ParamRef{continuous[0]}},
                            {"steps", 48.0},
                            {"closed_bottom", rng() % 2 == 0}};
    return d;
}

}  // namespace

TEST_CASE("minimal document") {
    const Design d = parse_design(kMinimal);
    CHECK(d.id == "tiny");
    REQUIRE(d.parameters.size() == 2);
    CHECK(d.parameters[0].name == "height");
    CHECK(std::get<ContinuousKind>(d.parameters[0].kind) == ContinuousKind{0.1, 0.5, Unit::meters});
    CHECK(d.generator.generator == GeneratorKind::lathe);
    CHECK(validate(d, default_configuration(d)).valid());
}

TEST_CASE("centimetre sources are normalized to meters") {
    const Design d = parse_design(R"(design "units" {
        param height : continuous cm [10, 50] default 30 in [20, 40];
        param gap : continuous m [0.1, 0.5] default 25cm;
        param profile : curve 1 lathe-profile default path { (0.05, 0) (0.05, 0.1) (0.05, 0.2) (0.05, 0.3); };
        generator lathe { profile = profile; height = height; }
    })");
    const auto& k = std::get<ContinuousKind>(d.at("height").kind);
    CHECK(k.min == doctest::Approx(0.1));
    CHECK(k.max == doctest::Approx(0.5));
    CHECK(k.unit == Unit::meters);
    CHECK(std::get<double>(d.at("height").default_value) == doctest::Approx(0.3));
    CHECK(std::get<double>(d.at("gap").default_value) == doctest::Approx(0.25));
    REQUIRE(d.constraints.size() == 1);
    CHECK(d.constraints[0].lo.offset == doctest::Approx(0.2));
    CHECK(d.constraints[0].hi.offset == doctest::Approx(0.4));
    // Serialized text carries meters only.
    const auto text = serialize_design(d).text;
    CHECK(text.find("cm") == std::string::npos);
    CHECK(parse_design(text) == d);
}

TEST_CASE("structured errors carry positions") {
    SUBCASE("duplicate parameter") {
        const auto e = source_error([] {
            parse_design("design \"x\" {\n  param h : boolean default true;\n  param h : boolean default false;\n}");
        });
        CHECK(e.code() == ErrorCode::DuplicateParameter);
        CHECK(e.line() == 3);
        CHECK(e.column() == 9);
    }
    SUBCASE("unknown reference in a constraint") {
        const auto e = source_error([] {
            parse_design(R"(design "x" {
    param armrest_depth : continuous m [0.1, 0.7] default 0.4;
    constraint armrest_depth in [0.1, seat_depth];
    generator panel_bookholder { width = 0.3; height = 0.2; depth = 0.2; }
})");
        });
        CHECK(e.code() == ErrorCode::UnknownReference);
        CHECK(e.line() == 3);
    }
    SUBCASE("unknown reference in a binding") {
        const auto e = source_error([] {
            parse_design(R"(design "x" {
    param w : continuous m [0.1, 0.7] default 0.4;
    generator panel_bookholder { width = w; height = h; depth = 0.2; }
})");
        });
        CHECK(e.code() == ErrorCode::UnknownReference);
        CHECK(e.line() == 3);
        CHECK(e.column() == 54);
    }
    SUBCASE("default outside the range") {
        const auto e = source_error([] {
            parse_design(R"(design "x" {
    param w : continuous m [0.1, 0.7] default 0.9;
    generator panel_bookholder { width = w; height = 0.2; depth = 0.2; }
})");
        });
        CHECK(e.code() == ErrorCode::InvalidDefault);
        CHECK(e.line() == 2);
    }
    SUBCASE("default violating a constraint") {
        const auto e = source_error([] {
            parse_design(R"(design "x" {
    param w : continuous m [0.1, 0.7] default 0.6;
    param d : continuous m [0.1, 0.7] default 0.3;
    constraint w in [0.1, d];
    generator panel_bookholder { width = w; height = 0.2; depth = d; }
})");
        });
        CHECK(e.code() == ErrorCode::InvalidDefault);
    }
    SUBCASE("required slot unbound") {
        const auto e = source_error([] {
            parse_design(R"(design "x" {
    param w : continuous m [0.1, 0.7] default 0.4;
    generator panel_bookholder { width = w; height = 0.2; }
})");
        });
        CHECK(e.code() == ErrorCode::UnboundGeneratorSlot);
        CHECK(e.line() == 3);
    }
    SUBCASE("syntax") {
        const auto e = source_error([] { parse_design("design \"x\" {\n  param w continuous;\n}"); });
        CHECK(e.code() == ErrorCode::SyntaxError);
        CHECK(e.line() == 2);
        CHECK(e.column() == 11);
    }
    SUBCASE("unterminated string") {
        const auto e = source_error([] { parse_design("design \"x {"); });
        CHECK(e.code() == ErrorCode::SyntaxError);
        CHECK(e.line() == 1);
    }
    SUBCASE("constraint on a boolean") {
        const auto e = source_error([] {
            parse_design(R"(design "x" {
    param b : boolean default true;
    constraint b in [0, 1];
    generator panel_bookholder { width = 0.3; height = 0.2; depth = 0.2; }
})");
        });
        CHECK(e.code() == ErrorCode::KindMismatch);
    }
}

TEST_CASE("comments and whitespace are ignored") {
    const Design a = parse_design(kMinimal);
    const std::string commented = std::string("# leading comment\n") + kMinimal + "\n# trailing";
    CHECK(parse_design(commented) == a);
}

TEST_CASE("built-in designs round-trip through canonical text") {
    for (const auto& d : list_builtin()) {
        CAPTURE(d.id);
        const auto once = serialize_design(d);
        const Design back = parse_design(once);
        CHECK(back == d);
        // Canonical: serializing the re-parsed design gives the same bytes.
        CHECK(serialize_design(back).text == once.text);
        CHECK(serialize_design(d).text == once.text);
    }
}

TEST_CASE("relative constraints serialize as linear forms") {
    const auto text = serialize_design(builtin_design("bench")).text;
    CHECK(text.find("constraint armrest_depth in [0.1, seat_depth];") != std::string::npos);
    CHECK(text.find("constraint armrest_height in [seat_height + 0.1, seat_height + 0.4];") != std::string::npos);
    const auto vase = serialize_design(builtin_design("vase_classic")).text;
    CHECK(vase.find("constraint height in [0.8 * diameter, 3 * diameter];") != std::string::npos);
}

TEST_CASE("generated designs round-trip") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 300; ++i) {
        const Design d = random_design(rng, i);
        const auto src = serialize_design(d);
        CAPTURE(src.text);
        const Design back = parse_design(src);
        CHECK(back == d);
        CHECK(serialize_design(back).text == src.text);
    }
}

TEST_CASE("parser totality under mutation") {
    std::mt19937_64 rng(12);
    const std::string alphabet = "{}[]();:,=+-*.#\"\\ \n0123456789eabcmpx";
    std::size_t parsed = 0, rejected = 0;
    for (const auto& d : list_builtin()) {
        const std::string base = builtin_source(d.id).text;
        for (int k = 0; k < 200; ++k) {
            std::string s = base;
            const int edits = 1 + static_cast<int>(rng() % 4);
            for (int e = 0; e < edits; ++e) {
                const std::size_t at = rng() % (s.size() + 1);
                switch (rng() % 3) {
                    case 0: s.insert(at, 1, alphabet[rng() % alphabet.size()]); break;
                    case 1:
                        if (at < s.size()) s.erase(at, 1 + rng() % 8);
                        break;
                    default: s.resize(at);
                }
            }
            try {
                parse_design(s);
                ++parsed;
            } catch (const SourceError& e) {
                CHECK(e.line() >= 1);
                CHECK(e.column() >= 1);
                ++rejected;
            }
            // Anything other than a SourceError escapes and fails the test.
        }
    }
    CHECK(rejected > 0);
    CHECK(parsed + rejected == 15 * 200);
}
