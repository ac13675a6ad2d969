#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "insitu/catalog.hpp"
#include "insitu/ergonomics.hpp"

using namespace insitu;

namespace {

constexpr ErgonomicTag kProportional[] = {ErgonomicTag::seat_height, ErgonomicTag::seat_depth,
                                          ErgonomicTag::table_height,
                                          ErgonomicTag::armrest_height_above_seat};

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

}  // namespace

TEST_CASE("seat height for a 1.77 m person") {
    const auto r = recommend(ErgonomicTag::seat_height, {1.77, Build::average});
    // 0.23 * 1.77 and 0.27 * 1.77
    CHECK(r.lo == doctest::Approx(0.4071).epsilon(1e-12));
    CHECK(r.hi == doctest::Approx(0.4779).epsilon(1e-12));
    CHECK_FALSE(r.compromise);
}

TEST_CASE("seat width scales with build") {
    const auto broad = recommend(ErgonomicTag::seat_width_per_person, {1.7, Build::broad});
    CHECK(broad.lo == doctest::Approx(0.605).epsilon(1e-12));
    CHECK(broad.hi == doctest::Approx(0.715).epsilon(1e-12));
    const auto slim = recommend(ErgonomicTag::seat_width_per_person, {1.7, Build::slim});
    CHECK(slim.lo == doctest::Approx(0.495).epsilon(1e-12));
    const auto avg = recommend(ErgonomicTag::seat_width_per_person, {2.1, Build::average});
    CHECK(avg.lo == doctest::Approx(0.55).epsilon(1e-12));
    CHECK(avg.hi == doctest::Approx(0.65).epsilon(1e-12));
}

TEST_CASE("reconciliation examples") {
    SUBCASE("overlapping ranges intersect") {
        const auto r = reconcile(ErgonomicTag::seat_height, {{1.77, Build::average}, {1.60, Build::average}});
        CHECK(r.lo == doctest::Approx(0.4071).epsilon(1e-12));
        CHECK(r.hi == doctest::Approx(0.432).epsilon(1e-12));
        CHECK_FALSE(r.compromise);
    }
    SUBCASE("disjoint ranges fall back to the gap between them") {
        const auto r = reconcile(ErgonomicTag::seat_height, {{1.50, Build::average}, {1.95, Build::average}});
        CHECK(r.lo == doctest::Approx(0.405).epsilon(1e-12));
        CHECK(r.hi == doctest::Approx(0.4485).epsilon(1e-12));
        CHECK(r.compromise);
    }
    SUBCASE("a single profile equals recommend") {
        const BodyProfile p{1.83, Build::slim};
        for (auto tag : kProportional) {
            const auto a = reconcile(tag, {p});
            const auto b = recommend(tag, p);
            CHECK(a.lo == b.lo);
            CHECK(a.hi == b.hi);
            CHECK(a.compromise == b.compromise);
        }
    }
    SUBCASE("widths add up per person") {
        const auto r = reconcile(ErgonomicTag::seat_width_per_person,
                                 {{1.7, Build::broad}, {1.6, Build::slim}, {1.8, Build::average}});
        CHECK(r.lo == doctest::Approx(0.605 + 0.495 + 0.55).epsilon(1e-12));
        CHECK(r.hi == doctest::Approx(0.715 + 0.585 + 0.65).epsilon(1e-12));
    }
}

TEST_CASE("ergonomic errors") {
    CHECK(code_of([] { recommend(ErgonomicTag::seat_height, {0.5, Build::average}); }) == ErrorCode::InvalidProfile);
    CHECK(code_of([] { recommend(ErgonomicTag::seat_height, {2.4, Build::average}); }) == ErrorCode::InvalidProfile);
    CHECK(code_of([] { recommend(ErgonomicTag::seat_height, {std::nan(""), Build::average}); }) ==
          ErrorCode::InvalidProfile);
    CHECK(code_of([] { reconcile(ErgonomicTag::seat_height, {}); }) == ErrorCode::EmptyProfileList);
    CHECK(code_of([] { ergonomic_tag_from_string("leg_room"); }) == ErrorCode::UnknownTag);
    CHECK(ergonomic_tag_from_string("table_height") == ErgonomicTag::table_height);
    // A table without an entry for the tag.
    const auto partial = ErgonomicTable::from_json(
        R"({"stature_range": [1.0, 2.3], "proportional": {"seat_height": [0.2, 0.3]}, "fixed": {},
            "build_multiplier": {"average": 1.0}})");
    CHECK(code_of([&] { partial.recommend(ErgonomicTag::table_height, {1.7, Build::average}); }) ==
          ErrorCode::UnknownTag);
    CHECK(code_of([] { ErgonomicTable::from_json("{"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { ErgonomicTable::from_json(R"({"proportional": {"seat_height": [0.3, 0.2]}})"); }) ==
          ErrorCode::ParseError);
}

TEST_CASE("replaced coefficient tables take effect without code changes") {
    const auto table = ErgonomicTable::from_json(
        R"({"stature_range": [1.2, 2.0], "proportional": {"seat_height": [0.2, 0.3]},
            "fixed": {"seat_width_per_person": [0.5, 0.6]}, "build_multiplier": {"broad": 1.2}})");
    const auto r = table.recommend(ErgonomicTag::seat_height, {1.5, Build::average});
    CHECK(r.lo == doctest::Approx(0.3));
    CHECK(r.hi == doctest::Approx(0.45));
    CHECK(table.recommend(ErgonomicTag::seat_width_per_person, {1.5, Build::broad}).hi == doctest::Approx(0.72));
    CHECK(table.min_stature() == 1.2);
    CHECK(code_of([&] { table.recommend(ErgonomicTag::seat_height, {1.1, Build::average}); }) ==
          ErrorCode::InvalidProfile);
}

TEST_CASE("recommendations grow strictly with stature") {
    for (auto tag : kProportional) {
        double lo = -1, hi = -1;
        for (double s = 1.0; s <= 2.3 + 1e-9; s += 0.01) {
            const auto r = recommend(tag, {std::min(s, 2.3), Build::average});
            CHECK(r.lo > lo);
            CHECK(r.hi > hi);
            CHECK(r.lo <= r.hi);
            lo = r.lo;
            hi = r.hi;
        }
    }
}

TEST_CASE("reconciliation properties on random profile sets") {
    std::mt19937_64 rng(17);
    const ErgonomicTag tags[] = {ErgonomicTag::seat_height, ErgonomicTag::seat_depth, ErgonomicTag::table_height,
                                 ErgonomicTag::armrest_height_above_seat, ErgonomicTag::seat_width_per_person};
    for (int i = 0; i < 1000; ++i) {
        std::vector<BodyProfile> profiles;
        const int n = 1 + static_cast<int>(rng() % 6);
        for (int k = 0; k < n; ++k) {
            profiles.push_back({testing::uniform(rng, 1.0, 2.3), static_cast<Build>(rng() % 3)});
        }
        const auto tag = tags[i % 5];
        const auto r = reconcile(tag, profiles);
        CHECK(r.lo <= r.hi);

        auto shuffled = profiles;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto s = reconcile(tag, shuffled);
        CHECK(s.lo == r.lo);
        CHECK(s.hi == r.hi);
        CHECK(s.compromise == r.compromise);

        if (tag == ErgonomicTag::seat_width_per_person) {
            double lo = 0, hi = 0;
            for (const auto& p : profiles) {
                lo += recommend(tag, p).lo;
                hi += recommend(tag, p).hi;
            }
            CHECK(r.lo == doctest::Approx(lo).epsilon(1e-12));
            CHECK(r.hi == doctest::Approx(hi).epsilon(1e-12));
            continue;
        }
        // Contained in the convex hull of the inputs, and inside every input
        // range unless it is a compromise.
        double hull_lo = 1e9, hull_hi = -1e9;
        bool inside_all = true;
        for (const auto& p : profiles) {
            const auto x = recommend(tag, p);
            hull_lo = std::min(hull_lo, x.lo);
            hull_hi = std::max(hull_hi, x.hi);
            inside_all = inside_all && x.lo <= r.lo && r.hi <= x.hi;
        }
        CHECK(r.lo >= hull_lo);
        CHECK(r.hi <= hull_hi);
        CHECK(r.compromise != inside_all);
    }
}

TEST_CASE("slider annotations follow the design's tags") {
    const Design& bench = builtin_design("bench");
    const auto config = default_configuration(bench);
    const std::vector<BodyProfile> people{{1.77, Build::average}};
    const auto seat = recommended_range(config, bench.at("seat_height"), people);
    REQUIRE(seat.has_value());
    CHECK(seat->lo == doctest::Approx(0.4071));
    // Armrest height is recommended above the current seat height.
    const auto arm = recommended_range(config, bench.at("armrest_height"), people);
    REQUIRE(arm.has_value());
    CHECK(arm->lo == doctest::Approx(0.45 + 0.12 * 1.77));
    CHECK(arm->hi == doctest::Approx(0.45 + 0.14 * 1.77));
    CHECK_FALSE(recommended_range(config, bench.at("backrest"), people).has_value());
    CHECK_FALSE(recommended_range(config, bench.at("seat_height"), {}).has_value());
    // Annotation only: the configuration is untouched.
    CHECK(config == default_configuration(bench));
}
