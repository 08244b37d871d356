#include "prf/error.hpp"
#include "prf/fault_localization.hpp"

#include "fl_oracle.hpp"

#include <doctest.h>

#include <random>

using namespace prf;
using namespace prf::testing;

namespace {

ProgramElement L(const std::string& text) { return parse_element(text, Granularity::Line); }

Profile profile_from(const RawSuite& s) {
    Profile p;
    p.coverage.emplace();
    for (std::size_t t = 0; t < s.test_fails.size(); ++t) {
        const TestId id("t" + std::to_string(t));
        p.tests.push_back({id, s.test_fails[t] ? TestStatus::Failing : TestStatus::Passing,
                           static_cast<std::int64_t>(t * 10)});
        if (s.test_fails[t]) p.failing.insert(id);
        auto& set = (*p.coverage)[id];
        for (std::size_t e = 0; e < s.elements.size(); ++e) {
            if (s.covers[t][e]) set.insert(L(s.elements[e]));
        }
    }
    return p;
}

RepairConfig fl_config(FlStrategy strategy, Granularity g = Granularity::Line) {
    RepairConfig c;
    c.fl_option = g;
    c.fl_strategy = strategy;
    return c;
}

}  // namespace

TEST_CASE("ochiai") {
    CHECK(ochiai({1, 0, 1, 3}) == 1.0);
    CHECK(ochiai({0, 5, 2, 5}) == 0.0);
    CHECK(ochiai({2, 2, 2, 4}) == doctest::Approx(0.7071067811865475).epsilon(1e-12));
    CHECK(ochiai({0, 0, 0, 0}) == 0.0);
}

TEST_CASE("tarantula") {
    CHECK(tarantula({1, 0, 1, 3}) == 1.0);
    CHECK(tarantula({0, 1, 1, 1}) == 0.0);
    CHECK(tarantula({1, 1, 2, 4}) == doctest::Approx(0.6666666666666666).epsilon(1e-12));
    CHECK(tarantula({0, 0, 0, 0}) == 0.0);
    CHECK(tarantula({1, 3, 1, 0}) == 1.0);  // P = 0
}

TEST_CASE("both formulas stay within [0, 1]") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 10000; ++i) {
        SpectrumCounts c;
        c.total_failed = static_cast<std::int64_t>(rng() % 50);
        c.total_passed = static_cast<std::int64_t>(rng() % 50);
        c.failed_covering = c.total_failed ? static_cast<std::int64_t>(rng() % (c.total_failed + 1)) : 0;
        c.passed_covering = c.total_passed ? static_cast<std::int64_t>(rng() % (c.total_passed + 1)) : 0;
        for (double s : {ochiai(c), tarantula(c)}) {
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
        }
    }
}

TEST_CASE("localize ranks the fixture spectrum") {
    Profile p;
    p.tests = {{TestId("t_fail"), TestStatus::Failing, 5}, {TestId("t_pass"), TestStatus::Passing, 5}};
    p.failing = {TestId("t_fail")};
    p.coverage = CoverageMatrix{{TestId("t_fail"), {L("a.c:f:1"), L("a.c:g:2")}},
                                {TestId("t_pass"), {L("a.c:g:2")}}};

    const auto r = localize(p, fl_config(FlStrategy::Ochiai));
    REQUIRE(r.entries.size() == 2);
    CHECK(r.entries[0].element.format() == "a.c:f:1");
    CHECK(r.entries[0].score == 1.0);
    CHECK(r.entries[1].element.format() == "a.c:g:2");
    CHECK(r.entries[1].score == doctest::Approx(0.7071067811865475).epsilon(1e-12));

    const auto by_file = localize(p, fl_config(FlStrategy::Ochiai, Granularity::File));
    REQUIRE(by_file.entries.size() == 1);
    CHECK(by_file.entries[0].element.format() == "a.c");
    CHECK(by_file.granularity == Granularity::File);
}

TEST_CASE("equal scores are ordered by canonical element string") {
    Profile p;
    p.tests = {{TestId("t"), TestStatus::Failing, 1}};
    p.failing = {TestId("t")};
    p.coverage = CoverageMatrix{{TestId("t"), {L("b.c:f:1"), L("a.c:f:10"), L("a.c:f:9")}}};
    const auto r = localize(p, fl_config(FlStrategy::Tarantula));
    REQUIRE(r.entries.size() == 3);
    CHECK(r.entries[0].element.format() == "a.c:f:10");
    CHECK(r.entries[1].element.format() == "a.c:f:9");
    CHECK(r.entries[2].element.format() == "b.c:f:1");
}

TEST_CASE("localize error paths") {
    Profile p;
    p.tests = {{TestId("t"), TestStatus::Passing, 1}};
    p.coverage = CoverageMatrix{{TestId("t"), {L("a.c:f:1")}}};
    try {
        localize(p, fl_config(FlStrategy::Ochiai));
        FAIL("expected localization error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Localization);
        CHECK(std::string(e.what()) == "no failing tests; nothing to localize");
    }
    CHECK_THROWS_AS(localize(p, fl_config(FlStrategy::Ochiai, Granularity::Off)), Error);
    p.coverage.reset();
    p.failing = {TestId("t")};
    CHECK_THROWS_AS(localize(p, fl_config(FlStrategy::Ochiai)), Error);
}

TEST_CASE("localize matches the brute-force oracle on random suites") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 200; ++i) {
        const RawSuite s = random_suite(rng);
        const Profile p = profile_from(s);
        for (bool use_ochiai : {true, false}) {
            const auto expected = oracle_rank(s, use_ochiai);
            const auto got = localize(p, fl_config(use_ochiai ? FlStrategy::Ochiai : FlStrategy::Tarantula));
            REQUIRE(got.entries.size() == expected.size());
            for (std::size_t k = 0; k < expected.size(); ++k) {
                CHECK(got.entries[k].element.format() == expected[k].first);
                CHECK(std::abs(got.entries[k].score - expected[k].second) <= 1e-12);
            }
        }
    }
}

TEST_CASE("durations do not influence the ranking") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 50; ++i) {
        Profile p = profile_from(random_suite(rng));
        const auto before = localize(p, fl_config(FlStrategy::Ochiai));
        for (auto& t : p.tests) t.duration_ms *= 37;
        CHECK(localize(p, fl_config(FlStrategy::Ochiai)) == before);
        CHECK(format_ranking_csv(localize(p, fl_config(FlStrategy::Ochiai))) == format_ranking_csv(before));
    }
}

TEST_CASE("ranking CSV prints six decimals") {
    SuspiciousnessRanking r;
    r.entries = {{L("a.c:f:1"), 1.0}, {L("a.c:g:2"), 0.7071067811865475}};
    CHECK(format_ranking_csv(r) == "element,score\na.c:f:1,1.000000\na.c:g:2,0.707107\n");
}
