#include "doctest.h"

#include <algorithm>
#include <string>

#include "mildlab/config.hpp"

using namespace mildlab;

namespace {

bool mentions(const ValidationError& e, const std::string& needle) {
    return std::any_of(e.violations().begin(), e.violations().end(),
                       [&](const std::string& v) { return v.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("defaults are filled in and normalized") {
    const auto cfg = parse_config("{}");
    CHECK(cfg.M == 127);
    CHECK(cfg.delta == doctest::Approx(1.0 / 1024.0));
    CHECK(cfg.drift.name() == "cubic");
    CHECK(cfg.d == 3.0);
    CHECK(cfg.solver.lambda_schedule.size() == 7);
    CHECK(cfg.normalized.contains("exponents"));
    CHECK(cfg.normalized["seeds"]["master"] == 7);
    CHECK(cfg.seeds().size() == 4);
    CHECK(config_digest(cfg).size() == 16);
    CHECK(config_digest(cfg) == config_digest(parse_config("{\"M\": 127}")));
    CHECK(config_digest(cfg) != config_digest(parse_config("{\"M\": 63}")));
}

TEST_CASE("malformed json reports a byte position") {
    try {
        parse_config("{\"M\": 12,, }");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position() >= 9);
        CHECK(e.position() <= 11);
    }
    CHECK_THROWS_AS(parse_config("[1, 2]"), ParseError);
}

TEST_CASE("every violated constraint is reported") {
    try {
        parse_config(R"({"exponents": {"q": 0.5}, "nu": -1, "bogus": 1, "noise": {"amplitude": 1, "extra": 2}})");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(mentions(e, "violates q ≥ 1"));
        CHECK(mentions(e, "nu"));
        CHECK(mentions(e, "bogus"));
        CHECK(mentions(e, "extra"));
        CHECK(e.violations().size() >= 4);
    }
    try {
        parse_config(R"({"exponents": {"q": 2, "r": 3}})");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(mentions(e, "violates r ≤ q"));
    }
    CHECK_THROWS_AS(parse_config(R"({"delta": 0.3})"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"drift": "tanh"})"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"studies": {"nope": {}}})"), ValidationError);
}

TEST_CASE("drift forms") {
    CHECK(parse_config(R"({"drift": "sign"})").drift.name() == "sign");
    CHECK(parse_config(R"({"drift": "sign"})").d == 0.0);
    const auto lin = parse_config(R"({"drift": {"builtin": "linear", "slope": 2.5}})");
    CHECK(lin.drift(2.0) == doctest::Approx(5.0));
    const auto pw = parse_config(R"({"drift": {"breakpoints": [0],
        "branches": [{"const": -1}, {"const": 1, "linear": 1}], "d": 1, "C": 2, "name": "kink"}})");
    CHECK(pw.drift.name() == "kink");
    CHECK(pw.drift.jump_points().size() == 1);
    CHECK(pw.drift(2.0) == doctest::Approx(3.0));
    // decreasing branch is a validation failure, not a crash
    CHECK_THROWS_AS(parse_config(R"({"drift": {"branches": [{"linear": -1}], "d": 1, "C": 1}})"), ValidationError);
}

TEST_CASE("schedules and study overrides") {
    const auto cfg = parse_config(R"({"lambda": [0.5, 0.25, 0.1],
        "studies": {"mild_identity": {"lambda": {"base": 0.125, "levels": 3}, "cauchy_tol": 1e-5, "paths": 2},
                    "cauchy": {"q": 1.5}}})");
    CHECK(cfg.solver.lambda_schedule == std::vector<double>{0.5, 0.25, 0.1});
    REQUIRE(cfg.studies.mild_identity);
    const auto& o = cfg.studies.mild_identity->overrides;
    REQUIRE(o.lambda_schedule);
    CHECK(o.lambda_schedule->back() == doctest::Approx(0.03125));
    CHECK(*o.cauchy_tol == 1e-5);
    CHECK(*o.paths == 2);
    CHECK(cfg.studies.cauchy->q == 1.5);
    CHECK_FALSE(cfg.studies.l1);
    CHECK_THROWS_AS(parse_config(R"({"lambda": [0.1, 0.2]})"), ValidationError);
}

TEST_CASE("initial data") {
    const Grid grid(7);
    const auto cfg = parse_config(R"({"M": 7, "initial": {"kind": "values", "values": [1,2,3,4,5,6,7]}})");
    CHECK(cfg.initial.build(grid)[6] == 7.0);
    const auto spike = parse_config(R"({"initial": {"kind": "spike", "amplitude": 2, "exponent": 0.5}})");
    CHECK(spike.initial.build(Grid(3))[0] == doctest::Approx(4.0));
    CHECK_THROWS_AS(parse_config(R"({"M": 7, "initial": {"kind": "values", "values": [1]}})"), ValidationError);
}
