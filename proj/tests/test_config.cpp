#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "switched/certify.hpp"
#include "switched/config.hpp"
#include "test_util.hpp"

using namespace switched;
using switched::testing::delay_free_bounds;
using switched::testing::example3_system;

namespace {

const char* kRawScenario = R"({
  "schema_version": 1,
  "kind": "raw_switched",
  "matrices": [[[0.0, 1.0], [0.0, 0.0]], [[0.0, 1.0], [2.0, 1.0]]],
  "bounds": {"lower": [0.5, 0.0], "upper": [1.0, 0.5]},
  "analysis": {"h": 2, "norm": "spectral", "epsilon": 1e-16}
})";

std::string replaced(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("scenario parsing") {
    const ScenarioConfig cfg = ScenarioConfig::parse(kRawScenario);
    CHECK(cfg.kind == ScenarioConfig::Kind::RawSwitched);
    CHECK(cfg.analysis.h == 2);
    CHECK(cfg.analysis.epsilon == 1e-16);
    CHECK(cfg.analysis.norm.kind == NormKind::Spectral);
    const auto [system, bounds] = cfg.build();
    CHECK(system.mode_count() == 2);
    CHECK(bounds.upper(2) == 0.5);
}

TEST_CASE("unknown and malformed fields are rejected") {
    CHECK_THROWS_AS(ScenarioConfig::parse(replaced(kRawScenario, "\"kind\"", "\"mystery\": 1, \"kind\"")),
                    std::invalid_argument);
    CHECK_THROWS_AS(ScenarioConfig::parse(replaced(kRawScenario, "\"h\": 2", "\"h\": 2, \"extra\": 3")),
                    std::invalid_argument);
    // ragged matrix row
    CHECK_THROWS_AS(ScenarioConfig::parse(replaced(kRawScenario, "[0.0, 1.0], [0.0, 0.0]",
                                                   "[0.0, 1.0], [0.0]")),
                    std::invalid_argument);
    // invalid bounds
    CHECK_THROWS_AS(ScenarioConfig::parse(replaced(kRawScenario, "\"lower\": [0.5, 0.0]",
                                                   "\"lower\": [0.9, 0.9]")),
                    std::invalid_argument);
    // wrong schema version
    CHECK_THROWS_AS(ScenarioConfig::parse(replaced(kRawScenario, "\"schema_version\": 1",
                                                   "\"schema_version\": 2")),
                    std::invalid_argument);
    // parse error carries a position
    try {
        ScenarioConfig::parse("{\"schema_version\": 1,,}");
        FAIL("expected a parse error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("parse error") != std::string::npos);
    }
}

TEST_CASE("norm names round-trip") {
    CHECK(norm_name(Norm::one()) == "one");
    CHECK(norm_from_name("frobenius", std::nullopt).kind == NormKind::Frobenius);
    CHECK_THROWS_AS(norm_from_name("weighted", std::nullopt), std::invalid_argument);
    CHECK_THROWS_AS(norm_from_name("euclidean", std::nullopt), std::invalid_argument);
    const Norm w = norm_from_name("weighted", Mat::identity(2));
    CHECK(w.kind == NormKind::Weighted);
}

TEST_CASE("certificate round-trips through JSON") {
    const StabilityCertificate cert = certify(example3_system(), delay_free_bounds(0.49), 2,
                                              Norm::spectral(), 1e-24);
    const std::string text = certificate_to_json(cert);
    const StabilityCertificate back = certificate_from_json(text);
    CHECK(back == cert);
    CHECK(certificate_to_json(back) == text);

    const StabilityCertificate weighted = certify(example3_system(), delay_free_bounds(0.4), 1,
                                                  Norm::weighted(Mat{{2.0, 0.1}, {0.1, 1.0}}), 0.5);
    const StabilityCertificate wback = certificate_from_json(certificate_to_json(weighted));
    CHECK(wback == weighted);
}

TEST_CASE("weighted norm flows through a scenario") {
    const std::string text = replaced(
        std::string(kRawScenario), "\"norm\": \"spectral\", \"epsilon\": 1e-16",
        "\"norm\": \"weighted\", \"weight\": [[2.0, 0.0], [0.0, 1.0]], \"epsilon\": 1e-16");
    const ScenarioConfig cfg = ScenarioConfig::parse(text);
    CHECK(cfg.analysis.norm.kind == NormKind::Weighted);
    REQUIRE(cfg.analysis.norm.weight.has_value());
    const auto [system, bounds] = cfg.build();
    const StabilityCertificate cert =
        certify(system, bounds, cfg.analysis.h, cfg.analysis.norm, cfg.analysis.epsilon);
    CHECK(cert.norm.kind == NormKind::Weighted);
    const StabilityCertificate back = certificate_from_json(certificate_to_json(cert));
    CHECK(back == cert);
}

TEST_CASE("signal specs sample deterministically") {
    SignalSpec periodic;
    periodic.kind = SignalSpec::Kind::Periodic;
    periodic.pattern = {1, 2, 2};
    CHECK(periodic.sample(5, 0) == std::vector<int>{1, 2, 2, 1, 2});

    SignalSpec schedule;
    schedule.kind = SignalSpec::Kind::Schedule;
    schedule.pattern = {2, 1, 1};
    CHECK(schedule.sample(3, 0) == std::vector<int>{2, 1, 1});
    CHECK_THROWS_AS(schedule.sample(4, 0), std::invalid_argument);
}

TEST_CASE("full-precision formatting") {
    CHECK(format_full(1.0) == "1");
    const double v = 0.80471895621705025;
    CHECK(std::stod(format_full(v)) == v);
    CHECK(format_full(v).size() >= 17);
}
