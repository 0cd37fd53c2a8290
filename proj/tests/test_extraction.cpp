#include "formsight/extraction.hpp"

#include "formsight/errors.hpp"
#include "helpers.hpp"

#include <doctest.h>
#include <json.hpp>

#include <random>

using namespace formsight;

namespace {

constexpr const char* kExpectedInstruction =
    "Analyze the provided image. Extract the values exactly as they appear, and return them "
    "in the json format specified below. If the value is missing, set that element to the "
    "string \"-\".";

RawResponse raw(std::string text) { return RawResponse{std::move(text), {}}; }

FieldValues complete_values(const ExtractionSchema& schema, const std::string& value) {
    FieldValues values;
    for (const auto& key : schema.keys()) {
        values[key] = value;
    }
    return values;
}

// Random text over an alphabet chosen to stress the JSON scavenger.
std::string adversarial_text(std::mt19937_64& rng) {
    static const std::string alphabet =
        "abcXYZ012 {}[]\"'\\\n\t:,`$-_#";
    std::string out(rng() % 18, ' ');
    for (char& c : out) {
        c = alphabet[rng() % alphabet.size()];
    }
    return out;
}

}  // namespace

TEST_CASE("system prompt starts with the fixed instruction") {
    auto prompt = build_system_prompt(default_lease_schema());
    CHECK(prompt.rfind(kExpectedInstruction, 0) == 0);
    CHECK(prompt.find("'landlord_first_name': 'The first name of the landlord, text'") !=
          std::string::npos);
    CHECK(prompt.find("'rental_unit_postal_code': 'The postal code of the rental unit, text, "
                      "A1A 1A1'") != std::string::npos);
    CHECK(prompt.find("'rental_unit_condominium': 'Whether the rental unit is part of a "
                      "condominium, text, yes or no'") != std::string::npos);
}

TEST_CASE("system prompt lists each key exactly once in schema order") {
    auto schema = default_lease_schema();
    auto prompt = build_system_prompt(schema);
    std::size_t previous = 0;
    for (const auto& key : schema.keys()) {
        auto token = "'" + key + "':";
        auto first = prompt.find(token);
        REQUIRE(first != std::string::npos);
        CHECK(prompt.find(token, first + 1) == std::string::npos);
        CHECK(first > previous);
        previous = first;
    }
}

TEST_CASE("system prompt is deterministic") {
    auto schema = default_lease_schema();
    auto reference = build_system_prompt(schema);
    for (int i = 0; i < 100; ++i) {
        CHECK(build_system_prompt(schema) == reference);
    }
}

TEST_CASE("single-field prompt is instruction plus one line") {
    auto schema = load_schema(R"({"fields": [{"key": "x", "description": "a value"}]})");
    CHECK(build_system_prompt(schema) ==
          std::string(kExpectedInstruction) + "\n\n'x': 'a value'");
}

TEST_CASE("parse_response maps a complete object") {
    auto schema = default_lease_schema();
    auto values = complete_values(schema, "v");
    values["landlord_first_name"] = "Amy";
    values["rental_unit_condominium"] = "no";
    auto parsed = parse_response(raw(serialize_field_values(values, schema)), schema);
    CHECK(parsed.values == values);
    CHECK(parsed.warnings.empty());
}

TEST_CASE("parse_response tolerates fences and prose") {
    auto schema = load_schema(R"({"fields": [{"key": "x", "description": "d"}]})");
    auto direct = parse_response(raw(R"({"x": "1 {2} 3"})"), schema);
    auto fenced = parse_response(raw("```json\n{\"x\": \"1 {2} 3\"}\n```"), schema);
    auto prose = parse_response(
        raw("Sure! Here {is} the result:\n```json\n{\"x\": \"1 {2} 3\"}\n```\nHope it helps."),
        schema);
    CHECK(direct.values == fenced.values);
    CHECK(direct.values == prose.values);
    CHECK(direct.values.at("x") == "1 {2} 3");
}

TEST_CASE("parse_response error paths") {
    auto schema = default_lease_schema();
    CHECK_THROWS_AS(parse_response(raw("no object here"), schema), ParseError);
    CHECK_THROWS_AS(parse_response(raw("{broken"), schema), ParseError);

    // a single present key must list the other 13 as missing
    auto message = testutil::thrown_message<CoverageError>(
        [&] { parse_response(raw(R"({"landlord_first_name": "-"})"), schema); });
    REQUIRE(!message.empty());
    for (const auto& key : schema.keys()) {
        if (key != "landlord_first_name") {
            CHECK(message.find(key) != std::string::npos);
        }
    }
}

TEST_CASE("parse_response coercions") {
    auto schema = load_schema(R"({"fields": [
        {"key": "spaces", "description": "d"},
        {"key": "condo", "description": "d", "allowed_values": ["yes", "no"]},
        {"key": "flag", "description": "d"},
        {"key": "note", "description": "d"}]})");
    auto parsed = parse_response(
        raw(R"({"spaces": 2, "condo": true, "flag": false, "note": null, "extra": "x"})"),
        schema);
    CHECK(parsed.values.at("spaces") == "2");
    CHECK(parsed.values.at("condo") == "yes");
    CHECK(parsed.values.at("flag") == "false");
    CHECK(parsed.values.at("note") == "-");
    REQUIRE(parsed.warnings.size() == 2);  // null coercion + dropped extra key
    CHECK(parsed.warnings[1].find("extra") != std::string::npos);
}

TEST_CASE("serialize/parse round trip with adversarial values") {
    auto schema = default_lease_schema();
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        FieldValues values;
        for (const auto& key : schema.keys()) {
            values[key] = adversarial_text(rng);
        }
        auto rendered = serialize_field_values(values, schema);
        auto parsed = parse_response(raw(rendered), schema);
        REQUIRE(parsed.values == values);
    }
}

TEST_CASE("run_extraction collects per-sample failures without aborting") {
    struct FlakyProvider : Provider {
        RawResponse execute(const ExtractionRequest& request) override {
            if (request.scenario_id == "S2") {
                throw ProviderError("boom");
            }
            FieldValues values;
            ExtractionSchema schema = default_lease_schema();
            for (const auto& key : schema.keys()) {
                values[key] = "v";
            }
            return RawResponse{serialize_field_values(values, schema), {}};
        }
    };

    testutil::TempDir dir;
    auto image = testutil::write_png(dir / "img.png");
    auto manifest = testutil::make_manifest(default_lease_schema(), image,
                                            {{"S1", "typed_hd"}, {"S2", "typed_hd"}},
                                            [](auto&&, auto&&, auto&&) { return "v"; });
    FlakyProvider provider;
    ModelConfig config;
    config.max_concurrent_requests = 2;
    auto result = run_extraction(manifest, provider, config);
    CHECK(result.predictions.size() == 1);
    CHECK(result.predictions.count("S1/typed_hd") == 1);
    REQUIRE(result.failures.size() == 1);
    CHECK(result.failures.at("S2/typed_hd").find("boom") != std::string::npos);
}
