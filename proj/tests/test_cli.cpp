#include "formsight/commands.hpp"

#include "formsight/errors.hpp"
#include "formsight/evaluation.hpp"
#include "formsight/provider.hpp"
#include "formsight/util.hpp"
#include "helpers.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace formsight;
using nlohmann::ordered_json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::string& args, bool with_credential = true) {
    testutil::TempDir dir;
    auto out_path = dir / "stdout.txt";
    auto err_path = dir / "stderr.txt";
    std::string command = std::string(with_credential ? "" : "env -u OPENAI_API_KEY ") +
                          FORMSIGHT_CLI_PATH + " " + args + " > " + out_path.string() + " 2> " +
                          err_path.string();
    int status = std::system(command.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = std::filesystem::exists(out_path) ? util::read_file(out_path) : "";
    result.err = std::filesystem::exists(err_path) ? util::read_file(err_path) : "";
    return result;
}

// Writes a manifest over the default lease schema plus one fixture per sample
// whose response reproduces the gold values.
struct ReplaySetup {
    testutil::TempDir dir;
    std::filesystem::path manifest_path;
    std::filesystem::path fixture_dir;
    Manifest manifest;

    explicit ReplaySetup(bool fixtures_for_all = true) {
        auto image = testutil::write_png(dir / "form.png");
        manifest = testutil::make_manifest(
            default_lease_schema(), image, testutil::grid_identities(),
            [](const std::string& scenario, const std::string& variant, const std::string& key) {
                return scenario + " " + variant + " " + key;
            });
        manifest_path = dir / "manifest.json";
        util::write_file_atomic(manifest_path, serialize_manifest(manifest));

        fixture_dir = dir / "fixtures";
        FixtureStore store(fixture_dir);
        const std::string digest = prompt_digest(build_system_prompt(manifest.schema));
        for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
            if (!fixtures_for_all && i == 0) {
                continue;
            }
            const auto& sample = manifest.samples[i];
            FixtureEntry entry;
            entry.scenario_id = sample.scenario_id;
            entry.variant = sample.variant;
            entry.prompt_digest = digest;
            entry.text = "Here you go:\n```json\n" +
                         serialize_field_values(sample.gold, manifest.schema) + "\n```";
            store.write(entry);
        }
    }
};

}  // namespace

TEST_CASE("extract prints the complete field map from a replay fixture") {
    testutil::TempDir dir;
    auto image = testutil::write_png(dir / "form.png");
    auto schema = default_lease_schema();

    FieldValues values;
    for (const auto& key : schema.keys()) {
        values[key] = key == "rental_unit_condominium" ? "no" : "Amy";
    }
    FixtureStore store(dir / "fixtures");
    FixtureEntry entry;
    entry.scenario_id = "adhoc";
    entry.variant = "default";
    entry.prompt_digest = prompt_digest(build_system_prompt(schema));
    entry.text = serialize_field_values(values, schema);
    store.write(entry);

    auto result = run_cli("extract --image " + image.string() + " --provider replay --fixtures " +
                          (dir / "fixtures").string());
    CHECK(result.exit_code == 0);
    auto parsed = ordered_json::parse(result.out);
    CHECK(parsed.size() == 14);
    CHECK(parsed.at("landlord_first_name") == "Amy");
    CHECK(parsed.at("rental_unit_condominium") == "no");
}

TEST_CASE("extract exit codes partition the error classes") {
    testutil::TempDir dir;
    auto image = testutil::write_png(dir / "form.png");

    SUBCASE("unknown schema path is a config error") {
        auto result = run_cli("extract --image " + image.string() +
                              " --schema /no/such/schema.json --provider replay --fixtures " +
                              dir.path().string());
        CHECK(result.exit_code == 1);
    }
    SUBCASE("live without the credential env var is a config error naming it") {
        auto result = run_cli("extract --image " + image.string() + " --provider live",
                              /*with_credential=*/false);
        CHECK(result.exit_code == 1);
        CHECK(result.err.find("OPENAI_API_KEY") != std::string::npos);
    }
    SUBCASE("missing image is an io error") {
        auto result = run_cli("extract --image " + (dir / "absent.png").string() +
                              " --provider replay --fixtures " + dir.path().string());
        CHECK(result.exit_code == 2);
    }
    SUBCASE("missing fixture is a provider error") {
        auto result = run_cli("extract --image " + image.string() +
                              " --provider replay --fixtures " + dir.path().string());
        CHECK(result.exit_code == 3);
    }
    SUBCASE("fixture with no JSON object is a parse error") {
        FixtureStore store(dir / "fixtures");
        FixtureEntry entry;
        entry.scenario_id = "adhoc";
        entry.variant = "default";
        entry.prompt_digest = prompt_digest(build_system_prompt(default_lease_schema()));
        entry.text = "I could not read the form, sorry.";
        store.write(entry);
        auto result = run_cli("extract --image " + image.string() +
                              " --provider replay --fixtures " + (dir / "fixtures").string());
        CHECK(result.exit_code == 4);
    }
    SUBCASE("fixture missing keys is a coverage error") {
        FixtureStore store(dir / "fixtures");
        FixtureEntry entry;
        entry.scenario_id = "adhoc";
        entry.variant = "default";
        entry.prompt_digest = prompt_digest(build_system_prompt(default_lease_schema()));
        entry.text = R"({"landlord_first_name": "-"})";
        store.write(entry);
        auto result = run_cli("extract --image " + image.string() +
                              " --provider replay --fixtures " + (dir / "fixtures").string());
        CHECK(result.exit_code == 5);
    }
    SUBCASE("replay without --fixtures is a config error") {
        auto result = run_cli("extract --image " + image.string() + " --provider replay");
        CHECK(result.exit_code == 1);
    }
}

TEST_CASE("evaluate over replay fixtures writes the full report") {
    ReplaySetup setup;
    auto out_dir = setup.dir / "report";
    auto result = run_cli("evaluate --manifest " + setup.manifest_path.string() +
                          " --provider replay --fixtures " + setup.fixture_dir.string() +
                          " --out " + out_dir.string());
    REQUIRE(result.exit_code == 0);

    auto doc = ordered_json::parse(util::read_file(out_dir / "results.json"));
    CHECK(doc.at("heatmap").size() == 15);
    CHECK(doc.at("per_sample").size() == 210);
    CHECK(doc.at("by_scenario").at("overall").get<double>() == 1.0);
    CHECK(doc.at("run_meta").at("provider") == "replay");

    auto by_scenario = util::read_file(out_dir / "by_scenario.md");
    CHECK(by_scenario.find("| **Average** | 1.00 | 1.00 | 1.00 | 1.00 |") != std::string::npos);
}

TEST_CASE("evaluate records a missing fixture as a failed sample and continues") {
    ReplaySetup setup(/*fixtures_for_all=*/false);  // S1/typed_hd has no fixture
    auto out_dir = setup.dir / "report";
    auto result = run_cli("evaluate --manifest " + setup.manifest_path.string() +
                          " --provider replay --fixtures " + setup.fixture_dir.string() +
                          " --out " + out_dir.string());
    REQUIRE(result.exit_code == 0);
    CHECK(result.err.find("S1/typed_hd failed") != std::string::npos);

    auto doc = ordered_json::parse(util::read_file(out_dir / "results.json"));
    CHECK(doc.at("run_meta").at("failed_samples").get<int>() == 1);
    int failed_cells = 0;
    for (const auto& record : doc.at("per_sample")) {
        if (record.at("scenario") == "S1" && record.at("variant") == "typed_hd") {
            CHECK_FALSE(record.at("correct").get<bool>());
            CHECK(record.contains("error"));
            ++failed_cells;
        }
    }
    CHECK(failed_cells == 14);
}

TEST_CASE("evaluate on an empty manifest is a config error and writes nothing") {
    testutil::TempDir dir;
    auto schema_path = dir / "schema.json";
    util::write_file_atomic(schema_path, serialize_schema(default_lease_schema()));
    util::write_file_atomic(dir / "manifest.json",
                            R"({"schema": "schema.json", "samples": []})");
    auto out_dir = dir / "report";
    auto result = run_cli("evaluate --manifest " + (dir / "manifest.json").string() +
                          " --provider replay --fixtures " + dir.path().string() + " --out " +
                          out_dir.string());
    CHECK(result.exit_code == 1);
    CHECK_FALSE(std::filesystem::exists(out_dir));
}

TEST_CASE("score matches gold predictions end to end") {
    ReplaySetup setup;
    ordered_json predictions = ordered_json::object();
    for (const auto& sample : setup.manifest.samples) {
        ordered_json values = ordered_json::object();
        for (const auto& [key, value] : sample.gold) {
            values[key] = value;
        }
        predictions[sample.id()] = std::move(values);
    }
    auto predictions_path = setup.dir / "predictions.json";
    util::write_file_atomic(predictions_path, predictions.dump(2));

    auto out_dir = setup.dir / "report";
    auto result = run_cli("score --manifest " + setup.manifest_path.string() +
                          " --predictions " + predictions_path.string() + " --out " +
                          out_dir.string());
    REQUIRE(result.exit_code == 0);
    auto by_scenario = util::read_file(out_dir / "by_scenario.md");
    CHECK(by_scenario.find("| **Average** | 1.00 | 1.00 | 1.00 | 1.00 |") != std::string::npos);
}

TEST_CASE("score with a missing sample is a coverage error naming it") {
    ReplaySetup setup;
    ordered_json predictions = ordered_json::object();
    for (const auto& sample : setup.manifest.samples) {
        if (sample.id() == "S2/neat_sd") {
            continue;
        }
        ordered_json values = ordered_json::object();
        for (const auto& [key, value] : sample.gold) {
            values[key] = value;
        }
        predictions[sample.id()] = std::move(values);
    }
    auto predictions_path = setup.dir / "predictions.json";
    util::write_file_atomic(predictions_path, predictions.dump(2));

    auto result = run_cli("score --manifest " + setup.manifest_path.string() +
                          " --predictions " + predictions_path.string() + " --out " +
                          (setup.dir / "report").string());
    CHECK(result.exit_code == 5);
    CHECK(result.err.find("S2/neat_sd") != std::string::npos);
}

TEST_CASE("record without the credential env var is a config error") {
    ReplaySetup setup;
    auto result = run_cli("record --manifest " + setup.manifest_path.string() + " --fixtures " +
                              (setup.dir / "fx").string(),
                          /*with_credential=*/false);
    CHECK(result.exit_code == 1);
    CHECK(result.err.find("OPENAI_API_KEY") != std::string::npos);
}

TEST_CASE("credential is never echoed in diagnostics or outputs") {
    ReplaySetup setup;
    auto out_dir = setup.dir / "report";
    std::string command = std::string("env OPENAI_API_KEY=sk-leaky-credential ") +
                          FORMSIGHT_CLI_PATH + " evaluate --manifest " +
                          setup.manifest_path.string() + " --provider replay --fixtures " +
                          setup.fixture_dir.string() + " --out " + out_dir.string() + " -v > " +
                          (setup.dir / "out.txt").string() + " 2> " +
                          (setup.dir / "err.txt").string();
    REQUIRE(std::system(command.c_str()) == 0);
    for (const auto& entry : std::filesystem::recursive_directory_iterator(setup.dir.path())) {
        if (entry.is_regular_file() && entry.path().extension() != ".png") {
            CHECK(util::read_file(entry.path()).find("sk-leaky-credential") ==
                  std::string::npos);
        }
    }
}

TEST_CASE("version flag reports the tool version") {
    auto result = run_cli("--version");
    CHECK(result.exit_code == 0);
    CHECK(result.out.find(kVersion) != std::string::npos);
}
