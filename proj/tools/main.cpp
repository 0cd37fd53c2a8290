#include "formsight/commands.hpp"
#include "formsight/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

namespace {

using namespace formsight;

void add_model_flags(CLI::App* cmd, ModelConfig& model) {
    cmd->add_option("--model", model.model_name, "Model name");
    cmd->add_option("--temperature", model.temperature, "Sampling temperature")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--endpoint", model.endpoint_url, "Chat-completions endpoint URL");
    cmd->add_option("--timeout", model.request_timeout_s, "Request timeout in seconds");
    cmd->add_option("--retries", model.max_retries, "Max retries for transient failures")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--retry-delay", model.retry_base_delay_s,
                    "Base delay in seconds for exponential backoff");
    cmd->add_option("--concurrency", model.max_concurrent_requests,
                    "Max provider requests in flight")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--force-json", model.force_json,
                  "Ask the provider for a JSON-constrained response");
}

void add_provider_flags(CLI::App* cmd, ProviderOptions& provider) {
    static const std::map<std::string, ProviderKind> kinds{
        {"live", ProviderKind::live},
        {"replay", ProviderKind::replay},
        {"record", ProviderKind::record}};
    cmd->add_option("--provider", provider.kind, "Provider backend")
        ->transform(CLI::CheckedTransformer(kinds, CLI::ignore_case));
    cmd->add_option("--fixtures", provider.fixture_dir,
                    "Fixture directory (required for replay/record)");
    cmd->add_flag("-v,--verbose", provider.verbosity, "Verbose diagnostics");
    add_model_flags(cmd, provider.model);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"formsight: extract structured fields from form images and score the results"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("formsight ") + kVersion);

    ExtractOptions extract;
    auto* extract_cmd =
        app.add_subcommand("extract", "Extract fields from a single form image");
    extract_cmd->add_option("--image", extract.image, "Form image (PNG or JPEG)")->required();
    extract_cmd->add_option("--schema", extract.schema_path,
                            "Schema file (defaults to the built-in lease schema)");
    extract_cmd->add_option("--scenario", extract.scenario_id, "Sample identity for fixtures");
    extract_cmd->add_option("--variant", extract.variant, "Sample identity for fixtures");
    extract_cmd->add_option("--rotation", extract.rotation,
                            "Clockwise rotation applied before submission (0/90/180/270)");
    add_provider_flags(extract_cmd, extract.provider);

    EvaluateOptions evaluate;
    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "Extract every manifest sample and report accuracy");
    evaluate_cmd->add_option("--manifest", evaluate.manifest, "Manifest file")->required();
    evaluate_cmd->add_option("--out", evaluate.out_dir, "Report output directory")->required();
    add_provider_flags(evaluate_cmd, evaluate.provider);

    ScoreOptions score;
    auto* score_cmd =
        app.add_subcommand("score", "Score a predictions file against a manifest");
    score_cmd->add_option("--manifest", score.manifest, "Manifest file")->required();
    score_cmd->add_option("--predictions", score.predictions,
                          "JSON file mapping sample ids to field values")
        ->required();
    score_cmd->add_option("--out", score.out_dir, "Report output directory")->required();
    score_cmd->add_flag("-v,--verbose", score.verbosity, "Verbose diagnostics");

    RecordOptions record;
    auto* record_cmd =
        app.add_subcommand("record", "Record live responses for every manifest sample");
    record_cmd->add_option("--manifest", record.manifest, "Manifest file")->required();
    record_cmd->add_option("--fixtures", record.fixture_dir, "Fixture directory")->required();
    record_cmd->add_flag("-v,--verbose", record.verbosity, "Verbose diagnostics");
    add_model_flags(record_cmd, record.model);

    try {
        app.parse(argc, argv);
        if (extract_cmd->parsed()) {
            cmd_extract(extract, std::cout, std::cerr);
        } else if (evaluate_cmd->parsed()) {
            cmd_evaluate(evaluate, std::cerr);
        } else if (score_cmd->parsed()) {
            cmd_score(score, std::cerr);
        } else if (record_cmd->parsed()) {
            cmd_record(record, std::cerr);
        }
    } catch (const CLI::ParseError& e) {
        // flag/usage problems are config errors; --help and --version exit 0
        int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::config);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::config);
    }
    return 0;
}
