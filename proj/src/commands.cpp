#include "formsight/commands.hpp"

#include "formsight/errors.hpp"
#include "formsight/evaluation.hpp"
#include "formsight/reporting.hpp"
#include "formsight/util.hpp"

#include <json.hpp>

#include <cstdlib>
#include <ostream>

namespace formsight {

namespace {

using nlohmann::ordered_json;

std::string require_credential() {
    const char* value = std::getenv(kCredentialEnvVar);
    if (value == nullptr || *value == '\0') {
        throw ConfigError(std::string("live provider needs an API key; set the ") +
                          kCredentialEnvVar + " environment variable");
    }
    return value;
}

const char* provider_name(ProviderKind kind) {
    switch (kind) {
        case ProviderKind::live: return "live";
        case ProviderKind::replay: return "replay";
        case ProviderKind::record: return "record";
    }
    return "?";
}

ordered_json run_meta(const char* command, const Manifest& manifest,
                      const ProviderOptions* provider) {
    ordered_json meta;
    meta["tool"] = std::string("formsight ") + kVersion;
    meta["command"] = command;
    meta["schema_fields"] = manifest.schema.fields.size();
    meta["samples"] = manifest.samples.size();
    if (provider) {
        meta["provider"] = provider_name(provider->kind);
        meta["model"] = provider->model.model_name;
        meta["temperature"] = provider->model.temperature;
        meta["endpoint"] = provider->model.endpoint_url;
        if (!provider->fixture_dir.empty()) {
            meta["fixtures"] = provider->fixture_dir.string();
        }
    }
    meta["timestamp"] = util::iso8601_utc_now();
    return meta;
}

Manifest load_manifest_checked(const std::filesystem::path& path) {
    Manifest manifest = load_manifest(path);
    if (manifest.samples.empty()) {
        throw ConfigError("manifest contains no samples: " + path.string());
    }
    return manifest;
}

void log_written(const std::vector<std::filesystem::path>& files, std::ostream& log) {
    log << "wrote " << files.size() << " files to " << files.front().parent_path().string()
        << "\n";
}

std::map<std::string, FieldValues> load_predictions(const std::filesystem::path& path,
                                                    const Manifest& manifest, std::ostream& log,
                                                    int verbosity) {
    if (!std::filesystem::exists(path)) {
        throw ConfigError("predictions file not found: " + path.string());
    }
    ordered_json doc;
    try {
        doc = ordered_json::parse(util::read_file(path));
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("predictions file is not valid JSON: ") + ex.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("predictions file must map sample ids to field objects");
    }
    std::map<std::string, FieldValues> predictions;
    for (const auto& [sample_id, values] : doc.items()) {
        if (!values.is_object()) {
            throw ConfigError("prediction for '" + sample_id + "' is not an object");
        }
        FieldValues fv;
        for (const auto& [key, value] : values.items()) {
            if (!value.is_string()) {
                throw ConfigError("prediction value for '" + sample_id + "." + key +
                                  "' is not a string");
            }
            fv[key] = value.get<std::string>();
        }
        predictions[sample_id] = std::move(fv);
    }
    // ids present in the file but absent from the manifest are ignored
    for (const auto& [sample_id, _] : predictions) {
        bool known = false;
        for (const auto& sample : manifest.samples) {
            if (sample.id() == sample_id) {
                known = true;
                break;
            }
        }
        if (!known && verbosity > 0) {
            log << "ignoring prediction for unknown sample " << sample_id << "\n";
        }
    }
    return predictions;
}

}  // namespace

std::unique_ptr<Provider> make_provider(const ProviderOptions& options) {
    switch (options.kind) {
        case ProviderKind::replay:
            if (options.fixture_dir.empty()) {
                throw ConfigError("replay provider requires --fixtures <dir>");
            }
            return make_replay_provider(options.fixture_dir);
        case ProviderKind::record:
            if (options.fixture_dir.empty()) {
                throw ConfigError("record provider requires --fixtures <dir>");
            }
            return make_record_provider(make_http_provider(options.model, require_credential()),
                                        options.fixture_dir);
        case ProviderKind::live:
            return make_http_provider(options.model, require_credential());
    }
    throw ConfigError("unknown provider kind");
}

void cmd_extract(const ExtractOptions& options, std::ostream& out, std::ostream& log) {
    ExtractionSchema schema = options.schema_path.empty()
                                  ? default_lease_schema()
                                  : load_schema_file(options.schema_path);
    auto provider = make_provider(options.provider);

    ExtractionRequest request;
    request.system_text = build_system_prompt(schema);
    request.image = encode_image(options.image, options.rotation);
    request.config = options.provider.model;
    request.scenario_id = options.scenario_id;
    request.variant = options.variant;

    RawResponse raw = provider->execute(request);
    ParsedResponse parsed = parse_response(raw, schema);
    if (options.provider.verbosity > 0) {
        for (const auto& warning : parsed.warnings) {
            log << "warning: " << warning << "\n";
        }
        for (const auto& field : schema.fields) {
            auto verdict = validate_value(field, parsed.values.at(field.key));
            if (!verdict.ok) {
                log << "warning: " << verdict.reason << "\n";
            }
        }
    }
    out << serialize_field_values(parsed.values, schema) << "\n";
}

void cmd_evaluate(const EvaluateOptions& options, std::ostream& log) {
    Manifest manifest = load_manifest_checked(options.manifest);
    auto provider = make_provider(options.provider);

    BatchResult batch = run_extraction(manifest, *provider, options.provider.model);
    if (options.provider.verbosity > 0) {
        for (const auto& warning : batch.warnings) {
            log << "warning: " << warning << "\n";
        }
    }
    for (const auto& [sample_id, error] : batch.failures) {
        log << "sample " << sample_id << " failed: " << error << "\n";
    }

    ScoreMatrix matrix = score_run(manifest, batch.predictions, batch.failures);
    ordered_json meta = run_meta("evaluate", manifest, &options.provider);
    meta["manifest"] = options.manifest.string();
    meta["failed_samples"] = batch.failures.size();

    RunReport report = build_report(matrix, std::move(meta));
    auto files = export_report(report, options.out_dir);
    log_written(files, log);
    log << "overall accuracy " << format_fraction_2dp(matrix.overall()) << " ("
        << batch.failures.size() << " failed samples)\n";
}

void cmd_score(const ScoreOptions& options, std::ostream& log) {
    Manifest manifest = load_manifest_checked(options.manifest);
    auto predictions = load_predictions(options.predictions, manifest, log, options.verbosity);

    ScoreMatrix matrix = score_run(manifest, predictions);
    ordered_json meta = run_meta("score", manifest, nullptr);
    meta["manifest"] = options.manifest.string();
    meta["predictions"] = options.predictions.string();

    RunReport report = build_report(matrix, std::move(meta));
    auto files = export_report(report, options.out_dir);
    log_written(files, log);
    log << "overall accuracy " << format_fraction_2dp(matrix.overall()) << "\n";
}

void cmd_record(const RecordOptions& options, std::ostream& log) {
    Manifest manifest = load_manifest_checked(options.manifest);

    ProviderOptions provider_options;
    provider_options.kind = ProviderKind::record;
    provider_options.fixture_dir = options.fixture_dir;
    provider_options.model = options.model;
    provider_options.verbosity = options.verbosity;
    auto provider = make_provider(provider_options);

    BatchResult batch = run_extraction(manifest, *provider, options.model);
    for (const auto& [sample_id, error] : batch.failures) {
        log << "sample " << sample_id << " failed: " << error << "\n";
    }

    // Count what actually landed on disk; a response that fails to parse
    // still produces a fixture.
    FixtureStore store(options.fixture_dir);
    const std::string digest = prompt_digest(build_system_prompt(manifest.schema));
    std::size_t fixtures = 0;
    std::size_t error_entries = 0;
    for (const auto& sample : manifest.samples) {
        auto entry = store.read(FixtureStore::key(sample.scenario_id, sample.variant, digest));
        if (entry) {
            entry->error.empty() ? ++fixtures : ++error_entries;
        }
    }
    log << "recorded " << fixtures << " fixtures and " << error_entries << " error entries in "
        << options.fixture_dir.string() << "\n";
}

}  // namespace formsight
