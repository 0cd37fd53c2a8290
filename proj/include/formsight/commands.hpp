#pragma once

#include "formsight/extraction.hpp"
#include "formsight/provider.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>

namespace formsight {

inline constexpr const char* kCredentialEnvVar = "OPENAI_API_KEY";
inline constexpr const char* kVersion = "0.1.0";

enum class ProviderKind { live, replay, record };

struct ProviderOptions {
    ProviderKind kind = ProviderKind::live;
    std::filesystem::path fixture_dir;
    ModelConfig model;
    int verbosity = 0;
};

// Builds the configured provider, validating the combination: replay/record
// need a fixture directory, live/record need the credential env var.
std::unique_ptr<Provider> make_provider(const ProviderOptions& options);

struct ExtractOptions {
    std::filesystem::path image;
    std::filesystem::path schema_path;  // empty -> built-in lease schema
    std::string scenario_id = "adhoc";
    std::string variant = "default";
    int rotation = 0;
    ProviderOptions provider;
};

struct EvaluateOptions {
    std::filesystem::path manifest;
    std::filesystem::path out_dir;
    ProviderOptions provider;
};

struct ScoreOptions {
    std::filesystem::path manifest;
    std::filesystem::path predictions;
    std::filesystem::path out_dir;
    int verbosity = 0;
};

struct RecordOptions {
    std::filesystem::path manifest;
    std::filesystem::path fixture_dir;
    ModelConfig model;
    int verbosity = 0;
};

// Single-image extraction; prints the complete FieldValues JSON to `out`.
void cmd_extract(const ExtractOptions& options, std::ostream& out, std::ostream& log);

// Full run: extract every manifest sample (failures score as all-incorrect
// and the run continues), score, aggregate, and write the report files.
void cmd_evaluate(const EvaluateOptions& options, std::ostream& log);

// Scores a predictions file against a manifest; no provider involved.
void cmd_score(const ScoreOptions& options, std::ostream& log);

// Records one fixture per manifest sample through the live provider;
// per-sample failures are persisted as error entries and the run continues.
void cmd_record(const RecordOptions& options, std::ostream& log);

}  // namespace formsight
