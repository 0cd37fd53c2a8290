#pragma once

#include "formsight/corpus.hpp"
#include "formsight/schema.hpp"

#include <map>
#include <string>
#include <vector>

namespace formsight {

// Complete key -> text map over a schema. "-" marks a field the form left
// blank.
using FieldValues = std::map<std::string, std::string>;

inline constexpr std::string_view kMissingValue = "-";

struct ModelConfig {
    std::string model_name = "gpt-4o-2024-08-06";
    double temperature = 0.0;
    std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
    double request_timeout_s = 120.0;
    int max_retries = 3;
    double retry_base_delay_s = 1.0;
    int max_concurrent_requests = 4;
    // Ask the provider for a JSON-constrained response instead of free text.
    bool force_json = false;
};

struct ExtractionRequest {
    std::string system_text;
    ImagePayload image;
    ModelConfig config;
    // Sample identity; replay/record providers key fixtures on it.
    std::string scenario_id;
    std::string variant;
};

// Raw provider answer. provider_meta (latency, retries, token counts, ...) is
// informational only and never affects scoring.
struct RawResponse {
    std::string text;
    std::map<std::string, std::string> provider_meta;
};

// Provider contract. Implementations must be safe for concurrent execute()
// calls and must return the provider's text answer unmodified.
class Provider {
public:
    virtual ~Provider() = default;
    virtual RawResponse execute(const ExtractionRequest& request) = 0;
};

// Renders the system prompt: the fixed instruction followed by one
// 'key': 'description[, format_hint]' line per field, in schema order.
// Deterministic: equal schemas yield byte-identical prompts.
std::string build_system_prompt(const ExtractionSchema& schema);

// Digest identifying the prompt a response was produced for; part of the
// fixture key, so fixtures go stale when the schema changes.
std::string prompt_digest(const std::string& system_text);

struct ParsedResponse {
    FieldValues values;
    std::vector<std::string> warnings;  // dropped extra keys, value coercions
};

// Locates the first JSON object in the response text (prose and code fences
// around it are fine), coerces every value to text, and checks coverage.
// Throws ParseError when no well-formed object can be found and CoverageError
// when schema keys are absent (listing every missing key).
ParsedResponse parse_response(const RawResponse& raw, const ExtractionSchema& schema);

// JSON rendering of a complete FieldValues map in schema key order.
std::string serialize_field_values(const FieldValues& values, const ExtractionSchema& schema);

struct BatchResult {
    std::map<std::string, FieldValues> predictions;  // by sample id
    std::map<std::string, std::string> failures;     // sample id -> error text
    std::vector<std::string> warnings;               // "<sample id>: <warning>"
};

// Extracts every manifest sample through the provider with at most
// config.max_concurrent_requests in flight. Per-sample errors are recorded,
// not fatal; results are independent of completion order.
BatchResult run_extraction(const Manifest& manifest, Provider& provider,
                           const ModelConfig& config);

}  // namespace formsight
