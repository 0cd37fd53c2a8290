#include "formsight/extraction.hpp"

#include "formsight/errors.hpp"
#include "formsight/util.hpp"

#include <json.hpp>

#include <atomic>
#include <mutex>
#include <optional>
#include <thread>

namespace formsight {

namespace {

using nlohmann::ordered_json;

constexpr std::string_view kInstruction =
    "Analyze the provided image. Extract the values exactly as they appear, and return them "
    "in the json format specified below. If the value is missing, set that element to the "
    "string \"-\".";

// Balanced-brace extraction that ignores braces inside JSON strings.
// Returns the candidate substring starting at `start`, or nullopt when the
// braces never balance.
std::optional<std::string_view> balanced_object(std::string_view text, std::size_t start) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        char c = text[i];
        if (escaped) {
            escaped = false;
            continue;
        }
        if (c == '\\') {
            escaped = in_string;
            continue;
        }
        if (c == '"') {
            in_string = !in_string;
            continue;
        }
        if (in_string) {
            continue;
        }
        if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) {
                return text.substr(start, i - start + 1);
            }
        }
    }
    return std::nullopt;
}

// Scavenges the first parseable JSON object out of free text. Stray braces in
// surrounding prose just move the scan to the next candidate '{'.
std::optional<ordered_json> first_json_object(std::string_view text) {
    for (std::size_t pos = text.find('{'); pos != std::string_view::npos;
         pos = text.find('{', pos + 1)) {
        auto candidate = balanced_object(text, pos);
        if (!candidate) {
            continue;
        }
        ordered_json parsed = ordered_json::parse(*candidate, nullptr, false);
        if (!parsed.is_discarded() && parsed.is_object()) {
            return parsed;
        }
    }
    return std::nullopt;
}

bool is_yes_no_field(const FieldSpec& spec) {
    return spec.allowed_values && *spec.allowed_values == std::set<std::string>{"no", "yes"};
}

std::string coerce_to_text(const ordered_json& value, const FieldSpec& spec,
                           std::vector<std::string>& warnings) {
    if (value.is_string()) {
        return value.get<std::string>();
    }
    if (value.is_boolean()) {
        if (is_yes_no_field(spec)) {
            return value.get<bool>() ? "yes" : "no";
        }
        return value.get<bool>() ? "true" : "false";
    }
    if (value.is_null()) {
        warnings.push_back("null value for '" + spec.key + "' treated as missing");
        return std::string(kMissingValue);
    }
    // numbers, arrays, objects: take the JSON rendering as the textual value
    std::string text = value.dump();
    if (!value.is_number()) {
        warnings.push_back("non-scalar value for '" + spec.key + "' coerced to text");
    }
    return text;
}

}  // namespace

std::string build_system_prompt(const ExtractionSchema& schema) {
    std::string prompt(kInstruction);
    prompt += "\n";
    for (const auto& field : schema.fields) {
        prompt += "\n'";
        prompt += field.key;
        prompt += "': '";
        prompt += field.description;
        if (field.format_hint) {
            prompt += ", ";
            prompt += *field.format_hint;
        }
        prompt += "'";
    }
    return prompt;
}

std::string prompt_digest(const std::string& system_text) {
    return util::sha256_hex(system_text);
}

ParsedResponse parse_response(const RawResponse& raw, const ExtractionSchema& schema) {
    auto object = first_json_object(raw.text);
    if (!object) {
        throw ParseError("no JSON object found in model response");
    }

    ParsedResponse result;
    std::vector<std::string> missing;
    for (const auto& field : schema.fields) {
        auto it = object->find(field.key);
        if (it == object->end()) {
            missing.push_back(field.key);
            continue;
        }
        result.values[field.key] = coerce_to_text(*it, field, result.warnings);
    }
    if (!missing.empty()) {
        std::string message = "response is missing required keys:";
        for (const auto& key : missing) {
            message += " " + key;
        }
        throw CoverageError(message);
    }
    for (const auto& [key, value] : object->items()) {
        if (!schema.find(key)) {
            result.warnings.push_back("dropped unexpected key '" + key + "'");
        }
    }
    return result;
}

std::string serialize_field_values(const FieldValues& values, const ExtractionSchema& schema) {
    ordered_json doc = ordered_json::object();
    for (const auto& key : schema.keys()) {
        auto it = values.find(key);
        doc[key] = it == values.end() ? std::string(kMissingValue) : it->second;
    }
    return doc.dump(2);
}

BatchResult run_extraction(const Manifest& manifest, Provider& provider,
                           const ModelConfig& config) {
    BatchResult result;
    if (manifest.samples.empty()) {
        return result;
    }

    const std::string system_text = build_system_prompt(manifest.schema);
    std::mutex mutex;
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        while (true) {
            std::size_t index = next.fetch_add(1);
            if (index >= manifest.samples.size()) {
                return;
            }
            const Sample& sample = manifest.samples[index];
            try {
                ExtractionRequest request;
                request.system_text = system_text;
                request.image = encode_image(sample.image_ref, sample.rotation);
                request.config = config;
                request.scenario_id = sample.scenario_id;
                request.variant = sample.variant;

                RawResponse raw = provider.execute(request);
                ParsedResponse parsed = parse_response(raw, manifest.schema);

                std::lock_guard lock(mutex);
                result.predictions[sample.id()] = std::move(parsed.values);
                for (auto& warning : parsed.warnings) {
                    result.warnings.push_back(sample.id() + ": " + warning);
                }
            } catch (const std::exception& ex) {
                std::lock_guard lock(mutex);
                result.failures[sample.id()] = ex.what();
            }
        }
    };

    std::size_t thread_count = std::min<std::size_t>(
        std::max(1, config.max_concurrent_requests), manifest.samples.size());
    std::vector<std::thread> threads;
    threads.reserve(thread_count);
    for (std::size_t i = 0; i < thread_count; ++i) {
        threads.emplace_back(worker);
    }
    for (auto& t : threads) {
        t.join();
    }
    return result;
}

}  // namespace formsight
