#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace formsight {

// One field the model must return: a snake_case key, a human-readable
// description, and optionally a format example and/or a closed value set.
struct FieldSpec {
    std::string key;
    std::string description;
    std::optional<std::string> format_hint;
    std::optional<std::set<std::string>> allowed_values;

    bool operator==(const FieldSpec&) const = default;
};

// Ordered field declaration for one extraction run. Order is meaningful: it
// drives prompt rendering and report row order.
struct ExtractionSchema {
    std::vector<FieldSpec> fields;

    std::vector<std::string> keys() const;
    const FieldSpec* find(std::string_view key) const;

    bool operator==(const ExtractionSchema&) const = default;
};

// Advisory verdict from validate_value. A warning never blocks or alters the
// value; scoring always sees the raw text.
struct ValidationVerdict {
    bool ok = true;
    std::string reason;
};

// Parses the JSON schema document format: {"fields": [{"key", "description",
// "format_hint"?, "allowed_values"?}, ...]}. Throws ConfigError on malformed
// documents, duplicate keys, or an empty field list.
ExtractionSchema load_schema(const std::string& document);
ExtractionSchema load_schema_file(const std::filesystem::path& path);

std::string serialize_schema(const ExtractionSchema& schema);

// The built-in 14-field schema for page one of the Ontario standard lease.
ExtractionSchema default_lease_schema();

ValidationVerdict validate_value(const FieldSpec& spec, const std::string& value);

}  // namespace formsight
