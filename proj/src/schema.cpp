#include "formsight/schema.hpp"

#include "formsight/errors.hpp"
#include "formsight/util.hpp"

#include <json.hpp>

#include <cctype>
#include <set>

namespace formsight {

namespace {

using nlohmann::ordered_json;

bool is_snake_case_key(std::string_view key) {
    if (key.empty() || !std::islower(static_cast<unsigned char>(key.front()))) {
        return false;
    }
    for (char c : key) {
        if (!std::islower(static_cast<unsigned char>(c)) &&
            !std::isdigit(static_cast<unsigned char>(c)) && c != '_') {
            return false;
        }
    }
    return true;
}

FieldSpec field_from_json(const ordered_json& node) {
    if (!node.is_object()) {
        throw ConfigError("schema field entry is not an object");
    }
    FieldSpec spec;
    if (!node.contains("key") || !node.at("key").is_string()) {
        throw ConfigError("schema field is missing a string \"key\"");
    }
    spec.key = node.at("key").get<std::string>();
    if (!is_snake_case_key(spec.key)) {
        throw ConfigError("schema field key is not lowercase snake_case: '" + spec.key + "'");
    }
    if (!node.contains("description") || !node.at("description").is_string()) {
        throw ConfigError("schema field '" + spec.key + "' is missing a string \"description\"");
    }
    spec.description = node.at("description").get<std::string>();
    if (node.contains("format_hint")) {
        if (!node.at("format_hint").is_string()) {
            throw ConfigError("schema field '" + spec.key + "' has a non-string format_hint");
        }
        spec.format_hint = node.at("format_hint").get<std::string>();
    }
    if (node.contains("allowed_values")) {
        const auto& av = node.at("allowed_values");
        if (!av.is_array() || av.empty()) {
            throw ConfigError("schema field '" + spec.key +
                              "' has allowed_values that is not a non-empty array");
        }
        std::set<std::string> values;
        for (const auto& item : av) {
            if (!item.is_string()) {
                throw ConfigError("schema field '" + spec.key + "' has a non-string allowed value");
            }
            values.insert(item.get<std::string>());
        }
        spec.allowed_values = std::move(values);
    }
    return spec;
}

// Character-class shape match against a format example like "A1A 1A1":
// letters match letters, digits match digits, everything else must match
// exactly. Used only to raise advisory warnings.
bool resembles_format(const std::string& value, const std::string& hint) {
    if (value.size() != hint.size()) {
        return false;
    }
    for (std::size_t i = 0; i < hint.size(); ++i) {
        unsigned char h = static_cast<unsigned char>(hint[i]);
        unsigned char v = static_cast<unsigned char>(value[i]);
        if (std::isalpha(h)) {
            if (!std::isalpha(v)) return false;
        } else if (std::isdigit(h)) {
            if (!std::isdigit(v)) return false;
        } else if (h != v) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::vector<std::string> ExtractionSchema::keys() const {
    std::vector<std::string> out;
    out.reserve(fields.size());
    for (const auto& f : fields) {
        out.push_back(f.key);
    }
    return out;
}

const FieldSpec* ExtractionSchema::find(std::string_view key) const {
    for (const auto& f : fields) {
        if (f.key == key) {
            return &f;
        }
    }
    return nullptr;
}

ExtractionSchema load_schema(const std::string& document) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(document);
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("schema document is not valid JSON: ") + ex.what());
    }
    if (!doc.is_object() || !doc.contains("fields") || !doc.at("fields").is_array()) {
        throw ConfigError("schema document must be an object with a \"fields\" array");
    }
    ExtractionSchema schema;
    std::set<std::string> seen;
    for (const auto& node : doc.at("fields")) {
        FieldSpec spec = field_from_json(node);
        if (!seen.insert(spec.key).second) {
            throw ConfigError("duplicate field key in schema: '" + spec.key + "'");
        }
        schema.fields.push_back(std::move(spec));
    }
    if (schema.fields.empty()) {
        throw ConfigError("schema declares no fields");
    }
    return schema;
}

ExtractionSchema load_schema_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw ConfigError("schema file not found: " + path.string());
    }
    return load_schema(util::read_file(path));
}

std::string serialize_schema(const ExtractionSchema& schema) {
    ordered_json doc;
    doc["fields"] = ordered_json::array();
    for (const auto& f : schema.fields) {
        ordered_json node;
        node["key"] = f.key;
        node["description"] = f.description;
        if (f.format_hint) {
            node["format_hint"] = *f.format_hint;
        }
        if (f.allowed_values) {
            node["allowed_values"] = *f.allowed_values;
        }
        doc["fields"].push_back(std::move(node));
    }
    return doc.dump(2) + "\n";
}

ExtractionSchema default_lease_schema() {
    ExtractionSchema schema;
    auto add = [&schema](std::string key, std::string description) -> FieldSpec& {
        schema.fields.push_back(FieldSpec{std::move(key), std::move(description), {}, {}});
        return schema.fields.back();
    };
    add("landlord_first_name", "The first name of the landlord, text");
    add("landlord_last_name", "The last name of the landlord, text");
    add("tenant_1_first_name", "The first name of the first tenant, text");
    add("tenant_1_last_name", "The last name of the first tenant, text");
    add("tenant_2_first_name", "The first name of the second tenant, text");
    add("tenant_2_last_name", "The last name of the second tenant, text");
    add("rental_unit_unit", "The unit number of the rental unit, text");
    add("rental_unit_street_number", "The street number of the rental unit, text");
    add("rental_unit_street_name", "The street name of the rental unit, text");
    add("rental_unit_city_town", "The city or town of the rental unit, text");
    add("rental_unit_province", "The province of the rental unit, text");
    auto& postal = add("rental_unit_postal_code", "The postal code of the rental unit, text");
    postal.format_hint = "A1A 1A1";
    add("rental_number_vehicle_spaces",
        "The number of vehicle parking spaces included with the rental unit, text");
    auto& condo = add("rental_unit_condominium",
                      "Whether the rental unit is part of a condominium, text");
    condo.format_hint = "yes or no";
    condo.allowed_values = std::set<std::string>{"yes", "no"};
    return schema;
}

ValidationVerdict validate_value(const FieldSpec& spec, const std::string& value) {
    if (value == "-") {
        return {};  // missing sentinel is always fine
    }
    std::string folded = util::ascii_lower(util::trim(value));
    if (spec.allowed_values) {
        for (const auto& allowed : *spec.allowed_values) {
            if (util::ascii_lower(util::trim(allowed)) == folded) {
                return {};
            }
        }
        return {false, "value '" + value + "' is not in allowed values for '" + spec.key + "'"};
    }
    if (spec.format_hint && !resembles_format(util::trim(value), *spec.format_hint)) {
        return {false, "value '" + value + "' does not resemble format '" + *spec.format_hint +
                           "' for '" + spec.key + "'"};
    }
    return {};
}

}  // namespace formsight
