#include "formsight/corpus.hpp"

#include "formsight/errors.hpp"
#include "formsight/util.hpp"

#include <json.hpp>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <set>
#include <utility>

namespace formsight {

namespace {

using nlohmann::ordered_json;

constexpr std::string_view kPngMagic = "\x89PNG\r\n\x1a\n";

bool looks_like_png(std::string_view bytes) {
    return bytes.size() >= kPngMagic.size() && bytes.substr(0, kPngMagic.size()) == kPngMagic;
}

bool looks_like_jpeg(std::string_view bytes) {
    return bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xff &&
           static_cast<unsigned char>(bytes[1]) == 0xd8 &&
           static_cast<unsigned char>(bytes[2]) == 0xff;
}

void check_rotation(int rotation) {
    if (rotation != 0 && rotation != 90 && rotation != 180 && rotation != 270) {
        throw ConfigError("rotation must be one of 0/90/180/270, got " +
                          std::to_string(rotation));
    }
}

Sample sample_from_json(const ordered_json& node, const std::filesystem::path& base_dir,
                        const ExtractionSchema& schema) {
    if (!node.is_object()) {
        throw ConfigError("manifest sample entry is not an object");
    }
    Sample sample;
    for (const char* required : {"scenario", "variant", "image", "gold"}) {
        if (!node.contains(required)) {
            throw ConfigError(std::string("manifest sample is missing \"") + required + "\"");
        }
    }
    sample.scenario_id = node.at("scenario").get<std::string>();
    sample.variant = node.at("variant").get<std::string>();
    if (sample.scenario_id.empty() || sample.variant.empty()) {
        throw ConfigError("manifest sample has an empty scenario or variant id");
    }
    std::filesystem::path image = node.at("image").get<std::string>();
    sample.image_ref = image.is_absolute() ? image : base_dir / image;
    sample.rotation = node.value("rotation", 0);
    check_rotation(sample.rotation);

    const auto& gold = node.at("gold");
    if (!gold.is_object()) {
        throw ConfigError("sample " + sample.id() + " gold is not an object");
    }
    for (const auto& [key, value] : gold.items()) {
        if (!value.is_string()) {
            throw ConfigError("sample " + sample.id() + " gold value for '" + key +
                              "' is not a string");
        }
        sample.gold[key] = value.get<std::string>();
    }

    for (const auto& key : schema.keys()) {
        if (!sample.gold.count(key)) {
            throw ConfigError("sample " + sample.id() + " gold is missing schema key '" + key +
                              "'");
        }
    }
    for (const auto& [key, value] : sample.gold) {
        if (!schema.find(key)) {
            throw ConfigError("sample " + sample.id() + " gold has unknown key '" + key + "'");
        }
    }
    return sample;
}

}  // namespace

std::size_t variant_rank(std::string_view name) {
    for (std::size_t i = 0; i < kCanonicalVariants.size(); ++i) {
        if (kCanonicalVariants[i] == name) {
            return i;
        }
    }
    return kCanonicalVariants.size();
}

Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("manifest is not valid JSON: ") + ex.what());
    }
    if (!doc.is_object() || !doc.contains("schema") || !doc.contains("samples")) {
        throw ConfigError("manifest must be an object with \"schema\" and \"samples\"");
    }

    Manifest manifest;
    const auto& schema_node = doc.at("schema");
    if (schema_node.is_string()) {
        std::filesystem::path schema_path = schema_node.get<std::string>();
        if (!schema_path.is_absolute()) {
            schema_path = base_dir / schema_path;
        }
        manifest.schema = load_schema_file(schema_path);
    } else if (schema_node.is_object()) {
        manifest.schema = load_schema(schema_node.dump());
    } else {
        throw ConfigError("manifest \"schema\" must be a path string or an inline object");
    }

    if (!doc.at("samples").is_array()) {
        throw ConfigError("manifest \"samples\" must be an array");
    }
    std::set<std::string> ids;
    for (const auto& node : doc.at("samples")) {
        Sample sample = sample_from_json(node, base_dir, manifest.schema);
        if (!ids.insert(sample.id()).second) {
            throw ConfigError("duplicate (scenario, variant) pair in manifest: " + sample.id());
        }
        if (!std::filesystem::exists(sample.image_ref)) {
            throw IoError("sample " + sample.id() + " image file not found: " +
                          sample.image_ref.string());
        }
        manifest.samples.push_back(std::move(sample));
    }
    return manifest;
}

Manifest load_manifest(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw ConfigError("manifest file not found: " + path.string());
    }
    return parse_manifest(util::read_file(path), path.parent_path());
}

std::string serialize_manifest(const Manifest& manifest) {
    ordered_json doc;
    doc["schema"] = ordered_json::parse(serialize_schema(manifest.schema));
    doc["samples"] = ordered_json::array();
    for (const auto& sample : manifest.samples) {
        ordered_json node;
        node["scenario"] = sample.scenario_id;
        node["variant"] = sample.variant;
        node["image"] = sample.image_ref.string();
        node["rotation"] = sample.rotation;
        ordered_json gold = ordered_json::object();
        for (const auto& key : manifest.schema.keys()) {
            gold[key] = sample.gold.at(key);
        }
        node["gold"] = std::move(gold);
        doc["samples"].push_back(std::move(node));
    }
    return doc.dump(2) + "\n";
}

ImagePayload encode_image(const std::filesystem::path& image_ref, int rotation) {
    check_rotation(rotation);
    std::string bytes = util::read_file(image_ref);

    std::string media_type;
    if (looks_like_png(bytes)) {
        media_type = "image/png";
    } else if (looks_like_jpeg(bytes)) {
        media_type = "image/jpeg";
    } else {
        throw IoError("unsupported image format (expected PNG or JPEG): " + image_ref.string());
    }

    if (rotation == 0) {
        return {media_type, util::base64_encode(bytes)};
    }

    cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1,
                const_cast<char*>(bytes.data()));
    cv::Mat image = cv::imdecode(raw, cv::IMREAD_UNCHANGED);
    if (image.empty()) {
        throw IoError("failed to decode image: " + image_ref.string());
    }

    cv::Mat rotated;
    switch (rotation) {
        case 90: cv::rotate(image, rotated, cv::ROTATE_90_CLOCKWISE); break;
        case 180: cv::rotate(image, rotated, cv::ROTATE_180); break;
        case 270: cv::rotate(image, rotated, cv::ROTATE_90_COUNTERCLOCKWISE); break;
    }

    std::vector<unsigned char> encoded;
    if (media_type == "image/png") {
        cv::imencode(".png", rotated, encoded);
    } else {
        cv::imencode(".jpg", rotated, encoded, {cv::IMWRITE_JPEG_QUALITY, 100});
    }
    return {media_type, util::base64_encode(encoded.data(), encoded.size())};
}

}  // namespace formsight
