#pragma once

#include "formsight/schema.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace formsight {

// Capture-condition names used by the reference corpus, in report column
// order. Variant ids are free text; anything else sorts after these.
inline constexpr std::array<std::string_view, 5> kCanonicalVariants = {
    "typed_hd", "neat_hd", "neat_sd", "sloppy_hd", "sloppy_sd"};

// Rank of a variant for deterministic column ordering: canonical names keep
// their difficulty order, unknown names share the rank after them and fall
// back to lexicographic order.
std::size_t variant_rank(std::string_view name);

// One form image with its identity and gold labels. Gold uses "-" for fields
// left blank on the form.
struct Sample {
    std::string scenario_id;
    std::string variant;
    std::filesystem::path image_ref;
    int rotation = 0;  // clockwise degrees, one of 0/90/180/270
    std::map<std::string, std::string> gold;

    std::string id() const { return scenario_id + "/" + variant; }

    bool operator==(const Sample&) const = default;
};

struct Manifest {
    ExtractionSchema schema;
    std::vector<Sample> samples;

    bool operator==(const Manifest&) const = default;
};

// Base64 image bytes ready for a data URL, plus the media type they decode
// as. With rotation 0 the bytes are the source file, untouched.
struct ImagePayload {
    std::string media_type;
    std::string data_b64;
};

// Loads and validates a manifest file: every sample's gold key set must equal
// the schema key set, rotations must be right angles, image files must exist,
// and (scenario, variant) pairs must be unique.
Manifest load_manifest(const std::filesystem::path& path);

// Same validation over in-memory text; relative schema/image paths resolve
// against base_dir.
Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir);

// Emits the manifest with the schema inlined; load(serialize(m)) == m.
std::string serialize_manifest(const Manifest& manifest);

// Reads the image file and produces the request payload. rotation 0 is a
// byte-level pass-through. Other right angles decode, rotate the pixels
// clockwise, and re-encode (PNG stays PNG; JPEG is re-encoded at maximum
// quality). No cropping, scaling, or enhancement.
ImagePayload encode_image(const std::filesystem::path& image_ref, int rotation);

}  // namespace formsight
