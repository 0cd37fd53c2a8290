#pragma once

#include "formsight/corpus.hpp"
#include "formsight/extraction.hpp"
#include "formsight/util.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <atomic>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

namespace testutil {

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        auto base = std::filesystem::temp_directory_path();
        path_ = base / ("formsight_test_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline cv::Mat gradient_image(int width, int height) {
    cv::Mat image(height, width, CV_8UC3);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            image.at<cv::Vec3b>(y, x) = cv::Vec3b(static_cast<unsigned char>((x * 37) % 256),
                                                  static_cast<unsigned char>((y * 91) % 256),
                                                  static_cast<unsigned char>((x + y) % 256));
        }
    }
    return image;
}

inline std::filesystem::path write_png(const std::filesystem::path& path, int width = 6,
                                       int height = 4) {
    cv::imwrite(path.string(), gradient_image(width, height));
    return path;
}

inline std::filesystem::path write_jpeg(const std::filesystem::path& path, int width = 6,
                                        int height = 4) {
    cv::imwrite(path.string(), gradient_image(width, height), {cv::IMWRITE_JPEG_QUALITY, 95});
    return path;
}

// In-memory manifest over the given schema; every sample points at `image`.
inline formsight::Manifest make_manifest(
    const formsight::ExtractionSchema& schema, const std::filesystem::path& image,
    const std::vector<std::pair<std::string, std::string>>& identities,
    const std::function<std::string(const std::string&, const std::string&, const std::string&)>&
        gold_value) {
    formsight::Manifest manifest;
    manifest.schema = schema;
    for (const auto& [scenario, variant] : identities) {
        formsight::Sample sample;
        sample.scenario_id = scenario;
        sample.variant = variant;
        sample.image_ref = image;
        sample.rotation = 0;
        for (const auto& key : schema.keys()) {
            sample.gold[key] = gold_value(scenario, variant, key);
        }
        manifest.samples.push_back(std::move(sample));
    }
    return manifest;
}

// Runs fn, returning the message of the E it throws ("" when it does not).
template <typename E, typename F>
std::string thrown_message(F&& fn) {
    try {
        fn();
    } catch (const E& e) {
        return e.what();
    } catch (...) {
    }
    return "";
}

// The 3 scenarios x 5 canonical variants identity grid.
inline std::vector<std::pair<std::string, std::string>> grid_identities() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const char* scenario : {"S1", "S2", "S3"}) {
        for (auto variant : formsight::kCanonicalVariants) {
            out.emplace_back(scenario, std::string(variant));
        }
    }
    return out;
}

}  // namespace testutil
