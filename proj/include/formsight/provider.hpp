#pragma once

#include "formsight/extraction.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace formsight {

// Chat-completions provider over HTTPS. Sends one system message (the prompt
// text) and one user message carrying the image as a base64 data URL. Retries
// transient failures (429, 5xx, transport errors, timeouts) with exponential
// backoff; authentication and other 4xx rejections are never retried. The
// credential stays inside the provider and is never echoed into metadata.
std::unique_ptr<Provider> make_http_provider(const ModelConfig& config,
                                             const std::string& credential);

// One recorded provider answer. A non-empty `error` marks a run that failed
// after retries; replaying it raises the recorded failure.
struct FixtureEntry {
    std::string scenario_id;
    std::string variant;
    std::string prompt_digest;
    std::string text;
    std::map<std::string, std::string> provider_meta;
    std::string error;
};

// Directory of fixture files, one JSON document per (scenario, variant,
// prompt digest) key. The filename is the URL-safe digest of the key.
class FixtureStore {
public:
    explicit FixtureStore(std::filesystem::path dir);

    static std::string key(const std::string& scenario_id, const std::string& variant,
                           const std::string& prompt_digest);

    std::optional<FixtureEntry> read(const std::string& key) const;
    void write(const FixtureEntry& entry);

    std::filesystem::path path_for(const std::string& key) const;
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

// Answers requests from recorded fixtures; deterministic and offline.
std::unique_ptr<Provider> make_replay_provider(const std::filesystem::path& fixture_dir);

// Delegates to `inner` and persists every outcome (answer or failure) under
// the request's fixture key.
std::unique_ptr<Provider> make_record_provider(std::unique_ptr<Provider> inner,
                                               const std::filesystem::path& fixture_dir);

}  // namespace formsight
