#include "formsight/errors.hpp"
#include "formsight/provider.hpp"
#include "formsight/util.hpp"

#include <json.hpp>

#include <utility>

namespace formsight {

namespace {

using nlohmann::ordered_json;

class ReplayProvider final : public Provider {
public:
    explicit ReplayProvider(std::filesystem::path dir) : store_(std::move(dir)) {}

    RawResponse execute(const ExtractionRequest& request) override {
        const std::string digest = prompt_digest(request.system_text);
        const std::string key = FixtureStore::key(request.scenario_id, request.variant, digest);
        auto entry = store_.read(key);
        if (!entry) {
            throw ProviderError("no fixture for scenario='" + request.scenario_id +
                                "' variant='" + request.variant + "' prompt_digest=" + digest +
                                " (expected " + store_.path_for(key).string() + ")");
        }
        if (!entry->error.empty()) {
            throw ProviderError("replaying recorded failure for " + request.scenario_id + "/" +
                                request.variant + ": " + entry->error);
        }
        RawResponse raw;
        raw.text = entry->text;
        raw.provider_meta = entry->provider_meta;
        raw.provider_meta["provider"] = "replay";
        raw.provider_meta["fixture"] = store_.path_for(key).filename().string();
        return raw;
    }

private:
    FixtureStore store_;
};

class RecordProvider final : public Provider {
public:
    RecordProvider(std::unique_ptr<Provider> inner, std::filesystem::path dir)
        : inner_(std::move(inner)), store_(std::move(dir)) {}

    RawResponse execute(const ExtractionRequest& request) override {
        FixtureEntry entry;
        entry.scenario_id = request.scenario_id;
        entry.variant = request.variant;
        entry.prompt_digest = prompt_digest(request.system_text);
        try {
            RawResponse raw = inner_->execute(request);
            entry.text = raw.text;
            entry.provider_meta = raw.provider_meta;
            store_.write(entry);
            return raw;
        } catch (const Error& ex) {
            entry.error = ex.what();
            store_.write(entry);
            throw;
        }
    }

private:
    std::unique_ptr<Provider> inner_;
    FixtureStore store_;
};

}  // namespace

FixtureStore::FixtureStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string FixtureStore::key(const std::string& scenario_id, const std::string& variant,
                              const std::string& prompt_digest) {
    // \x1f separators keep ("a","bc") and ("ab","c") distinct
    return util::sha256_hex(scenario_id + '\x1f' + variant + '\x1f' + prompt_digest);
}

std::filesystem::path FixtureStore::path_for(const std::string& key) const {
    return dir_ / (key + ".json");
}

std::optional<FixtureEntry> FixtureStore::read(const std::string& key) const {
    const auto path = path_for(key);
    if (!std::filesystem::exists(path)) {
        return std::nullopt;
    }
    ordered_json doc;
    try {
        doc = ordered_json::parse(util::read_file(path));
    } catch (const nlohmann::json::exception& ex) {
        throw IoError("fixture file is not valid JSON: " + path.string() + ": " + ex.what());
    }
    FixtureEntry entry;
    entry.scenario_id = doc.value("scenario", "");
    entry.variant = doc.value("variant", "");
    entry.prompt_digest = doc.value("prompt_digest", "");
    entry.text = doc.value("text", "");
    entry.error = doc.value("error", "");
    if (doc.contains("provider_meta") && doc.at("provider_meta").is_object()) {
        for (const auto& [k, v] : doc.at("provider_meta").items()) {
            if (v.is_string()) {
                entry.provider_meta[k] = v.get<std::string>();
            }
        }
    }
    return entry;
}

void FixtureStore::write(const FixtureEntry& entry) {
    ordered_json doc;
    doc["scenario"] = entry.scenario_id;
    doc["variant"] = entry.variant;
    doc["prompt_digest"] = entry.prompt_digest;
    if (entry.error.empty()) {
        doc["text"] = entry.text;
        ordered_json meta = ordered_json::object();
        for (const auto& [k, v] : entry.provider_meta) {
            meta[k] = v;
        }
        doc["provider_meta"] = std::move(meta);
    } else {
        doc["error"] = entry.error;
    }
    const std::string key = FixtureStore::key(entry.scenario_id, entry.variant,
                                              entry.prompt_digest);
    util::write_file_atomic(path_for(key), doc.dump(2) + "\n");
}

std::unique_ptr<Provider> make_replay_provider(const std::filesystem::path& fixture_dir) {
    return std::make_unique<ReplayProvider>(fixture_dir);
}

std::unique_ptr<Provider> make_record_provider(std::unique_ptr<Provider> inner,
                                               const std::filesystem::path& fixture_dir) {
    return std::make_unique<RecordProvider>(std::move(inner), fixture_dir);
}

}  // namespace formsight
