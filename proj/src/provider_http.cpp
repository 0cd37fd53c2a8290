#include "formsight/errors.hpp"
#include "formsight/provider.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <thread>

namespace formsight {

namespace {

using nlohmann::json;

struct ParsedUrl {
    std::string base;  // scheme://host[:port]
    std::string path;
};

ParsedUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint URL must include a scheme: " + url);
    }
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

bool retryable_status(int status) {
    return status == 429 || status == 408 || (status >= 500 && status < 600);
}

std::string response_content(const json& body) {
    if (!body.contains("choices") || !body.at("choices").is_array() ||
        body.at("choices").empty()) {
        throw ProviderError("provider response has no choices");
    }
    const auto& message = body.at("choices").at(0).at("message");
    const auto& content = message.at("content");
    if (content.is_string()) {
        return content.get<std::string>();
    }
    // Some providers return content as an array of typed parts.
    if (content.is_array()) {
        std::string out;
        for (const auto& part : content) {
            if (part.is_object() && part.contains("text") && part.at("text").is_string()) {
                out += part.at("text").get<std::string>();
            }
        }
        return out;
    }
    throw ProviderError("provider response content has an unexpected shape");
}

class HttpProvider final : public Provider {
public:
    HttpProvider(ModelConfig config, std::string credential)
        : config_(std::move(config)), credential_(std::move(credential)) {
        if (credential_.empty()) {
            throw ConfigError("http provider requires a non-empty credential");
        }
        url_ = split_url(config_.endpoint_url);
    }

    RawResponse execute(const ExtractionRequest& request) override {
        const std::string body = build_body(request);
        const int attempts = std::max(0, request.config.max_retries) + 1;
        auto start = std::chrono::steady_clock::now();
        std::string last_error;

        for (int attempt = 0; attempt < attempts; ++attempt) {
            if (attempt > 0) {
                backoff(attempt - 1, request.config.retry_base_delay_s);
            }
            httplib::Client client(url_.base);
            apply_timeouts(client, request.config.request_timeout_s);
            httplib::Headers headers{{"Authorization", "Bearer " + credential_}};
            auto res = client.Post(url_.path, headers, body, "application/json");

            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 200) {
                return success(*res, start, attempt);
            }
            if (res->status == 401 || res->status == 403) {
                throw ProviderError("authentication failed (HTTP " +
                                    std::to_string(res->status) + "): " + error_snippet(*res));
            }
            if (!retryable_status(res->status)) {
                throw ProviderError("request rejected (HTTP " + std::to_string(res->status) +
                                    "): " + error_snippet(*res));
            }
            last_error = "HTTP " + std::to_string(res->status) + ": " + error_snippet(*res);
        }
        throw ProviderError("request failed after " + std::to_string(attempts) +
                            " attempts; last error: " + last_error);
    }

private:
    std::string build_body(const ExtractionRequest& request) const {
        json body;
        body["model"] = request.config.model_name;
        body["temperature"] = request.config.temperature;
        if (request.config.force_json) {
            body["response_format"] = {{"type", "json_object"}};
        }
        const std::string data_url =
            "data:" + request.image.media_type + ";base64," + request.image.data_b64;
        body["messages"] = json::array({
            json{{"role", "system"}, {"content", request.system_text}},
            json{{"role", "user"},
                 {"content", json::array({json{{"type", "image_url"},
                                               {"image_url", json{{"url", data_url}}}}})}},
        });
        return body.dump();
    }

    static void apply_timeouts(httplib::Client& client, double seconds) {
        auto whole = static_cast<time_t>(seconds);
        auto usec = static_cast<time_t>((seconds - static_cast<double>(whole)) * 1e6);
        client.set_connection_timeout(whole, usec);
        client.set_read_timeout(whole, usec);
        client.set_write_timeout(whole, usec);
    }

    static void backoff(int retry_index, double base_delay_s) {
        double delay = base_delay_s * std::pow(2.0, retry_index);
        delay = std::min(delay, 60.0);
        if (delay > 0) {
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
    }

    static std::string error_snippet(const httplib::Response& res) {
        constexpr std::size_t limit = 300;
        if (res.body.size() <= limit) {
            return res.body;
        }
        return res.body.substr(0, limit) + "...";
    }

    RawResponse success(const httplib::Response& res,
                        std::chrono::steady_clock::time_point start, int attempt) const {
        json payload;
        try {
            payload = json::parse(res.body);
        } catch (const json::exception& ex) {
            throw ProviderError(std::string("provider returned unparseable JSON: ") + ex.what());
        }
        RawResponse raw;
        raw.text = response_content(payload);
        auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - start);
        raw.provider_meta["provider"] = "openai-http";
        raw.provider_meta["status"] = std::to_string(res.status);
        raw.provider_meta["retries"] = std::to_string(attempt);
        raw.provider_meta["latency_ms"] = std::to_string(elapsed.count());
        if (payload.contains("model") && payload.at("model").is_string()) {
            raw.provider_meta["model"] = payload.at("model").get<std::string>();
        }
        if (payload.contains("usage") && payload.at("usage").is_object()) {
            const auto& usage = payload.at("usage");
            for (const char* field : {"prompt_tokens", "completion_tokens", "total_tokens"}) {
                if (usage.contains(field) && usage.at(field).is_number()) {
                    raw.provider_meta[field] = std::to_string(usage.at(field).get<long long>());
                }
            }
        }
        return raw;
    }

    ModelConfig config_;
    std::string credential_;
    ParsedUrl url_;
};

}  // namespace

std::unique_ptr<Provider> make_http_provider(const ModelConfig& config,
                                             const std::string& credential) {
    return std::make_unique<HttpProvider>(config, credential);
}

}  // namespace formsight
