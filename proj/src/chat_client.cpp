#include "econlab/chat_client.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace econlab {

std::string to_string(Role r) {
    switch (r) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
    }
    return "user";
}

Role role_from_string(const std::string& s) {
    if (s == "system") return Role::system;
    if (s == "user") return Role::user;
    if (s == "assistant") return Role::assistant;
    throw std::invalid_argument("unknown role: " + s);
}

double default_temperature(const std::string& model_id) {
    std::string id(model_id);
    std::transform(id.begin(), id.end(), id.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (id.find("deepseek") != std::string::npos) return 0.3;
    if (id.find("llama") != std::string::npos) return 0.6;
    if (id.find("qwen") != std::string::npos) return 0.7;
    return 1.0;
}

ChatOutcome chat(ChatClient& client, const std::vector<Message>& messages,
                 const RetryPolicy& policy) {
    ChatOutcome out;
    double delay = policy.initial_delay_s;
    for (int attempt = 1; attempt <= std::max(policy.max_attempts, 1); ++attempt) {
        try {
            out.text = client.complete(messages);
            out.ok = true;
            out.retries = attempt - 1;
            return out;
        } catch (const TransientChatError& e) {
            out.text = e.what();
            out.retries = attempt - 1;
            if (attempt == policy.max_attempts) break;
            if (policy.sleep)
                std::this_thread::sleep_for(std::chrono::duration<double>(delay));
            delay *= 2.0;
        }
    }
    out.ok = false;
    return out;
}

HttpChatClient::HttpChatClient(ProviderConfig config) : config_(std::move(config)) {
    if (config_.endpoint_url.empty())
        throw FatalChatError("provider endpoint_url is empty");
    if (config_.model_id.empty())
        throw FatalChatError("provider model_id is empty");
    if (!config_.credential_env_var.empty()) {
        const char* key = std::getenv(config_.credential_env_var.c_str());
        if (!key || !*key)
            throw FatalChatError("credential environment variable " +
                                 config_.credential_env_var + " is not set");
        api_key_ = key;
    }
    // Split scheme://host[:port] from any base path; httplib takes the former,
    // the path prefix is prepended to chat_path per request.
    const auto scheme_end = config_.endpoint_url.find("://");
    if (scheme_end == std::string::npos)
        throw FatalChatError("endpoint_url needs a scheme: " + config_.endpoint_url);
    tls_ = config_.endpoint_url.compare(0, scheme_end, "https") == 0;
    const auto path_start = config_.endpoint_url.find('/', scheme_end + 3);
    host_ = config_.endpoint_url.substr(0, path_start);
    if (path_start != std::string::npos) {
        std::string prefix = config_.endpoint_url.substr(path_start);
        while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
        config_.chat_path = prefix + config_.chat_path;
    }
}

std::string HttpChatClient::complete(const std::vector<Message>& messages) {
    nlohmann::json body{{"model", config_.model_id},
                        {"temperature", config_.temperature}};
    if (config_.request_seed) body["seed"] = *config_.request_seed;
    auto& list = body["messages"] = nlohmann::json::array();
    for (const auto& m : messages)
        list.push_back({{"role", to_string(m.role)}, {"content", m.text}});

    httplib::Client cli(host_);
    cli.set_connection_timeout(std::chrono::duration<double>(config_.request_timeout_s));
    cli.set_read_timeout(std::chrono::duration<double>(config_.request_timeout_s));
    httplib::Headers headers;
    if (!api_key_.empty())
        headers.emplace("Authorization", "Bearer " + api_key_);

    auto res = cli.Post(config_.chat_path, headers, body.dump(), "application/json");
    if (!res)
        throw TransientChatError("transport error: " +
                                 httplib::to_string(res.error()));
    if (res->status == 401 || res->status == 403)
        throw FatalChatError("authentication rejected (HTTP " +
                             std::to_string(res->status) + ")");
    if (res->status == 408 || res->status == 429 || res->status >= 500)
        throw TransientChatError("HTTP " + std::to_string(res->status) + ": " +
                                 res->body);
    if (res->status != 200)
        throw FatalChatError("HTTP " + std::to_string(res->status) + ": " + res->body);

    try {
        const auto j = nlohmann::json::parse(res->body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw TransientChatError(std::string("malformed completion payload: ") +
                                 e.what());
    }
}

}  // namespace econlab
