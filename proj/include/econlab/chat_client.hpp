#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace econlab {

enum class Role { system, user, assistant };

std::string to_string(Role r);
Role role_from_string(const std::string& s);

struct Message {
    Role role = Role::user;
    std::string text;
};

struct ProviderConfig {
    std::string endpoint_url;  // base URL, e.g. https://api.openai.com
    std::string chat_path = "/v1/chat/completions";
    std::string model_id;
    double temperature = 1.0;
    std::optional<std::uint64_t> request_seed;  // forwarded when the API supports it
    // Name of the environment variable holding the API key. Empty means the
    // endpoint needs no authentication (local servers, tests).
    std::string credential_env_var = "OPENAI_API_KEY";
    double request_timeout_s = 120.0;
};

// Published default sampling temperature for a model family; 1.0 otherwise.
double default_temperature(const std::string& model_id);

// Retryable transport condition: timeouts, connection errors, 408/429/5xx.
class TransientChatError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-retryable: bad credentials, malformed request, missing configuration.
class FatalChatError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ChatClient {
public:
    virtual ~ChatClient() = default;
    // Returns the completion text or throws one of the errors above.
    virtual std::string complete(const std::vector<Message>& messages) = 0;
};

struct RetryPolicy {
    int max_attempts = 5;
    double initial_delay_s = 0.5;  // doubled per retry
    bool sleep = true;             // tests turn the waiting off
};

struct ChatOutcome {
    bool ok = false;
    std::string text;  // completion, or the last transport error description
    int retries = 0;
};

// Transport-level wrapper: retries TransientChatError with exponential
// backoff up to the attempt cap. FatalChatError propagates to the caller.
ChatOutcome chat(ChatClient& client, const std::vector<Message>& messages,
                 const RetryPolicy& policy);

// OpenAI-compatible chat-completions client over HTTP(S).
class HttpChatClient : public ChatClient {
public:
    explicit HttpChatClient(ProviderConfig config);
    std::string complete(const std::vector<Message>& messages) override;

    const ProviderConfig& config() const { return config_; }

private:
    ProviderConfig config_;
    std::string api_key_;
    std::string host_;    // scheme://host[:port]
    bool tls_ = false;
};

}  // namespace econlab
