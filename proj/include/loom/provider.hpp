#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace loom {

enum class chat_role {
    reasoner,
    summarizer,
    theorem_verifier,
    process_verifier,
    judge,
    improver,
};

const char * chat_role_name(chat_role role);
chat_role    chat_role_from_name(const std::string & name);

struct chat_message {
    std::string speaker;  // "system" | "user" | "assistant"
    std::string text;
};

struct completion_request {
    chat_role                 role = chat_role::reasoner;
    std::vector<chat_message> messages;
    int                       max_tokens = 4096;
    double                    temperature = 1.0;
    int                       sample_count = 1;
    std::optional<uint64_t>   seed;
};

struct token_usage {
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
};

struct completion_result {
    std::vector<std::string>           samples;  // length == request.sample_count
    token_usage                        usage;
    std::map<std::string, std::string> provider_meta;
};

enum class provider_error_kind {
    transport,
    rate_limited,
    budget_exceeded,
    script_miss,
    exhausted,
};

const char * provider_error_kind_name(provider_error_kind kind);

class provider_error : public std::runtime_error {
  public:
    provider_error(provider_error_kind kind, const std::string & what, double retry_after_s = 0.0)
        : std::runtime_error(what), kind(kind), retry_after_s(retry_after_s) {}

    provider_error_kind kind;
    double              retry_after_s;

    bool retryable() const {
        return kind == provider_error_kind::transport || kind == provider_error_kind::rate_limited;
    }
};

class completion_provider {
  public:
    virtual ~completion_provider() = default;

    // Returns exactly sample_count texts or throws provider_error.
    // Must be safe to call concurrently.
    virtual completion_result complete(const completion_request & req) = 0;

    // Cumulative token accounting, keyed by role name.
    virtual std::map<std::string, token_usage> usage_by_role() const = 0;
};

// Deterministic provider driven by canned texts. Per role: an ordinal queue
// consumed first, then reusable substring-keyed entries, then the default
// text. strict mode turns a miss into an error instead of the default.
class scripted_provider : public completion_provider {
  public:
    explicit scripted_provider(bool strict = true) : strict_(strict) {}

    void push(chat_role role, std::vector<std::string> samples);
    void push_text(chat_role role, std::string text) { push(role, {std::move(text)}); }
    // Reusable: fires whenever the last message contains key (after the queue is empty).
    void on_substring(chat_role role, std::string key, std::vector<std::string> samples);
    void set_default(std::string text) { default_text_ = std::move(text); }

    completion_result complete(const completion_request & req) override;
    std::map<std::string, token_usage> usage_by_role() const override;

    // Request log for budget assertions in tests.
    std::vector<completion_request> log() const;
    int request_count(chat_role role) const;
    int total_requests() const;

  private:
    struct keyed_entry {
        std::string              key;
        std::vector<std::string> samples;
    };

    mutable std::mutex                                 mu_;
    bool                                               strict_;
    std::string                                        default_text_ = "";
    std::map<chat_role, std::deque<std::vector<std::string>>> queues_;
    std::map<chat_role, std::vector<keyed_entry>>      keyed_;
    std::map<std::string, token_usage>                 usage_;
    std::vector<completion_request>                    log_;
};

struct retry_policy {
    int      max_attempts = 3;
    double   base_delay_s = 0.5;   // doubles per attempt, capped
    double   max_delay_s  = 8.0;
    uint64_t jitter_seed  = 0;     // deterministic jitter stream
    bool     sleep        = true;  // tests disable real sleeping
};

// Retries transport / rate_limited errors with exponential backoff and seeded
// jitter; other errors propagate immediately. Throws exhausted after
// max_attempts failures, carrying the last error text.
completion_result with_retry(completion_provider & provider, const completion_request & req,
                             const retry_policy & policy = {});

// Decorator enforcing at most max_in_flight concurrent complete() calls.
class gated_provider : public completion_provider {
  public:
    gated_provider(std::shared_ptr<completion_provider> inner, int max_in_flight);

    completion_result complete(const completion_request & req) override;
    std::map<std::string, token_usage> usage_by_role() const override;

    int max_observed_in_flight() const;

  private:
    std::shared_ptr<completion_provider> inner_;
    int                                   cap_;
    mutable std::mutex                    mu_;
    std::condition_variable               cv_;
    int                                   in_flight_ = 0;
    int                                   high_water_ = 0;
};

struct http_role_route {
    std::string url;    // empty: use the base endpoint
    std::string model;  // empty: use the base model
    double      temperature = -1.0;  // < 0: request value kept
};

struct http_provider_config {
    std::string                            base_url = "http://127.0.0.1:8000";
    std::string                            path = "/v1/chat/completions";
    std::string                            model = "default";
    std::string                            api_key;  // resolved from env by the caller
    std::map<std::string, http_role_route> role_routes;  // keyed by role name
    int                                    timeout_s = 120;
    int                                    max_in_flight = 8;
    int                                    max_tokens_cap = 65536;
    bool                                   native_multi_sample = true;
};

// Chat-completions HTTP client: JSON body with messages/temperature/n/
// max_tokens, bearer auth, per-role endpoint routing, in-flight cap.
// sample_count is sent natively when the server supports "n", otherwise
// emulated by concurrent single calls with order-stable results.
class http_provider : public completion_provider {
  public:
    explicit http_provider(http_provider_config cfg);
    ~http_provider() override;

    completion_result complete(const completion_request & req) override;
    std::map<std::string, token_usage> usage_by_role() const override;

  private:
    struct impl;
    std::unique_ptr<impl> impl_;
};

} // namespace loom
