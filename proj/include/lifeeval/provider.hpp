#pragma once

#include <chrono>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lifeeval/harness.hpp"

namespace lifeeval {

/// One chat-completion endpoint. API keys are never stored; `auth_env`
/// names the environment variable to read at request time.
struct ProviderSpec {
  std::string name;
  std::string endpoint;  // e.g. https://api.openai.com/v1/chat/completions
  std::string model;
  double temperature = 0.0;
  int max_tokens = 1024;
  std::string auth_env;
  double rate_limit_per_s = 0.0;  // 0 = unlimited
  int max_parallel = 4;
  int max_retries = 3;
  double initial_backoff_s = 1.0;
  bool capture_logprobs = false;
  int top_logprobs = 5;
};

std::vector<ProviderSpec> load_provider_config(std::istream& in);
std::vector<ProviderSpec> load_provider_config_file(const std::string& path);
ProviderSpec find_provider(std::span<const ProviderSpec> providers,
                           std::string_view name);

/// Transport-level failure (connection, auth, rate limit) after retries
/// are exhausted. Content-level malformation is not a transport error and
/// is never retried.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChatResult {
  std::string text;
  std::optional<std::vector<TokenTopLogprobs>> logprobs;
};

/// Minimal OpenAI-compatible chat-completions client with exponential
/// backoff on transient failures and a shared request-rate gate. Safe for
/// concurrent use.
class ChatClient {
 public:
  explicit ChatClient(ProviderSpec spec);

  ChatResult complete(const std::string& system_text,
                      const std::string& user_text);

  const ProviderSpec& spec() const { return spec_; }

 private:
  void rate_limit_wait();

  ProviderSpec spec_;
  std::string base_url_;
  std::string path_;
  std::mutex rate_mutex_;
  std::chrono::steady_clock::time_point next_allowed_{};
};

/// Queries every question with bounded parallelism; responses come back
/// in question order regardless of completion order. Transport failures
/// become error records and the run continues.
std::vector<ModelResponse> run_remote(ChatClient& client,
                                      std::span<const Question> questions);

}  // namespace lifeeval
