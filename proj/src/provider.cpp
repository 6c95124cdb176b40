#include "lifeeval/provider.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace lifeeval {

using ordered_json = nlohmann::ordered_json;

std::vector<ProviderSpec> load_provider_config(std::istream& in) {
  ordered_json doc = ordered_json::parse(in);
  std::vector<ProviderSpec> providers;
  for (const auto& rec : doc.at("providers")) {
    ProviderSpec spec;
    spec.name = rec.at("name").get<std::string>();
    spec.endpoint = rec.at("endpoint").get<std::string>();
    spec.model = rec.at("model").get<std::string>();
    spec.temperature = rec.value("temperature", 0.0);
    spec.max_tokens = rec.value("max_tokens", 1024);
    spec.auth_env = rec.value("auth_env", std::string{});
    spec.rate_limit_per_s = rec.value("rate_limit_per_s", 0.0);
    spec.max_parallel = rec.value("max_parallel", 4);
    spec.max_retries = rec.value("max_retries", 3);
    spec.initial_backoff_s = rec.value("initial_backoff_s", 1.0);
    spec.capture_logprobs = rec.value("capture_logprobs", false);
    spec.top_logprobs = rec.value("top_logprobs", 5);
    if (spec.temperature < 0.0) {
      throw std::invalid_argument("provider '" + spec.name +
                                  "': temperature must be >= 0");
    }
    if (spec.max_parallel < 1) {
      throw std::invalid_argument("provider '" + spec.name +
                                  "': max_parallel must be >= 1");
    }
    providers.push_back(std::move(spec));
  }
  if (providers.empty()) {
    throw std::invalid_argument("provider config: no providers listed");
  }
  return providers;
}

std::vector<ProviderSpec> load_provider_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("provider config: cannot open '" + path + "'");
  }
  return load_provider_config(in);
}

ProviderSpec find_provider(std::span<const ProviderSpec> providers,
                           std::string_view name) {
  for (const auto& p : providers) {
    if (p.name == name) return p;
  }
  throw std::invalid_argument("provider '" + std::string(name) +
                              "' not found in config");
}

namespace {

// Splits "https://host:port/some/path" into base URL and path.
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  const size_t scheme = endpoint.find("://");
  if (scheme == std::string::npos) {
    throw std::invalid_argument("provider endpoint must include a scheme: '" +
                                endpoint + "'");
  }
  const size_t slash = endpoint.find('/', scheme + 3);
  if (slash == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

std::optional<std::vector<TokenTopLogprobs>> parse_logprobs(
    const ordered_json& choice) {
  if (!choice.contains("logprobs") || choice["logprobs"].is_null()) {
    return std::nullopt;
  }
  const auto& lp = choice["logprobs"];
  if (!lp.contains("content") || !lp["content"].is_array()) return std::nullopt;
  std::vector<TokenTopLogprobs> positions;
  for (const auto& entry : lp["content"]) {
    TokenTopLogprobs position;
    position.token = entry.value("token", std::string{});
    position.logprob = entry.value("logprob", 0.0);
    if (entry.contains("top_logprobs")) {
      for (const auto& alt : entry["top_logprobs"]) {
        position.top.push_back(
            {alt.value("token", std::string{}), alt.value("logprob", 0.0)});
      }
    }
    positions.push_back(std::move(position));
  }
  return positions;
}

bool retryable_status(int status) {
  return status == 429 || (status >= 500 && status < 600);
}

}  // namespace

ChatClient::ChatClient(ProviderSpec spec) : spec_(std::move(spec)) {
  std::tie(base_url_, path_) = split_endpoint(spec_.endpoint);
}

void ChatClient::rate_limit_wait() {
  if (spec_.rate_limit_per_s <= 0.0) return;
  const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / spec_.rate_limit_per_s));
  std::chrono::steady_clock::time_point wake;
  {
    std::lock_guard lock(rate_mutex_);
    const auto now = std::chrono::steady_clock::now();
    next_allowed_ = std::max(next_allowed_, now);
    wake = next_allowed_;
    next_allowed_ += interval;
  }
  std::this_thread::sleep_until(wake);
}

ChatResult ChatClient::complete(const std::string& system_text,
                                const std::string& user_text) {
  ordered_json body;
  body["model"] = spec_.model;
  body["messages"] = ordered_json::array(
      {{{"role", "system"}, {"content", system_text}},
       {{"role", "user"}, {"content", user_text}}});
  body["temperature"] = spec_.temperature;
  body["max_tokens"] = spec_.max_tokens;
  if (spec_.capture_logprobs) {
    body["logprobs"] = true;
    body["top_logprobs"] = spec_.top_logprobs;
  }
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!spec_.auth_env.empty()) {
    const char* key = std::getenv(spec_.auth_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw TransportError("auth: environment variable '" + spec_.auth_env +
                           "' is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::string last_error;
  for (int attempt = 0; attempt <= spec_.max_retries; ++attempt) {
    if (attempt > 0) {
      const double seconds =
          spec_.initial_backoff_s * std::pow(2.0, attempt - 1);
      std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    }
    rate_limit_wait();

    httplib::Client http(base_url_);
    http.set_connection_timeout(30);
    http.set_read_timeout(120);
    auto res = http.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw TransportError("auth rejected (HTTP " +
                           std::to_string(res->status) + ")");
    }
    if (retryable_status(res->status)) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw TransportError("HTTP " + std::to_string(res->status) + ": " +
                           res->body);
    }

    ordered_json doc = ordered_json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("choices") ||
        doc["choices"].empty()) {
      throw TransportError("malformed completion envelope");
    }
    const auto& choice = doc["choices"][0];
    ChatResult result;
    result.text = choice.at("message").at("content").get<std::string>();
    result.logprobs = parse_logprobs(choice);
    return result;
  }
  throw TransportError("retries exhausted after " +
                       std::to_string(spec_.max_retries + 1) + " attempts (" +
                       last_error + ")");
}

std::vector<ModelResponse> run_remote(ChatClient& client,
                                      std::span<const Question> questions) {
  std::vector<ModelResponse> responses(questions.size());
  std::atomic<size_t> next{0};
  const std::string model = client.spec().model;

  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < questions.size();
         i = next.fetch_add(1)) {
      const Question& question = questions[i];
      const PromptPair prompt = render_prompt(question);
      const auto now = std::chrono::system_clock::now();
      try {
        ChatResult chat = client.complete(prompt.system_text, prompt.user_text);
        ModelResponse response = parse_response(question, std::move(chat.text));
        response.model = model;
        response.logprobs = std::move(chat.logprobs);
        response.timestamp =
            std::chrono::duration_cast<std::chrono::seconds>(
                now.time_since_epoch())
                .count();
        responses[i] = std::move(response);
      } catch (const TransportError& e) {
        ModelResponse failed;
        failed.question_id = question.id;
        failed.model = model;
        failed.status = ResponseStatus::unparseable;
        failed.transport_error = e.what();
        failed.timestamp = std::chrono::duration_cast<std::chrono::seconds>(
                               now.time_since_epoch())
                               .count();
        responses[i] = std::move(failed);
      }
    }
  };

  const size_t n_workers = std::min<size_t>(
      std::max(1, client.spec().max_parallel), questions.size());
  std::vector<std::thread> workers;
  workers.reserve(n_workers);
  for (size_t w = 0; w < n_workers; ++w) workers.emplace_back(worker);
  for (auto& t : workers) t.join();
  return responses;
}

}  // namespace lifeeval
