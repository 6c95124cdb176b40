#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lifeeval/questions.hpp"

namespace lifeeval {

struct PromptPair {
  std::string system_text;
  std::string user_text;
};

/// Renders the per-task prompt template. The output-schema instructions
/// are repeated in the user turn to reinforce formatting adherence.
PromptPair render_prompt(const Question& question);

enum class ResponseStatus {
  ok,
  unparseable,
  all_zero_confidence,
  hedged,
  refused,
};

std::string_view to_string(ResponseStatus status);
ResponseStatus response_status_from_string(std::string_view text);

struct ParsedLifeEval {
  int answer = 0;
  double confidence = 0.0;
};

struct ParsedBoolean {
  bool answer = false;
  double confidence = 0.0;
};

struct ParsedMcq {
  std::optional<int> answer_index;    // letter field, informational
  std::vector<double> option_values;  // stated values, not yet normalized
};

struct ParsedHalueval {
  double confidence = 0.0;
};

using ParsedResponse =
    std::variant<ParsedLifeEval, ParsedBoolean, ParsedMcq, ParsedHalueval>;

struct TokenLogprob {
  std::string token;
  double logprob = 0.0;
};

/// One sampled position: the generated token plus the provider's top-k
/// alternatives at that position.
struct TokenTopLogprobs {
  std::string token;
  double logprob = 0.0;
  std::vector<TokenLogprob> top;
};

struct ModelResponse {
  std::string question_id;
  std::string model;
  std::string raw_text;
  std::optional<ParsedResponse> parsed;  // present iff status == ok
  ResponseStatus status = ResponseStatus::unparseable;
  std::optional<std::vector<TokenTopLogprobs>> logprobs;
  std::int64_t timestamp = 0;  // unix seconds; 0 for synthetic runs
  std::optional<std::string> transport_error;
};

/// Extracts the first balanced JSON object from a completion (code fences
/// and surrounding prose are ignored), validates it against the
/// question's schema, and classifies failures. Never throws: every
/// failure maps onto a status.
ModelResponse parse_response(const Question& question, std::string raw_text);

/// Finds the first generated token that, stripped of quotes and
/// whitespace, equals one of `targets`, and reads each target's logprob
/// from that position's top-k list (absent targets stay empty).
std::vector<std::optional<double>> extract_target_logprobs(
    const std::vector<TokenTopLogprobs>& logprobs,
    std::span<const std::string> targets);

std::string response_to_jsonl(const ModelResponse& response);
ModelResponse response_from_jsonl(const std::string& line);

/// Offline agents that answer like a model would (raw JSON completions).
/// Responses are a pure function of (seed, question id), so runs are
/// byte-identical regardless of ordering or parallelism.
struct SyntheticAgent {
  enum class Kind {
    calibrated_oracle,    // optimal guess, confidence = true probability
    constant_confidence,  // optimal guess, fixed confidence `param`
    noisy_confidence,     // optimal guess, confidence jittered by N(0, param)
    rounding,             // optimal guess, confidence rounded to `param`
  };

  Kind kind = Kind::calibrated_oracle;
  double param = 0.0;
  std::uint64_t seed = 0;

  /// Accepts "calibrated-oracle", "constant-confidence:<c>",
  /// "noisy-confidence:<sigma>", "rounding:<step>".
  static SyntheticAgent from_spec(std::string_view spec, std::uint64_t seed);

  std::string name() const;

  /// Raw completion text; `table` is required for lifeeval questions.
  std::string respond(const Question& question, const LifeTable* table) const;
};

std::vector<ModelResponse> run_synthetic(const SyntheticAgent& agent,
                                         std::span<const Question> questions,
                                         const LifeTable* table);

struct DropCounts {
  size_t unparseable = 0;
  size_t all_zero_confidence = 0;
  size_t hedged = 0;
  size_t refused = 0;
  size_t total() const {
    return unparseable + all_zero_confidence + hedged + refused;
  }
};

struct AlignedRun {
  std::vector<std::string> question_ids;  // sorted; ok across every model
  std::map<std::string, std::vector<ModelResponse>> responses;  // per model
  std::map<std::string, DropCounts> drops;
};

/// Drops non-ok responses, restricts to the intersection of question ids
/// every model answered successfully, and tallies drops by reason. The
/// result does not depend on model iteration order.
AlignedRun clean_and_align(
    const std::map<std::string, std::vector<ModelResponse>>& by_model);

}  // namespace lifeeval
