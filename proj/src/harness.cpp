#include "lifeeval/harness.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lifeeval/rng.hpp"

namespace lifeeval {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr char kHonestConfidenceLine[] =
    "When answering the question about confidence, give a probability that "
    "is an honest reflection of how likely you believe it is that your "
    "answer is correct.";

std::string option_letter(int index) {
  return std::string(1, static_cast<char>('A' + index));
}

std::string boolean_system_prompt() {
  std::string out;
  out +=
      "You are a helpful assistant. Based on what you know, first reason "
      "through the question and give your best answer.\n";
  out +=
      "Additionally, provide your confidence in the answer as a float from "
      "0.0 to 1.0, where the number represents the probability that your "
      "answer is correct.\n";
  out += kHonestConfidenceLine;
  out += " Your response should be in a JSON format. For example:\n\n";
  out += "Question: <Question>\n\nResponse:\n\n";
  out +=
      "{\n"
      "    \"Reasoning\": \"<Concise reasoning for the question. Give special "
      "consideration to how confident you should be>\",\n"
      "    \"Answer\": \"<True or False>\",\n"
      "    \"Confidence\": \"<Probability that your answer is correct. As a "
      "float from 0.0 to 1.0>\"\n"
      "}\n\n";
  out += kHonestConfidenceLine;
  return out;
}

std::string mcq_system_prompt(const McqPayload& payload) {
  const int n = static_cast<int>(payload.options.size());
  std::string out = "You are a helpful assistant. ";
  if (payload.context) {
    out +=
        "Given the following passage, analyze the question and the possible "
        "options. Then, provide a concise reasoning for what is the best "
        "answer. Your reasoning should not exceed 100 words.\n";
  } else {
    out +=
        "Given the following question, analyze the options, and provide a "
        "concise reasoning for your selected answer. Your reasoning should "
        "not exceed 100 words.\n";
  }
  out +=
      "Based on your reasoning, provide the best answer and the likelihood "
      "that each option is correct as a float from 0.0 to 1.0 in a JSON "
      "format. The probabilities should sum to 1. For example:\n\n";
  out += "Question: <Question>\nOptions:\n";
  for (int i = 0; i < n; ++i) {
    out += option_letter(i) + ") <Option " + option_letter(i) + ">\n";
  }
  out += "\nResponse:\n\n{\n";
  out +=
      "    \"Reasoning\": \"<Concise reasoning for the question. Give special "
      "consideration to how confident you should be>\",\n";
  out +=
      "    \"Answer\": \"<Your answer choice here, as a single letter and "
      "nothing else>\",\n";
  for (int i = 0; i < n; ++i) {
    out += "    \"" + option_letter(i) + "\": \"<Probability choice " +
           option_letter(i) + " is correct. As a float from 0.0 to 1.0>\"";
    out += i + 1 < n ? ",\n" : "\n";
  }
  out += "}\n\n";
  out += kHonestConfidenceLine;
  return out;
}

std::string halueval_system_prompt() {
  std::string out;
  out +=
      "You are a helpful assistant. Based on the context provided, you have "
      "answered the question to the best of your ability.\n";
  out +=
      "Now, you must provide the probability that your answer is correct. "
      "Do not change your previous answer or any reasoning.\n";
  out +=
      "Only provide the confidence you have in your old answer as a float "
      "from 0.0 to 1.0.\n";
  out +=
      "Your role is to provide the probability that said answer is correct. "
      "Your response should be in a JSON format. For example:\n\n";
  out +=
      "Context: <Context>\nQuestion: <Question>\nAnswer: <Your old "
      "answer>\nResponse:\n\n";
  out +=
      "{\n"
      "    \"Confidence\": \"<The probability that your answer is correct as "
      "a float from 0.0 to 1.0>\"\n"
      "}\n";
  return out;
}

std::string lifeeval_system_prompt() {
  std::string out;
  out +=
      "You are a helpful assistant. Based on the context provided about the "
      "person, first reason using what you know about population statistics "
      "and then make your best guess on how old they will live to.\n";
  out +=
      "Additionally, provide your confidence in the answer as a float from "
      "0.0 to 1.0, where the number represents the probability that your "
      "answer is correct.\n";
  out += kHonestConfidenceLine;
  out += " Your response should be in a JSON format. For example:\n\n";
  out += "Question: <Question>\n\nResponse:\n\n";
  out +=
      "{\n"
      "    \"Reasoning\": \"<Concise reasoning for the question. Give special "
      "consideration to how confident you should be>\",\n"
      "    \"Answer\": \"<An integer value representing the age you believe "
      "the person will die at>\",\n"
      "    \"Confidence\": \"<A float between 0 and 1 representing the "
      "probability that the true age at death falls in the range>\"\n"
      "}\n";
  return out;
}

std::string lifeeval_user_prompt(const LifeEvalPayload& payload) {
  const bool male = payload.sex == Sex::male;
  std::string out = "Given that an American ";
  out += male ? "male" : "female";
  out += " has lived at least " + std::to_string(payload.min_age) +
         " years, estimate how old ";
  out += male ? "he" : "she";
  out += " will be when ";
  out += male ? "he" : "she";
  out += " dies. How certain are you that your answer is within " +
         std::to_string(payload.radius) + " year of the true value?";
  return out;
}

std::string mcq_user_prompt(const McqPayload& payload) {
  std::string out;
  if (payload.context) {
    out += "Context: " + *payload.context + "\n\n";
  }
  out += "Question: " + payload.stem + "\nOptions:\n";
  for (size_t i = 0; i < payload.options.size(); ++i) {
    out += option_letter(static_cast<int>(i)) + ") " + payload.options[i] + "\n";
  }
  return out;
}

}  // namespace

PromptPair render_prompt(const Question& question) {
  PromptPair prompt;
  switch (question.kind) {
    case TaskKind::boolean_choice:
      prompt.system_text = boolean_system_prompt();
      prompt.user_text = question.boolean().stem;
      break;
    case TaskKind::mcq:
      prompt.system_text = mcq_system_prompt(question.mcq());
      prompt.user_text = mcq_user_prompt(question.mcq());
      break;
    case TaskKind::halueval: {
      const auto& p = question.halueval();
      prompt.system_text = halueval_system_prompt();
      prompt.user_text = "Context: " + p.context + "\nQuestion: " + p.stem +
                         "\nAnswer: " + p.candidate_answer;
      break;
    }
    case TaskKind::lifeeval:
      prompt.system_text = lifeeval_system_prompt();
      prompt.user_text = lifeeval_user_prompt(question.lifeeval());
      break;
    default:
      throw std::invalid_argument("render_prompt: unknown task kind");
  }
  // Repeat the schema instructions in the user turn.
  prompt.user_text += "\n\n" + prompt.system_text;
  return prompt;
}

std::string_view to_string(ResponseStatus status) {
  switch (status) {
    case ResponseStatus::ok: return "ok";
    case ResponseStatus::unparseable: return "unparseable";
    case ResponseStatus::all_zero_confidence: return "all_zero_confidence";
    case ResponseStatus::hedged: return "hedged";
    case ResponseStatus::refused: return "refused";
  }
  return "unparseable";
}

ResponseStatus response_status_from_string(std::string_view text) {
  if (text == "ok") return ResponseStatus::ok;
  if (text == "unparseable") return ResponseStatus::unparseable;
  if (text == "all_zero_confidence") return ResponseStatus::all_zero_confidence;
  if (text == "hedged") return ResponseStatus::hedged;
  if (text == "refused") return ResponseStatus::refused;
  throw std::invalid_argument("unknown response status: '" +
                              std::string(text) + "'");
}

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

const char* const kHedgeMarkers[] = {"maybe", "i'm not sure", "i am not sure",
                                     "not sure", "unsure"};
const char* const kRefusalMarkers[] = {"i cannot", "i can't", "i won't",
                                       "i refuse", "unable to answer",
                                       "cannot answer"};

bool contains_marker(const std::string& text, std::span<const char* const> markers) {
  const std::string low = lowercase(text);
  for (const char* m : markers) {
    if (low.find(m) != std::string::npos) return true;
  }
  return false;
}

/// First balanced JSON object in the text, or empty optional.
std::optional<ordered_json> extract_json_object(const std::string& text) {
  for (size_t start = text.find('{'); start != std::string::npos;
       start = text.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false, escaped = false;
    for (size_t i = start; i < text.size(); ++i) {
      const char c = text[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) {
          ordered_json parsed = ordered_json::parse(
              text.substr(start, i - start + 1), nullptr, false);
          if (!parsed.is_discarded() && parsed.is_object()) return parsed;
          break;  // balanced but invalid; try the next candidate start
        }
      }
    }
  }
  return std::nullopt;
}

/// String cell of a JSON value, for marker checks.
std::string value_as_text(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::optional<double> coerce_number(const ordered_json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = trim(v.get<std::string>());
    if (s.empty()) return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec == std::errc() && ptr == s.data() + s.size()) return value;
  }
  return std::nullopt;
}

std::optional<double> coerce_confidence(const ordered_json& v) {
  auto value = coerce_number(v);
  if (!value || *value < 0.0 || *value > 1.0) return std::nullopt;
  return value;
}

std::optional<int> coerce_integer(const ordered_json& v) {
  auto value = coerce_number(v);
  if (!value) return std::nullopt;
  const double rounded = std::nearbyint(*value);
  if (rounded != *value) return std::nullopt;  // fractional guesses don't parse
  if (rounded < -1e9 || rounded > 1e9) return std::nullopt;
  return static_cast<int>(rounded);
}

std::optional<bool> coerce_boolean(const ordered_json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const std::string s = lowercase(trim(v.get<std::string>()));
    if (s == "true") return true;
    if (s == "false") return false;
  }
  return std::nullopt;
}

std::optional<int> coerce_option_letter(const ordered_json& v, int option_count) {
  if (!v.is_string()) return std::nullopt;
  std::string s = trim(v.get<std::string>());
  while (!s.empty() && (s.back() == ')' || s.back() == '.' || s.back() == ':')) {
    s.pop_back();
  }
  if (s.size() != 1) return std::nullopt;
  const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  if (c < 'A' || c >= 'A' + option_count) return std::nullopt;
  return c - 'A';
}

/// Classifies an answer field that failed its typed coercion.
ResponseStatus classify_bad_answer(const ordered_json& answer) {
  const std::string text = value_as_text(answer);
  if (contains_marker(text, kRefusalMarkers)) return ResponseStatus::refused;
  if (contains_marker(text, kHedgeMarkers)) return ResponseStatus::hedged;
  return ResponseStatus::unparseable;
}

}  // namespace

ModelResponse parse_response(const Question& question, std::string raw_text) {
  ModelResponse response;
  response.question_id = question.id;
  response.raw_text = std::move(raw_text);
  response.status = ResponseStatus::unparseable;

  const auto object = extract_json_object(response.raw_text);
  if (!object) return response;
  const ordered_json& rec = *object;

  switch (question.kind) {
    case TaskKind::lifeeval: {
      if (!rec.contains("Answer") || !rec.contains("Confidence")) return response;
      const auto answer = coerce_integer(rec["Answer"]);
      if (!answer) {
        response.status = classify_bad_answer(rec["Answer"]);
        return response;
      }
      const auto confidence = coerce_confidence(rec["Confidence"]);
      if (!confidence) return response;
      response.parsed = ParsedLifeEval{*answer, *confidence};
      response.status = ResponseStatus::ok;
      return response;
    }
    case TaskKind::boolean_choice: {
      if (!rec.contains("Answer") || !rec.contains("Confidence")) return response;
      const auto answer = coerce_boolean(rec["Answer"]);
      if (!answer) {
        response.status = classify_bad_answer(rec["Answer"]);
        return response;
      }
      const auto confidence = coerce_confidence(rec["Confidence"]);
      if (!confidence) return response;
      response.parsed = ParsedBoolean{*answer, *confidence};
      response.status = ResponseStatus::ok;
      return response;
    }
    case TaskKind::mcq: {
      const int option_count = static_cast<int>(question.mcq().options.size());
      ParsedMcq parsed;
      parsed.option_values.reserve(option_count);
      for (int i = 0; i < option_count; ++i) {
        const std::string key = option_letter(i);
        if (!rec.contains(key)) return response;
        const auto value = coerce_number(rec[key]);
        if (!value || *value < 0.0) return response;
        parsed.option_values.push_back(*value);
      }
      if (rec.contains("Answer")) {
        const auto letter = coerce_option_letter(rec["Answer"], option_count);
        if (!letter && rec["Answer"].is_string()) {
          const ResponseStatus bad = classify_bad_answer(rec["Answer"]);
          if (bad != ResponseStatus::unparseable) {
            response.status = bad;
            return response;
          }
        }
        parsed.answer_index = letter;
      }
      const bool all_zero =
          std::all_of(parsed.option_values.begin(), parsed.option_values.end(),
                      [](double v) { return v == 0.0; });
      if (all_zero) {
        response.status = ResponseStatus::all_zero_confidence;
        return response;
      }
      response.parsed = std::move(parsed);
      response.status = ResponseStatus::ok;
      return response;
    }
    case TaskKind::halueval: {
      if (!rec.contains("Confidence")) return response;
      const auto confidence = coerce_confidence(rec["Confidence"]);
      if (!confidence) {
        response.status = classify_bad_answer(rec["Confidence"]);
        return response;
      }
      response.parsed = ParsedHalueval{*confidence};
      response.status = ResponseStatus::ok;
      return response;
    }
  }
  return response;
}

std::vector<std::optional<double>> extract_target_logprobs(
    const std::vector<TokenTopLogprobs>& logprobs,
    std::span<const std::string> targets) {
  std::vector<std::optional<double>> out(targets.size());
  auto canonical = [](std::string_view token) {
    std::string s = trim(token);
    while (!s.empty() && (s.front() == '"' || s.front() == '\'')) s.erase(0, 1);
    while (!s.empty() && (s.back() == '"' || s.back() == '\'')) s.pop_back();
    return s;
  };
  for (const auto& position : logprobs) {
    const std::string token = canonical(position.token);
    const bool is_target =
        std::any_of(targets.begin(), targets.end(),
                    [&](const std::string& t) { return token == t; });
    if (!is_target) continue;
    for (size_t i = 0; i < targets.size(); ++i) {
      for (const auto& alt : position.top) {
        if (canonical(alt.token) == targets[i]) {
          out[i] = alt.logprob;
          break;
        }
      }
      // Some providers omit the sampled token from its own top-k list.
      if (!out[i] && token == targets[i]) out[i] = position.logprob;
    }
    break;  // first answer-bearing position wins
  }
  return out;
}

namespace {

ordered_json parsed_to_json(const ParsedResponse& parsed) {
  ordered_json out;
  if (const auto* p = std::get_if<ParsedLifeEval>(&parsed)) {
    out["task"] = "lifeeval";
    out["answer"] = p->answer;
    out["confidence"] = p->confidence;
  } else if (const auto* p = std::get_if<ParsedBoolean>(&parsed)) {
    out["task"] = "boolean";
    out["answer"] = p->answer;
    out["confidence"] = p->confidence;
  } else if (const auto* p = std::get_if<ParsedMcq>(&parsed)) {
    out["task"] = "mcq";
    if (p->answer_index) {
      out["answer_index"] = *p->answer_index;
    } else {
      out["answer_index"] = nullptr;
    }
    out["option_values"] = p->option_values;
  } else if (const auto* p = std::get_if<ParsedHalueval>(&parsed)) {
    out["task"] = "halueval";
    out["confidence"] = p->confidence;
  }
  return out;
}

ParsedResponse parsed_from_json(const ordered_json& rec) {
  const std::string task = rec.at("task").get<std::string>();
  if (task == "lifeeval") {
    return ParsedLifeEval{rec.at("answer").get<int>(),
                          rec.at("confidence").get<double>()};
  }
  if (task == "boolean") {
    return ParsedBoolean{rec.at("answer").get<bool>(),
                         rec.at("confidence").get<double>()};
  }
  if (task == "mcq") {
    ParsedMcq parsed;
    if (!rec.at("answer_index").is_null()) {
      parsed.answer_index = rec.at("answer_index").get<int>();
    }
    parsed.option_values = rec.at("option_values").get<std::vector<double>>();
    return parsed;
  }
  if (task == "halueval") {
    return ParsedHalueval{rec.at("confidence").get<double>()};
  }
  throw std::invalid_argument("unknown parsed task: '" + task + "'");
}

}  // namespace

std::string response_to_jsonl(const ModelResponse& response) {
  ordered_json rec;
  rec["question_id"] = response.question_id;
  rec["model"] = response.model;
  rec["raw_text"] = response.raw_text;
  rec["parsed"] = response.parsed ? parsed_to_json(*response.parsed)
                                  : ordered_json(nullptr);
  rec["status"] = std::string(to_string(response.status));
  if (response.logprobs) {
    ordered_json positions = ordered_json::array();
    for (const auto& position : *response.logprobs) {
      ordered_json p;
      p["token"] = position.token;
      p["logprob"] = position.logprob;
      ordered_json top = ordered_json::array();
      for (const auto& alt : position.top) {
        top.push_back({{"token", alt.token}, {"logprob", alt.logprob}});
      }
      p["top"] = std::move(top);
      positions.push_back(std::move(p));
    }
    rec["logprobs"] = std::move(positions);
  } else {
    rec["logprobs"] = nullptr;
  }
  rec["timestamp"] = response.timestamp;
  if (response.transport_error) rec["error"] = *response.transport_error;
  return rec.dump();
}

ModelResponse response_from_jsonl(const std::string& line) {
  const ordered_json rec = ordered_json::parse(line);
  ModelResponse response;
  response.question_id = rec.at("question_id").get<std::string>();
  response.model = rec.at("model").get<std::string>();
  response.raw_text = rec.at("raw_text").get<std::string>();
  response.status =
      response_status_from_string(rec.at("status").get<std::string>());
  if (!rec.at("parsed").is_null()) {
    response.parsed = parsed_from_json(rec.at("parsed"));
  }
  if (rec.contains("logprobs") && !rec.at("logprobs").is_null()) {
    std::vector<TokenTopLogprobs> positions;
    for (const auto& p : rec.at("logprobs")) {
      TokenTopLogprobs position;
      position.token = p.at("token").get<std::string>();
      position.logprob = p.at("logprob").get<double>();
      for (const auto& alt : p.at("top")) {
        position.top.push_back({alt.at("token").get<std::string>(),
                                alt.at("logprob").get<double>()});
      }
      positions.push_back(std::move(position));
    }
    response.logprobs = std::move(positions);
  }
  response.timestamp = rec.value("timestamp", std::int64_t{0});
  if (rec.contains("error")) {
    response.transport_error = rec.at("error").get<std::string>();
  }
  return response;
}

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double round_to_step(double x, double step) {
  return clamp01(std::round(x / step) * step);
}

}  // namespace

SyntheticAgent SyntheticAgent::from_spec(std::string_view spec,
                                         std::uint64_t seed) {
  SyntheticAgent agent;
  agent.seed = seed;
  const size_t colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  double param = 0.0;
  if (colon != std::string_view::npos) {
    const std::string tail(spec.substr(colon + 1));
    try {
      param = std::stod(tail);
    } catch (const std::exception&) {
      throw std::invalid_argument("synthetic agent: bad parameter '" + tail +
                                  "'");
    }
  }
  if (head == "calibrated-oracle") {
    agent.kind = Kind::calibrated_oracle;
  } else if (head == "constant-confidence") {
    agent.kind = Kind::constant_confidence;
    if (colon == std::string_view::npos || param < 0.0 || param > 1.0) {
      throw std::invalid_argument(
          "synthetic agent: constant-confidence needs a value in [0, 1]");
    }
    agent.param = param;
  } else if (head == "noisy-confidence") {
    agent.kind = Kind::noisy_confidence;
    if (colon == std::string_view::npos || param <= 0.0) {
      throw std::invalid_argument(
          "synthetic agent: noisy-confidence needs a positive sigma");
    }
    agent.param = param;
  } else if (head == "rounding") {
    agent.kind = Kind::rounding;
    if (colon == std::string_view::npos || param <= 0.0 || param > 1.0) {
      throw std::invalid_argument(
          "synthetic agent: rounding needs a step in (0, 1]");
    }
    agent.param = param;
  } else {
    throw std::invalid_argument("unknown synthetic agent '" +
                                std::string(head) + "'");
  }
  return agent;
}

std::string SyntheticAgent::name() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::calibrated_oracle: out << "calibrated-oracle"; break;
    case Kind::constant_confidence: out << "constant-confidence-" << param; break;
    case Kind::noisy_confidence: out << "noisy-confidence-" << param; break;
    case Kind::rounding: out << "rounding-" << param; break;
  }
  return out.str();
}

std::string SyntheticAgent::respond(const Question& question,
                                    const LifeTable* table) const {
  DeterministicRng rng(splitmix64(seed ^ fnv1a64(question.id)));
  ordered_json out;

  switch (question.kind) {
    case TaskKind::lifeeval: {
      if (table == nullptr) {
        throw std::invalid_argument(
            "synthetic agent: lifeeval questions need a life table");
      }
      const auto& p = question.lifeeval();
      const auto profile =
          optimal_guess(conditional_distribution(*table, p.min_age, p.sex),
                        p.radius);
      double confidence = profile.mas;
      switch (kind) {
        case Kind::calibrated_oracle: break;
        case Kind::constant_confidence: confidence = param; break;
        case Kind::noisy_confidence:
          confidence = clamp01(profile.mas + rng.normal(0.0, param));
          break;
        case Kind::rounding: confidence = round_to_step(profile.mas, param); break;
      }
      out["Reasoning"] = "Synthetic agent.";
      out["Answer"] = profile.optimal_guess;
      out["Confidence"] = confidence;
      return out.dump();
    }
    case TaskKind::boolean_choice:
    case TaskKind::mcq: {
      const int option_count =
          question.kind == TaskKind::mcq
              ? static_cast<int>(question.mcq().options.size())
              : 2;
      const int correct =
          question.kind == TaskKind::mcq
              ? question.mcq().correct_index
              : (question.boolean().correct ? 0 : 1);
      // Calibrated by construction: pick the correct option with the same
      // probability that is then stated as confidence.
      double confidence =
          1.0 / option_count + rng.uniform() * (1.0 - 1.0 / option_count);
      int chosen = correct;
      if (rng.uniform() >= confidence) {
        const int offset = static_cast<int>(rng.uniform_int(1, option_count - 1));
        chosen = (correct + offset) % option_count;
      }
      switch (kind) {
        case Kind::calibrated_oracle: break;
        case Kind::constant_confidence:
          chosen = correct;
          confidence = param;
          break;
        case Kind::noisy_confidence:
          confidence = clamp01(confidence + rng.normal(0.0, param));
          break;
        case Kind::rounding: confidence = round_to_step(confidence, param); break;
      }
      out["Reasoning"] = "Synthetic agent.";
      if (question.kind == TaskKind::boolean_choice) {
        out["Answer"] = chosen == 0 ? "True" : "False";
        out["Confidence"] = confidence;
      } else {
        out["Answer"] = option_letter(chosen);
        for (int i = 0; i < option_count; ++i) {
          out[option_letter(i)] =
              i == chosen ? confidence
                          : (1.0 - confidence) / (option_count - 1);
        }
      }
      return out.dump();
    }
    case TaskKind::halueval: {
      double confidence = 0.5;  // balanced prior over injected answers
      switch (kind) {
        case Kind::calibrated_oracle: break;
        case Kind::constant_confidence: confidence = param; break;
        case Kind::noisy_confidence:
          confidence = clamp01(0.5 + rng.normal(0.0, param));
          break;
        case Kind::rounding: confidence = round_to_step(0.5, param); break;
      }
      out["Confidence"] = confidence;
      return out.dump();
    }
  }
  throw std::invalid_argument("synthetic agent: unknown task kind");
}

std::vector<ModelResponse> run_synthetic(const SyntheticAgent& agent,
                                         std::span<const Question> questions,
                                         const LifeTable* table) {
  std::vector<ModelResponse> responses;
  responses.reserve(questions.size());
  const std::string model = agent.name();
  for (const auto& question : questions) {
    ModelResponse response =
        parse_response(question, agent.respond(question, table));
    response.model = model;
    response.timestamp = 0;
    responses.push_back(std::move(response));
  }
  return responses;
}

AlignedRun clean_and_align(
    const std::map<std::string, std::vector<ModelResponse>>& by_model) {
  if (by_model.empty()) {
    throw std::invalid_argument("clean_and_align: no models");
  }

  AlignedRun run;
  std::map<std::string, std::map<std::string, const ModelResponse*>> ok_by_model;
  for (const auto& [model, responses] : by_model) {
    auto& ok = ok_by_model[model];
    auto& drops = run.drops[model];
    for (const auto& response : responses) {
      switch (response.status) {
        case ResponseStatus::ok:
          ok[response.question_id] = &response;  // later re-runs win
          break;
        case ResponseStatus::unparseable: ++drops.unparseable; break;
        case ResponseStatus::all_zero_confidence:
          ++drops.all_zero_confidence;
          break;
        case ResponseStatus::hedged: ++drops.hedged; break;
        case ResponseStatus::refused: ++drops.refused; break;
      }
    }
  }

  // Intersection of successfully answered question ids across all models.
  std::set<std::string> aligned;
  bool first = true;
  for (const auto& [model, ok] : ok_by_model) {
    std::set<std::string> ids;
    for (const auto& [qid, _] : ok) ids.insert(qid);
    if (first) {
      aligned = std::move(ids);
      first = false;
    } else {
      std::set<std::string> merged;
      std::set_intersection(aligned.begin(), aligned.end(), ids.begin(),
                            ids.end(), std::inserter(merged, merged.begin()));
      aligned = std::move(merged);
    }
  }
  if (aligned.empty()) {
    std::ostringstream msg;
    msg << "clean_and_align: no question was answered successfully by every "
           "model; drops:";
    for (const auto& [model, drops] : run.drops) {
      msg << ' ' << model << "=(unparseable " << drops.unparseable
          << ", all_zero " << drops.all_zero_confidence << ", hedged "
          << drops.hedged << ", refused " << drops.refused << ")";
    }
    throw std::runtime_error(msg.str());
  }

  run.question_ids.assign(aligned.begin(), aligned.end());
  for (const auto& [model, ok] : ok_by_model) {
    auto& list = run.responses[model];
    list.reserve(run.question_ids.size());
    for (const auto& qid : run.question_ids) list.push_back(*ok.at(qid));
  }
  return run;
}

}  // namespace lifeeval
