#include "lifeeval/contamination.hpp"

#include <algorithm>
#include <cctype>
#include <istream>

#include <json.hpp>

namespace lifeeval {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::no_evidence: return "no_evidence";
    case Verdict::weak_evidence: return "weak_evidence";
    case Verdict::strong_evidence: return "strong_evidence";
  }
  return "no_evidence";
}

Verdict verdict_from_string(std::string_view text) {
  if (text == "no_evidence") return Verdict::no_evidence;
  if (text == "weak_evidence") return Verdict::weak_evidence;
  if (text == "strong_evidence") return Verdict::strong_evidence;
  throw std::invalid_argument("unknown verdict: '" + std::string(text) + "'");
}

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

/// Reasoning field of a completion, falling back to the whole text.
std::string reasoning_text(const ModelResponse& response) {
  const size_t start = response.raw_text.find('{');
  if (start != std::string::npos) {
    ordered_json rec =
        ordered_json::parse(response.raw_text.substr(start), nullptr, false);
    if (!rec.is_discarded() && rec.is_object() && rec.contains("Reasoning") &&
        rec["Reasoning"].is_string()) {
      return rec["Reasoning"].get<std::string>();
    }
  }
  return response.raw_text;
}

std::string replace_all(std::string text, std::string_view needle,
                        const std::string& value) {
  size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.replace(pos, needle.size(), value);
    pos += value.size();
  }
  return text;
}

/// Strict parse of the judge's completion into the verdict enum: either a
/// JSON object with a "verdict" field or a bare verdict token.
std::optional<Verdict> parse_judge_output(const std::string& text) {
  const size_t start = text.find('{');
  if (start != std::string::npos) {
    ordered_json rec = ordered_json::parse(text.substr(start), nullptr, false);
    if (!rec.is_discarded() && rec.is_object() && rec.contains("verdict") &&
        rec["verdict"].is_string()) {
      try {
        return verdict_from_string(rec["verdict"].get<std::string>());
      } catch (const std::invalid_argument&) {
        return std::nullopt;
      }
    }
  }
  std::string trimmed;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) trimmed.push_back(c);
  }
  try {
    return verdict_from_string(trimmed);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<bool> keyword_scan(std::span<const ModelResponse> responses,
                               std::span<const std::string> keywords) {
  if (keywords.empty()) {
    throw std::invalid_argument("keyword_scan: empty keyword list");
  }
  std::vector<std::string> lowered;
  lowered.reserve(keywords.size());
  for (const auto& k : keywords) lowered.push_back(lowercase(k));

  std::vector<bool> flags(responses.size(), false);
  for (size_t i = 0; i < responses.size(); ++i) {
    const std::string text = lowercase(reasoning_text(responses[i]));
    flags[i] = std::any_of(lowered.begin(), lowered.end(),
                           [&](const std::string& k) {
                             return text.find(k) != std::string::npos;
                           });
  }
  return flags;
}

std::vector<std::string> load_keywords(std::istream& in) {
  std::vector<std::string> keywords;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const size_t begin = line.find_first_not_of(" \t");
    if (begin == std::string::npos || line[begin] == '#') continue;
    const size_t end = line.find_last_not_of(" \t");
    keywords.push_back(line.substr(begin, end - begin + 1));
  }
  return keywords;
}

std::vector<ContaminationVerdict> judge(
    std::span<const ModelResponse> responses, const JudgeCompletionFn& complete,
    const std::string& rubric_template) {
  if (!complete) {
    throw std::invalid_argument("judge: no completion function configured");
  }
  std::vector<ContaminationVerdict> verdicts;
  verdicts.reserve(responses.size());
  for (const auto& response : responses) {
    ContaminationVerdict row;
    row.question_id = response.question_id;
    row.model = response.model;

    const std::string prompt =
        replace_all(rubric_template, "{reasoning}", reasoning_text(response));
    std::optional<Verdict> verdict;
    std::string failure;
    for (int attempt = 0; attempt < 2 && !verdict; ++attempt) {
      try {
        const std::string output = complete("", prompt);
        verdict = parse_judge_output(output);
        if (!verdict) failure = "judge output did not contain a verdict";
      } catch (const std::exception& e) {
        failure = e.what();
      }
    }
    if (verdict) {
      row.verdict = verdict;
    } else {
      row.error = failure;
    }
    verdicts.push_back(std::move(row));
  }
  return verdicts;
}

std::string verdict_to_jsonl(const ContaminationVerdict& verdict) {
  ordered_json rec;
  rec["question_id"] = verdict.question_id;
  rec["model"] = verdict.model;
  rec["keyword_flagged"] = verdict.keyword_flagged;
  rec["verdict"] = verdict.verdict
                       ? ordered_json(std::string(to_string(*verdict.verdict)))
                       : ordered_json(nullptr);
  if (verdict.error) rec["error"] = *verdict.error;
  return rec.dump();
}

ContaminationVerdict verdict_from_jsonl(const std::string& line) {
  const ordered_json rec = ordered_json::parse(line);
  ContaminationVerdict verdict;
  verdict.question_id = rec.at("question_id").get<std::string>();
  verdict.model = rec.at("model").get<std::string>();
  verdict.keyword_flagged = rec.at("keyword_flagged").get<bool>();
  if (!rec.at("verdict").is_null()) {
    verdict.verdict = verdict_from_string(rec.at("verdict").get<std::string>());
  }
  if (rec.contains("error")) {
    verdict.error = rec.at("error").get<std::string>();
  }
  return verdict;
}

std::map<std::string, std::optional<Verdict>> verdict_index(
    std::span<const ContaminationVerdict> verdicts, std::string_view model) {
  std::map<std::string, std::optional<Verdict>> index;
  for (const auto& v : verdicts) {
    if (v.model == model) index[v.question_id] = v.verdict;
  }
  return index;
}

std::vector<ScoredItem> filter_subset(
    std::span<const ScoredItem> items,
    const std::map<std::string, std::optional<Verdict>>& verdicts,
    const std::set<Verdict>& keep) {
  std::vector<ScoredItem> kept;
  for (const auto& item : items) {
    const auto it = verdicts.find(item.question_id);
    if (it == verdicts.end()) {
      throw std::invalid_argument("filter_subset: no verdict for question '" +
                                  item.question_id + "'");
    }
    if (!it->second) continue;  // judge error row: excluded, not fatal
    if (keep.count(*it->second) > 0) kept.push_back(item);
  }
  return kept;
}

}  // namespace lifeeval
