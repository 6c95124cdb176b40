#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lifeeval/harness.hpp"
#include "lifeeval/scoring.hpp"

namespace lifeeval {

enum class Verdict { no_evidence, weak_evidence, strong_evidence };

std::string_view to_string(Verdict verdict);
Verdict verdict_from_string(std::string_view text);

struct ContaminationVerdict {
  std::string question_id;
  std::string model;
  bool keyword_flagged = false;
  std::optional<Verdict> verdict;    // absent until judged
  std::optional<std::string> error;  // judge output unusable after retry
};

/// Case-insensitive substring scan of each response's reasoning text
/// (the `Reasoning` field when present, the whole completion otherwise).
std::vector<bool> keyword_scan(std::span<const ModelResponse> responses,
                               std::span<const std::string> keywords);

/// One line per keyword; '#' comments and blank lines are skipped.
std::vector<std::string> load_keywords(std::istream& in);

using JudgeCompletionFn =
    std::function<std::string(const std::string& system_text,
                              const std::string& user_text)>;

/// Classifies each response with an LLM judge. The rubric template's
/// `{reasoning}` placeholder receives the response's reasoning text; the
/// judge's output must contain one of the three verdict tokens.
/// Unusable judge output is retried once, then recorded as an error row.
std::vector<ContaminationVerdict> judge(
    std::span<const ModelResponse> responses, const JudgeCompletionFn& complete,
    const std::string& rubric_template);

std::string verdict_to_jsonl(const ContaminationVerdict& verdict);
ContaminationVerdict verdict_from_jsonl(const std::string& line);

/// Verdict lookup for one model: question id -> verdict (empty optional
/// for error rows, which filtered analysis silently excludes).
std::map<std::string, std::optional<Verdict>> verdict_index(
    std::span<const ContaminationVerdict> verdicts, std::string_view model);

/// Keeps items whose verdict is in `keep`. Every item must have a verdict
/// row; error rows drop their item without failing.
std::vector<ScoredItem> filter_subset(
    std::span<const ScoredItem> items,
    const std::map<std::string, std::optional<Verdict>>& verdicts,
    const std::set<Verdict>& keep);

}  // namespace lifeeval
