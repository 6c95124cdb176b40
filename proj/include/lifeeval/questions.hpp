#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lifeeval/actuarial.hpp"

namespace lifeeval {

enum class TaskKind { lifeeval, mcq, boolean_choice, halueval };

std::string_view to_string(TaskKind kind);
TaskKind task_kind_from_string(std::string_view text);

/// Accepted guess-window half-widths for lifespan questions.
inline constexpr int kLifeEvalRadii[] = {1, 5, 10, 20};

struct LifeEvalPayload {
  Sex sex = Sex::male;
  int min_age = 0;
  int radius = 1;
};

struct McqPayload {
  std::string stem;
  std::vector<std::string> options;  // 2..5, labelled A..E in prompts
  int correct_index = 0;
  std::optional<std::string> context;
};

struct BooleanPayload {
  std::string stem;
  bool correct = false;
};

struct HaluevalPayload {
  std::string context;
  std::string stem;
  std::string candidate_answer;
  int label = 0;  // 1 = truthful, 0 = hallucinated
};

struct Question {
  std::string id;
  TaskKind kind = TaskKind::lifeeval;
  std::variant<LifeEvalPayload, McqPayload, BooleanPayload, HaluevalPayload>
      payload;

  const LifeEvalPayload& lifeeval() const {
    return std::get<LifeEvalPayload>(payload);
  }
  const McqPayload& mcq() const { return std::get<McqPayload>(payload); }
  const BooleanPayload& boolean() const {
    return std::get<BooleanPayload>(payload);
  }
  const HaluevalPayload& halueval() const {
    return std::get<HaluevalPayload>(payload);
  }
};

/// Cartesian product {male,female} x [min_age_lo, min_age_hi] x radii,
/// ordered (sex, age, radius) with ids `lifeeval-{sex}-a{age}-r{radius}`.
std::vector<Question> generate_lifeeval(const LifeTable& table, int min_age_lo,
                                        int min_age_hi,
                                        const std::vector<int>& radii);

struct IngestRejection {
  size_t line = 0;
  std::string id;  // empty when the id itself could not be read
  std::string reason;
};

struct IngestResult {
  std::vector<Question> questions;
  std::vector<IngestRejection> rejections;
};

/// Reads one JSON record per line. Malformed records are reported with
/// their line number; well-formed ones are validated against their task
/// schema. When `expected` is set, records of any other task are rejected.
IngestResult ingest_questions(std::istream& in,
                              std::optional<TaskKind> expected = {});

std::string question_to_jsonl(const Question& question);
void write_questions_jsonl(std::ostream& out,
                           const std::vector<Question>& questions);

}  // namespace lifeeval
