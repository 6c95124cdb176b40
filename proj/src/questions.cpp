#include "lifeeval/questions.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

namespace lifeeval {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::lifeeval: return "lifeeval";
    case TaskKind::mcq: return "mcq";
    case TaskKind::boolean_choice: return "boolean";
    case TaskKind::halueval: return "halueval";
  }
  return "unknown";
}

TaskKind task_kind_from_string(std::string_view text) {
  if (text == "lifeeval") return TaskKind::lifeeval;
  if (text == "mcq") return TaskKind::mcq;
  if (text == "boolean") return TaskKind::boolean_choice;
  if (text == "halueval") return TaskKind::halueval;
  throw std::invalid_argument("unknown task kind: '" + std::string(text) + "'");
}

namespace {

bool allowed_radius(int radius) {
  return std::find(std::begin(kLifeEvalRadii), std::end(kLifeEvalRadii),
                   radius) != std::end(kLifeEvalRadii);
}

}  // namespace

std::vector<Question> generate_lifeeval(const LifeTable& table, int min_age_lo,
                                        int min_age_hi,
                                        const std::vector<int>& radii) {
  if (radii.empty()) {
    throw std::invalid_argument("generate_lifeeval: empty radius set");
  }
  if (min_age_lo < 0 || min_age_hi > table.max_age() ||
      min_age_lo > min_age_hi) {
    throw std::invalid_argument("generate_lifeeval: min ages must satisfy 0 <= lo <= hi <= " +
                                std::to_string(table.max_age()));
  }
  for (int radius : radii) {
    if (!allowed_radius(radius)) {
      throw std::invalid_argument("generate_lifeeval: radius " +
                                  std::to_string(radius) +
                                  " not in {1, 5, 10, 20}");
    }
  }

  std::vector<int> sorted_radii = radii;
  std::sort(sorted_radii.begin(), sorted_radii.end());
  sorted_radii.erase(std::unique(sorted_radii.begin(), sorted_radii.end()),
                     sorted_radii.end());

  std::vector<Question> questions;
  questions.reserve(2 * static_cast<size_t>(min_age_hi - min_age_lo + 1) *
                    sorted_radii.size());
  for (Sex sex : {Sex::male, Sex::female}) {
    for (int age = min_age_lo; age <= min_age_hi; ++age) {
      for (int radius : sorted_radii) {
        Question q;
        q.id = "lifeeval-" + std::string(to_string(sex)) + "-a" +
               std::to_string(age) + "-r" + std::to_string(radius);
        q.kind = TaskKind::lifeeval;
        q.payload = LifeEvalPayload{sex, age, radius};
        questions.push_back(std::move(q));
      }
    }
  }
  return questions;
}

namespace {

Question question_from_json(const ordered_json& rec) {
  Question q;
  q.id = rec.at("id").get<std::string>();
  if (q.id.empty()) throw std::invalid_argument("empty id");
  q.kind = task_kind_from_string(rec.at("task").get<std::string>());
  switch (q.kind) {
    case TaskKind::lifeeval: {
      LifeEvalPayload p;
      p.sex = sex_from_string(rec.at("sex").get<std::string>());
      p.min_age = rec.at("min_age").get<int>();
      p.radius = rec.at("radius").get<int>();
      if (p.min_age < 0) throw std::invalid_argument("min_age must be >= 0");
      if (!allowed_radius(p.radius)) {
        throw std::invalid_argument("radius " + std::to_string(p.radius) +
                                    " not in {1, 5, 10, 20}");
      }
      q.payload = std::move(p);
      break;
    }
    case TaskKind::mcq: {
      McqPayload p;
      p.stem = rec.at("question").get<std::string>();
      p.options = rec.at("options").get<std::vector<std::string>>();
      p.correct_index = rec.at("answer_index").get<int>();
      if (rec.contains("context") && !rec.at("context").is_null()) {
        p.context = rec.at("context").get<std::string>();
      }
      if (p.options.size() < 2 || p.options.size() > 5) {
        throw std::invalid_argument("option count " +
                                    std::to_string(p.options.size()) +
                                    " outside 2..5");
      }
      if (p.correct_index < 0 ||
          p.correct_index >= static_cast<int>(p.options.size())) {
        throw std::invalid_argument("answer_index " +
                                    std::to_string(p.correct_index) +
                                    " out of range");
      }
      q.payload = std::move(p);
      break;
    }
    case TaskKind::boolean_choice: {
      BooleanPayload p;
      p.stem = rec.at("question").get<std::string>();
      p.correct = rec.at("answer").get<bool>();
      q.payload = std::move(p);
      break;
    }
    case TaskKind::halueval: {
      HaluevalPayload p;
      p.context = rec.at("context").get<std::string>();
      p.stem = rec.at("question").get<std::string>();
      p.candidate_answer = rec.at("candidate_answer").get<std::string>();
      p.label = rec.at("label").get<int>();
      if (p.label != 0 && p.label != 1) {
        throw std::invalid_argument("label must be 0 or 1");
      }
      q.payload = std::move(p);
      break;
    }
  }
  return q;
}

}  // namespace

IngestResult ingest_questions(std::istream& in,
                              std::optional<TaskKind> expected) {
  IngestResult result;
  std::unordered_set<std::string> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    ordered_json rec = ordered_json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      result.rejections.push_back({line_no, "", "invalid JSON record"});
      continue;
    }
    std::string id = rec.value("id", "");
    try {
      Question q = question_from_json(rec);
      if (expected && q.kind != *expected) {
        throw std::invalid_argument(
            "task mismatch: expected '" + std::string(to_string(*expected)) +
            "', got '" + std::string(to_string(q.kind)) + "'");
      }
      if (!seen.insert(q.id).second) {
        throw std::invalid_argument("duplicate id '" + q.id + "'");
      }
      result.questions.push_back(std::move(q));
    } catch (const std::exception& e) {
      result.rejections.push_back({line_no, id, e.what()});
    }
  }
  return result;
}

std::string question_to_jsonl(const Question& question) {
  ordered_json rec;
  rec["id"] = question.id;
  rec["task"] = std::string(to_string(question.kind));
  switch (question.kind) {
    case TaskKind::lifeeval: {
      const auto& p = question.lifeeval();
      rec["sex"] = std::string(to_string(p.sex));
      rec["min_age"] = p.min_age;
      rec["radius"] = p.radius;
      break;
    }
    case TaskKind::mcq: {
      const auto& p = question.mcq();
      rec["question"] = p.stem;
      rec["options"] = p.options;
      rec["answer_index"] = p.correct_index;
      if (p.context) rec["context"] = *p.context;
      break;
    }
    case TaskKind::boolean_choice: {
      const auto& p = question.boolean();
      rec["question"] = p.stem;
      rec["answer"] = p.correct;
      break;
    }
    case TaskKind::halueval: {
      const auto& p = question.halueval();
      rec["context"] = p.context;
      rec["question"] = p.stem;
      rec["candidate_answer"] = p.candidate_answer;
      rec["label"] = p.label;
      break;
    }
  }
  return rec.dump();
}

void write_questions_jsonl(std::ostream& out,
                           const std::vector<Question>& questions) {
  for (const auto& q : questions) out << question_to_jsonl(q) << '\n';
}

}  // namespace lifeeval
