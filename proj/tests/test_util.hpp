#pragma once

#include <string>
#include <vector>

#include "lifeeval/questions.hpp"

namespace lifeeval::test {

inline std::string data_dir() { return LIFEEVAL_DATA_DIR; }
inline std::string config_dir() { return LIFEEVAL_CONFIG_DIR; }

inline std::string fixture_path() {
  return data_dir() + "/ssa_period_life_table_2022.csv";
}

inline const LifeTable& fixture_table() {
  static const LifeTable table = LifeTable::load(fixture_path());
  return table;
}

/// Ages 0..2, every q = 0.5.
inline LifeTable toy_half_table() {
  return LifeTable({0.5, 0.5, 0.5}, {0.5, 0.5, 0.5});
}

/// Deaths happen at exactly `death_age`.
inline LifeTable point_mass_table(int max_age, int death_age) {
  std::vector<double> q(max_age + 1, 0.0);
  q[death_age] = 1.0;
  return LifeTable(q, q);
}

inline Question mcq_question(int options, int correct,
                             std::string id = "mcq-1") {
  Question q;
  q.id = std::move(id);
  q.kind = TaskKind::mcq;
  McqPayload payload;
  payload.stem = "stem";
  for (int i = 0; i < options; ++i) {
    payload.options.push_back("option " + std::to_string(i));
  }
  payload.correct_index = correct;
  q.payload = std::move(payload);
  return q;
}

inline Question boolean_question(bool correct, std::string id = "bool-1") {
  Question q;
  q.id = std::move(id);
  q.kind = TaskKind::boolean_choice;
  q.payload = BooleanPayload{"stem", correct};
  return q;
}

inline Question halueval_question(int label, std::string id = "halu-1") {
  Question q;
  q.id = std::move(id);
  q.kind = TaskKind::halueval;
  q.payload = HaluevalPayload{"context", "stem", "candidate", label};
  return q;
}

inline Question lifeeval_question(Sex sex, int min_age, int radius) {
  Question q;
  q.id = "lifeeval-" + std::string(to_string(sex)) + "-a" +
         std::to_string(min_age) + "-r" + std::to_string(radius);
  q.kind = TaskKind::lifeeval;
  q.payload = LifeEvalPayload{sex, min_age, radius};
  return q;
}

}  // namespace lifeeval::test
