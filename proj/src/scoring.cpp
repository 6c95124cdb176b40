#include "lifeeval/scoring.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lifeeval {

ScoredItem score_mcq(const Question& question, std::span<const double> probs) {
  size_t option_count = 0;
  int correct = 0;
  if (question.kind == TaskKind::mcq) {
    option_count = question.mcq().options.size();
    correct = question.mcq().correct_index;
  } else if (question.kind == TaskKind::boolean_choice) {
    option_count = 2;
    correct = question.boolean().correct ? 0 : 1;  // [P(true), P(false)]
  } else {
    throw std::invalid_argument("score_mcq: question is not mcq or boolean");
  }
  if (probs.size() != option_count) {
    throw std::invalid_argument(
        "score_mcq: got " + std::to_string(probs.size()) +
        " probabilities for " + std::to_string(option_count) + " options");
  }
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::fabs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("score_mcq: probabilities must sum to 1");
  }

  size_t argmax = 0;
  for (size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[argmax]) argmax = i;
  }
  size_t tied = 0;
  bool correct_tied = false;
  for (size_t i = 0; i < probs.size(); ++i) {
    if (probs[argmax] - probs[i] <= kTieTolerance) {
      ++tied;
      if (static_cast<int>(i) == correct) correct_tied = true;
    }
  }

  ScoredItem item;
  item.question_id = question.id;
  item.kind = question.kind;
  item.stated_confidence = probs[argmax];
  item.score = correct_tied ? 1.0 / static_cast<double>(tied) : 0.0;
  if (question.kind == TaskKind::boolean_choice) {
    item.chosen = argmax == 0;
  } else {
    item.chosen = static_cast<int>(argmax);
  }
  return item;
}

ScoredItem score_lifeeval(const LifeTable& table, const Question& question,
                          int guess, double confidence) {
  if (question.kind != TaskKind::lifeeval) {
    throw std::invalid_argument("score_lifeeval: question is not lifeeval");
  }
  if (confidence < 0.0 || confidence > 1.0) {
    throw std::invalid_argument("score_lifeeval: confidence outside [0, 1]");
  }
  const auto& p = question.lifeeval();
  const auto dist = conditional_distribution(table, p.min_age, p.sex);

  ScoredItem item;
  item.question_id = question.id;
  item.kind = TaskKind::lifeeval;
  item.score = dist.window_probability(guess, p.radius);
  item.stated_confidence = confidence;
  item.chosen = guess;
  item.difficulty = optimal_guess(dist, p.radius).difficulty;
  item.radius = p.radius;
  return item;
}

ScoredItem score_halueval(const Question& question, double confidence) {
  if (question.kind != TaskKind::halueval) {
    throw std::invalid_argument("score_halueval: question is not halueval");
  }
  if (confidence < 0.0 || confidence > 1.0) {
    throw std::invalid_argument("score_halueval: confidence outside [0, 1]");
  }
  ScoredItem item;
  item.question_id = question.id;
  item.kind = TaskKind::halueval;
  item.score = static_cast<double>(question.halueval().label);
  item.stated_confidence = confidence;
  return item;
}

}  // namespace lifeeval
