#pragma once

#include <optional>
#include <span>
#include <variant>

#include "lifeeval/questions.hpp"

namespace lifeeval {

/// One scored completion. `chosen` holds the option index for MCQ items,
/// the asserted truth value for boolean items, and the age guess for
/// lifespan items; HaluEval items choose nothing.
struct ScoredItem {
  std::string question_id;
  TaskKind kind = TaskKind::lifeeval;
  double score = 0.0;
  double stated_confidence = 0.0;
  std::variant<std::monostate, int, bool> chosen;
  std::optional<double> difficulty;  // lifeeval only
  std::optional<int> radius;         // lifeeval only
};

/// Options whose probabilities fall within this distance of the maximum
/// count as tied for the top.
inline constexpr double kTieTolerance = 1e-9;

/// Scores an MCQ or boolean question from normalized per-option
/// probabilities (boolean order: [P(true), P(false)]). A unique argmax
/// scores 1 or 0 against the correct option; when m options tie at the
/// top and the correct one is among them the item scores 1/m.
ScoredItem score_mcq(const Question& question, std::span<const double> probs);

/// Scores a lifespan guess as the conditional probability mass of
/// [guess-r, guess+r]; confidence is recorded as stated.
ScoredItem score_lifeeval(const LifeTable& table, const Question& question,
                          int guess, double confidence);

/// HaluEval items score their injected label; the stated confidence is the
/// model's belief that the candidate answer is correct.
ScoredItem score_halueval(const Question& question, double confidence);

}  // namespace lifeeval
