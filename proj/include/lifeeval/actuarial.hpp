#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lifeeval {

enum class Sex { male, female };

std::string_view to_string(Sex sex);
Sex sex_from_string(std::string_view text);

/// Raised when tabular input fails validation; the message names the
/// offending row and column.
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Period life table: one-year death probabilities q by single year of
/// age and sex, ages 0..max_age with no gaps.
class LifeTable {
 public:
  LifeTable(std::vector<double> q_male, std::vector<double> q_female);

  /// Parses CSV with header `age,q_male,q_female`, ages contiguous from 0.
  static LifeTable parse_csv(std::istream& in);
  static LifeTable load(const std::string& path);

  int max_age() const noexcept { return static_cast<int>(q_male_.size()) - 1; }
  double q(int age, Sex sex) const;

 private:
  std::vector<double> q_male_;
  std::vector<double> q_female_;
};

/// Distribution of age at death conditioned on having survived to
/// `min_age`. Mass that the table would place past `max_age` is collapsed
/// into the `max_age` cell, so the pmf always sums to 1.
class ConditionalDeathDistribution {
 public:
  ConditionalDeathDistribution(const LifeTable& table, int min_age, Sex sex);

  int min_age() const noexcept { return min_age_; }
  int max_age() const noexcept { return max_age_; }
  Sex sex() const noexcept { return sex_; }

  /// P(die at `age` | lived to min_age); zero outside [min_age, max_age].
  double pmf(int age) const noexcept;

  /// S_age: P(live to `age` | lived to min_age), for min_age <= age <= max_age.
  double survival(int age) const;

  /// Total mass in [guess-radius, guess+radius] clamped to the support.
  double window_probability(int guess, int radius) const;

 private:
  int min_age_;
  int max_age_;
  Sex sex_;
  std::vector<double> pmf_;       // index 0 == min_age
  std::vector<double> survival_;  // index 0 == min_age
  std::vector<double> cum_;       // cum_[i] = sum of pmf_[0..i-1]
};

/// Per-question difficulty: the best attainable window probability (MAS)
/// and the guess achieving it.
struct DifficultyProfile {
  int min_age = 0;
  Sex sex = Sex::male;
  int radius = 0;
  int optimal_guess = 0;
  double mas = 0.0;
  double difficulty = 0.0;  // 1 - mas
};

ConditionalDeathDistribution conditional_distribution(const LifeTable& table,
                                                      int min_age, Sex sex);

double window_probability(const ConditionalDeathDistribution& dist, int guess,
                          int radius);

/// Scans every guess in [min_age, max_age]; ties break to the smallest.
DifficultyProfile optimal_guess(const ConditionalDeathDistribution& dist,
                                int radius);

}  // namespace lifeeval
