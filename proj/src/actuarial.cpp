#include "lifeeval/actuarial.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace lifeeval {

std::string_view to_string(Sex sex) {
  return sex == Sex::male ? "male" : "female";
}

Sex sex_from_string(std::string_view text) {
  if (text == "male") return Sex::male;
  if (text == "female") return Sex::female;
  throw std::invalid_argument("unknown sex: '" + std::string(text) + "'");
}

namespace {

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_probability(const std::string& cell, const char* column, int age,
                         size_t row) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw IngestError("life table: non-numeric " + std::string(column) +
                      " at age " + std::to_string(age) + " (row " +
                      std::to_string(row) + ")");
  }
  if (value < 0.0 || value > 1.0) {
    throw IngestError("life table: " + std::string(column) +
                      " out of range at age " + std::to_string(age) + " (row " +
                      std::to_string(row) + ")");
  }
  return value;
}

}  // namespace

LifeTable::LifeTable(std::vector<double> q_male, std::vector<double> q_female)
    : q_male_(std::move(q_male)), q_female_(std::move(q_female)) {
  if (q_male_.empty() || q_male_.size() != q_female_.size()) {
    throw std::invalid_argument("life table: need equal, nonempty q vectors");
  }
  for (size_t i = 0; i < q_male_.size(); ++i) {
    if (q_male_[i] < 0.0 || q_male_[i] > 1.0 || q_female_[i] < 0.0 ||
        q_female_[i] > 1.0) {
      throw std::invalid_argument("life table: q out of range at age " +
                                  std::to_string(i));
    }
  }
}

LifeTable LifeTable::parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw IngestError("life table: empty input");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_row(line);
  if (header.size() != 3 || header[0] != "age" || header[1] != "q_male" ||
      header[2] != "q_female") {
    throw IngestError("life table: expected header 'age,q_male,q_female', got '" +
                      line + "'");
  }

  std::vector<double> q_male, q_female;
  size_t row = 1;
  int expected_age = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cells = split_csv_row(line);
    if (cells.size() != 3) {
      throw IngestError("life table: expected 3 cells in row " +
                        std::to_string(row));
    }
    int age = -1;
    auto [ptr, ec] = std::from_chars(cells[0].data(),
                                     cells[0].data() + cells[0].size(), age);
    if (ec != std::errc() || ptr != cells[0].data() + cells[0].size()) {
      throw IngestError("life table: non-numeric age in row " +
                        std::to_string(row));
    }
    if (age < expected_age) {
      throw IngestError("life table: duplicate age " + std::to_string(age) +
                        " (row " + std::to_string(row) + ")");
    }
    if (age > expected_age) {
      throw IngestError("life table: missing age " +
                        std::to_string(expected_age) + " (row " +
                        std::to_string(row) + ")");
    }
    q_male.push_back(parse_probability(cells[1], "q_male", age, row));
    q_female.push_back(parse_probability(cells[2], "q_female", age, row));
    ++expected_age;
  }
  if (q_male.empty()) {
    throw IngestError("life table: no data rows");
  }
  return LifeTable(std::move(q_male), std::move(q_female));
}

LifeTable LifeTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IngestError("life table: cannot open '" + path + "'");
  }
  return parse_csv(in);
}

double LifeTable::q(int age, Sex sex) const {
  if (age < 0 || age > max_age()) {
    throw std::out_of_range("life table: age " + std::to_string(age) +
                            " outside [0, " + std::to_string(max_age()) + "]");
  }
  return sex == Sex::male ? q_male_[age] : q_female_[age];
}

ConditionalDeathDistribution::ConditionalDeathDistribution(
    const LifeTable& table, int min_age, Sex sex)
    : min_age_(min_age), max_age_(table.max_age()), sex_(sex) {
  if (min_age < 0 || min_age > max_age_) {
    throw std::domain_error("conditional distribution: min_age " +
                            std::to_string(min_age) + " outside [0, " +
                            std::to_string(max_age_) + "]");
  }
  const size_t n = static_cast<size_t>(max_age_ - min_age_) + 1;
  pmf_.resize(n);
  survival_.resize(n);
  double surv = 1.0;
  for (size_t i = 0; i + 1 < n; ++i) {
    survival_[i] = surv;
    pmf_[i] = surv * table.q(min_age_ + static_cast<int>(i), sex);
    surv *= 1.0 - table.q(min_age_ + static_cast<int>(i), sex);
  }
  // The terminal cell absorbs all residual mass so the pmf sums to 1.
  survival_[n - 1] = surv;
  pmf_[n - 1] = surv;

  // Prefix masses as survival complements: monotone by construction, and
  // a full-support window is exactly 1.
  cum_.resize(n + 1);
  for (size_t i = 0; i < n; ++i) cum_[i] = 1.0 - survival_[i];
  cum_[n] = 1.0;
}

double ConditionalDeathDistribution::pmf(int age) const noexcept {
  if (age < min_age_ || age > max_age_) return 0.0;
  return pmf_[static_cast<size_t>(age - min_age_)];
}

double ConditionalDeathDistribution::survival(int age) const {
  if (age < min_age_ || age > max_age_) {
    throw std::out_of_range("survival: age " + std::to_string(age) +
                            " outside [" + std::to_string(min_age_) + ", " +
                            std::to_string(max_age_) + "]");
  }
  return survival_[static_cast<size_t>(age - min_age_)];
}

double ConditionalDeathDistribution::window_probability(int guess,
                                                        int radius) const {
  if (radius < 0) {
    throw std::invalid_argument("window_probability: radius must be >= 0");
  }
  // Clamp to the support; an empty intersection carries no mass.
  const long lo_l = std::max<long>(static_cast<long>(guess) - radius, min_age_);
  const long hi_l = std::min<long>(static_cast<long>(guess) + radius, max_age_);
  if (lo_l > hi_l) return 0.0;
  const size_t lo = static_cast<size_t>(lo_l - min_age_);
  const size_t hi = static_cast<size_t>(hi_l - min_age_);
  const double mass = cum_[hi + 1] - cum_[lo];
  return std::clamp(mass, 0.0, 1.0);
}

ConditionalDeathDistribution conditional_distribution(const LifeTable& table,
                                                      int min_age, Sex sex) {
  return ConditionalDeathDistribution(table, min_age, sex);
}

double window_probability(const ConditionalDeathDistribution& dist, int guess,
                          int radius) {
  return dist.window_probability(guess, radius);
}

DifficultyProfile optimal_guess(const ConditionalDeathDistribution& dist,
                                int radius) {
  if (radius < 0) {
    throw std::invalid_argument("optimal_guess: radius must be >= 0");
  }
  DifficultyProfile profile;
  profile.min_age = dist.min_age();
  profile.sex = dist.sex();
  profile.radius = radius;
  profile.optimal_guess = dist.min_age();
  profile.mas = dist.window_probability(dist.min_age(), radius);
  for (int k = dist.min_age() + 1; k <= dist.max_age(); ++k) {
    const double mass = dist.window_probability(k, radius);
    if (mass > profile.mas) {
      profile.mas = mass;
      profile.optimal_guess = k;
    }
  }
  profile.difficulty = 1.0 - profile.mas;
  return profile;
}

}  // namespace lifeeval
