#include "lifeeval/mc_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace lifeeval {

int simulate_death_age(const LifeTable& table, int min_age, Sex sex,
                       DeterministicRng& rng) {
  for (int age = min_age; age < table.max_age(); ++age) {
    if (rng.uniform() < table.q(age, sex)) return age;
  }
  return table.max_age();
}

double simulate_window_probability(const LifeTable& table, int min_age,
                                   Sex sex, int guess, int radius,
                                   long long samples, std::uint64_t seed) {
  if (samples <= 0) {
    throw std::invalid_argument("simulate_window_probability: samples must be > 0");
  }
  DeterministicRng rng(seed);
  const long long lo = static_cast<long long>(guess) - radius;
  const long long hi = static_cast<long long>(guess) + radius;
  long long hits = 0;
  for (long long i = 0; i < samples; ++i) {
    const int death_age = simulate_death_age(table, min_age, sex, rng);
    if (death_age >= lo && death_age <= hi) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

std::vector<OracleCase> run_oracle_cases(const LifeTable& table, int cases,
                                         long long samples, std::uint64_t seed,
                                         int threads) {
  if (cases <= 0) {
    throw std::invalid_argument("run_oracle_cases: cases must be > 0");
  }
  constexpr int kRadii[] = {1, 5, 10, 20};
  std::vector<OracleCase> results(cases);

  DeterministicRng case_rng(splitmix64(seed));
  for (int i = 0; i < cases; ++i) {
    OracleCase& c = results[i];
    c.min_age = static_cast<int>(case_rng.uniform_int(0, 100));
    c.sex = case_rng.uniform_int(0, 1) == 0 ? Sex::male : Sex::female;
    c.radius = kRadii[case_rng.uniform_int(0, 3)];
    c.guess = static_cast<int>(case_rng.uniform_int(c.min_age, table.max_age()));
  }

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < cases; i = next.fetch_add(1)) {
      OracleCase& c = results[i];
      const auto dist = conditional_distribution(table, c.min_age, c.sex);
      c.analytic = dist.window_probability(c.guess, c.radius);
      c.simulated = simulate_window_probability(
          table, c.min_age, c.sex, c.guess, c.radius, samples,
          splitmix64(seed ^ static_cast<std::uint64_t>(i + 1)));
    }
  };

  int n_threads = threads > 0
                      ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp(n_threads, 1, cases);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace lifeeval
