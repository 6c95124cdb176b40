#pragma once

#include <cstdint>
#include <vector>

#include "lifeeval/actuarial.hpp"
#include "lifeeval/rng.hpp"

namespace lifeeval {

/// Draws one death age by walking the table with sequential Bernoulli
/// trials on q; survival past the terminal age collapses onto it,
/// mirroring the analytic convention.
int simulate_death_age(const LifeTable& table, int min_age, Sex sex,
                       DeterministicRng& rng);

/// Monte Carlo estimate of the window probability, independent of the
/// analytic survival-product path.
double simulate_window_probability(const LifeTable& table, int min_age,
                                   Sex sex, int guess, int radius,
                                   long long samples, std::uint64_t seed);

struct OracleCase {
  int min_age = 0;
  Sex sex = Sex::male;
  int guess = 0;
  int radius = 0;
  double analytic = 0.0;
  double simulated = 0.0;
};

/// Random (a, s, k, r) cases comparing analytic and simulated window
/// probabilities; fully determined by `seed`. `threads` 0 picks the
/// hardware default.
std::vector<OracleCase> run_oracle_cases(const LifeTable& table, int cases,
                                         long long samples, std::uint64_t seed,
                                         int threads = 0);

}  // namespace lifeeval
