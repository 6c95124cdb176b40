#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lifeeval/metrics.hpp"
#include "lifeeval/rng.hpp"
#include "test_util.hpp"

using namespace lifeeval;

namespace {

ScoredItem item_of(double confidence, double score,
                   std::optional<double> difficulty = std::nullopt) {
  ScoredItem item;
  item.question_id = "q";
  item.kind = difficulty ? TaskKind::lifeeval : TaskKind::mcq;
  item.score = score;
  item.stated_confidence = confidence;
  item.difficulty = difficulty;
  return item;
}

}  // namespace

TEST_CASE("normalize_confidences rescales stated values") {
  const auto same = normalize_confidences(std::vector<double>{0.5, 0.5});
  CHECK(same[0] == 0.5);
  CHECK(same[1] == 0.5);

  const auto scaled = normalize_confidences(std::vector<double>{0.6, 0.6, 0.8});
  CHECK(scaled[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(scaled[1] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(scaled[2] == doctest::Approx(0.4).epsilon(1e-15));

  double total = 0.0;
  for (double p : scaled) total += p;
  CHECK(std::fabs(total - 1.0) <= 1e-12);
}

TEST_CASE("all-zero stated confidences signal a drop") {
  CHECK_THROWS_AS(normalize_confidences(std::vector<double>{0, 0, 0, 0}),
                  std::domain_error);
  CHECK_THROWS_AS(normalize_confidences(std::vector<double>{0.2, -0.1}),
                  std::invalid_argument);
}

TEST_CASE("normalization is scale-invariant") {
  DeterministicRng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = static_cast<size_t>(rng.uniform_int(2, 5));
    std::vector<double> stated(n);
    for (double& s : stated) s = rng.uniform() + 1e-6;
    const double alpha = 0.01 + rng.uniform() * 100.0;
    std::vector<double> scaled = stated;
    for (double& s : scaled) s *= alpha;

    const auto base = normalize_confidences(stated);
    const auto rescaled = normalize_confidences(scaled);
    for (size_t i = 0; i < n; ++i) {
      CHECK(rescaled[i] == doctest::Approx(base[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("token probabilities renormalize over the target set") {
  using probs = std::vector<std::optional<double>>;

  const auto single = normalize_token_probs(probs{std::log(0.37)});
  CHECK(single[0] == 1.0);

  const auto pair = normalize_token_probs(probs{std::log(0.2), std::log(0.2)});
  CHECK(pair[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pair[1] == doctest::Approx(0.5).epsilon(1e-15));

  // Option E missing from the top-k window: probability exactly 0.
  const auto missing = normalize_token_probs(
      probs{std::log(0.5), std::log(0.3), std::log(0.1), std::log(0.05),
            std::nullopt});
  CHECK(missing[4] == 0.0);
  double total = 0.0;
  for (double p : missing) total += p;
  CHECK(std::fabs(total - 1.0) <= 1e-12);

  CHECK_THROWS_AS(normalize_token_probs(probs{std::nullopt, std::nullopt}),
                  std::domain_error);
  CHECK_THROWS_AS(normalize_token_probs(probs{}), std::invalid_argument);
}

TEST_CASE("bin assignment is total and half-open with a singleton at one") {
  for (double c : {0.0, 0.05, 0.1, 0.15, 0.3, 0.7, 0.95, 0.9999999}) {
    const int idx = bin_index(c, 10);
    CHECK(idx >= 0);
    CHECK(idx <= 9);
    CHECK(c >= static_cast<double>(idx) / 10);
    CHECK(c < static_cast<double>(idx + 1) / 10);
  }
  CHECK(bin_index(1.0, 10) == 10);
  CHECK(bin_index(0.0, 10) == 0);
  CHECK(bin_index(0.1, 10) == 1);   // left-closed edges
  CHECK(bin_index(0.9, 10) == 9);
  CHECK_THROWS_AS(bin_index(0.5, 0), std::invalid_argument);
  CHECK_THROWS_AS(bin_index(1.5, 10), std::invalid_argument);

  DeterministicRng rng(8);
  for (int trial = 0; trial < 1000; ++trial) {
    const double c = rng.uniform();
    const int idx = bin_index(c, 10);
    CHECK(c >= static_cast<double>(idx) / 10);
    CHECK(c < static_cast<double>(idx + 1) / 10);
  }
}

TEST_CASE("the hand-computed four-item ECE fixture is exactly 0.4") {
  const std::vector<ScoredItem> items{item_of(0.6, 1.0), item_of(0.6, 1.0),
                                      item_of(0.9, 1.0), item_of(0.9, 0.0)};
  const auto result = ece(items, 10);
  CHECK(result.value == 0.4);

  const auto& bins = result.table.bins;
  REQUIRE(bins.size() == 11);
  CHECK(bins[6].n == 2);
  CHECK(bins[6].accuracy == 1.0);
  CHECK(bins[6].mean_confidence == 0.6);
  CHECK(bins[9].n == 2);
  CHECK(bins[9].accuracy == 0.5);
  CHECK(bins[9].mean_confidence == 0.9);
}

TEST_CASE("certain and correct means zero ECE") {
  const std::vector<ScoredItem> items{item_of(1.0, 1.0), item_of(1.0, 1.0)};
  const auto result = ece(items, 10);
  CHECK(result.value == 0.0);
  CHECK(result.table.bins[10].n == 2);
  CHECK(result.table.bins[10].singleton);
}

TEST_CASE("ECE is invariant under permutation and duplication") {
  DeterministicRng rng(99);
  std::vector<ScoredItem> items;
  for (int i = 0; i < 200; ++i) {
    items.push_back(item_of(rng.uniform(), rng.uniform() < 0.5 ? 0.0 : 1.0));
  }
  const double base = ece(items, 10).value;

  std::vector<ScoredItem> reversed(items.rbegin(), items.rend());
  CHECK(ece(reversed, 10).value == doctest::Approx(base).epsilon(1e-15));

  std::vector<ScoredItem> doubled = items;
  doubled.insert(doubled.end(), items.begin(), items.end());
  CHECK(ece(doubled, 10).value == doctest::Approx(base).epsilon(1e-13));
}

TEST_CASE("ECE vanishes when every bin is internally calibrated") {
  // Two items per bin whose scores average to the bin's mean confidence.
  std::vector<ScoredItem> items;
  for (double c : {0.25, 0.45, 0.85}) {
    items.push_back(item_of(c, c + 0.04));
    items.push_back(item_of(c, c - 0.04));
  }
  CHECK(ece(items, 10).value <= 1e-15);
}

TEST_CASE("a calibrated bernoulli agent lands under the sampling-noise bound") {
  DeterministicRng rng(20220);
  std::vector<ScoredItem> items;
  items.reserve(10000);
  for (int i = 0; i < 10000; ++i) {
    const double c = rng.uniform();
    items.push_back(item_of(c, rng.uniform() < c ? 1.0 : 0.0));
  }
  CHECK(ece(items, 10).value < 0.02);
}

TEST_CASE("ece validates its inputs") {
  CHECK_THROWS_AS(ece(std::vector<ScoredItem>{}, 10), std::invalid_argument);
  CHECK_THROWS_AS(ece(std::vector<ScoredItem>{item_of(0.5, 1.0)}, 0),
                  std::invalid_argument);
}

TEST_CASE("overconfidence is mean confidence minus mean score") {
  DeterministicRng rng(6);
  std::vector<ScoredItem> items;
  for (int i = 0; i < 500; ++i) {
    const double c = rng.uniform();
    items.push_back(item_of(c, c));  // conf == acc per item
  }
  CHECK(overconfidence(items) == 0.0);

  std::vector<ScoredItem> biased;
  for (int i = 0; i < 100; ++i) biased.push_back(item_of(0.88, 0.79));
  CHECK(overconfidence(biased) == doctest::Approx(0.09).epsilon(1e-12));

  CHECK_THROWS_AS(overconfidence(std::vector<ScoredItem>{}),
                  std::invalid_argument);
}

TEST_CASE("underconfidence comes out negative") {
  std::vector<ScoredItem> items;
  for (int i = 0; i < 50; ++i) items.push_back(item_of(0.805, 0.920));
  CHECK(overconfidence(items) == doctest::Approx(-0.115).epsilon(1e-12));
}

TEST_CASE("rounded fraction counts multiples of the step") {
  std::vector<ScoredItem> all{item_of(0.05, 0), item_of(0.10, 0),
                              item_of(0.5, 0), item_of(1.0, 0)};
  CHECK(rounded_fraction(all) == 1.0);

  std::vector<ScoredItem> half{item_of(0.05, 0), item_of(0.07, 0)};
  CHECK(rounded_fraction(half) == 0.5);

  std::vector<ScoredItem> off{item_of(0.0501, 0)};
  CHECK(rounded_fraction(off) == 0.0);
  CHECK(rounded_fraction(off, 0.05, 1e-2) == 1.0);  // eps is configurable
  CHECK(rounded_fraction(std::vector<ScoredItem>{}) == 0.0);
}

TEST_CASE("a perfectly calibrated agent has zero hard-easy slope") {
  DeterministicRng rng(13);
  std::vector<ScoredItem> items;
  for (int i = 0; i < 400; ++i) {
    const double difficulty = rng.uniform();
    items.push_back(item_of(1.0 - difficulty, 1.0 - difficulty, difficulty));
  }
  CHECK(std::fabs(hard_easy_slope(items)) <= 1e-12);
}

TEST_CASE("constant confidence on optimal guesses gives slope exactly one") {
  DeterministicRng rng(14);
  std::vector<ScoredItem> items;
  for (int i = 0; i < 808; ++i) {
    const double difficulty = rng.uniform();
    // score = 1 - difficulty, confidence fixed: oc = (c-1) + difficulty.
    items.push_back(item_of(0.8, 1.0 - difficulty, difficulty));
  }
  CHECK(hard_easy_slope(items) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("slope is invariant under a constant confidence shift") {
  DeterministicRng rng(15);
  std::vector<ScoredItem> items;
  for (int i = 0; i < 300; ++i) {
    const double difficulty = rng.uniform();
    items.push_back(item_of(rng.uniform(), rng.uniform(), difficulty));
  }
  const double base = hard_easy_slope(items);
  std::vector<ScoredItem> shifted = items;
  for (auto& item : shifted) item.stated_confidence += 0.07;
  CHECK(hard_easy_slope(shifted) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("slope needs lifeeval difficulties and a non-degenerate design") {
  std::vector<ScoredItem> constant{item_of(0.5, 1.0, 0.3), item_of(0.6, 0.0, 0.3)};
  CHECK_THROWS_AS(hard_easy_slope(constant), std::domain_error);

  std::vector<ScoredItem> missing{item_of(0.5, 1.0), item_of(0.6, 0.0)};
  CHECK_THROWS_AS(hard_easy_slope(missing), std::invalid_argument);

  std::vector<ScoredItem> one{item_of(0.5, 1.0, 0.3)};
  CHECK_THROWS_AS(hard_easy_slope(one), std::invalid_argument);
}
