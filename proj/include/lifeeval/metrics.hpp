#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lifeeval/scoring.hpp"

namespace lifeeval {

/// One confidence bin: [lo, hi) for the regular bins, the exact value 1.0
/// for the singleton bin. Empty bins keep accuracy/confidence at 0.
struct Bin {
  double lo = 0.0;
  double hi = 0.0;
  bool singleton = false;
  size_t n = 0;
  double accuracy = 0.0;
  double mean_confidence = 0.0;
};

/// `bin_count` equally spaced bins over [0, 1) plus a dedicated bin for
/// confidence exactly 1.0.
struct BinTable {
  int bin_count = 10;
  std::vector<Bin> bins;  // size bin_count + 1
};

struct EceResult {
  double value = 0.0;
  BinTable table;
};

struct CalibrationSummary {
  double accuracy = 0.0;
  double mean_confidence = 0.0;
  double ece = 0.0;
  double overconfidence = 0.0;  // mean_confidence - accuracy
  double rounded_fraction = 0.0;
  std::optional<double> hard_easy_slope;  // lifeeval items only
  size_t n = 0;
};

/// Rescales stated per-option values to sum to 1. Throws
/// std::domain_error when they sum to 0 — such responses belong on the
/// cleaning drop list, not in scoring.
std::vector<double> normalize_confidences(std::span<const double> stated);

/// Token-level probabilities over a restricted target set: observed
/// tokens contribute exp(logprob), unobserved targets contribute 0, and
/// the result is renormalized over the set.
std::vector<double> normalize_token_probs(
    std::span<const std::optional<double>> logprobs);

/// Index of the bin that `confidence` falls in: floor(c * bin_count)
/// against exact bin edges, with exactly-1.0 in the singleton bin.
int bin_index(double confidence, int bin_count);

EceResult ece(std::span<const ScoredItem> items, int bin_count = 10);

double overconfidence(std::span<const ScoredItem> items);

double rounded_fraction(std::span<const ScoredItem> items, double step = 0.05,
                        double eps = 1e-9);

/// OLS slope (intercept included) of per-item overconfidence
/// (confidence - score) on difficulty. Requires at least two distinct
/// difficulty values.
double hard_easy_slope(std::span<const ScoredItem> items);

}  // namespace lifeeval
