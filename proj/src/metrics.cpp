#include "lifeeval/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "compensated_sum.hpp"

namespace lifeeval {

namespace {

void require_confidence_in_unit(double c, const char* where) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw std::invalid_argument(std::string(where) +
                                ": confidence outside [0, 1]");
  }
}

}  // namespace

std::vector<double> normalize_confidences(std::span<const double> stated) {
  if (stated.empty()) {
    throw std::invalid_argument("normalize_confidences: empty input");
  }
  CompensatedSum total;
  for (double s : stated) {
    if (s < 0.0) {
      throw std::invalid_argument(
          "normalize_confidences: negative stated value");
    }
    total.add(s);
  }
  if (total.value() <= 0.0) {
    throw std::domain_error(
        "normalize_confidences: all stated values are zero; drop the response");
  }
  std::vector<double> out(stated.size());
  for (size_t i = 0; i < stated.size(); ++i) out[i] = stated[i] / total.value();
  return out;
}

std::vector<double> normalize_token_probs(
    std::span<const std::optional<double>> logprobs) {
  if (logprobs.empty()) {
    throw std::invalid_argument("normalize_token_probs: empty target set");
  }
  std::vector<double> raw(logprobs.size(), 0.0);
  CompensatedSum total;
  bool any_observed = false;
  for (size_t i = 0; i < logprobs.size(); ++i) {
    if (logprobs[i]) {
      raw[i] = std::exp(*logprobs[i]);
      any_observed = true;
      total.add(raw[i]);
    }
  }
  if (!any_observed || total.value() <= 0.0) {
    throw std::domain_error("normalize_token_probs: no observed target tokens");
  }
  for (double& p : raw) p /= total.value();
  return raw;
}

int bin_index(double confidence, int bin_count) {
  if (bin_count < 1) {
    throw std::invalid_argument("bin_index: bin count must be >= 1");
  }
  require_confidence_in_unit(confidence, "bin_index");
  if (confidence == 1.0) return bin_count;  // singleton bin
  int idx = static_cast<int>(confidence * bin_count);
  if (idx > bin_count - 1) idx = bin_count - 1;
  if (idx < 0) idx = 0;
  // Settle against the exact edges so boundary values land half-open.
  while (idx > 0 && confidence < static_cast<double>(idx) / bin_count) --idx;
  while (idx < bin_count - 1 &&
         confidence >= static_cast<double>(idx + 1) / bin_count) {
    ++idx;
  }
  return idx;
}

EceResult ece(std::span<const ScoredItem> items, int bin_count) {
  if (bin_count < 1) {
    throw std::invalid_argument("ece: bin count must be >= 1");
  }
  if (items.empty()) {
    throw std::invalid_argument("ece: empty item set");
  }

  const size_t total_bins = static_cast<size_t>(bin_count) + 1;
  std::vector<size_t> counts(total_bins, 0);
  std::vector<CompensatedSum> conf_sums(total_bins);
  std::vector<CompensatedSum> score_sums(total_bins);

  for (const auto& item : items) {
    require_confidence_in_unit(item.stated_confidence, "ece");
    const size_t b =
        static_cast<size_t>(bin_index(item.stated_confidence, bin_count));
    ++counts[b];
    conf_sums[b].add(item.stated_confidence);
    score_sums[b].add(item.score);
  }

  EceResult result;
  result.table.bin_count = bin_count;
  result.table.bins.resize(total_bins);
  CompensatedSum weighted_gap;
  for (size_t b = 0; b < total_bins; ++b) {
    Bin& bin = result.table.bins[b];
    bin.singleton = b == static_cast<size_t>(bin_count);
    bin.lo = bin.singleton ? 1.0 : static_cast<double>(b) / bin_count;
    bin.hi = bin.singleton ? 1.0 : static_cast<double>(b + 1) / bin_count;
    bin.n = counts[b];
    if (counts[b] > 0) {
      bin.accuracy = score_sums[b].value() / static_cast<double>(counts[b]);
      bin.mean_confidence =
          conf_sums[b].value() / static_cast<double>(counts[b]);
      weighted_gap.add(static_cast<double>(counts[b]) *
                       std::fabs(bin.accuracy - bin.mean_confidence));
    }
  }
  result.value = weighted_gap.value() / static_cast<double>(items.size());
  return result;
}

double overconfidence(std::span<const ScoredItem> items) {
  if (items.empty()) {
    throw std::invalid_argument("overconfidence: empty item set");
  }
  CompensatedSum conf, score;
  for (const auto& item : items) {
    conf.add(item.stated_confidence);
    score.add(item.score);
  }
  const double n = static_cast<double>(items.size());
  return conf.value() / n - score.value() / n;
}

double rounded_fraction(std::span<const ScoredItem> items, double step,
                        double eps) {
  if (step <= 0.0) {
    throw std::invalid_argument("rounded_fraction: step must be positive");
  }
  if (items.empty()) return 0.0;
  size_t rounded = 0;
  for (const auto& item : items) {
    const double c = item.stated_confidence;
    const double nearest = std::round(c / step) * step;
    if (std::fabs(c - nearest) <= eps) ++rounded;
  }
  return static_cast<double>(rounded) / static_cast<double>(items.size());
}

double hard_easy_slope(std::span<const ScoredItem> items) {
  if (items.size() < 2) {
    throw std::invalid_argument("hard_easy_slope: need at least two items");
  }
  CompensatedSum d_sum, oc_sum;
  for (const auto& item : items) {
    if (!item.difficulty) {
      throw std::invalid_argument(
          "hard_easy_slope: item without difficulty (not a lifeeval item)");
    }
    d_sum.add(*item.difficulty);
    oc_sum.add(item.stated_confidence - item.score);
  }
  const double n = static_cast<double>(items.size());
  const double d_mean = d_sum.value() / n;
  const double oc_mean = oc_sum.value() / n;

  CompensatedSum sxx, sxy;
  for (const auto& item : items) {
    const double dx = *item.difficulty - d_mean;
    const double dy = (item.stated_confidence - item.score) - oc_mean;
    sxx.add(dx * dx);
    sxy.add(dx * dy);
  }
  if (sxx.value() == 0.0) {
    throw std::domain_error(
        "hard_easy_slope: degenerate design (constant difficulty)");
  }
  return sxy.value() / sxx.value();
}

}  // namespace lifeeval
