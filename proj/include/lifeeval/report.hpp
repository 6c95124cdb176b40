#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lifeeval/metrics.hpp"

namespace lifeeval {

struct RunManifest {
  std::string run_id;
  std::string question_set_id;
  std::string question_set_hash;
  std::vector<std::string> models;
  std::vector<std::string> provider_names;  // keys live in env vars only
  std::int64_t first_timestamp = 0;
  std::int64_t last_timestamp = 0;
  std::map<std::string, std::map<std::string, size_t>> cleaning_counts;
  size_t aligned_n = 0;
};

/// Fills every summary column: mean score, ECE, mean confidence, rounded
/// fraction, hard-easy slope (lifeeval items only), N.
CalibrationSummary summarize(std::span<const ScoredItem> items,
                             int bin_count = 10, double rounding_step = 0.05);

struct SummaryRow {
  std::string model;
  std::string question_set;
  CalibrationSummary summary;
};

/// Unweighted column means over member rows; N is the aligned subset size.
CalibrationSummary aggregate_rows(std::span<const SummaryRow> rows,
                                  size_t aligned_n);

struct RadiusBreakdownRow {
  int radius = 0;  // -1 marks the pooled row
  double overconfidence = 0.0;
  size_t n = 0;
};

/// Mean overconfidence per radius plus a pooled row, for one model.
std::vector<RadiusBreakdownRow> by_radius_breakdown(
    std::span<const ScoredItem> items);

struct ReportBundle {
  RunManifest manifest;
  std::vector<SummaryRow> rows;                 // one per model
  std::map<std::string, BinTable> bin_tables;   // per model
  std::map<std::string, std::vector<RadiusBreakdownRow>> radius_tables;
};

/// Writes runs/{run_id}/{manifest.json, summary.csv, summary.md,
/// bins/{model}_{set}.csv, radius/{model}.csv}. Output is byte-stable for
/// identical inputs.
void emit(const std::filesystem::path& runs_dir, const ReportBundle& bundle);

/// FNV-1a content hash used to key question sets in manifests.
std::string content_hash_hex(std::string_view bytes);

}  // namespace lifeeval
