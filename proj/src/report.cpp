#include "lifeeval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

#include <json.hpp>

#include "compensated_sum.hpp"

namespace lifeeval {

using ordered_json = nlohmann::ordered_json;

CalibrationSummary summarize(std::span<const ScoredItem> items, int bin_count,
                             double rounding_step) {
  if (items.empty()) {
    throw std::invalid_argument("summarize: empty item set");
  }
  CalibrationSummary summary;
  summary.n = items.size();

  CompensatedSum score_sum, conf_sum;
  bool all_lifeeval = true;
  for (const auto& item : items) {
    score_sum.add(item.score);
    conf_sum.add(item.stated_confidence);
    if (!item.difficulty) all_lifeeval = false;
  }
  const double n = static_cast<double>(items.size());
  summary.accuracy = score_sum.value() / n;
  summary.mean_confidence = conf_sum.value() / n;
  summary.overconfidence = summary.mean_confidence - summary.accuracy;
  summary.ece = ece(items, bin_count).value;
  summary.rounded_fraction = rounded_fraction(items, rounding_step);
  if (all_lifeeval && items.size() >= 2) {
    try {
      summary.hard_easy_slope = hard_easy_slope(items);
    } catch (const std::domain_error&) {
      summary.hard_easy_slope = std::nullopt;  // constant difficulty
    }
  }
  return summary;
}

CalibrationSummary aggregate_rows(std::span<const SummaryRow> rows,
                                  size_t aligned_n) {
  if (rows.empty()) {
    throw std::invalid_argument("aggregate_rows: empty group");
  }
  CalibrationSummary agg;
  CompensatedSum acc, conf, ece_sum, oc, rnd, slope;
  size_t slope_count = 0;
  for (const auto& row : rows) {
    acc.add(row.summary.accuracy);
    conf.add(row.summary.mean_confidence);
    ece_sum.add(row.summary.ece);
    oc.add(row.summary.overconfidence);
    rnd.add(row.summary.rounded_fraction);
    if (row.summary.hard_easy_slope) {
      slope.add(*row.summary.hard_easy_slope);
      ++slope_count;
    }
  }
  const double n = static_cast<double>(rows.size());
  agg.accuracy = acc.value() / n;
  agg.mean_confidence = conf.value() / n;
  agg.ece = ece_sum.value() / n;
  agg.overconfidence = oc.value() / n;
  agg.rounded_fraction = rnd.value() / n;
  if (slope_count > 0) {
    agg.hard_easy_slope = slope.value() / static_cast<double>(slope_count);
  }
  agg.n = aligned_n;
  return agg;
}

std::vector<RadiusBreakdownRow> by_radius_breakdown(
    std::span<const ScoredItem> items) {
  std::map<int, std::pair<CompensatedSum, size_t>> groups;
  CompensatedSum pooled;
  for (const auto& item : items) {
    if (!item.radius) {
      throw std::invalid_argument(
          "by_radius_breakdown: item without radius (not a lifeeval item)");
    }
    const double oc = item.stated_confidence - item.score;
    groups[*item.radius].first.add(oc);
    ++groups[*item.radius].second;
    pooled.add(oc);
  }
  std::vector<RadiusBreakdownRow> rows;
  for (const auto& [radius, group] : groups) {
    rows.push_back({radius, group.first.value() / static_cast<double>(group.second),
                    group.second});
  }
  if (!items.empty()) {
    rows.push_back(
        {-1, pooled.value() / static_cast<double>(items.size()), items.size()});
  }
  return rows;
}

namespace {

std::string fmt(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

std::string fmt_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

std::string sanitize_component(std::string name) {
  for (char& c : name) {
    if (c == '/' || c == '\\' || c == ' ' || c == ':') c = '_';
  }
  return name;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("report: cannot write '" + path.string() + "'");
  }
  out << content;
  if (!out) {
    throw std::runtime_error("report: write failed for '" + path.string() + "'");
  }
}

std::string summary_csv(const ReportBundle& bundle) {
  std::string out =
      "model,question_set,score,ece,conf,rounded_fraction,hard_easy_slope,n\n";
  auto emit_row = [&out](const std::string& model, const std::string& set,
                         const CalibrationSummary& s) {
    out += model + ',' + set + ',' + fmt(s.accuracy) + ',' + fmt(s.ece) + ',' +
           fmt(s.mean_confidence) + ',' + fmt(s.rounded_fraction) + ',';
    if (s.hard_easy_slope) out += fmt(*s.hard_easy_slope);
    out += ',' + std::to_string(s.n) + '\n';
  };
  for (const auto& row : bundle.rows) {
    emit_row(row.model, row.question_set, row.summary);
  }
  if (bundle.rows.size() > 1) {
    emit_row("aggregate", bundle.rows.front().question_set,
             aggregate_rows(bundle.rows, bundle.manifest.aligned_n));
  }
  return out;
}

std::string summary_md(const ReportBundle& bundle) {
  std::string out = "| Model | Score (%) | ECE | Conf. (%) | % Rnd | Hard-Easy | N |\n";
  out += "|---|---|---|---|---|---|---|\n";
  auto emit_row = [&out](const std::string& model, const CalibrationSummary& s) {
    out += "| " + model + " | " + fmt_fixed(100.0 * s.accuracy, 1) + " | " +
           fmt_fixed(s.ece, 3) + " | " + fmt_fixed(100.0 * s.mean_confidence, 1) +
           " | " + fmt_fixed(100.0 * s.rounded_fraction, 1) + " | " +
           (s.hard_easy_slope ? fmt_fixed(*s.hard_easy_slope, 3)
                              : std::string("n/a")) +
           " | " + std::to_string(s.n) + " |\n";
  };
  for (const auto& row : bundle.rows) emit_row(row.model, row.summary);
  if (bundle.rows.size() > 1) {
    emit_row("aggregate", aggregate_rows(bundle.rows, bundle.manifest.aligned_n));
  }
  return out;
}

std::string bins_csv(const BinTable& table) {
  std::string out = "bin_lo,bin_hi,singleton,n,accuracy,mean_confidence\n";
  for (const auto& bin : table.bins) {
    out += fmt(bin.lo) + ',' + fmt(bin.hi) + ',' +
           (bin.singleton ? "1" : "0") + ',' + std::to_string(bin.n) + ',' +
           fmt(bin.accuracy) + ',' + fmt(bin.mean_confidence) + '\n';
  }
  return out;
}

std::string radius_csv(const std::vector<RadiusBreakdownRow>& rows) {
  std::string out = "radius,overconfidence,n\n";
  for (const auto& row : rows) {
    out += (row.radius < 0 ? std::string("pooled") : std::to_string(row.radius)) +
           ',' + fmt(row.overconfidence) + ',' + std::to_string(row.n) + '\n';
  }
  return out;
}

ordered_json manifest_json(const RunManifest& manifest) {
  ordered_json doc;
  doc["run_id"] = manifest.run_id;
  doc["question_set_id"] = manifest.question_set_id;
  doc["question_set_hash"] = manifest.question_set_hash;
  doc["models"] = manifest.models;
  doc["provider_names"] = manifest.provider_names;
  doc["first_timestamp"] = manifest.first_timestamp;
  doc["last_timestamp"] = manifest.last_timestamp;
  ordered_json cleaning = ordered_json::object();
  for (const auto& [model, counts] : manifest.cleaning_counts) {
    ordered_json by_reason = ordered_json::object();
    for (const auto& [reason, count] : counts) by_reason[reason] = count;
    cleaning[model] = std::move(by_reason);
  }
  doc["cleaning_counts"] = std::move(cleaning);
  doc["aligned_n"] = manifest.aligned_n;
  return doc;
}

}  // namespace

void emit(const std::filesystem::path& runs_dir, const ReportBundle& bundle) {
  namespace fs = std::filesystem;
  const fs::path run_dir = runs_dir / sanitize_component(bundle.manifest.run_id);
  std::error_code ec;
  fs::create_directories(run_dir / "bins", ec);
  fs::create_directories(run_dir / "radius", ec);
  if (ec) {
    throw std::runtime_error("report: cannot create '" + run_dir.string() +
                             "': " + ec.message());
  }

  write_file(run_dir / "manifest.json",
             manifest_json(bundle.manifest).dump(2) + "\n");
  write_file(run_dir / "summary.csv", summary_csv(bundle));
  write_file(run_dir / "summary.md", summary_md(bundle));

  const std::string set = sanitize_component(bundle.manifest.question_set_id);
  for (const auto& [model, table] : bundle.bin_tables) {
    write_file(run_dir / "bins" / (sanitize_component(model) + "_" + set + ".csv"),
               bins_csv(table));
  }
  for (const auto& [model, rows] : bundle.radius_tables) {
    write_file(run_dir / "radius" / (sanitize_component(model) + ".csv"),
               radius_csv(rows));
  }
}

std::string content_hash_hex(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace lifeeval
