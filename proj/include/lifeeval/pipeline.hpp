#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lifeeval/contamination.hpp"
#include "lifeeval/report.hpp"

namespace lifeeval::pipeline {

/// A scored item tagged with the model that produced it; one JSONL row.
struct ScoredRecord {
  std::string model;
  ScoredItem item;
};

std::string scored_to_jsonl(const ScoredRecord& record);
ScoredRecord scored_from_jsonl(const std::string& line);

struct GenQuestionsOptions {
  std::string table_path;
  std::string out_path;
  int min_age_lo = 0;
  int min_age_hi = 100;
  std::vector<int> radii{1, 5, 10, 20};
};

struct RunOptions {
  std::string questions_path;
  std::string out_path;
  std::string table_path;  // required when the set has lifeeval items
  // Synthetic route; seed is mandatory alongside an agent.
  std::string agent_spec;
  std::optional<std::uint64_t> seed;
  // Remote route.
  std::string provider_config_path;
  std::string provider_name;
};

struct ScoreOptions {
  std::string questions_path;
  std::vector<std::string> responses_paths;
  std::string table_path;  // required when the set has lifeeval items
  std::string scored_out;
  std::string alignment_out;
};

struct ReportOptions {
  std::string scored_path;
  std::string alignment_path;
  std::string runs_dir;
  std::string run_id;
  std::string question_set_id;  // defaults to the alignment record's id
  int bin_count = 10;
  double rounding_step = 0.05;
  std::string verdicts_path;          // required with a keep set
  std::vector<std::string> keep;      // verdict names to retain
  std::vector<std::string> provider_names;
};

struct ContaminationOptions {
  std::vector<std::string> responses_paths;
  std::string keywords_path;
  std::string out_path;
  // Judge stage (optional): provider config + name + rubric template.
  std::string judge_config_path;
  std::string judge_name;
  std::string rubric_path;
};

struct OracleOptions {
  std::string table_path;
  int cases = 50;
  long long samples = 1'000'000;
  std::uint64_t seed = 20220101;
  double tolerance = 0.003;
  int threads = 0;
};

int cmd_gen_questions(const GenQuestionsOptions& options, std::ostream& out,
                      std::ostream& err);
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_score(const ScoreOptions& options, std::ostream& out,
              std::ostream& err);
int cmd_report(const ReportOptions& options, std::ostream& out,
               std::ostream& err);
int cmd_contamination(const ContaminationOptions& options, std::ostream& out,
                      std::ostream& err);
int cmd_oracle(const OracleOptions& options, std::ostream& out,
               std::ostream& err);

}  // namespace lifeeval::pipeline
