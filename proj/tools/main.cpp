#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lifeeval/pipeline.hpp"

namespace {

using nlohmann::ordered_json;
namespace pipeline = lifeeval::pipeline;

// Values present in the config file take precedence over flags.
ordered_json load_config(const std::string& path) {
  if (path.empty()) return ordered_json::object();
  std::ifstream in(path);
  if (!in) {
    throw CLI::ValidationError("--config", "cannot open '" + path + "'");
  }
  return ordered_json::parse(in);
}

template <typename T>
void override_from(const ordered_json& config, const char* key, T& value) {
  if (config.contains(key)) value = config.at(key).get<T>();
}

void override_seed(const ordered_json& config,
                   std::optional<std::uint64_t>& seed) {
  if (config.contains("seed")) seed = config.at("seed").get<std::uint64_t>();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence-calibration evaluation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON config file; its values override flags")
      ->expected(1);

  // gen-questions
  auto* gen = app.add_subcommand(
      "gen-questions", "Generate the lifespan question grid as JSONL");
  pipeline::GenQuestionsOptions gen_opts;
  gen->add_option("--table", gen_opts.table_path, "Life table CSV")->required();
  gen->add_option("--out", gen_opts.out_path, "Output questions JSONL")
      ->required();
  gen->add_option("--min-age-lo", gen_opts.min_age_lo, "Lowest minimum age");
  gen->add_option("--min-age-hi", gen_opts.min_age_hi, "Highest minimum age");
  gen->add_option("--radii", gen_opts.radii,
                  "Radii to generate (subset of 1 5 10 20)");

  // run
  auto* run = app.add_subcommand(
      "run", "Query a provider or synthetic agent over a question set");
  pipeline::RunOptions run_opts;
  run->add_option("--questions", run_opts.questions_path, "Questions JSONL")
      ->required();
  run->add_option("--out", run_opts.out_path, "Output responses JSONL")
      ->required();
  run->add_option("--table", run_opts.table_path,
                  "Life table CSV (required for lifeeval questions)");
  run->add_option("--agent", run_opts.agent_spec,
                  "Synthetic agent: calibrated-oracle, "
                  "constant-confidence:<c>, noisy-confidence:<sigma>, "
                  "rounding:<step>");
  std::uint64_t run_seed = 0;
  auto* seed_opt = run->add_option("--seed", run_seed,
                                   "Seed (mandatory with --agent)");
  run->add_option("--provider-config", run_opts.provider_config_path,
                  "Provider config JSON");
  run->add_option("--provider", run_opts.provider_name,
                  "Provider name from the config");

  // score
  auto* score = app.add_subcommand(
      "score", "Clean, align across models, and score responses");
  pipeline::ScoreOptions score_opts;
  score->add_option("--questions", score_opts.questions_path, "Questions JSONL")
      ->required();
  score->add_option("--responses", score_opts.responses_paths,
                    "Responses JSONL file(s)")
      ->required();
  score->add_option("--table", score_opts.table_path,
                    "Life table CSV (required for lifeeval questions)");
  score->add_option("--out", score_opts.scored_out, "Output scored JSONL")
      ->required();
  score->add_option("--alignment-out", score_opts.alignment_out,
                    "Output alignment report JSON");

  // report
  auto* report = app.add_subcommand(
      "report", "Aggregate scored items into summary tables");
  pipeline::ReportOptions report_opts;
  report->add_option("--scored", report_opts.scored_path, "Scored JSONL")
      ->required();
  report->add_option("--alignment", report_opts.alignment_path,
                     "Alignment report JSON from `score`");
  report->add_option("--out", report_opts.runs_dir, "Runs output directory")
      ->required();
  report->add_option("--run-id", report_opts.run_id, "Run identifier")
      ->required();
  report->add_option("--set-id", report_opts.question_set_id,
                     "Question set name (defaults to the alignment record)");
  report->add_option("--bins", report_opts.bin_count,
                     "Confidence bin count for ECE");
  report->add_option("--rounding-step", report_opts.rounding_step,
                     "Step for the rounded-fraction metric");
  report->add_option("--verdicts", report_opts.verdicts_path,
                     "Contamination verdicts JSONL");
  report->add_option("--keep", report_opts.keep,
                     "Verdicts to keep (no_evidence weak_evidence "
                     "strong_evidence); requires --verdicts");

  // contamination
  auto* contamination = app.add_subcommand(
      "contamination", "Keyword scan and optional LLM-judge verdicts");
  pipeline::ContaminationOptions contamination_opts;
  contamination
      ->add_option("--responses", contamination_opts.responses_paths,
                   "Responses JSONL file(s)")
      ->required();
  contamination
      ->add_option("--keywords", contamination_opts.keywords_path,
                   "Keyword list, one per line")
      ->required();
  contamination
      ->add_option("--out", contamination_opts.out_path,
                   "Output verdicts JSONL")
      ->required();
  contamination->add_option("--judge-config",
                            contamination_opts.judge_config_path,
                            "Provider config JSON for the judge");
  contamination->add_option("--judge", contamination_opts.judge_name,
                            "Judge provider name from the config");
  contamination->add_option("--rubric", contamination_opts.rubric_path,
                            "Judge rubric template ({reasoning} placeholder)");

  // oracle
  auto* oracle = app.add_subcommand(
      "oracle", "Monte Carlo vs analytic window-probability self-check");
  pipeline::OracleOptions oracle_opts;
  oracle->add_option("--table", oracle_opts.table_path, "Life table CSV")
      ->required();
  oracle->add_option("--cases", oracle_opts.cases, "Number of random cases");
  oracle->add_option("--samples", oracle_opts.samples, "Samples per case");
  oracle->add_option("--seed", oracle_opts.seed, "Case and simulation seed");
  oracle->add_option("--tolerance", oracle_opts.tolerance,
                     "Allowed |analytic - simulated|");
  oracle->add_option("--threads", oracle_opts.threads,
                     "Worker threads (0 = hardware default)");

  CLI11_PARSE(app, argc, argv);

  try {
    const ordered_json config = load_config(config_path);
    if (gen->parsed()) {
      override_from(config, "table", gen_opts.table_path);
      override_from(config, "out", gen_opts.out_path);
      override_from(config, "min_age_lo", gen_opts.min_age_lo);
      override_from(config, "min_age_hi", gen_opts.min_age_hi);
      override_from(config, "radii", gen_opts.radii);
      return pipeline::cmd_gen_questions(gen_opts, std::cout, std::cerr);
    }
    if (run->parsed()) {
      if (seed_opt->count() > 0) run_opts.seed = run_seed;
      override_from(config, "questions", run_opts.questions_path);
      override_from(config, "out", run_opts.out_path);
      override_from(config, "table", run_opts.table_path);
      override_from(config, "agent", run_opts.agent_spec);
      override_from(config, "provider_config", run_opts.provider_config_path);
      override_from(config, "provider", run_opts.provider_name);
      override_seed(config, run_opts.seed);
      return pipeline::cmd_run(run_opts, std::cout, std::cerr);
    }
    if (score->parsed()) {
      override_from(config, "questions", score_opts.questions_path);
      override_from(config, "responses", score_opts.responses_paths);
      override_from(config, "table", score_opts.table_path);
      override_from(config, "out", score_opts.scored_out);
      override_from(config, "alignment_out", score_opts.alignment_out);
      if (score_opts.alignment_out.empty()) {
        score_opts.alignment_out = score_opts.scored_out + ".alignment.json";
      }
      return pipeline::cmd_score(score_opts, std::cout, std::cerr);
    }
    if (report->parsed()) {
      override_from(config, "scored", report_opts.scored_path);
      override_from(config, "alignment", report_opts.alignment_path);
      override_from(config, "out", report_opts.runs_dir);
      override_from(config, "run_id", report_opts.run_id);
      override_from(config, "set_id", report_opts.question_set_id);
      override_from(config, "bins", report_opts.bin_count);
      override_from(config, "rounding_step", report_opts.rounding_step);
      override_from(config, "verdicts", report_opts.verdicts_path);
      override_from(config, "keep", report_opts.keep);
      if (report_opts.alignment_path.empty()) {
        report_opts.alignment_path =
            report_opts.scored_path + ".alignment.json";
      }
      return pipeline::cmd_report(report_opts, std::cout, std::cerr);
    }
    if (contamination->parsed()) {
      override_from(config, "responses", contamination_opts.responses_paths);
      override_from(config, "keywords", contamination_opts.keywords_path);
      override_from(config, "out", contamination_opts.out_path);
      override_from(config, "judge_config",
                    contamination_opts.judge_config_path);
      override_from(config, "judge", contamination_opts.judge_name);
      override_from(config, "rubric", contamination_opts.rubric_path);
      return pipeline::cmd_contamination(contamination_opts, std::cout,
                                         std::cerr);
    }
    if (oracle->parsed()) {
      override_from(config, "table", oracle_opts.table_path);
      override_from(config, "cases", oracle_opts.cases);
      override_from(config, "samples", oracle_opts.samples);
      override_from(config, "seed", oracle_opts.seed);
      override_from(config, "tolerance", oracle_opts.tolerance);
      override_from(config, "threads", oracle_opts.threads);
      return pipeline::cmd_oracle(oracle_opts, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
