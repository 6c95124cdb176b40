#include "lifeeval/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "lifeeval/mc_oracle.hpp"
#include "lifeeval/provider.hpp"

namespace lifeeval::pipeline {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

/// Input or configuration problem: message to stderr, nonzero exit.
class CommandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CommandError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Writes via a temp file and rename, so failures never leave a
/// half-written artifact in place of an old one.
void atomic_write(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw CommandError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw CommandError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    throw CommandError("cannot move '" + tmp.string() + "' to '" + path +
                       "': " + ec.message());
  }
}

std::vector<Question> load_questions_file(const std::string& path,
                                          std::ostream& err) {
  std::ifstream in(path);
  if (!in) throw CommandError("cannot open questions file '" + path + "'");
  IngestResult result = ingest_questions(in);
  for (const auto& rejection : result.rejections) {
    err << "warning: " << path << ":" << rejection.line << ": "
        << rejection.reason << "\n";
  }
  if (result.questions.empty()) {
    throw CommandError("no valid questions in '" + path + "'");
  }
  return result.questions;
}

std::map<std::string, std::vector<ModelResponse>> load_responses_files(
    const std::vector<std::string>& paths) {
  if (paths.empty()) throw CommandError("no responses files given");
  std::map<std::string, std::vector<ModelResponse>> by_model;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw CommandError("cannot open responses file '" + path + "'");
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        ModelResponse response = response_from_jsonl(line);
        by_model[response.model].push_back(std::move(response));
      } catch (const std::exception& e) {
        throw CommandError(path + ":" + std::to_string(line_no) +
                           ": bad response record: " + e.what());
      }
    }
  }
  if (by_model.empty()) throw CommandError("responses files are empty");
  return by_model;
}

bool needs_life_table(const std::vector<Question>& questions) {
  return std::any_of(questions.begin(), questions.end(), [](const Question& q) {
    return q.kind == TaskKind::lifeeval;
  });
}

void validate_lifeeval_ages(const std::vector<Question>& questions,
                            const LifeTable& table) {
  for (const auto& q : questions) {
    if (q.kind == TaskKind::lifeeval &&
        q.lifeeval().min_age > table.max_age()) {
      throw CommandError("question '" + q.id + "': min_age " +
                         std::to_string(q.lifeeval().min_age) +
                         " exceeds the table's terminal age " +
                         std::to_string(table.max_age()));
    }
  }
}

struct AlignmentRecord {
  std::string question_set_id;
  std::string question_set_hash;
  std::vector<std::string> models;
  size_t aligned_n = 0;
  std::int64_t first_timestamp = 0;
  std::int64_t last_timestamp = 0;
  std::map<std::string, std::map<std::string, size_t>> drops;
};

ordered_json alignment_to_json(const AlignmentRecord& record) {
  ordered_json doc;
  doc["question_set_id"] = record.question_set_id;
  doc["question_set_hash"] = record.question_set_hash;
  doc["models"] = record.models;
  doc["aligned_n"] = record.aligned_n;
  doc["first_timestamp"] = record.first_timestamp;
  doc["last_timestamp"] = record.last_timestamp;
  ordered_json drops = ordered_json::object();
  for (const auto& [model, counts] : record.drops) {
    ordered_json by_reason = ordered_json::object();
    for (const auto& [reason, count] : counts) by_reason[reason] = count;
    drops[model] = std::move(by_reason);
  }
  doc["drops"] = std::move(drops);
  return doc;
}

AlignmentRecord alignment_from_json(const ordered_json& doc) {
  AlignmentRecord record;
  record.question_set_id = doc.at("question_set_id").get<std::string>();
  record.question_set_hash = doc.at("question_set_hash").get<std::string>();
  record.models = doc.at("models").get<std::vector<std::string>>();
  record.aligned_n = doc.at("aligned_n").get<size_t>();
  record.first_timestamp = doc.at("first_timestamp").get<std::int64_t>();
  record.last_timestamp = doc.at("last_timestamp").get<std::int64_t>();
  for (const auto& [model, counts] : doc.at("drops").items()) {
    for (const auto& [reason, count] : counts.items()) {
      record.drops[model][reason] = count.get<size_t>();
    }
  }
  return record;
}

ScoredItem score_response(const Question& question,
                          const ModelResponse& response,
                          const LifeTable* table) {
  switch (question.kind) {
    case TaskKind::lifeeval: {
      const auto& parsed = std::get<ParsedLifeEval>(*response.parsed);
      return score_lifeeval(*table, question, parsed.answer, parsed.confidence);
    }
    case TaskKind::boolean_choice: {
      const auto& parsed = std::get<ParsedBoolean>(*response.parsed);
      const double c = parsed.confidence;
      const std::vector<double> probs =
          parsed.answer ? std::vector<double>{c, 1.0 - c}
                        : std::vector<double>{1.0 - c, c};
      return score_mcq(question, probs);
    }
    case TaskKind::mcq: {
      const auto& parsed = std::get<ParsedMcq>(*response.parsed);
      const auto probs = normalize_confidences(parsed.option_values);
      return score_mcq(question, probs);
    }
    case TaskKind::halueval: {
      const auto& parsed = std::get<ParsedHalueval>(*response.parsed);
      return score_halueval(question, parsed.confidence);
    }
  }
  throw CommandError("unknown task kind while scoring");
}

std::map<std::string, size_t> drop_counts_map(const DropCounts& drops) {
  return {{"unparseable", drops.unparseable},
          {"all_zero_confidence", drops.all_zero_confidence},
          {"hedged", drops.hedged},
          {"refused", drops.refused}};
}

int run_command(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

std::string scored_to_jsonl(const ScoredRecord& record) {
  ordered_json rec;
  rec["question_id"] = record.item.question_id;
  rec["model"] = record.model;
  rec["task"] = std::string(to_string(record.item.kind));
  rec["score"] = record.item.score;
  rec["confidence"] = record.item.stated_confidence;
  if (const int* chosen = std::get_if<int>(&record.item.chosen)) {
    rec["chosen"] = *chosen;
  } else if (const bool* chosen = std::get_if<bool>(&record.item.chosen)) {
    rec["chosen"] = *chosen;
  } else {
    rec["chosen"] = nullptr;
  }
  if (record.item.difficulty) rec["difficulty"] = *record.item.difficulty;
  if (record.item.radius) rec["radius"] = *record.item.radius;
  return rec.dump();
}

ScoredRecord scored_from_jsonl(const std::string& line) {
  const ordered_json rec = ordered_json::parse(line);
  ScoredRecord record;
  record.model = rec.at("model").get<std::string>();
  record.item.question_id = rec.at("question_id").get<std::string>();
  record.item.kind = task_kind_from_string(rec.at("task").get<std::string>());
  record.item.score = rec.at("score").get<double>();
  record.item.stated_confidence = rec.at("confidence").get<double>();
  const auto& chosen = rec.at("chosen");
  if (chosen.is_boolean()) {
    record.item.chosen = chosen.get<bool>();
  } else if (chosen.is_number()) {
    record.item.chosen = chosen.get<int>();
  }
  if (rec.contains("difficulty")) {
    record.item.difficulty = rec.at("difficulty").get<double>();
  }
  if (rec.contains("radius")) {
    record.item.radius = rec.at("radius").get<int>();
  }
  return record;
}

int cmd_gen_questions(const GenQuestionsOptions& options, std::ostream& out,
                      std::ostream& err) {
  return run_command(err, [&] {
    const LifeTable table = LifeTable::load(options.table_path);
    const auto questions = generate_lifeeval(table, options.min_age_lo,
                                             options.min_age_hi, options.radii);
    std::ostringstream buffer;
    write_questions_jsonl(buffer, questions);
    atomic_write(options.out_path, buffer.str());
    out << "wrote " << questions.size() << " questions to " << options.out_path
        << "\n";
    return 0;
  });
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  return run_command(err, [&] {
    const auto questions = load_questions_file(options.questions_path, err);

    std::optional<LifeTable> table;
    if (!options.table_path.empty()) {
      table = LifeTable::load(options.table_path);
      validate_lifeeval_ages(questions, *table);
    }

    std::vector<ModelResponse> responses;
    std::string model;
    if (!options.agent_spec.empty()) {
      if (!options.seed) {
        throw CommandError("synthetic agents require --seed");
      }
      // Remote providers only render prompts, but agents compute optimal
      // guesses and need the table for lifeeval questions.
      if (!table && needs_life_table(questions)) {
        throw CommandError(
            "question set contains lifeeval items; --table is required");
      }
      const auto agent =
          SyntheticAgent::from_spec(options.agent_spec, *options.seed);
      model = agent.name();
      responses = run_synthetic(agent, questions, table ? &*table : nullptr);
    } else if (!options.provider_name.empty()) {
      if (options.provider_config_path.empty()) {
        throw CommandError("--provider requires --provider-config");
      }
      const auto providers =
          load_provider_config_file(options.provider_config_path);
      ChatClient client(find_provider(providers, options.provider_name));
      model = client.spec().model;
      responses = run_remote(client, questions);
    } else {
      throw CommandError("select either --agent or --provider");
    }

    std::string buffer;
    for (const auto& response : responses) {
      buffer += response_to_jsonl(response) + "\n";
    }
    atomic_write(options.out_path, buffer);

    size_t ok = 0;
    for (const auto& r : responses) {
      if (r.status == ResponseStatus::ok) ++ok;
    }
    out << "model " << model << ": " << ok << "/" << responses.size()
        << " responses ok, wrote " << options.out_path << "\n";
    return 0;
  });
}

int cmd_score(const ScoreOptions& options, std::ostream& out,
              std::ostream& err) {
  return run_command(err, [&] {
    const std::string questions_bytes = read_file(options.questions_path);
    const auto questions = load_questions_file(options.questions_path, err);
    std::map<std::string, const Question*> by_id;
    for (const auto& q : questions) by_id[q.id] = &q;

    const auto by_model = load_responses_files(options.responses_paths);
    for (const auto& [model, responses] : by_model) {
      for (const auto& response : responses) {
        if (by_id.find(response.question_id) == by_id.end()) {
          throw CommandError("response for unknown question '" +
                             response.question_id + "' (model " + model + ")");
        }
      }
    }

    std::optional<LifeTable> table;
    if (!options.table_path.empty()) {
      table = LifeTable::load(options.table_path);
      validate_lifeeval_ages(questions, *table);
    } else if (needs_life_table(questions)) {
      throw CommandError(
          "question set contains lifeeval items; --table is required");
    }

    const AlignedRun aligned = clean_and_align(by_model);

    AlignmentRecord record;
    record.question_set_id = fs::path(options.questions_path).stem().string();
    record.question_set_hash = content_hash_hex(questions_bytes);
    record.aligned_n = aligned.question_ids.size();
    std::int64_t first = 0, last = 0;
    bool first_seen = false;
    for (const auto& [model, responses] : by_model) {
      record.models.push_back(model);
      for (const auto& response : responses) {
        if (!first_seen || response.timestamp < first) first = response.timestamp;
        if (!first_seen || response.timestamp > last) last = response.timestamp;
        first_seen = true;
      }
    }
    record.first_timestamp = first;
    record.last_timestamp = last;

    std::string buffer;
    for (const auto& [model, responses] : aligned.responses) {
      for (const auto& response : responses) {
        const Question& question = *by_id.at(response.question_id);
        ScoredRecord scored{model,
                            score_response(question, response,
                                           table ? &*table : nullptr)};
        buffer += scored_to_jsonl(scored) + "\n";
      }
    }
    for (const auto& [model, drops] : aligned.drops) {
      record.drops[model] = drop_counts_map(drops);
      out << model << ": dropped " << drops.total() << " (unparseable "
          << drops.unparseable << ", all_zero " << drops.all_zero_confidence
          << ", hedged " << drops.hedged << ", refused " << drops.refused
          << ")\n";
    }
    out << "aligned subset: " << aligned.question_ids.size() << " questions x "
        << aligned.responses.size() << " models\n";

    atomic_write(options.scored_out, buffer);
    atomic_write(options.alignment_out,
                 alignment_to_json(record).dump(2) + "\n");
    out << "wrote " << options.scored_out << " and " << options.alignment_out
        << "\n";
    return 0;
  });
}

int cmd_report(const ReportOptions& options, std::ostream& out,
               std::ostream& err) {
  return run_command(err, [&] {
    // Load scored items grouped per model.
    std::map<std::string, std::vector<ScoredItem>> per_model;
    {
      std::ifstream in(options.scored_path);
      if (!in) {
        throw CommandError("cannot open scored file '" + options.scored_path +
                           "'");
      }
      std::string line;
      size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
          ScoredRecord record = scored_from_jsonl(line);
          per_model[record.model].push_back(std::move(record.item));
        } catch (const std::exception& e) {
          throw CommandError(options.scored_path + ":" +
                             std::to_string(line_no) + ": " + e.what());
        }
      }
    }
    if (per_model.empty()) {
      throw CommandError("no scored items in '" + options.scored_path + "'");
    }

    const AlignmentRecord alignment = alignment_from_json(
        ordered_json::parse(read_file(options.alignment_path)));

    // Optional contamination filter.
    std::optional<size_t> filtered_n;
    if (!options.keep.empty()) {
      if (options.verdicts_path.empty()) {
        throw CommandError(
            "--keep requires --verdicts (no verdicts file given)");
      }
      std::set<Verdict> keep;
      for (const auto& name : options.keep) {
        keep.insert(verdict_from_string(name));
      }
      std::vector<ContaminationVerdict> verdicts;
      std::ifstream in(options.verdicts_path);
      if (!in) {
        throw CommandError("cannot open verdicts file '" +
                           options.verdicts_path + "'");
      }
      std::string line;
      while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        verdicts.push_back(verdict_from_jsonl(line));
      }
      std::map<std::string, size_t> kept_by_question;
      for (auto& [model, items] : per_model) {
        const auto index = verdict_index(verdicts, model);
        items = filter_subset(items, index, keep);
        if (items.empty()) {
          err << "warning: filter left no items for model " << model << "\n";
        }
        for (const auto& item : items) ++kept_by_question[item.question_id];
      }
      // Aggregate N becomes the subset kept for every model.
      filtered_n = 0;
      for (const auto& [qid, count] : kept_by_question) {
        if (count == per_model.size()) ++(*filtered_n);
      }
      std::erase_if(per_model,
                    [](const auto& entry) { return entry.second.empty(); });
      if (per_model.empty()) {
        throw CommandError("verdict filter removed every item");
      }
    }

    ReportBundle bundle;
    bundle.manifest.run_id = options.run_id;
    bundle.manifest.question_set_id = options.question_set_id.empty()
                                          ? alignment.question_set_id
                                          : options.question_set_id;
    bundle.manifest.question_set_hash = alignment.question_set_hash;
    bundle.manifest.models = alignment.models;
    bundle.manifest.provider_names = options.provider_names;
    bundle.manifest.first_timestamp = alignment.first_timestamp;
    bundle.manifest.last_timestamp = alignment.last_timestamp;
    bundle.manifest.cleaning_counts = alignment.drops;
    bundle.manifest.aligned_n = filtered_n.value_or(alignment.aligned_n);

    for (const auto& [model, items] : per_model) {
      SummaryRow row;
      row.model = model;
      row.question_set = bundle.manifest.question_set_id;
      row.summary = summarize(items, options.bin_count, options.rounding_step);
      bundle.rows.push_back(std::move(row));
      bundle.bin_tables[model] = ece(items, options.bin_count).table;
      const bool all_radius =
          std::all_of(items.begin(), items.end(),
                      [](const ScoredItem& item) { return item.radius.has_value(); });
      if (all_radius) {
        bundle.radius_tables[model] = by_radius_breakdown(items);
      }
    }

    emit(options.runs_dir, bundle);
    const fs::path run_dir = fs::path(options.runs_dir) / options.run_id;
    out << "wrote " << run_dir.string() << "\n";
    return 0;
  });
}

int cmd_contamination(const ContaminationOptions& options, std::ostream& out,
                      std::ostream& err) {
  return run_command(err, [&] {
    const auto by_model = load_responses_files(options.responses_paths);
    std::vector<ModelResponse> responses;
    for (const auto& [model, list] : by_model) {
      responses.insert(responses.end(), list.begin(), list.end());
    }

    std::ifstream keyword_stream(options.keywords_path);
    if (!keyword_stream) {
      throw CommandError("cannot open keywords file '" + options.keywords_path +
                         "'");
    }
    const auto keywords = load_keywords(keyword_stream);
    const auto flags = keyword_scan(responses, keywords);
    size_t flagged = 0;
    for (bool f : flags) flagged += f ? 1 : 0;
    out << "keyword scan: " << flagged << "/" << responses.size()
        << " responses flagged\n";

    std::vector<ContaminationVerdict> verdicts;
    if (!options.judge_name.empty()) {
      if (options.judge_config_path.empty() || options.rubric_path.empty()) {
        throw CommandError("--judge requires --judge-config and --rubric");
      }
      const auto providers =
          load_provider_config_file(options.judge_config_path);
      ChatClient client(find_provider(providers, options.judge_name));
      const std::string rubric = read_file(options.rubric_path);
      verdicts = judge(
          responses,
          [&client](const std::string& system_text,
                    const std::string& user_text) {
            return client.complete(system_text, user_text).text;
          },
          rubric);
      size_t counts[3] = {0, 0, 0};
      size_t errors = 0;
      for (const auto& v : verdicts) {
        if (v.verdict) {
          ++counts[static_cast<int>(*v.verdict)];
        } else {
          ++errors;
        }
      }
      out << "judge verdicts: no_evidence " << counts[0] << ", weak_evidence "
          << counts[1] << ", strong_evidence " << counts[2] << ", errors "
          << errors << "\n";
    } else {
      verdicts.reserve(responses.size());
      for (const auto& response : responses) {
        ContaminationVerdict v;
        v.question_id = response.question_id;
        v.model = response.model;
        verdicts.push_back(std::move(v));
      }
    }
    for (size_t i = 0; i < verdicts.size(); ++i) {
      verdicts[i].keyword_flagged = flags[i];
    }

    std::string buffer;
    for (const auto& v : verdicts) buffer += verdict_to_jsonl(v) + "\n";
    atomic_write(options.out_path, buffer);
    out << "wrote " << options.out_path << "\n";
    return 0;
  });
}

int cmd_oracle(const OracleOptions& options, std::ostream& out,
               std::ostream& err) {
  return run_command(err, [&] {
    const LifeTable table = LifeTable::load(options.table_path);
    const auto cases = run_oracle_cases(table, options.cases, options.samples,
                                        options.seed, options.threads);
    int failures = 0;
    char line[160];
    for (size_t i = 0; i < cases.size(); ++i) {
      const auto& c = cases[i];
      const double diff = std::fabs(c.analytic - c.simulated);
      const bool pass = diff <= options.tolerance;
      failures += pass ? 0 : 1;
      std::snprintf(line, sizeof(line),
                    "case %02zu: a=%-3d sex=%-6s k=%-3d r=%-2d analytic=%.6f "
                    "simulated=%.6f |diff|=%.6f %s",
                    i, c.min_age, std::string(to_string(c.sex)).c_str(),
                    c.guess, c.radius, c.analytic, c.simulated, diff,
                    pass ? "PASS" : "FAIL");
      out << line << "\n";
    }
    out << "oracle: " << (cases.size() - failures) << "/" << cases.size()
        << " cases within +/-" << options.tolerance << "\n";
    return failures == 0 ? 0 : 1;
  });
}

}  // namespace lifeeval::pipeline
