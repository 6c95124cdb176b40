#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "lifeeval/pipeline.hpp"
#include "test_util.hpp"

using namespace lifeeval;
using namespace lifeeval::test;
namespace fs = std::filesystem;
namespace pl = lifeeval::pipeline;

namespace {

struct TempDir {
  TempDir() : path(fs::temp_directory_path() / "lifeeval_pipeline_test") {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const {
    return (path / name).string();
  }
  fs::path path;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

size_t line_count(const std::string& path) {
  std::ifstream in(path);
  size_t n = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("gen-questions writes the default 808-line grid") {
  TempDir dir;
  pl::GenQuestionsOptions options;
  options.table_path = fixture_path();
  options.out_path = dir / "q.jsonl";
  std::ostringstream out, err;
  REQUIRE(pl::cmd_gen_questions(options, out, err) == 0);
  CHECK(line_count(options.out_path) == 808);

  // Rerun is byte-identical.
  const std::string first = slurp(options.out_path);
  REQUIRE(pl::cmd_gen_questions(options, out, err) == 0);
  CHECK(slurp(options.out_path) == first);

  // A single radius cuts the grid to 2 x 101.
  options.radii = {5};
  options.out_path = dir / "q5.jsonl";
  REQUIRE(pl::cmd_gen_questions(options, out, err) == 0);
  CHECK(line_count(options.out_path) == 202);
}

TEST_CASE("gen-questions fails cleanly on an invalid grid") {
  TempDir dir;
  pl::GenQuestionsOptions options;
  options.table_path = fixture_path();
  options.out_path = dir / "q.jsonl";
  options.radii = {7};
  std::ostringstream out, err;
  CHECK(pl::cmd_gen_questions(options, out, err) != 0);
  CHECK(err.str().find("radius") != std::string::npos);
  CHECK_FALSE(fs::exists(options.out_path));
}

TEST_CASE("run demands a seed for synthetic agents") {
  TempDir dir;
  pl::GenQuestionsOptions gen;
  gen.table_path = fixture_path();
  gen.out_path = dir / "q.jsonl";
  gen.min_age_hi = 5;
  std::ostringstream out, err;
  REQUIRE(pl::cmd_gen_questions(gen, out, err) == 0);

  pl::RunOptions run;
  run.questions_path = gen.out_path;
  run.table_path = fixture_path();
  run.out_path = dir / "r.jsonl";
  run.agent_spec = "calibrated-oracle";
  CHECK(pl::cmd_run(run, out, err) != 0);
  CHECK(err.str().find("--seed") != std::string::npos);

  run.seed = 1;
  CHECK(pl::cmd_run(run, out, err) == 0);
  CHECK(line_count(run.out_path) == line_count(gen.out_path));
}

TEST_CASE("run refuses lifeeval questions without a life table") {
  TempDir dir;
  pl::GenQuestionsOptions gen;
  gen.table_path = fixture_path();
  gen.out_path = dir / "q.jsonl";
  gen.min_age_hi = 2;
  std::ostringstream out, err;
  REQUIRE(pl::cmd_gen_questions(gen, out, err) == 0);

  pl::RunOptions run;
  run.questions_path = gen.out_path;
  run.out_path = dir / "r.jsonl";
  run.agent_spec = "calibrated-oracle";
  run.seed = 1;
  CHECK(pl::cmd_run(run, out, err) != 0);
  CHECK(err.str().find("--table") != std::string::npos);
}

TEST_CASE("the cleaning pipeline drops the crafted corpus rows and aligns") {
  TempDir dir;

  // Questions: three halueval items (no table needed).
  {
    std::ofstream q(dir / "q.jsonl");
    q << R"({"id":"h1","task":"halueval","context":"c","question":"q","candidate_answer":"a","label":1})"
      << "\n"
      << R"({"id":"h2","task":"halueval","context":"c","question":"q","candidate_answer":"a","label":0})"
      << "\n"
      << R"({"id":"h3","task":"halueval","context":"c","question":"q","candidate_answer":"a","label":1})"
      << "\n";
  }
  // Model A answers everything; model B fails h2.
  {
    std::ofstream r(dir / "responses.jsonl");
    auto ok = [](const std::string& model, const std::string& qid) {
      return R"({"question_id":")" + qid + R"(","model":")" + model +
             R"(","raw_text":"{\"Confidence\": 0.5}","parsed":{"task":"halueval","confidence":0.5},"status":"ok","logprobs":null,"timestamp":0})";
    };
    r << ok("model-a", "h1") << "\n"
      << ok("model-a", "h2") << "\n"
      << ok("model-a", "h3") << "\n"
      << ok("model-b", "h1") << "\n"
      << R"({"question_id":"h2","model":"model-b","raw_text":"I'm not sure","parsed":null,"status":"hedged","logprobs":null,"timestamp":0})"
      << "\n"
      << ok("model-b", "h3") << "\n";
  }

  pl::ScoreOptions score;
  score.questions_path = dir / "q.jsonl";
  score.responses_paths = {dir / "responses.jsonl"};
  score.scored_out = dir / "scored.jsonl";
  score.alignment_out = dir / "alignment.json";
  std::ostringstream out, err;
  REQUIRE(pl::cmd_score(score, out, err) == 0);

  // h2 is excluded for both models: 2 aligned questions x 2 models.
  CHECK(line_count(score.scored_out) == 4);
  const std::string alignment = slurp(score.alignment_out);
  CHECK(alignment.find("\"aligned_n\": 2") != std::string::npos);
  CHECK(out.str().find("hedged 1") != std::string::npos);
  const std::string scored = slurp(score.scored_out);
  CHECK(scored.find("\"h2\"") == std::string::npos);
}

TEST_CASE("score rejects responses for unknown questions") {
  TempDir dir;
  {
    std::ofstream q(dir / "q.jsonl");
    q << R"({"id":"h1","task":"halueval","context":"c","question":"q","candidate_answer":"a","label":1})"
      << "\n";
  }
  {
    std::ofstream r(dir / "r.jsonl");
    r << R"({"question_id":"mystery","model":"m","raw_text":"x","parsed":{"task":"halueval","confidence":0.5},"status":"ok","logprobs":null,"timestamp":0})"
      << "\n";
  }
  pl::ScoreOptions score;
  score.questions_path = dir / "q.jsonl";
  score.responses_paths = {dir / "r.jsonl"};
  score.scored_out = dir / "scored.jsonl";
  score.alignment_out = dir / "alignment.json";
  std::ostringstream out, err;
  CHECK(pl::cmd_score(score, out, err) != 0);
  CHECK(err.str().find("mystery") != std::string::npos);
  CHECK_FALSE(fs::exists(score.scored_out));
}

TEST_CASE("report without a verdicts file rejects --keep") {
  TempDir dir;
  {
    std::ofstream s(dir / "scored.jsonl");
    s << R"({"question_id":"h1","model":"m","task":"halueval","score":1.0,"confidence":0.5,"chosen":null})"
      << "\n";
  }
  {
    std::ofstream a(dir / "alignment.json");
    a << R"({"question_set_id":"set","question_set_hash":"fnv1a64:0","models":["m"],"aligned_n":1,"first_timestamp":0,"last_timestamp":0,"drops":{}})"
      << "\n";
  }
  pl::ReportOptions report;
  report.scored_path = dir / "scored.jsonl";
  report.alignment_path = dir / "alignment.json";
  report.runs_dir = dir / "runs";
  report.run_id = "r1";
  report.keep = {"no_evidence"};
  std::ostringstream out, err;
  CHECK(pl::cmd_report(report, out, err) != 0);
  CHECK(err.str().find("--verdicts") != std::string::npos);
}

TEST_CASE("report filters to the kept verdict subset") {
  TempDir dir;
  {
    std::ofstream s(dir / "scored.jsonl");
    s << R"({"question_id":"h1","model":"m","task":"halueval","score":1.0,"confidence":0.9,"chosen":null})"
      << "\n"
      << R"({"question_id":"h2","model":"m","task":"halueval","score":0.0,"confidence":0.9,"chosen":null})"
      << "\n";
  }
  {
    std::ofstream a(dir / "alignment.json");
    a << R"({"question_set_id":"set","question_set_hash":"fnv1a64:0","models":["m"],"aligned_n":2,"first_timestamp":0,"last_timestamp":0,"drops":{}})"
      << "\n";
  }
  {
    std::ofstream v(dir / "verdicts.jsonl");
    v << R"({"question_id":"h1","model":"m","keyword_flagged":false,"verdict":"no_evidence"})"
      << "\n"
      << R"({"question_id":"h2","model":"m","keyword_flagged":true,"verdict":"strong_evidence"})"
      << "\n";
  }
  pl::ReportOptions report;
  report.scored_path = dir / "scored.jsonl";
  report.alignment_path = dir / "alignment.json";
  report.runs_dir = dir / "runs";
  report.run_id = "r1";
  report.verdicts_path = dir / "verdicts.jsonl";
  report.keep = {"no_evidence"};
  std::ostringstream out, err;
  REQUIRE(pl::cmd_report(report, out, err) == 0);
  const std::string csv = slurp((fs::path(dir / "runs") / "r1" / "summary.csv").string());
  // Only h1 (score 1.0) survives the filter.
  CHECK(csv.find("m,set,1,") != std::string::npos);
}

TEST_CASE("contamination runs the keyword stage and writes verdict rows") {
  TempDir dir;
  {
    std::ofstream r(dir / "r.jsonl");
    r << R"({"question_id":"q1","model":"m","raw_text":"{\"Reasoning\": \"from the SSA life table\", \"Answer\": 80, \"Confidence\": 0.5}","parsed":null,"status":"unparseable","logprobs":null,"timestamp":0})"
      << "\n"
      << R"({"question_id":"q2","model":"m","raw_text":"{\"Reasoning\": \"common sense\", \"Answer\": 80, \"Confidence\": 0.5}","parsed":null,"status":"unparseable","logprobs":null,"timestamp":0})"
      << "\n";
  }
  pl::ContaminationOptions options;
  options.responses_paths = {dir / "r.jsonl"};
  options.keywords_path = config_dir() + "/contamination_keywords.txt";
  options.out_path = dir / "verdicts.jsonl";
  std::ostringstream out, err;
  REQUIRE(pl::cmd_contamination(options, out, err) == 0);
  CHECK(out.str().find("1/2 responses flagged") != std::string::npos);
  const std::string verdicts = slurp(options.out_path);
  CHECK(verdicts.find("\"keyword_flagged\":true") != std::string::npos);
  CHECK(verdicts.find("\"keyword_flagged\":false") != std::string::npos);
  CHECK(verdicts.find("\"verdict\":null") != std::string::npos);
}

TEST_CASE("the oracle command passes on the fixture at reduced scale") {
  pl::OracleOptions options;
  options.table_path = fixture_path();
  options.cases = 6;
  options.samples = 100000;
  options.tolerance = 0.01;
  std::ostringstream out, err;
  CHECK(pl::cmd_oracle(options, out, err) == 0);
  CHECK(out.str().find("6/6 cases") != std::string::npos);
}

TEST_CASE("run drives a remote provider from its config file") {
  TempDir dir;

  httplib::Server server;
  server.Post("/v1/chat/completions", [](const httplib::Request& req,
                                         httplib::Response& res) {
    const auto body = nlohmann::ordered_json::parse(req.body);
    CHECK(body.at("model") == "stub");
    nlohmann::ordered_json doc;
    doc["choices"] = nlohmann::ordered_json::array();
    doc["choices"].push_back(
        {{"message",
          {{"role", "assistant"}, {"content", "{\"Confidence\": 0.75}"}}}});
    res.set_content(doc.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread listener([&server] { server.listen_after_bind(); });
  server.wait_until_ready();

  {
    std::ofstream q(dir / "q.jsonl");
    q << R"({"id":"h1","task":"halueval","context":"c","question":"q","candidate_answer":"a","label":1})"
      << "\n"
      << R"({"id":"h2","task":"halueval","context":"c","question":"q","candidate_answer":"a","label":0})"
      << "\n";
  }
  {
    std::ofstream cfg(dir / "providers.json");
    cfg << R"({"providers": [{"name": "local", "endpoint": "http://127.0.0.1:)"
        << port << R"(/v1/chat/completions", "model": "stub", "max_parallel": 2}]})";
  }

  pl::RunOptions run;
  run.questions_path = dir / "q.jsonl";
  run.out_path = dir / "r.jsonl";
  run.provider_config_path = dir / "providers.json";
  run.provider_name = "local";
  std::ostringstream out, err;
  const int rc = pl::cmd_run(run, out, err);
  server.stop();
  listener.join();

  REQUIRE(rc == 0);
  CHECK(line_count(run.out_path) == 2);
  const std::string responses = slurp(run.out_path);
  CHECK(responses.find("\"model\":\"stub\"") != std::string::npos);
  CHECK(responses.find("\"status\":\"ok\"") != std::string::npos);
  CHECK(responses.find("\"confidence\":0.75") != std::string::npos);
}

TEST_CASE("missing inputs surface as nonzero exits") {
  std::ostringstream out, err;
  pl::OracleOptions oracle;
  oracle.table_path = "/nonexistent/table.csv";
  CHECK(pl::cmd_oracle(oracle, out, err) != 0);

  pl::ReportOptions report;
  report.scored_path = "/nonexistent/scored.jsonl";
  report.alignment_path = "/nonexistent/alignment.json";
  report.runs_dir = "/tmp";
  report.run_id = "x";
  CHECK(pl::cmd_report(report, out, err) != 0);
}
