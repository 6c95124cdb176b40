#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "lifeeval/contamination.hpp"
#include "test_util.hpp"

using namespace lifeeval;
using namespace lifeeval::test;

namespace {

ModelResponse reasoning_response(const std::string& qid,
                                 const std::string& reasoning,
                                 const std::string& model = "m") {
  ModelResponse response;
  response.question_id = qid;
  response.model = model;
  response.raw_text = "{\"Reasoning\": \"" + reasoning +
                      "\", \"Answer\": 80, \"Confidence\": 0.4}";
  response.status = ResponseStatus::ok;
  return response;
}

const std::vector<std::string> kKeywords{"ssa", "life table", "actuarial"};

}  // namespace

TEST_CASE("keyword scan flags case-insensitive substrings in reasoning") {
  std::vector<ModelResponse> responses{
      reasoning_response("q1", "According to the SSA period life table, q_80 is..."),
      reasoning_response("q2", "people usually live to about 78"),
      reasoning_response("q3", "the Actuarial tables say otherwise"),
  };
  const auto flags = keyword_scan(responses, kKeywords);
  CHECK(flags == std::vector<bool>{true, false, true});
}

TEST_CASE("the scan reads the whole completion when there is no reasoning field") {
  ModelResponse response;
  response.question_id = "q";
  response.model = "m";
  response.raw_text = "I remember the ssa tables well.";
  const auto flags = keyword_scan(std::vector<ModelResponse>{response}, kKeywords);
  CHECK(flags == std::vector<bool>{true});
}

TEST_CASE("an empty keyword list is an error") {
  std::vector<ModelResponse> responses{reasoning_response("q1", "text")};
  CHECK_THROWS_AS(keyword_scan(responses, std::vector<std::string>{}),
                  std::invalid_argument);
}

TEST_CASE("the default keyword asset loads") {
  std::ifstream in(config_dir() + "/contamination_keywords.txt");
  REQUIRE(in.good());
  const auto keywords = load_keywords(in);
  CHECK(keywords.size() >= 5);
  for (const auto& k : keywords) CHECK(k.find('#') == std::string::npos);
}

TEST_CASE("the judge classifies responses through the rubric") {
  std::vector<ModelResponse> responses{
      reasoning_response("q1", "q_80 for males is exactly 0.064"),
      reasoning_response("q2", "most people live into their late seventies"),
  };

  std::vector<std::string> prompts;
  auto scripted = [&prompts](const std::string&, const std::string& user) {
    prompts.push_back(user);
    if (user.find("exactly") != std::string::npos) {
      return std::string("{\"verdict\": \"strong_evidence\"}");
    }
    return std::string("{\"verdict\": \"no_evidence\"}");
  };

  const auto verdicts = judge(responses, scripted, "Classify: {reasoning}");
  REQUIRE(verdicts.size() == 2);
  CHECK(verdicts[0].verdict == Verdict::strong_evidence);
  CHECK(verdicts[1].verdict == Verdict::no_evidence);
  CHECK(prompts[0].find("q_80 for males") != std::string::npos);
}

TEST_CASE("unusable judge output is retried once then recorded as an error") {
  std::vector<ModelResponse> responses{reasoning_response("q1", "text")};

  int calls = 0;
  auto flaky = [&calls](const std::string&, const std::string&) {
    ++calls;
    return calls == 1 ? std::string("hmm, hard to say")
                      : std::string("weak_evidence");
  };
  const auto recovered = judge(responses, flaky, "{reasoning}");
  CHECK(calls == 2);
  CHECK(recovered[0].verdict == Verdict::weak_evidence);

  int broken_calls = 0;
  auto broken = [&broken_calls](const std::string&, const std::string&) {
    ++broken_calls;
    return std::string("no verdict here");
  };
  const auto failed = judge(responses, broken, "{reasoning}");
  CHECK(broken_calls == 2);
  CHECK_FALSE(failed[0].verdict.has_value());
  REQUIRE(failed[0].error.has_value());
}

TEST_CASE("verdicts round-trip through JSONL") {
  ContaminationVerdict verdict;
  verdict.question_id = "q1";
  verdict.model = "m";
  verdict.keyword_flagged = true;
  verdict.verdict = Verdict::weak_evidence;
  const std::string line = verdict_to_jsonl(verdict);
  const auto back = verdict_from_jsonl(line);
  CHECK(back.question_id == "q1");
  CHECK(back.keyword_flagged);
  CHECK(back.verdict == Verdict::weak_evidence);
  CHECK(verdict_to_jsonl(back) == line);

  ContaminationVerdict unjudged;
  unjudged.question_id = "q2";
  unjudged.model = "m";
  const auto back2 = verdict_from_jsonl(verdict_to_jsonl(unjudged));
  CHECK_FALSE(back2.verdict.has_value());
}

namespace {

ScoredItem scored_stub(const std::string& qid) {
  ScoredItem item;
  item.question_id = qid;
  item.kind = TaskKind::lifeeval;
  item.score = 0.5;
  item.stated_confidence = 0.5;
  return item;
}

}  // namespace

TEST_CASE("filtering keeps exactly the requested verdicts") {
  const std::vector<ScoredItem> items{scored_stub("q1"), scored_stub("q2"),
                                      scored_stub("q3")};
  std::map<std::string, std::optional<Verdict>> verdicts{
      {"q1", Verdict::no_evidence},
      {"q2", Verdict::strong_evidence},
      {"q3", Verdict::weak_evidence},
  };

  const auto kept = filter_subset(items, verdicts, {Verdict::no_evidence});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].question_id == "q1");

  const auto all = filter_subset(
      items, verdicts,
      {Verdict::no_evidence, Verdict::weak_evidence, Verdict::strong_evidence});
  CHECK(all.size() == items.size());

  const auto none = filter_subset(items, verdicts, {});
  CHECK(none.empty());
}

TEST_CASE("filtering demands a verdict for every item") {
  const std::vector<ScoredItem> items{scored_stub("q1"), scored_stub("q2")};
  std::map<std::string, std::optional<Verdict>> verdicts{
      {"q1", Verdict::no_evidence}};
  CHECK_THROWS_AS(filter_subset(items, verdicts, {Verdict::no_evidence}),
                  std::invalid_argument);

  // Error rows silently drop their item instead of failing the filter.
  verdicts["q2"] = std::nullopt;
  const auto kept = filter_subset(items, verdicts, {Verdict::no_evidence});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].question_id == "q1");
}

TEST_CASE("verdict counts partition the judged set") {
  std::vector<ModelResponse> responses;
  for (int i = 0; i < 30; ++i) {
    responses.push_back(
        reasoning_response("q" + std::to_string(i), "detail " + std::to_string(i)));
  }
  // Responses mentioning "detail 7" or "detail 13" get unusable judge
  // output on both attempts; the rest rotate through the categories.
  int call = 0;
  auto rotating = [&call](const std::string&, const std::string& user) {
    if (user.find("detail 7") != std::string::npos ||
        user.find("detail 13") != std::string::npos) {
      return std::string("garbled");
    }
    switch (call++ % 3) {
      case 0: return std::string("{\"verdict\": \"no_evidence\"}");
      case 1: return std::string("{\"verdict\": \"weak_evidence\"}");
      default: return std::string("{\"verdict\": \"strong_evidence\"}");
    }
  };
  const auto verdicts = judge(responses, rotating, "{reasoning}");
  size_t categorized = 0, errors = 0;
  for (const auto& v : verdicts) {
    if (v.verdict) {
      ++categorized;
    } else {
      ++errors;
    }
  }
  CHECK(categorized + errors == responses.size());
  CHECK(errors > 0);
}

TEST_CASE("the shipped rubric asset renders with a reasoning payload") {
  std::ifstream in(config_dir() + "/judge_rubric.txt");
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string rubric = buffer.str();
  CHECK(rubric.find("{reasoning}") != std::string::npos);
  CHECK(rubric.find("no_evidence") != std::string::npos);
  CHECK(rubric.find("weak_evidence") != std::string::npos);
  CHECK(rubric.find("strong_evidence") != std::string::npos);
}
