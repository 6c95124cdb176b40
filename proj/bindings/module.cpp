#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <variant>

#include "lifeeval/harness.hpp"
#include "lifeeval/contamination.hpp"
#include "lifeeval/mc_oracle.hpp"
#include "lifeeval/metrics.hpp"
#include "lifeeval/report.hpp"

namespace py = pybind11;
using namespace lifeeval;

namespace {

Sex sex_arg(const std::string& text) { return sex_from_string(text); }

py::object chosen_to_py(const ScoredItem& item) {
  if (const int* v = std::get_if<int>(&item.chosen)) return py::int_(*v);
  if (const bool* v = std::get_if<bool>(&item.chosen)) return py::bool_(*v);
  return py::none();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Confidence-calibration evaluation toolkit (C++ core)";

  py::class_<LifeTable>(m, "LifeTable")
      .def_static("load", &LifeTable::load, py::arg("path"))
      .def_static(
          "parse_csv",
          [](const std::string& text) {
            std::istringstream in(text);
            return LifeTable::parse_csv(in);
          },
          py::arg("csv_text"))
      .def_property_readonly("max_age", &LifeTable::max_age)
      .def(
          "q",
          [](const LifeTable& t, int age, const std::string& sex) {
            return t.q(age, sex_arg(sex));
          },
          py::arg("age"), py::arg("sex"));

  py::class_<ConditionalDeathDistribution>(m, "ConditionalDeathDistribution")
      .def_property_readonly("min_age", &ConditionalDeathDistribution::min_age)
      .def_property_readonly("max_age", &ConditionalDeathDistribution::max_age)
      .def_property_readonly(
          "sex",
          [](const ConditionalDeathDistribution& d) {
            return std::string(to_string(d.sex()));
          })
      .def("pmf", &ConditionalDeathDistribution::pmf, py::arg("age"))
      .def("survival", &ConditionalDeathDistribution::survival, py::arg("age"))
      .def("window_probability",
           &ConditionalDeathDistribution::window_probability, py::arg("guess"),
           py::arg("radius"));

  m.def(
      "conditional_distribution",
      [](const LifeTable& table, int min_age, const std::string& sex) {
        return conditional_distribution(table, min_age, sex_arg(sex));
      },
      py::arg("table"), py::arg("min_age"), py::arg("sex"));

  py::class_<DifficultyProfile>(m, "DifficultyProfile")
      .def_readonly("min_age", &DifficultyProfile::min_age)
      .def_property_readonly(
          "sex",
          [](const DifficultyProfile& p) {
            return std::string(to_string(p.sex));
          })
      .def_readonly("radius", &DifficultyProfile::radius)
      .def_readonly("optimal_guess", &DifficultyProfile::optimal_guess)
      .def_readonly("mas", &DifficultyProfile::mas)
      .def_readonly("difficulty", &DifficultyProfile::difficulty);

  m.def(
      "optimal_guess",
      [](const ConditionalDeathDistribution& dist, int radius) {
        return optimal_guess(dist, radius);
      },
      py::arg("dist"), py::arg("radius"));

  py::class_<Question>(m, "Question")
      .def_readonly("id", &Question::id)
      .def_property_readonly(
          "task",
          [](const Question& q) { return std::string(to_string(q.kind)); })
      .def("to_jsonl", &question_to_jsonl);

  m.def(
      "generate_lifeeval",
      [](const LifeTable& table, int lo, int hi, const std::vector<int>& radii) {
        return generate_lifeeval(table, lo, hi, radii);
      },
      py::arg("table"), py::arg("min_age_lo") = 0, py::arg("min_age_hi") = 100,
      py::arg("radii") = std::vector<int>{1, 5, 10, 20});

  m.def(
      "questions_from_jsonl",
      [](const std::string& text) {
        std::istringstream in(text);
        IngestResult result = ingest_questions(in);
        py::list rejections;
        for (const auto& r : result.rejections) {
          py::dict d;
          d["line"] = r.line;
          d["id"] = r.id;
          d["reason"] = r.reason;
          rejections.append(d);
        }
        return py::make_tuple(result.questions, rejections);
      },
      py::arg("jsonl_text"),
      "Parses questions JSONL; returns (questions, rejections).");

  py::class_<ScoredItem>(m, "ScoredItem")
      .def(py::init([](std::string question_id, const std::string& task,
                       double score, double confidence,
                       std::optional<double> difficulty,
                       std::optional<int> radius) {
             ScoredItem item;
             item.question_id = std::move(question_id);
             item.kind = task_kind_from_string(task);
             item.score = score;
             item.stated_confidence = confidence;
             item.difficulty = difficulty;
             item.radius = radius;
             return item;
           }),
           py::arg("question_id"), py::arg("task"), py::arg("score"),
           py::arg("confidence"), py::arg("difficulty") = py::none(),
           py::arg("radius") = py::none())
      .def_readonly("question_id", &ScoredItem::question_id)
      .def_property_readonly(
          "task",
          [](const ScoredItem& i) { return std::string(to_string(i.kind)); })
      .def_readonly("score", &ScoredItem::score)
      .def_readonly("confidence", &ScoredItem::stated_confidence)
      .def_property_readonly("chosen", &chosen_to_py)
      .def_readonly("difficulty", &ScoredItem::difficulty)
      .def_readonly("radius", &ScoredItem::radius);

  m.def(
      "score_mcq",
      [](const Question& question, const std::vector<double>& probs) {
        return score_mcq(question, probs);
      },
      py::arg("question"), py::arg("probs"));
  m.def("score_lifeeval", &score_lifeeval, py::arg("table"),
        py::arg("question"), py::arg("guess"), py::arg("confidence"));
  m.def("score_halueval", &score_halueval, py::arg("question"),
        py::arg("confidence"));

  m.def(
      "normalize_confidences",
      [](const std::vector<double>& stated) {
        return normalize_confidences(stated);
      },
      py::arg("stated"));
  m.def(
      "normalize_token_probs",
      [](const std::vector<std::optional<double>>& logprobs) {
        return normalize_token_probs(logprobs);
      },
      py::arg("logprobs"),
      "Per-target log-probabilities; None marks unobserved targets.");

  py::class_<Bin>(m, "Bin")
      .def_readonly("lo", &Bin::lo)
      .def_readonly("hi", &Bin::hi)
      .def_readonly("singleton", &Bin::singleton)
      .def_readonly("n", &Bin::n)
      .def_readonly("accuracy", &Bin::accuracy)
      .def_readonly("mean_confidence", &Bin::mean_confidence);

  m.def(
      "ece",
      [](const std::vector<ScoredItem>& items, int bins) {
        EceResult result = ece(items, bins);
        return py::make_tuple(result.value, result.table.bins);
      },
      py::arg("items"), py::arg("bins") = 10,
      "Returns (ece, bin_table).");
  m.def(
      "overconfidence",
      [](const std::vector<ScoredItem>& items) { return overconfidence(items); },
      py::arg("items"));
  m.def(
      "rounded_fraction",
      [](const std::vector<ScoredItem>& items, double step, double eps) {
        return rounded_fraction(items, step, eps);
      },
      py::arg("items"), py::arg("step") = 0.05, py::arg("eps") = 1e-9);
  m.def(
      "hard_easy_slope",
      [](const std::vector<ScoredItem>& items) { return hard_easy_slope(items); },
      py::arg("items"));

  m.def(
      "render_prompt",
      [](const Question& question) {
        PromptPair prompt = render_prompt(question);
        return py::make_tuple(prompt.system_text, prompt.user_text);
      },
      py::arg("question"), "Returns (system_text, user_text).");

  py::class_<ModelResponse>(m, "ModelResponse")
      .def_readonly("question_id", &ModelResponse::question_id)
      .def_readonly("model", &ModelResponse::model)
      .def_readonly("raw_text", &ModelResponse::raw_text)
      .def_property_readonly(
          "status",
          [](const ModelResponse& r) { return std::string(to_string(r.status)); })
      .def("to_jsonl", &response_to_jsonl);

  m.def("parse_response", &parse_response, py::arg("question"),
        py::arg("raw_text"));
  m.def("response_from_jsonl", &response_from_jsonl, py::arg("line"));

  m.def(
      "keyword_scan",
      [](const std::vector<ModelResponse>& responses,
         const std::vector<std::string>& keywords) {
        return keyword_scan(responses, keywords);
      },
      py::arg("responses"), py::arg("keywords"));

  m.def(
      "simulate_window_probability",
      [](const LifeTable& table, int min_age, const std::string& sex, int guess,
         int radius, long long samples, std::uint64_t seed) {
        return simulate_window_probability(table, min_age, sex_arg(sex), guess,
                                           radius, samples, seed);
      },
      py::arg("table"), py::arg("min_age"), py::arg("sex"), py::arg("guess"),
      py::arg("radius"), py::arg("samples"), py::arg("seed"));
}
