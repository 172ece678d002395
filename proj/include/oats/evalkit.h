#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "oats/topicid.h"

namespace oats {

// nullopt stands for an undefined ratio (empty denominator).
struct PRResult {
  std::string risk_factor;
  std::optional<double> precision;
  std::optional<double> recall;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

PRResult PrecisionRecall(const std::set<std::string> &predicted,
                         const std::set<std::string> &gold, std::string risk_factor = {});

// risk factor -> relevant doc ids
using GoldLabels = std::map<std::string, std::set<std::string>>;

GoldLabels ParseGoldLabels(std::string_view json_text);
GoldLabels LoadGoldLabels(const std::filesystem::path &path);

// One result per risk factor named in either the gold labels or the
// verdicts, sorted by name. Predicted = docs with a relevant verdict.
std::vector<PRResult> EvaluateTopicIdentification(const std::vector<RelevanceVerdict> &verdicts,
                                                  const GoldLabels &gold);

struct RubricRow {
  std::string doc_id;
  std::string question_id;
  int rater1 = 0;
  int rater2 = 0;
  std::optional<int> consensus;
  std::optional<int> summary_score;
};

struct RubricSheet {
  std::vector<RubricRow> rows;
};

// CSV with header columns doc_id, question_id, rater1, rater2, consensus,
// summary_score (any order). Scores are 0 or 1; consensus and summary_score
// may be blank.
RubricSheet ParseRubricCsv(std::string_view csv);
RubricSheet LoadRubricCsv(const std::filesystem::path &path);

struct QuestionAccuracy {
  std::string question_id;
  std::size_t documents = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
};

struct RubricReport {
  std::vector<QuestionAccuracy> questions;  // first-appearance order
  std::optional<double> summary_accuracy;
  std::size_t summary_documents = 0;
  std::optional<double> inter_rater_agreement;
};

// Throws kUnresolvedDisagreement naming every cell where the raters differ
// and no consensus was recorded.
RubricReport AggregateRubric(const RubricSheet &sheet);

nlohmann::ordered_json TopicReportToJson(const std::vector<PRResult> &results);
nlohmann::ordered_json RubricReportToJson(const RubricReport &report);

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF.
std::vector<std::vector<std::string>> ParseCsv(std::string_view text);

}  // namespace oats
