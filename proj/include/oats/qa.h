#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "oats/text.h"

namespace oats {

struct QuestionSpec {
  std::string id;
  std::string text;
  int order = 0;  // position in the rendered summary
  std::vector<std::string> variants;  // alternative phrasings
};

// JSON list of {"id", "text", "order"?, "variants"?}. Missing orders default
// to list position. Throws kDuplicateQuestion on repeated ids or orders.
std::vector<QuestionSpec> ParseQuestions(std::string_view json_text);
std::vector<QuestionSpec> LoadQuestions(const std::filesystem::path &path);
void CheckQuestionSet(const std::vector<QuestionSpec> &questions);

// A validated answer. When answered, `range` indexes the context that was
// asked and slicing it yields `text`.
struct AnswerSpan {
  std::string question_id;
  bool answered = false;
  std::string text;
  std::optional<CharRange> range;
  double score = 0.0;
  double no_answer_score = 0.0;

  friend bool operator==(const AnswerSpan &, const AnswerSpan &) = default;
};

// What a backend returns for one (question, context) request, before
// validation. Mirrors the JSON wire response.
struct BackendResponse {
  bool answered = false;
  std::string answer;
  std::optional<long long> start;
  std::optional<long long> end;
  double score = 0.0;
  double no_answer_score = 0.0;
};

nlohmann::ordered_json ResponseToJson(const BackendResponse &response);
// Throws kProtocolViolation when required fields are missing or mistyped.
BackendResponse ResponseFromJson(const nlohmann::json &j);

// Question-answering backend. Implementations must tolerate concurrent calls.
class QaBackend {
 public:
  virtual ~QaBackend() = default;
  virtual BackendResponse Answer(std::string_view question, std::string_view context) const = 0;
};

// Enforces the AnswerSpan invariants against the exact context sent.
AnswerSpan ValidateResponse(std::string question_id, const BackendResponse &response,
                            std::u32string_view context);

struct AskOptions {
  std::size_t context_budget = 20000;  // scalar values sent in one request
  std::size_t window = 4000;
  std::size_t stride = 2000;
};

// Window start offsets used for a context of `length` scalar values.
std::vector<CharRange> ContextWindows(std::size_t length, const AskOptions &options);

// Asks the question and each of its variants; the highest-scoring answered
// span wins, earlier phrasings and windows winning ties. Offsets in the
// result index `context`.
AnswerSpan Ask(const QaBackend &backend, const QuestionSpec &question,
               std::string_view context, const AskOptions &options = {});

struct AskAllResult {
  std::vector<AnswerSpan> answers;  // aligned with the question list
  std::vector<std::string> diagnostics;
  std::size_t failed = 0;  // questions that raised an error
};

AskAllResult AskAll(const QaBackend &backend, const std::vector<QuestionSpec> &questions,
                    std::string_view context, const AskOptions &options = {});

struct StubRule {
  std::string question_substring;
  std::string pattern;
  bool regex = true;
};

// JSON list of {"question": str, "pattern": str, "regex": bool}.
std::vector<StubRule> ParseStubRules(std::string_view json_text);
std::vector<StubRule> LoadStubRules(const std::filesystem::path &path);

// Deterministic rule-based backend: the first rule whose substring occurs in
// the question answers with the first match of its pattern in the context.
class StubBackend : public QaBackend {
 public:
  // Throws kInvalidPattern when a regular expression does not compile.
  explicit StubBackend(std::vector<StubRule> rules);

  BackendResponse Answer(std::string_view question, std::string_view context) const override;

 private:
  struct CompiledRule {
    StubRule rule;
    std::optional<std::regex> re;
  };
  std::vector<CompiledRule> rules_;
};

}  // namespace oats
