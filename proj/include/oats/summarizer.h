#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "oats/corpus.h"
#include "oats/qa.h"

namespace oats {

using StopwordSet = std::unordered_set<std::string>;

inline constexpr std::string_view kStopwordListVersion = "oats-en-1";

// Shipped English stopword list (normalized forms).
const StopwordSet &DefaultStopwords();
// One word per line; blank lines and lines starting with '#' are ignored.
StopwordSet LoadStopwords(const std::filesystem::path &path);

struct SentenceScore {
  std::size_t sentence_index = 0;
  double score = 0.0;

  friend bool operator==(const SentenceScore &, const SentenceScore &) = default;
};

// Score of a sentence = sum over its non-stopword tokens of the term's
// occurrence count in the whole document.
std::vector<SentenceScore> ScoreSentences(const Document &doc, const StopwordSet &stopwords);

struct SentenceChoice {
  std::size_t sentence_index = 0;
  // Where the answer sits for this sentence: the original span when the
  // sentence holds it, else the first verbatim occurrence inside the
  // sentence, else the part of a boundary-crossing span that falls inside.
  CharRange answer_range;
};

// Candidates are sentences overlapping the answer plus sentences containing
// the answer text verbatim; the highest score wins, lowest index on ties.
// nullopt when the span does not validate against the document.
std::optional<SentenceChoice> ChooseSentence(const Document &doc, const AnswerSpan &answer,
                                             const std::vector<SentenceScore> &scores);
std::optional<std::size_t> MapAnswerToSentence(const Document &doc, const AnswerSpan &answer,
                                               const std::vector<SentenceScore> &scores);

struct SummaryItem {
  std::string question_id;
  std::size_t sentence_index = 0;
  std::string sentence_text;
  AnswerSpan answer;  // range points at the highlighted occurrence
  double score = 0.0;

  friend bool operator==(const SummaryItem &, const SummaryItem &) = default;
};

struct Summary {
  std::string doc_id;
  std::vector<SummaryItem> items;  // in question order
  std::string rendered;

  friend bool operator==(const Summary &, const Summary &) = default;
};

struct RenderOptions {
  std::string emphasis_open = "**";
  std::string emphasis_close = "**";
};

// Answers are matched to questions by id. A sentence chosen by several
// questions is kept once, for the lowest-order question. Beyond `max_items`
// the highest-scoring items survive (lower order wins ties); 0 means one per
// question.
Summary BuildSummary(const Document &doc, const std::vector<QuestionSpec> &questions,
                     const std::vector<AnswerSpan> &answers,
                     const std::vector<SentenceScore> &scores, std::size_t max_items = 0,
                     const RenderOptions &render = {});

nlohmann::ordered_json SummaryToJson(const Summary &summary);

}  // namespace oats
