#include "oats/summarizer.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_map>

#include "oats/error.h"

namespace oats {

StopwordSet LoadStopwords(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (auto &term : NormalizePhrase(line)) words.insert(std::move(term));
  }
  return words;
}

std::vector<SentenceScore> ScoreSentences(const Document &doc, const StopwordSet &stopwords) {
  std::unordered_map<std::string_view, std::size_t> tf;
  for (const auto &sentence : doc.sentences) {
    for (const auto &token : sentence.tokens) ++tf[token.normalized];
  }
  std::vector<SentenceScore> scores;
  scores.reserve(doc.sentences.size());
  for (const auto &sentence : doc.sentences) {
    std::size_t total = 0;
    for (const auto &token : sentence.tokens) {
      if (stopwords.count(token.normalized) == 0) total += tf[token.normalized];
    }
    scores.push_back(SentenceScore{sentence.index, static_cast<double>(total)});
  }
  return scores;
}

std::optional<SentenceChoice> ChooseSentence(const Document &doc, const AnswerSpan &answer,
                                             const std::vector<SentenceScore> &scores) {
  if (!answer.answered || !answer.range) return std::nullopt;
  const CharRange span = *answer.range;
  if (span.start >= span.end || span.end > doc.length()) return std::nullopt;
  const std::u32string_view text(doc.full_text32);
  const std::u32string needle = DecodeUtf8(answer.text);
  if (text.substr(span.start, span.size()) != needle) return std::nullopt;

  auto score_of = [&scores](std::size_t index) {
    return index < scores.size() ? scores[index].score : 0.0;
  };

  // sentence -> (anchored range, whether it holds the whole answer)
  std::map<std::size_t, std::pair<CharRange, bool>> candidates;
  for (const auto &s : doc.sentences) {
    if (!s.range.Overlaps(span)) continue;
    const CharRange clipped{std::max(s.range.start, span.start), std::min(s.range.end, span.end)};
    candidates.emplace(s.index, std::make_pair(clipped, s.range.Contains(span)));
  }
  for (std::size_t pos = text.find(needle); pos != std::u32string_view::npos;
       pos = text.find(needle, pos + 1)) {
    const CharRange occurrence{pos, pos + needle.size()};
    if (auto index = doc.SentenceContaining(occurrence)) {
      auto it = candidates.find(*index);
      if (it == candidates.end()) {
        candidates.emplace(*index, std::make_pair(occurrence, true));
      } else if (!it->second.second) {
        it->second = {occurrence, true};
      }
    }
  }
  if (candidates.empty()) return std::nullopt;

  std::optional<SentenceChoice> best;
  for (const auto &[index, anchored] : candidates) {
    if (!best || score_of(index) > score_of(best->sentence_index)) {
      best = SentenceChoice{index, anchored.first};
    }
  }
  return best;
}

std::optional<std::size_t> MapAnswerToSentence(const Document &doc, const AnswerSpan &answer,
                                               const std::vector<SentenceScore> &scores) {
  auto choice = ChooseSentence(doc, answer, scores);
  if (!choice) return std::nullopt;
  return choice->sentence_index;
}

namespace {

std::string RenderItem(const Document &doc, const SummaryItem &item,
                       const RenderOptions &render) {
  const Sentence &sentence = doc.sentences[item.sentence_index];
  const CharRange s = sentence.range;
  const CharRange a = *item.answer.range;
  const std::size_t hs = std::max(s.start, a.start);
  const std::size_t he = std::min(s.end, a.end);
  const std::u32string_view text(doc.full_text32);
  std::string out = EncodeUtf8(text.substr(s.start, hs - s.start));
  out += render.emphasis_open;
  out += EncodeUtf8(text.substr(hs, he - hs));
  out += render.emphasis_close;
  out += EncodeUtf8(text.substr(he, s.end - he));
  return out;
}

}  // namespace

Summary BuildSummary(const Document &doc, const std::vector<QuestionSpec> &questions,
                     const std::vector<AnswerSpan> &answers,
                     const std::vector<SentenceScore> &scores, std::size_t max_items,
                     const RenderOptions &render) {
  std::unordered_map<std::string, const AnswerSpan *> by_id;
  for (const auto &a : answers) by_id.emplace(a.question_id, &a);

  std::vector<const QuestionSpec *> ordered;
  for (const auto &q : questions) ordered.push_back(&q);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const QuestionSpec *a, const QuestionSpec *b) { return a->order < b->order; });

  struct Pending {
    SummaryItem item;
    int order;
  };
  std::vector<Pending> pending;
  std::vector<bool> taken(doc.sentences.size(), false);
  for (const QuestionSpec *q : ordered) {
    auto it = by_id.find(q->id);
    if (it == by_id.end() || !it->second->answered) continue;
    auto choice = ChooseSentence(doc, *it->second, scores);
    if (!choice || taken[choice->sentence_index]) continue;
    taken[choice->sentence_index] = true;

    SummaryItem item;
    item.question_id = q->id;
    item.sentence_index = choice->sentence_index;
    item.sentence_text = doc.sentences[choice->sentence_index].text;
    item.answer = *it->second;
    item.answer.range = choice->answer_range;
    item.answer.text = doc.Slice(choice->answer_range);
    item.score = choice->sentence_index < scores.size() ? scores[choice->sentence_index].score : 0.0;
    pending.push_back(Pending{std::move(item), q->order});
  }

  const std::size_t limit = max_items == 0 ? questions.size() : max_items;
  if (pending.size() > limit) {
    std::stable_sort(pending.begin(), pending.end(), [](const Pending &a, const Pending &b) {
      if (a.item.score != b.item.score) return a.item.score > b.item.score;
      return a.order < b.order;
    });
    pending.resize(limit);
    std::stable_sort(pending.begin(), pending.end(),
                     [](const Pending &a, const Pending &b) { return a.order < b.order; });
  }

  Summary summary;
  summary.doc_id = doc.doc_id;
  for (auto &p : pending) {
    if (!summary.rendered.empty()) summary.rendered.push_back(' ');
    summary.rendered += RenderItem(doc, p.item, render);
    summary.items.push_back(std::move(p.item));
  }
  return summary;
}

nlohmann::ordered_json SummaryToJson(const Summary &summary) {
  nlohmann::ordered_json j;
  j["doc_id"] = summary.doc_id;
  j["items"] = nlohmann::ordered_json::array();
  for (const auto &item : summary.items) {
    nlohmann::ordered_json entry;
    entry["question_id"] = item.question_id;
    entry["sentence_index"] = item.sentence_index;
    entry["sentence"] = item.sentence_text;
    entry["answer"] = item.answer.text;
    entry["answer_range"] = {item.answer.range->start, item.answer.range->end};
    entry["score"] = item.score;
    j["items"].push_back(std::move(entry));
  }
  j["rendered"] = summary.rendered;
  return j;
}

}  // namespace oats
