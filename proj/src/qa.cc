#include "oats/qa.h"

#include <fstream>
#include <set>

#include "oats/error.h"

namespace oats {

namespace {

std::string ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

bool IsContinuationByte(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

bool OnCharBoundary(std::string_view s, std::size_t pos) {
  return pos == s.size() || !IsContinuationByte(s[pos]);
}

BackendResponse NoAnswer() {
  BackendResponse r;
  r.answered = false;
  r.score = 0.0;
  r.no_answer_score = 1.0;
  return r;
}

}  // namespace

void CheckQuestionSet(const std::vector<QuestionSpec> &questions) {
  std::set<std::string> ids;
  std::set<int> orders;
  for (const auto &q : questions) {
    if (!ids.insert(q.id).second) {
      throw Error(ErrorCode::kDuplicateQuestion, "duplicate question id '" + q.id + "'");
    }
    if (!orders.insert(q.order).second) {
      throw Error(ErrorCode::kDuplicateQuestion,
                  "duplicate question order " + std::to_string(q.order));
    }
    if (q.order < 0) {
      throw Error(ErrorCode::kConfig, "question '" + q.id + "' has a negative order");
    }
  }
}

std::vector<QuestionSpec> ParseQuestions(std::string_view json_text) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kConfig, std::string("questions: ") + e.what());
  }
  if (!root.is_array()) throw Error(ErrorCode::kConfig, "questions: expected a list");
  std::vector<QuestionSpec> questions;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const auto &item = root[i];
    if (!item.is_object() || !item.contains("id") || !item["id"].is_string() ||
        !item.contains("text") || !item["text"].is_string()) {
      throw Error(ErrorCode::kConfig,
                  "question " + std::to_string(i) + " needs string \"id\" and \"text\"");
    }
    QuestionSpec q;
    q.id = item["id"].get<std::string>();
    q.text = item["text"].get<std::string>();
    q.order = item.contains("order") ? item["order"].get<int>() : static_cast<int>(i);
    if (item.contains("variants")) {
      for (const auto &v : item["variants"]) q.variants.push_back(v.get<std::string>());
    }
    questions.push_back(std::move(q));
  }
  CheckQuestionSet(questions);
  return questions;
}

std::vector<QuestionSpec> LoadQuestions(const std::filesystem::path &path) {
  return ParseQuestions(ReadFile(path));
}

nlohmann::ordered_json ResponseToJson(const BackendResponse &r) {
  nlohmann::ordered_json j;
  j["answered"] = r.answered;
  if (r.answered) {
    j["answer"] = r.answer;
    j["start"] = r.start ? nlohmann::ordered_json(*r.start) : nullptr;
    j["end"] = r.end ? nlohmann::ordered_json(*r.end) : nullptr;
  } else {
    j["answer"] = nullptr;
    j["start"] = nullptr;
    j["end"] = nullptr;
  }
  j["score"] = r.score;
  j["no_answer_score"] = r.no_answer_score;
  return j;
}

BackendResponse ResponseFromJson(const nlohmann::json &j) {
  auto violation = [](const std::string &why) {
    return Error(ErrorCode::kProtocolViolation, why);
  };
  if (!j.is_object()) throw violation("response is not an object");
  if (!j.contains("answered") || !j["answered"].is_boolean()) {
    throw violation("missing boolean \"answered\"");
  }
  BackendResponse r;
  r.answered = j["answered"].get<bool>();
  auto number = [&](const char *key) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw violation(std::string("missing numeric \"") + key + "\"");
    }
    return j[key].get<double>();
  };
  r.score = number("score");
  r.no_answer_score = number("no_answer_score");
  auto offset = [&](const char *key) -> std::optional<long long> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_number_integer()) throw violation(std::string("\"") + key + "\" is not an integer");
    return j[key].get<long long>();
  };
  r.start = offset("start");
  r.end = offset("end");
  if (j.contains("answer") && !j["answer"].is_null()) {
    if (!j["answer"].is_string()) throw violation("\"answer\" is not a string");
    r.answer = j["answer"].get<std::string>();
  }
  return r;
}

AnswerSpan ValidateResponse(std::string question_id, const BackendResponse &r,
                            std::u32string_view context) {
  AnswerSpan span;
  span.question_id = std::move(question_id);
  span.score = r.score;
  span.no_answer_score = r.no_answer_score;
  if (!r.answered) {
    if (!r.answer.empty() || r.start || r.end) {
      throw Error(ErrorCode::kProtocolViolation, "no-answer response carries a span");
    }
    return span;
  }
  if (!r.start || !r.end) {
    throw Error(ErrorCode::kProtocolViolation, "answered response without offsets");
  }
  const long long start = *r.start, end = *r.end;
  if (start < 0 || end <= start || static_cast<std::size_t>(end) > context.size()) {
    throw Error(ErrorCode::kProtocolViolation,
                "offsets [" + std::to_string(start) + "," + std::to_string(end) +
                    ") do not index a context of length " + std::to_string(context.size()));
  }
  const CharRange range{static_cast<std::size_t>(start), static_cast<std::size_t>(end)};
  std::string slice = EncodeUtf8(context.substr(range.start, range.size()));
  if (slice != r.answer) {
    throw Error(ErrorCode::kProtocolViolation,
                "answer \"" + r.answer + "\" does not match context slice \"" + slice + "\"");
  }
  span.answered = true;
  span.text = std::move(slice);
  span.range = range;
  return span;
}

std::vector<CharRange> ContextWindows(std::size_t length, const AskOptions &options) {
  if (length <= options.context_budget || options.window == 0 || options.stride == 0) {
    return {CharRange{0, length}};
  }
  std::vector<CharRange> windows;
  for (std::size_t start = 0;; start += options.stride) {
    const std::size_t end = std::min(start + options.window, length);
    windows.push_back({start, end});
    if (end == length) break;
  }
  return windows;
}

AnswerSpan Ask(const QaBackend &backend, const QuestionSpec &question,
               std::string_view context, const AskOptions &options) {
  const std::u32string context32 = DecodeUtf8(context);
  if (context32.empty()) {
    throw Error(ErrorCode::kProtocolViolation, "empty context for question " + question.id);
  }
  const auto windows = ContextWindows(context32.size(), options);

  std::vector<std::string_view> phrasings{question.text};
  for (const auto &v : question.variants) phrasings.push_back(v);

  std::optional<AnswerSpan> best_answer;
  std::optional<AnswerSpan> best_decline;
  for (std::string_view phrasing : phrasings) {
    for (const CharRange &w : windows) {
      const std::u32string_view piece = std::u32string_view(context32).substr(w.start, w.size());
      const std::string piece_utf8 =
          windows.size() == 1 ? std::string(context) : EncodeUtf8(piece);
      AnswerSpan span =
          ValidateResponse(question.id, backend.Answer(phrasing, piece_utf8), piece);
      if (span.answered) {
        span.range->start += w.start;
        span.range->end += w.start;
        if (!best_answer || span.score > best_answer->score) best_answer = std::move(span);
      } else if (!best_decline || span.no_answer_score > best_decline->no_answer_score) {
        best_decline = std::move(span);
      }
    }
  }
  return best_answer ? *best_answer : *best_decline;
}

AskAllResult AskAll(const QaBackend &backend, const std::vector<QuestionSpec> &questions,
                    std::string_view context, const AskOptions &options) {
  CheckQuestionSet(questions);
  AskAllResult result;
  result.answers.reserve(questions.size());
  for (const auto &q : questions) {
    try {
      result.answers.push_back(Ask(backend, q, context, options));
    } catch (const Error &e) {
      AnswerSpan failed;
      failed.question_id = q.id;
      result.answers.push_back(std::move(failed));
      result.diagnostics.push_back(q.id + ": " + e.what());
      ++result.failed;
    }
  }
  return result;
}

std::vector<StubRule> ParseStubRules(std::string_view json_text) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kConfig, std::string("stub rules: ") + e.what());
  }
  if (!root.is_array()) throw Error(ErrorCode::kConfig, "stub rules: expected a list");
  std::vector<StubRule> rules;
  for (const auto &item : root) {
    if (!item.is_object() || !item.contains("question") || !item["question"].is_string() ||
        !item.contains("pattern") || !item["pattern"].is_string()) {
      throw Error(ErrorCode::kConfig, "stub rule needs string \"question\" and \"pattern\"");
    }
    rules.push_back(StubRule{item["question"].get<std::string>(),
                             item["pattern"].get<std::string>(), item.value("regex", true)});
  }
  return rules;
}

std::vector<StubRule> LoadStubRules(const std::filesystem::path &path) {
  return ParseStubRules(ReadFile(path));
}

StubBackend::StubBackend(std::vector<StubRule> rules) {
  for (auto &rule : rules) {
    CompiledRule compiled{std::move(rule), std::nullopt};
    if (compiled.rule.pattern.empty()) {
      throw Error(ErrorCode::kInvalidPattern, "empty answer pattern");
    }
    if (compiled.rule.regex) {
      try {
        compiled.re.emplace(compiled.rule.pattern, std::regex::ECMAScript);
      } catch (const std::regex_error &e) {
        throw Error(ErrorCode::kInvalidPattern,
                    "'" + compiled.rule.pattern + "': " + e.what());
      }
    }
    rules_.push_back(std::move(compiled));
  }
}

BackendResponse StubBackend::Answer(std::string_view question,
                                    std::string_view context) const {
  for (const auto &compiled : rules_) {
    if (question.find(compiled.rule.question_substring) == std::string_view::npos) continue;

    // Byte range of the first match that falls on character boundaries.
    std::optional<std::pair<std::size_t, std::size_t>> hit;
    if (!compiled.re) {
      auto pos = context.find(compiled.rule.pattern);
      if (pos != std::string_view::npos) hit = {pos, pos + compiled.rule.pattern.size()};
    } else {
      auto begin = context.begin();
      std::match_results<std::string_view::const_iterator> m;
      std::size_t from = 0;
      while (from <= context.size() &&
             std::regex_search(begin + from, context.end(), m, *compiled.re,
                               from == 0 ? std::regex_constants::match_default
                                         : std::regex_constants::match_prev_avail)) {
        const std::size_t s = from + m.position(0);
        const std::size_t e = s + m.length(0);
        if (e > s && OnCharBoundary(context, s) && OnCharBoundary(context, e)) {
          hit = {s, e};
          break;
        }
        from = s + 1;
      }
    }
    // The first applicable rule decides, even when its pattern is absent.
    if (!hit) return NoAnswer();

    BackendResponse r;
    r.answered = true;
    r.answer = std::string(context.substr(hit->first, hit->second - hit->first));
    r.start = static_cast<long long>(Utf8Length(context.substr(0, hit->first)));
    r.end = *r.start + static_cast<long long>(Utf8Length(r.answer));
    r.score = 1.0;
    r.no_answer_score = 0.0;
    return r;
  }
  return NoAnswer();
}

}  // namespace oats
