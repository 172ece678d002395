#include "oats/summarizer.h"

#include <algorithm>
#include <random>

#include "doctest.h"
#include "fixtures.h"
#include "oats/text.h"

using namespace oats;

namespace {

const std::vector<std::string> kVocab = {
    "patients", "fever", "cough", "the", "of", "and", "hypertension", "645", "study",
    "ward", "with", "lobe", "in", "data", "china", "were", "x-ray"};

std::vector<double> Values(const std::vector<SentenceScore> &scores) {
  std::vector<double> out;
  for (const auto &s : scores) out.push_back(s.score);
  return out;
}

AnswerSpan SpanAt(const Document &doc, std::string id, CharRange range, double score = 1.0) {
  AnswerSpan a;
  a.question_id = std::move(id);
  a.answered = true;
  a.range = range;
  a.text = doc.Slice(range);
  a.score = score;
  return a;
}

AnswerSpan Unanswered(std::string id) {
  AnswerSpan a;
  a.question_id = std::move(id);
  a.no_answer_score = 1.0;
  return a;
}

// Range of the first occurrence of `needle` in the document, in scalar values.
CharRange Find(const Document &doc, const std::string &needle, std::size_t from = 0) {
  const auto n = DecodeUtf8(needle);
  const auto pos = doc.full_text32.find(n, from);
  REQUIRE(pos != std::u32string::npos);
  return {pos, pos + n.size()};
}

std::vector<SentenceScore> ScoresOf(std::vector<double> values) {
  std::vector<SentenceScore> out;
  for (std::size_t i = 0; i < values.size(); ++i) out.push_back({i, values[i]});
  return out;
}

}  // namespace

TEST_CASE("tf scoring examples") {
  const Document doc = MakeDocument("d", "", "a b. B c.", {});
  CHECK(Values(ScoreSentences(doc, {})) == std::vector<double>{3, 3});
  CHECK(Values(ScoreSentences(doc, {"b"})) == std::vector<double>{1, 1});
  const Document stop = MakeDocument("d", "", "The of. And.", {});
  CHECK(Values(ScoreSentences(stop, DefaultStopwords())) == std::vector<double>{0, 0});
  CHECK(ScoreSentences(MakeDocument("d", "", "", {}), {}).empty());
}

TEST_CASE("default stopwords") {
  const auto &words = DefaultStopwords();
  CHECK(words.count("the"));
  CHECK(words.count("of"));
  CHECK_FALSE(words.count("patients"));
  CHECK_FALSE(words.count("hypertension"));
  oats::testing::TempDir dir;
  oats::testing::WriteText(dir / "s.txt", "# comment\nThe\n\nPatients\n");
  const auto loaded = LoadStopwords(dir / "s.txt");
  CHECK(loaded == StopwordSet{"the", "patients"});
}

TEST_CASE("property: tf scores equal a brute-force recount") {
  std::set<std::string> stop_oracle{"the", "of", "and", "in", "with", "were"};
  StopwordSet stopwords(stop_oracle.begin(), stop_oracle.end());
  for (std::uint32_t seed = 0; seed < 200; ++seed) {
    const auto words = oats::testing::MakeWordDocument(seed, 8, 12, kVocab);
    const Document doc = MakeDocument("d", "", words.text, {});
    REQUIRE(doc.sentences.size() == words.words.size());
    const auto expected = oats::testing::BruteTfScores(words, stop_oracle);
    const auto got = ScoreSentences(doc, stopwords);
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(got[i].score == static_cast<double>(expected[i]));
    }
  }
}

TEST_CASE("property: adding a non-stopword occurrence never lowers a score") {
  std::mt19937 rng(8);
  for (std::uint32_t seed = 0; seed < 100; ++seed) {
    auto words = oats::testing::MakeWordDocument(seed, 5, 8, kVocab);
    const Document before = MakeDocument("d", "", words.text, {});
    const auto s0 = ScoreSentences(before, DefaultStopwords());
    const std::size_t target = rng() % words.words.size();
    // Insert a word just before the final period of sentence `target`.
    const std::string extra = "fever";
    std::string text;
    for (std::size_t i = 0; i < words.words.size(); ++i) {
      std::string sentence = before.sentences[i].text;
      if (i == target) sentence.insert(sentence.size() - 1, " " + extra);
      text += (i ? " " : "") + sentence;
    }
    const auto s1 = ScoreSentences(MakeDocument("d", "", text, {}), DefaultStopwords());
    CHECK(s1[target].score >= s0[target].score + 1);
  }
}

TEST_CASE("answer mapping") {
  const Document doc = MakeDocument("d", "",
                                    "Zero here. One has 645 patients. Two is plain. "
                                    "Three also has 645 cases.",
                                    {});
  REQUIRE(doc.sentences.size() == 4);
  const auto first = Find(doc, "645");
  const auto in_three = Find(doc, "645", first.end);
  // Contained in exactly one sentence.
  CHECK(MapAnswerToSentence(doc, SpanAt(doc, "Q", Find(doc, "plain")), ScoresOf({1, 1, 1, 1})) ==
        std::optional<std::size_t>(2));
  // Verbatim repetition: the higher-scoring sentence wins.
  CHECK(MapAnswerToSentence(doc, SpanAt(doc, "Q", first), ScoresOf({0, 5, 0, 9})) ==
        std::optional<std::size_t>(3));
  CHECK(MapAnswerToSentence(doc, SpanAt(doc, "Q", first), ScoresOf({0, 9, 0, 5})) ==
        std::optional<std::size_t>(1));
  // Ties go to the lower index.
  CHECK(MapAnswerToSentence(doc, SpanAt(doc, "Q", in_three), ScoresOf({0, 4, 0, 4})) ==
        std::optional<std::size_t>(1));
  auto choice = ChooseSentence(doc, SpanAt(doc, "Q", first), ScoresOf({0, 5, 0, 9}));
  REQUIRE(choice);
  CHECK(choice->answer_range == in_three);
  // Spanning a boundary: the higher-scoring overlapped sentence, clipped.
  const CharRange straddle{Find(doc, "patients.").start, Find(doc, "Two").end};
  choice = ChooseSentence(doc, SpanAt(doc, "Q", straddle), ScoresOf({0, 3, 7, 0}));
  REQUIRE(choice);
  CHECK(choice->sentence_index == 2);
  CHECK(doc.Slice(choice->answer_range) == "Two");
  CHECK(MapAnswerToSentence(doc, SpanAt(doc, "Q", straddle), ScoresOf({0, 8, 7, 0})) ==
        std::optional<std::size_t>(1));
  // Unanswered and inconsistent spans map nowhere.
  CHECK_FALSE(MapAnswerToSentence(doc, Unanswered("Q"), ScoresOf({1, 1, 1, 1})));
  auto wrong = SpanAt(doc, "Q", first);
  wrong.text = "999";
  CHECK_FALSE(MapAnswerToSentence(doc, wrong, ScoresOf({1, 1, 1, 1})));
}

TEST_CASE("summary with nothing answered is empty") {
  const Document doc = MakeDocument("d", "", "One. Two.", {});
  const std::vector<QuestionSpec> qs = {{"Q1", "a", 0, {}}, {"Q2", "b", 1, {}}};
  const auto s = BuildSummary(doc, qs, {Unanswered("Q1"), Unanswered("Q2")},
                              ScoreSentences(doc, {}));
  CHECK(s.items.empty());
  CHECK(s.rendered.empty());
}

TEST_CASE("duplicates collapse to the lowest order and rendering highlights answers") {
  const Document doc = MakeDocument("d", "", "Alpha beta gamma. Delta epsilon.", {});
  const std::vector<QuestionSpec> qs = {{"Q1", "a", 1, {}}, {"Q2", "b", 0, {}}, {"Q3", "c", 2, {}}};
  const std::vector<AnswerSpan> answers = {SpanAt(doc, "Q1", Find(doc, "beta")),
                                           SpanAt(doc, "Q2", Find(doc, "gamma")),
                                           SpanAt(doc, "Q3", Find(doc, "Delta"))};
  const auto s = BuildSummary(doc, qs, answers, ScoreSentences(doc, {}));
  REQUIRE(s.items.size() == 2);
  CHECK(s.items[0].question_id == "Q2");
  CHECK(s.items[1].question_id == "Q3");
  CHECK(s.rendered == "Alpha beta **gamma**. **Delta** epsilon.");
  RenderOptions html{"<b>", "</b>"};
  CHECK(BuildSummary(doc, qs, answers, ScoreSentences(doc, {}), 0, html).rendered ==
        "Alpha beta <b>gamma</b>. <b>Delta</b> epsilon.");
}

TEST_CASE("max_items keeps the highest-scoring items in question order") {
  std::string text;
  for (int i = 0; i < 8; ++i) text += "Sentence" + std::to_string(i) + " here. ";
  const Document doc = MakeDocument("d", "", text, {});
  REQUIRE(doc.sentences.size() == 8);
  const std::vector<double> score_values = {5, 1, 7, 3, 8, 2, 6, 4};
  std::vector<QuestionSpec> qs;
  std::vector<AnswerSpan> answers;
  for (int i = 0; i < 8; ++i) {
    const std::string id = "Q" + std::to_string(i + 1);
    qs.push_back({id, id, i, {}});
    answers.push_back(SpanAt(doc, id, Find(doc, "Sentence" + std::to_string(i))));
  }
  const auto s = BuildSummary(doc, qs, answers, ScoresOf(score_values), 5);
  REQUIRE(s.items.size() == 5);
  std::vector<std::string> ids;
  for (const auto &item : s.items) ids.push_back(item.question_id);
  // Top five scores are 8,7,6,5,4 at questions 5,3,7,1,8.
  CHECK(ids == std::vector<std::string>{"Q1", "Q3", "Q5", "Q7", "Q8"});
  CHECK(BuildSummary(doc, qs, answers, ScoresOf(score_values)).items.size() == 8);
}

TEST_CASE("imaging fixture summary opens with the hypertension sentence") {
  const auto &f = oats::testing::Imaging();
  const Document doc = ParseCorpusRecord(f.record_json, "fixture");
  const auto questions = ParseQuestions(f.questions_json);
  const StubBackend stub(ParseStubRules(f.rules_json));
  const auto answers = AskAll(stub, questions, doc.full_text);
  const auto s = BuildSummary(doc, questions, answers.answers,
                              ScoreSentences(doc, DefaultStopwords()));
  REQUIRE_FALSE(s.items.empty());
  CHECK(s.items[0].question_id == "Q1");
  CHECK(s.items[0].sentence_text.rfind(
            "Patients with at least one coexisting underlying conditions and patients with "
            "hypertension were observed in 28.8% and 16.8%",
            0) == 0);
  CHECK(s.rendered.rfind("**Patients with at least one coexisting", 0) == 0);
  bool has_645 = false;
  for (const auto &item : s.items) {
    has_645 = has_645 || item.sentence_text.find("645") != std::string::npos;
  }
  CHECK(has_645);
}

TEST_CASE("property: summaries are extractive, covered, distinct, ordered and permutation-invariant") {
  std::mt19937 rng(1234);
  for (int trial = 0; trial < 300; ++trial) {
    const auto words = oats::testing::MakeWordDocument(rng(), 10, 10, kVocab);
    const Document doc = MakeDocument("d", "", words.text, {});
    const auto scores = ScoreSentences(doc, DefaultStopwords());
    const std::size_t nq = 1 + rng() % 8;
    std::vector<int> orders(nq);
    for (std::size_t i = 0; i < nq; ++i) orders[i] = static_cast<int>(i) * 3;
    std::shuffle(orders.begin(), orders.end(), rng);
    std::vector<QuestionSpec> qs;
    std::vector<AnswerSpan> answers;
    for (std::size_t i = 0; i < nq; ++i) {
      const std::string id = "Q" + std::to_string(i);
      qs.push_back({id, id, orders[i], {}});
      if (rng() % 4 == 0) {
        answers.push_back(Unanswered(id));
        continue;
      }
      const std::size_t len = doc.length();
      std::size_t a = rng() % len, b = rng() % len;
      if (a > b) std::swap(a, b);
      if (rng() % 2) b = std::min(len, a + 1 + rng() % 6);
      if (b == a) b = a + 1;
      answers.push_back(SpanAt(doc, id, {a, b}, 0.5));
    }
    const std::size_t max_items = rng() % 3 == 0 ? 1 + rng() % nq : 0;
    const auto s = BuildSummary(doc, qs, answers, scores, max_items);

    std::map<std::string, int> order_of;
    for (const auto &q : qs) order_of[q.id] = q.order;
    std::set<std::size_t> seen;
    std::string expected_render;
    for (std::size_t i = 0; i < s.items.size(); ++i) {
      const auto &item = s.items[i];
      REQUIRE(item.sentence_index < doc.sentences.size());
      const Sentence &sentence = doc.sentences[item.sentence_index];
      CHECK(item.sentence_text == sentence.text);
      CHECK(doc.full_text.find(item.sentence_text) != std::string::npos);
      CHECK(item.sentence_text.find(item.answer.text) != std::string::npos);
      CHECK(sentence.range.Contains(*item.answer.range));
      CHECK(doc.Slice(*item.answer.range) == item.answer.text);
      CHECK(seen.insert(item.sentence_index).second);
      if (i > 0) CHECK(order_of[s.items[i - 1].question_id] < order_of[item.question_id]);
      const auto &r = *item.answer.range;
      const auto &t = doc.full_text32;
      expected_render += (i ? " " : "") +
                         EncodeUtf8(t.substr(sentence.range.start, r.start - sentence.range.start)) +
                         "**" + item.answer.text + "**" +
                         EncodeUtf8(t.substr(r.end, sentence.range.end - r.end));
    }
    CHECK(s.rendered == expected_render);
    CHECK(s.items.size() <= (max_items ? max_items : nq));

    auto shuffled = answers;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(BuildSummary(doc, qs, shuffled, scores, max_items) == s);
  }
}

TEST_CASE("summary json shape") {
  const Document doc = MakeDocument("d7", "", "Alpha beta.", {});
  const auto s = BuildSummary(doc, {{"Q1", "q", 0, {}}}, {SpanAt(doc, "Q1", Find(doc, "beta"))},
                              ScoresOf({2}));
  CHECK(SummaryToJson(s).dump() ==
        R"({"doc_id":"d7","items":[{"question_id":"Q1","sentence_index":0,"sentence":"Alpha beta.","answer":"beta","answer_range":[6,10],"score":2.0}],"rendered":"Alpha **beta**."})");
}
