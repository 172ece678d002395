#include "oats/corpus.h"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "json.hpp"
#include "oats/error.h"

namespace oats {

namespace {

bool IsSentenceMark(char32_t c) { return c == '.' || c == '!' || c == '?'; }

// Token pieces keep '-' at their edges so that "-5" or "sars-cov-" survive.
bool IsTokenChar(char32_t c) { return c == '-' || IsAlphanumeric(c); }

bool EndsWithAbbreviation(std::u32string_view text, std::size_t mark,
                          const std::vector<std::u32string> &abbrevs) {
  const std::size_t end = mark + 1;
  for (const auto &abbr : abbrevs) {
    const std::size_t len = abbr.size();
    if (len == 0 || len > end) continue;
    const std::size_t begin = end - len;
    if (text.substr(begin, len) != abbr) continue;
    if (begin == 0 || !IsAlphanumeric(text[begin - 1])) return true;
  }
  return false;
}

}  // namespace

std::vector<std::string> SegmenterOptions::DefaultAbbreviations() {
  return {"e.g.", "i.e.", "et al.", "Fig.", "Figs.", "vs.", "Dr.",
          "No.",  "Eq.",  "Ref.",   "cf.",  "Mr.",   "Mrs.", "Ms.",
          "Prof.", "approx."};
}

std::string Document::Slice(CharRange range) const {
  return EncodeUtf8(std::u32string_view(full_text32).substr(range.start, range.size()));
}

std::optional<std::size_t> Document::SentenceContaining(CharRange range) const {
  auto it = std::upper_bound(
      sentences.begin(), sentences.end(), range.start,
      [](std::size_t pos, const Sentence &s) { return pos < s.range.start; });
  if (it == sentences.begin()) return std::nullopt;
  --it;
  if (it->range.Contains(range)) return it->index;
  return std::nullopt;
}

std::string JoinFullText(std::string_view title, std::string_view abstract,
                         const std::vector<Section> &body) {
  std::string out;
  auto append = [&out](std::string_view part) {
    if (part.empty()) return;
    if (!out.empty()) out.push_back('\n');
    out.append(part);
  };
  append(title);
  append(abstract);
  for (const auto &section : body) append(section.text);
  return out;
}

std::vector<CharRange> SegmentSentences(std::u32string_view text,
                                        const SegmenterOptions &options) {
  std::vector<std::u32string> abbrevs;
  abbrevs.reserve(options.abbreviations.size());
  for (const auto &a : options.abbreviations) abbrevs.push_back(DecodeUtf8(a));

  std::vector<CharRange> ranges;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::size_t start = kNone;
  std::size_t last = 0;  // one past the last non-whitespace char seen
  auto close = [&](std::size_t end) {
    if (start != kNone) ranges.push_back({start, end});
    start = kNone;
  };

  const std::size_t n = text.size();
  for (std::size_t i = 0; i < n; ++i) {
    const char32_t c = text[i];
    if (c == '\n') {
      close(last);
      continue;
    }
    if (IsWhitespace(c)) continue;
    if (start == kNone) start = i;
    last = i + 1;
    if (!IsSentenceMark(c)) continue;

    std::size_t k = i + 1;
    while (k < n && IsWhitespace(text[k]) && text[k] != '\n') ++k;
    if (k == i + 1 || k >= n) continue;
    if (!IsUppercase(text[k]) && !IsDigit(text[k])) continue;
    if (EndsWithAbbreviation(text, i, abbrevs)) continue;
    close(i + 1);
  }
  close(last);
  return ranges;
}

std::vector<CharRange> SegmentSentences(std::string_view utf8,
                                        const SegmenterOptions &options) {
  return SegmentSentences(DecodeUtf8(utf8), options);
}

std::vector<Token> Tokenize(std::u32string_view text, std::size_t base) {
  std::vector<Token> tokens;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    while (i < n && IsWhitespace(text[i])) ++i;
    std::size_t j = i;
    while (j < n && !IsWhitespace(text[j])) ++j;
    std::size_t a = i, b = j;
    while (a < b && !IsTokenChar(text[a])) ++a;
    while (b > a && !IsTokenChar(text[b - 1])) --b;
    if (a < b) {
      auto surface = text.substr(a, b - a);
      tokens.push_back(Token{EncodeUtf8(surface), EncodeUtf8(FoldCase(surface)),
                             CharRange{base + a, base + b}});
    }
    i = j;
  }
  return tokens;
}

std::vector<Token> Tokenize(std::string_view utf8) {
  return Tokenize(DecodeUtf8(utf8), 0);
}

std::vector<std::string> NormalizePhrase(std::string_view phrase) {
  std::vector<std::string> terms;
  for (auto &token : Tokenize(phrase)) terms.push_back(std::move(token.normalized));
  return terms;
}

Document MakeDocument(std::string doc_id, std::string title,
                      std::string abstract, std::vector<Section> body,
                      const SegmenterOptions &options) {
  Document doc;
  doc.doc_id = std::move(doc_id);
  doc.title = std::move(title);
  doc.abstract = std::move(abstract);
  doc.body = std::move(body);
  doc.full_text = JoinFullText(doc.title, doc.abstract, doc.body);
  doc.full_text32 = DecodeUtf8(doc.full_text);

  const std::u32string_view text(doc.full_text32);
  for (const CharRange &range : SegmentSentences(text, options)) {
    Sentence sentence;
    sentence.index = doc.sentences.size();
    sentence.range = range;
    const auto piece = text.substr(range.start, range.size());
    sentence.text = EncodeUtf8(piece);
    sentence.tokens = Tokenize(piece, range.start);
    doc.sentences.push_back(std::move(sentence));
  }
  return doc;
}

CorpusFormat ParseCorpusFormat(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::kJsonl;
  if (name == "json-dir") return CorpusFormat::kJsonDir;
  throw Error(ErrorCode::kConfig, "unknown corpus format '" + std::string(name) + "'");
}

Document ParseCorpusRecord(std::string_view json_text, const std::string &where,
                           const SegmenterOptions &options) {
  using nlohmann::json;
  json record;
  try {
    record = json::parse(json_text);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kMalformedRecord, where + ": " + e.what());
  }
  auto fail = [&where](const std::string &why) -> Error {
    return Error(ErrorCode::kMalformedRecord, where + ": " + why);
  };
  if (!record.is_object()) throw fail("record is not an object");

  auto required_string = [&](const char *key) {
    auto it = record.find(key);
    if (it == record.end()) throw fail(std::string("missing '") + key + "'");
    if (!it->is_string()) throw fail(std::string("'") + key + "' is not a string");
    return it->get<std::string>();
  };
  std::string doc_id = required_string("doc_id");
  std::string title = required_string("title");
  if (doc_id.empty()) throw fail("empty 'doc_id'");

  std::string abstract;
  if (auto it = record.find("abstract"); it != record.end() && !it->is_null()) {
    if (!it->is_string()) throw fail("'abstract' is not a string");
    abstract = it->get<std::string>();
  }

  std::vector<Section> body;
  if (auto it = record.find("body"); it != record.end() && !it->is_null()) {
    if (!it->is_array()) throw fail("'body' is not an array");
    for (const auto &para : *it) {
      if (!para.is_object()) throw fail("body entry is not an object");
      Section section;
      if (auto s = para.find("section"); s != para.end() && !s->is_null()) {
        if (!s->is_string()) throw fail("body 'section' is not a string");
        section.name = s->get<std::string>();
      }
      auto t = para.find("text");
      if (t == para.end() || !t->is_string()) throw fail("body entry lacks string 'text'");
      section.text = t->get<std::string>();
      body.push_back(std::move(section));
    }
  }
  try {
    return MakeDocument(std::move(doc_id), std::move(title), std::move(abstract),
                        std::move(body), options);
  } catch (const Error &e) {
    throw fail(e.what());
  }
}

std::vector<Document> IngestCorpus(const std::filesystem::path &path,
                                   CorpusFormat format,
                                   const SegmenterOptions &options) {
  namespace fs = std::filesystem;
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  auto add = [&](Document doc, const std::string &where) {
    if (!seen.insert(doc.doc_id).second) {
      throw Error(ErrorCode::kDuplicateDocId,
                  where + ": duplicate doc_id '" + doc.doc_id + "'");
    }
    docs.push_back(std::move(doc));
  };

  std::error_code ec;
  if (!fs::exists(path, ec)) {
    throw Error(ErrorCode::kIo, "corpus path does not exist: " + path.string());
  }

  if (format == CorpusFormat::kJsonl) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (std::all_of(line.begin(), line.end(),
                      [](char c) { return c == ' ' || c == '\t' || c == '\r'; })) {
        continue;
      }
      const std::string where = path.string() + ":" + std::to_string(line_no);
      add(ParseCorpusRecord(line, where, options), where);
    }
    if (in.bad()) throw Error(ErrorCode::kIo, "read failed: " + path.string());
    return docs;
  }

  if (!fs::is_directory(path, ec)) {
    throw Error(ErrorCode::kIo, "not a directory: " + path.string());
  }
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(), [](const fs::path &a, const fs::path &b) {
    return a.filename().string() < b.filename().string();
  });
  for (const auto &file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + file.string());
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    add(ParseCorpusRecord(content, file.string(), options), file.string());
  }
  return docs;
}

}  // namespace oats
