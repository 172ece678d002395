#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oats/text.h"

namespace oats {

struct Token {
  std::string surface;
  std::string normalized;
  CharRange range;  // into Document::full_text

  friend bool operator==(const Token &, const Token &) = default;
};

struct Sentence {
  std::size_t index = 0;
  CharRange range;
  std::string text;
  std::vector<Token> tokens;

  friend bool operator==(const Sentence &, const Sentence &) = default;
};

struct Section {
  std::string name;
  std::string text;

  friend bool operator==(const Section &, const Section &) = default;
};

// A segmented, offset-indexed source document. Immutable once built by
// MakeDocument; every range refers to scalar offsets in full_text.
struct Document {
  std::string doc_id;
  std::string title;
  std::string abstract;
  std::vector<Section> body;
  std::string full_text;
  std::u32string full_text32;  // decoded full_text
  std::vector<Sentence> sentences;

  std::size_t length() const { return full_text32.size(); }
  std::string Slice(CharRange range) const;
  // Index of the sentence whose range contains `range`, if any.
  std::optional<std::size_t> SentenceContaining(CharRange range) const;
};

struct SegmenterOptions {
  std::vector<std::string> abbreviations = DefaultAbbreviations();

  static std::vector<std::string> DefaultAbbreviations();
};

// Title, abstract and non-empty body paragraphs joined by '\n'. Empty parts
// are skipped.
std::string JoinFullText(std::string_view title, std::string_view abstract,
                         const std::vector<Section> &body);

// Sentence ranges over `text`. A boundary follows '.', '!' or '?' when the
// next characters are whitespace and then an uppercase letter or digit,
// unless the text up to the mark ends with a listed abbreviation. A newline
// always ends the current sentence. Ranges are trimmed of whitespace.
std::vector<CharRange> SegmentSentences(std::u32string_view text,
                                        const SegmenterOptions &options = {});
std::vector<CharRange> SegmentSentences(std::string_view utf8,
                                        const SegmenterOptions &options = {});

// Whitespace tokenizer. Offsets are shifted by `base`.
std::vector<Token> Tokenize(std::u32string_view text, std::size_t base = 0);
std::vector<Token> Tokenize(std::string_view utf8);

// Normalized token list of a free-text phrase ("High Blood-Pressure," ->
// {"high", "blood-pressure"}).
std::vector<std::string> NormalizePhrase(std::string_view phrase);

Document MakeDocument(std::string doc_id, std::string title,
                      std::string abstract, std::vector<Section> body,
                      const SegmenterOptions &options = {});

enum class CorpusFormat { kJsonl, kJsonDir };

CorpusFormat ParseCorpusFormat(std::string_view name);

// Parses one corpus record. `where` is used in error messages.
Document ParseCorpusRecord(std::string_view json_text, const std::string &where,
                           const SegmenterOptions &options = {});

std::vector<Document> IngestCorpus(const std::filesystem::path &path,
                                   CorpusFormat format,
                                   const SegmenterOptions &options = {});

}  // namespace oats
