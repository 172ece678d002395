#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 <-> code point conversion and the small set of Unicode character
// properties the tokenizer and sentence splitter depend on. All offsets in
// the library are Unicode scalar-value indices.

namespace oats {

// Half-open range [start, end) of scalar-value offsets.
struct CharRange {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool Contains(const CharRange &other) const {
    return start <= other.start && other.end <= end;
  }
  bool Overlaps(const CharRange &other) const {
    return start < other.end && other.start < end;
  }
  friend bool operator==(const CharRange &, const CharRange &) = default;
  friend auto operator<=>(const CharRange &, const CharRange &) = default;
};

// Throws Error(kInvalidUtf8) on malformed input or surrogate code points.
std::u32string DecodeUtf8(std::string_view bytes);
std::string EncodeUtf8(std::u32string_view text);
void AppendUtf8(char32_t c, std::string *out);

// Number of scalar values in a valid UTF-8 string.
std::size_t Utf8Length(std::string_view bytes);

bool IsWhitespace(char32_t c);
bool IsAlphanumeric(char32_t c);
bool IsDigit(char32_t c);
bool IsUppercase(char32_t c);

// Simple (one-to-one) case folding for ASCII, Latin-1, Latin Extended-A,
// Greek and Cyrillic. Other characters map to themselves.
char32_t FoldCase(char32_t c);
std::u32string FoldCase(std::u32string_view text);
std::string FoldCaseUtf8(std::string_view text);

}  // namespace oats
