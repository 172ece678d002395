#include "oats/text.h"

#include <random>

#include "doctest.h"
#include "oats/error.h"

using namespace oats;

TEST_CASE("utf8 decode and encode round-trip") {
  const std::string s = "a\xC3\xA9\xE2\x82\xAC\xF0\x9F\x98\x80";  // a é € 😀
  const auto u = DecodeUtf8(s);
  REQUIRE(u.size() == 4);
  CHECK(u[0] == U'a');
  CHECK(u[1] == 0xE9);
  CHECK(u[2] == 0x20AC);
  CHECK(u[3] == 0x1F600);
  CHECK(EncodeUtf8(u) == s);
  CHECK(Utf8Length(s) == 4);
}

TEST_CASE("malformed utf8 is rejected") {
  for (const std::string bad : {std::string("\xC3"), std::string("\xC0\xAF"),
                                std::string("\xED\xA0\x80"), std::string("\xFF"),
                                std::string("ab\xE2\x82")}) {
    try {
      DecodeUtf8(bad);
      FAIL("accepted malformed input");
    } catch (const Error &e) {
      CHECK(e.code() == ErrorCode::kInvalidUtf8);
    }
  }
}

TEST_CASE("random code points survive a round-trip") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::uint32_t> dist(1, 0x10FFFF);
  for (int trial = 0; trial < 200; ++trial) {
    std::u32string text;
    for (int i = 0; i < 20; ++i) {
      char32_t c = dist(rng);
      if (c >= 0xD800 && c <= 0xDFFF) c = U'x';
      text.push_back(c);
    }
    CHECK(DecodeUtf8(EncodeUtf8(text)) == text);
  }
}

TEST_CASE("character classes") {
  CHECK(IsWhitespace(U' '));
  CHECK(IsWhitespace(U'\n'));
  CHECK(IsWhitespace(0x00A0));
  CHECK(IsWhitespace(0x3000));
  CHECK_FALSE(IsWhitespace(U'a'));
  CHECK(IsAlphanumeric(U'Z'));
  CHECK(IsAlphanumeric(U'7'));
  CHECK(IsAlphanumeric(0x00E9));
  CHECK_FALSE(IsAlphanumeric(U','));
  CHECK_FALSE(IsAlphanumeric(U'-'));
  CHECK(IsUppercase(U'P'));
  CHECK(IsUppercase(0x00C9));
  CHECK_FALSE(IsUppercase(U'p'));
  CHECK(IsDigit(U'0'));
  CHECK_FALSE(IsDigit(U'a'));
}

TEST_CASE("case folding") {
  CHECK(FoldCaseUtf8("SARS-CoV-2") == "sars-cov-2");
  CHECK(FoldCaseUtf8("\xC3\x89T\xC3\x89") == "\xC3\xA9t\xC3\xA9");  // ÉTÉ
  CHECK(FoldCase(char32_t{0x0391}) == char32_t{0x03B1});               // Greek alpha
  CHECK(FoldCase(char32_t{0x0416}) == char32_t{0x0436});               // Cyrillic zhe
  CHECK(FoldCase(U'7') == U'7');
}

TEST_CASE("char ranges") {
  CharRange a{2, 5}, b{4, 8}, c{5, 6};
  CHECK(a.size() == 3);
  CHECK(a.Overlaps(b));
  CHECK_FALSE(a.Overlaps(c));
  CHECK(CharRange{0, 10}.Contains(a));
  CHECK_FALSE(a.Contains(b));
}
