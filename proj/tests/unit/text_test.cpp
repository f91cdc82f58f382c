#include "fgdm/text.hpp"

#include <doctest.h>

using namespace fgdm;

TEST_CASE("sanitize_utf8 keeps valid text and replaces broken sequences") {
  CHECK(text::sanitize_utf8("plain é 中 😀") == "plain é 中 😀");
  CHECK(text::sanitize_utf8("a\xff" "b") == "a\xEF\xBF\xBD" "b");
  // Encoded surrogate U+D800 is ill-formed.
  CHECK(text::decode_utf8("\xED\xA0\x80") == std::u32string(3, U'�'));
  // Truncated 3-byte sequence is one maximal subpart.
  CHECK(text::decode_utf8("\xE4\xB8") == std::u32string(1, U'�'));
  CHECK(text::decode_utf8("\xC0\xAF") == std::u32string(2, U'�'));
}

TEST_CASE("encode and decode are inverse on scalar values") {
  const std::u32string s = U"aé中😀\U0010FFFF";
  CHECK(text::decode_utf8(text::encode_utf8(s)) == s);
}

TEST_CASE("split_lines") {
  CHECK(text::split_lines("").empty());
  CHECK(text::split_lines("a\nb\n") == std::vector<std::string_view>{"a", "b"});
  CHECK(text::split_lines("a\nb") == std::vector<std::string_view>{"a", "b"});
  CHECK(text::split_lines("\n\n") == std::vector<std::string_view>{"", ""});
  CHECK(text::strip_cr("x\r") == "x");
  CHECK(text::strip_cr("x\r\r") == "x\r");
}

TEST_CASE("slice_lines clamps to existing lines") {
  const std::string src = "one\ntwo\nthree\n";
  CHECK(text::slice_lines(src, 2, 3) == "two\nthree");
  CHECK(text::slice_lines(src, 3, 99) == "three");
  CHECK(text::slice_lines(src, 5, 6).empty());
}

TEST_CASE("number_lines right-aligns") {
  std::string src;
  for (int i = 0; i < 10; ++i) src += "x\n";
  const std::string numbered = text::number_lines(src);
  CHECK(numbered.rfind(" 1 | x", 0) == 0);
  CHECK(numbered.find("10 | x") != std::string::npos);
}

TEST_CASE("hashes match published vectors") {
  CHECK(text::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(text::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(text::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}
