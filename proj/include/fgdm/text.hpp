#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fgdm::text {

/// Replaces every ill-formed UTF-8 sequence (including encoded surrogates)
/// with U+FFFD. Well-formed input is returned unchanged.
std::string sanitize_utf8(std::string_view bytes);

/// Decodes UTF-8 into Unicode scalar values; ill-formed sequences decode to
/// U+FFFD, one replacement per maximal invalid subpart.
std::u32string decode_utf8(std::string_view bytes);

std::string encode_utf8(std::u32string_view scalars);

/// Splits on '\n'. A trailing newline does not open an extra empty line, so
/// "a\nb\n" and "a\nb" both yield {"a", "b"}; "" yields no lines.
std::vector<std::string_view> split_lines(std::string_view source);

/// Strips exactly one trailing '\r'.
std::string_view strip_cr(std::string_view line);

bool is_blank(std::string_view line);

std::string_view trim(std::string_view s);

/// Reads a file as UTF-8 with replacement of invalid sequences.
std::string read_file(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, std::string_view contents);

/// Lines start..end (1-based, inclusive) joined with '\n', clamped to the
/// lines that exist.
std::string slice_lines(std::string_view source, int start, int end);

/// Source rendered with right-aligned line numbers, as embedded in prompts.
std::string number_lines(std::string_view source);

std::string sha256_hex(std::string_view data);

/// 64-bit FNV-1a. Stable across platforms and processes.
std::uint64_t fnv1a(std::string_view data);

}  // namespace fgdm::text
