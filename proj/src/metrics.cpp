#include "fgdm/metrics.hpp"

#include "fgdm/text.hpp"

#include <cmath>
#include <map>
#include <numeric>

namespace fgdm::metrics {

std::string_view to_string(Baseline baseline) {
  return baseline == Baseline::source_vs_fixed ? "source_vs_fixed" : "fixed_vs_truth";
}

long levenshtein(std::string_view a, std::string_view b) {
  return edit_distance(text::decode_utf8(a), text::decode_utf8(b));
}

long line_dist(std::string_view a, std::string_view b) {
  auto lines = [](std::string_view s) {
    std::vector<std::string_view> out = text::split_lines(s);
    for (auto& l : out) l = text::strip_cr(l);
    return out;
  };
  return edit_distance(lines(a), lines(b));
}

namespace {

bool is_space(char32_t c) {
  return c == U' ' || (c >= U'\t' && c <= U'\r') || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

bool is_identifier(char32_t c) {
  if (c < 0x80) {
    return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9') ||
           c == U'_';
  }
  return !is_space(c);
}

std::map<std::u32string, double> counts(std::string_view text) {
  std::map<std::u32string, double> out;
  for (auto& t : tokenize(text)) out[std::move(t)] += 1.0;
  return out;
}

}  // namespace

std::vector<std::u32string> tokenize(std::string_view text) {
  const std::u32string s = text::decode_utf8(text);
  std::vector<std::u32string> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    if (is_space(s[i])) {
      ++i;
    } else if (is_identifier(s[i])) {
      const std::size_t b = i;
      while (i < s.size() && is_identifier(s[i])) ++i;
      tokens.emplace_back(s.substr(b, i - b));
    } else {
      tokens.emplace_back(1, s[i++]);
    }
  }
  return tokens;
}

double cosine_sim(std::string_view a, std::string_view b) {
  const auto ca = counts(a);
  const auto cb = counts(b);
  if (ca.empty() || cb.empty()) return 0.0;
  if (ca == cb) return 1.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [tok, n] : ca) {
    na += n * n;
    if (const auto it = cb.find(tok); it != cb.end()) dot += n * it->second;
  }
  for (const auto& [tok, n] : cb) nb += n * n;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

MetricsRecord measure(std::string_view a, std::string_view b, Baseline baseline) {
  return {levenshtein(a, b), line_dist(a, b), cosine_sim(a, b), baseline};
}

SummaryStats aggregate(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("aggregate needs at least one value");
  SummaryStats s;
  s.n = values.size();
  const double n = static_cast<double>(s.n);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = s.n / 2;
  s.median = s.n % 2 == 1 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2.0;

  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std_population = std::sqrt(ss / n);
  if (s.n > 1) s.std_sample = std::sqrt(ss / (n - 1.0));
  return s;
}

}  // namespace fgdm::metrics
