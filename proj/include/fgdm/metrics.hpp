#pragma once

#include "fgdm/error.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fgdm::metrics {

enum class Baseline { source_vs_fixed, fixed_vs_truth };

std::string_view to_string(Baseline baseline);

struct MetricsRecord {
  long levenshtein = 0;
  long line_dist = 0;
  double cosine = 0.0;
  Baseline baseline = Baseline::source_vs_fixed;
};

/// Unit-cost edit distance between two sequences, two-row dynamic program in
/// memory proportional to the shorter input.
template <typename Seq>
long edit_distance(const Seq& a, const Seq& b) {
  const Seq& longer = a.size() >= b.size() ? a : b;
  const Seq& shorter = a.size() >= b.size() ? b : a;
  const std::size_t m = shorter.size();
  std::vector<long> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<long>(j);
  for (std::size_t i = 1; i <= longer.size(); ++i) {
    cur[0] = static_cast<long>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const long substitution = prev[j - 1] + (longer[i - 1] == shorter[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, substitution});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

/// Character-level distance over Unicode scalar values.
long levenshtein(std::string_view a, std::string_view b);

/// Edit distance whose symbols are whole lines; one trailing '\r' per line
/// is ignored.
long line_dist(std::string_view a, std::string_view b);

/// Tokens used by cosine_sim: maximal runs of identifier characters (ASCII
/// letters, digits, '_' and every non-ASCII, non-space scalar), and each
/// remaining non-whitespace character on its own.
std::vector<std::u32string> tokenize(std::string_view text);

/// Cosine of the token-frequency vectors of a and b. 0 when either side has
/// no tokens; exactly 1 when the frequency vectors are equal.
double cosine_sim(std::string_view a, std::string_view b);

MetricsRecord measure(std::string_view a, std::string_view b, Baseline baseline);

class EmptyInput : public Error {
 public:
  using Error::Error;
};

struct SummaryStats {
  double mean = 0.0;
  /// Midpoint convention: mean of the two central order statistics when n is even.
  double median = 0.0;
  double std_population = 0.0;
  /// Undefined for n == 1.
  std::optional<double> std_sample;
  std::size_t n = 0;

  /// The deviation the comparison tables report (sample).
  double std_dev() const { return std_sample.value_or(0.0); }
};

SummaryStats aggregate(std::span<const double> values);

}  // namespace fgdm::metrics
