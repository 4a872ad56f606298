#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tdmkg {

// Thrown for all parse/contract failures; the message carries the location.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

std::string ascii_lower(std::string_view s);

// Trims and collapses internal whitespace runs to a single space.
std::string collapse_whitespace(std::string_view s);

std::vector<std::string> split_tokens(std::string_view s);

bool contains_substring(std::string_view haystack, std::string_view needle);

std::size_t levenshtein(std::string_view a, std::string_view b);

// Levenshtein / max(|a|,|b|); 0 for two empty strings.
double normalized_edit_distance(std::string_view a, std::string_view b);

// Levenshtein / (|a|+|b|); the length-sum variant used by relaxed matching.
double length_sum_edit_distance(std::string_view a, std::string_view b);

// Jaccard over whitespace tokens; 1.0 for two empty token sets.
double token_jaccard(std::string_view a, std::string_view b);

std::uint64_t fnv1a64(std::string_view data);
std::string to_hex16(std::uint64_t v);

// splitmix64 stream; deterministic across platforms, unlike the standard
// distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  double uniform_double();                    // [0, 1)
  std::size_t uniform_index(std::size_t n);   // [0, n)

  template <typename T>
  void shuffle(std::vector<T>& v) {
    if (v.empty()) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
      std::swap(v[i], v[uniform_index(i + 1)]);
    }
  }

 private:
  std::uint64_t state_;
};

double logistic(double x);

}  // namespace tdmkg
