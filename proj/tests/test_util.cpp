#include "tdmkg/util.hpp"

#include "doctest.h"

using namespace tdmkg;

TEST_CASE("levenshtein matches hand-computed distances") {
  CHECK(levenshtein("", "") == 0);
  CHECK(levenshtein("abc", "") == 3);
  CHECK(levenshtein("kitten", "sitting") == 3);
  CHECK(levenshtein("f1 score", "f1") == 6);
  CHECK(levenshtein("f1 score", "f1 scores") == 1);
  CHECK(levenshtein("sentiment mining", "sentiment analysis") == 8);
}

TEST_CASE("edit distance normalizations") {
  CHECK(normalized_edit_distance("f1 score", "f1") == doctest::Approx(0.75));
  CHECK(normalized_edit_distance("x", "x") == 0.0);
  CHECK(normalized_edit_distance("", "") == 0.0);
  CHECK(length_sum_edit_distance("sentiment mining", "sentiment analysis") ==
        doctest::Approx(8.0 / 34.0));
}

TEST_CASE("edit distance is symmetric and bounded") {
  Rng rng(42);
  auto random_string = [&](std::size_t max_len) {
    std::string s;
    std::size_t len = rng.uniform_index(max_len + 1);
    for (std::size_t i = 0; i < len; ++i) {
      s.push_back(static_cast<char>('a' + rng.uniform_index(4)));
    }
    return s;
  };
  for (int i = 0; i < 500; ++i) {
    std::string a = random_string(12);
    std::string b = random_string(12);
    double dab = normalized_edit_distance(a, b);
    CHECK(dab == normalized_edit_distance(b, a));
    CHECK(dab >= 0.0);
    CHECK(dab <= 1.0);
    if (a == b) CHECK(dab == 0.0);
  }
}

TEST_CASE("token jaccard") {
  CHECK(token_jaccard("f1 score", "f1 scores") == doctest::Approx(1.0 / 3.0));
  CHECK(token_jaccard("rouge-1", "rouge-2") == 0.0);
  CHECK(token_jaccard("a b", "b a") == 1.0);
  CHECK(token_jaccard("", "") == 1.0);
}

TEST_CASE("collapse_whitespace and split_tokens") {
  CHECK(collapse_whitespace("  a  \t b\nc ") == "a b c");
  CHECK(split_tokens(" one  two ") == std::vector<std::string>{"one", "two"});
  CHECK(split_tokens("").empty());
}

TEST_CASE("fnv hex ids are stable and fixed-width") {
  CHECK(to_hex16(fnv1a64("abc")).size() == 16);
  CHECK(to_hex16(fnv1a64("abc")) == to_hex16(fnv1a64("abc")));
  CHECK(to_hex16(fnv1a64("abc")) != to_hex16(fnv1a64("abd")));
}

TEST_CASE("rng is deterministic and shuffle preserves contents") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

  std::vector<int> v{1, 2, 3, 4, 5, 6, 7};
  std::vector<int> w = v;
  Rng r1(3), r2(3);
  r1.shuffle(v);
  r2.shuffle(w);
  CHECK(v == w);
  std::sort(v.begin(), v.end());
  CHECK(v == std::vector<int>{1, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("uniform_index stays in range") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    CHECK(rng.uniform_index(7) < 7);
    double d = rng.uniform_double();
    CHECK(d >= 0.0);
    CHECK(d < 1.0);
  }
}

TEST_CASE("logistic endpoints") {
  CHECK(logistic(0.0) == doctest::Approx(0.5));
  CHECK(logistic(40.0) == doctest::Approx(1.0));
  CHECK(logistic(-40.0) == doctest::Approx(0.0));
  CHECK(logistic(2.0) + logistic(-2.0) == doctest::Approx(1.0));
}
