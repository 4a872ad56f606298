#include "tdmkg/coref.hpp"

#include <map>
#include <sstream>

#include "doctest.h"
#include "testutil.hpp"

using namespace tdmkg;
using namespace tdmkg::coref;
using testutil::sentence_with;

namespace {

EntityKey task(const std::string& s) { return {s, EntityType::Task}; }
EntityKey metric(const std::string& s) { return {s, EntityType::Metric}; }

}  // namespace

TEST_CASE("abbreviation_valid") {
  CHECK(abbreviation_valid("named entity recognition", "NER"));
  CHECK(abbreviation_valid("named entity recognition", "ner"));
  CHECK_FALSE(abbreviation_valid("named entity recognition", "RNE"));
  CHECK(abbreviation_valid("natural language inference", "NLI"));
  // Word subsequence is allowed; anchoring at the first word is required.
  CHECK(abbreviation_valid("conditional random field model", "CRF"));
  CHECK_FALSE(abbreviation_valid("the named entity recognition", "NER"));
  CHECK_FALSE(abbreviation_valid("", "NER"));
  CHECK_FALSE(abbreviation_valid("named entity recognition", "2019"));
}

TEST_CASE("abbreviation_valid accepts generated initials") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t words = 2 + rng.uniform_index(4);
    std::string long_form, initials;
    for (std::size_t w = 0; w < words; ++w) {
      std::size_t len = 2 + rng.uniform_index(6);
      std::string word;
      for (std::size_t i = 0; i < len; ++i) {
        word.push_back(static_cast<char>('a' + rng.uniform_index(26)));
      }
      if (w) long_form += ' ';
      long_form += word;
      initials.push_back(static_cast<char>(word[0] - 'a' + 'A'));
    }
    CHECK(abbreviation_valid(long_form, initials));
  }
}

TEST_CASE("extract_abbreviation_pairs finds the bracket pattern") {
  std::vector<TaggedPaper> papers;
  papers.push_back({"p1", {}, {
    sentence_with("We study Named entity recognition (NER) and more NER below.",
                  {{"Named entity recognition", EntityType::Task},
                   {"NER", EntityType::Task}}),
  }});
  Corpus corpus = Corpus::from_papers(std::move(papers));
  auto pairs = extract_abbreviation_pairs(corpus);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].a.surface == "named entity recognition");
  CHECK(pairs[0].b.surface == "ner");
  CHECK(pairs[0].features.abbreviation_match);
  CHECK(pairs[0].label == true);
}

TEST_CASE("extract_abbreviation_pairs rejects digit-only brackets") {
  std::vector<TaggedPaper> papers;
  papers.push_back({"p1", {}, {
    sentence_with("Our model (2019) performs well; the model is tagged.",
                  {{"model", EntityType::Task}}),
  }});
  Corpus corpus = Corpus::from_papers(std::move(papers));
  CHECK(extract_abbreviation_pairs(corpus).empty());
}

TEST_CASE("extract_abbreviation_pairs requires both surfaces tagged as entities") {
  // "(SRL)" never tagged anywhere, so no pair.
  std::vector<TaggedPaper> papers;
  papers.push_back({"p1", {}, {
    sentence_with("semantic role labeling (SRL) is popular.",
                  {{"semantic role labeling", EntityType::Task}}),
  }});
  Corpus corpus = Corpus::from_papers(std::move(papers));
  CHECK(extract_abbreviation_pairs(corpus).empty());
}

TEST_CASE("plant-and-recover: five abbreviation patterns") {
  std::vector<TaggedPaper> papers;
  const std::vector<std::pair<std::string, std::string>> planted = {
      {"named entity recognition", "NER"},
      {"semantic role labeling", "SRL"},
      {"machine translation", "MT"},
      {"question answering", "QA"},
      {"information extraction", "IE"},
  };
  int id = 0;
  for (const auto& [long_form, abbr] : planted) {
    papers.push_back({"p" + std::to_string(id++), {}, {
      sentence_with("We study " + long_form + " (" + abbr + ") here.",
                    {{long_form, EntityType::Task}, {abbr, EntityType::Task}}),
    }});
  }
  Corpus corpus = Corpus::from_papers(std::move(papers));
  auto pairs = extract_abbreviation_pairs(corpus);
  CHECK(pairs.size() == planted.size());
}

TEST_CASE("edit_distance_pairs thresholds on normalized distance") {
  std::vector<EntityKey> inventory = {
      metric("f1 score"), metric("f1 scores"), metric("f1"), metric("bleu")};
  auto pairs = edit_distance_pairs(inventory, 0.2);
  // ("f1 score","f1 scores") at 1/9; ("f1 score","f1") at 6/8 stays out.
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].a.surface == "f1 score");
  CHECK(pairs[0].b.surface == "f1 scores");
  CHECK(pairs[0].features.normalized_edit_distance == doctest::Approx(1.0 / 9.0));

  CHECK(normalized_edit_distance("f1 score", "f1") == doctest::Approx(0.75));
  CHECK(edit_distance_pairs(inventory, 0.8).size() > 1);
  CHECK_THROWS_AS(edit_distance_pairs(inventory, 0.0), Error);
}

TEST_CASE("edit_distance_pairs never crosses types") {
  std::vector<EntityKey> inventory = {task("f1 score"), metric("f1 scores")};
  CHECK(edit_distance_pairs(inventory, 0.5).empty());
}

TEST_CASE("token_prefix_pairs captures the f1 / f1 score family") {
  std::vector<EntityKey> inventory = {
      metric("f1"), metric("f1 score"), metric("bleu"), metric("rouge-1")};
  auto pairs = token_prefix_pairs(inventory);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].a.surface == "f1");
  CHECK(pairs[0].b.surface == "f1 score");
  // "f1 score" vs "f1 scores" is not a token prefix ("score" != "scores").
  std::vector<EntityKey> other = {metric("f1 score"), metric("f1 scores")};
  CHECK(token_prefix_pairs(other).empty());
}

TEST_CASE("sample_negatives: empty positives, determinism, heuristic check") {
  std::vector<EntityKey> inventory;
  for (int i = 0; i < 12; ++i) {
    // Deliberately far-apart surfaces.
    inventory.push_back(task(std::string(1, char('a' + i)) + "-" +
                             std::string(6 + i % 3, char('q' + i % 5))));
  }
  std::vector<MentionPair> positives;
  CHECK(sample_negatives(inventory, positives, 1.0, 7).empty());

  for (int i = 0; i < 4; ++i) {
    positives.push_back(make_pair(inventory[0], inventory[1], true));
  }
  auto a = sample_negatives(inventory, positives, 1.0, 7);
  auto b = sample_negatives(inventory, positives, 1.0, 7);
  REQUIRE(a.size() == 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].a == b[i].a);
    CHECK(a[i].b == b[i].b);
    CHECK_FALSE(pair_is_heuristic_positive(a[i].a, a[i].b, 0.2));
    CHECK(a[i].label == false);
  }
}

TEST_CASE("sample_negatives on random inventories never emits a heuristic positive") {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<EntityKey> inventory;
    for (int i = 0; i < 10; ++i) {
      std::string s;
      std::size_t len = 3 + rng.uniform_index(10);
      for (std::size_t j = 0; j < len; ++j) {
        s.push_back(static_cast<char>('a' + rng.uniform_index(26)));
      }
      inventory.push_back(task(s));
    }
    std::vector<MentionPair> positives(
        3, make_pair(inventory[0], inventory[1], true));
    for (const MentionPair& pair : sample_negatives(inventory, positives, 1.0, trial)) {
      CHECK_FALSE(pair_is_heuristic_positive(pair.a, pair.b, 0.2));
    }
  }
}

TEST_CASE("jaccard rule: rouge-1 vs rouge-2 is not coreferent") {
  auto rule = StringSimilarityClassifier::jaccard_rule(0.75);
  MentionPair pair = make_pair(metric("rouge-1"), metric("rouge-2"));
  CHECK(pair.features.jaccard == 0.0);
  CHECK(rule.classify(pair) == 0.0);

  // Identical token sets pass the rule.
  MentionPair same = make_pair(metric("f1 measure"), metric("measure f1"));
  CHECK(rule.classify(same) == 1.0);
}

TEST_CASE("fitted classifier separates heuristic positives from sampled negatives") {
  std::vector<TaggedPaper> papers;
  papers.push_back({"p0", {}, {
    sentence_with("Named entity recognition (NER) and also NER.",
                  {{"Named entity recognition", EntityType::Task},
                   {"NER", EntityType::Task}}),
    sentence_with("machine translation (MT) and MT again.",
                  {{"machine translation", EntityType::Task},
                   {"MT", EntityType::Task}}),
  }});
  papers.push_back({"p1", {}, {
    sentence_with("f1 score and f1 scores and bleu and rouge and chunking and parsing.",
                  {{"f1 score", EntityType::Metric},
                   {"f1 scores", EntityType::Metric},
                   {"bleu", EntityType::Metric},
                   {"rouge", EntityType::Metric},
                   {"chunking", EntityType::Task},
                   {"parsing", EntityType::Task}}),
  }});
  Corpus corpus = Corpus::from_papers(std::move(papers));

  auto positives = heuristic_positive_pairs(corpus, 0.2);
  REQUIRE(positives.size() >= 3);  // two abbreviation pairs + edit pair
  std::vector<EntityKey> inventory;
  for (const auto& [key, entity] : corpus.inventory()) inventory.push_back(key);
  auto negatives = sample_negatives(inventory, positives, 1.0, 3);
  std::vector<MentionPair> labeled = positives;
  labeled.insert(labeled.end(), negatives.begin(), negatives.end());

  auto classifier = fit_string_similarity_classifier(labeled);
  for (const MentionPair& pair : positives) {
    CHECK(classifier.classify(pair) > 0.5);
  }
  for (const MentionPair& pair : negatives) {
    CHECK(classifier.classify(pair) < 0.5);
  }
}

TEST_CASE("classifier is symmetric in its arguments") {
  auto classifier = StringSimilarityClassifier({0.1, 2.0, 1.0, 1.5}, 0.5);
  Rng rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    std::string sa, sb;
    std::size_t la = 3 + rng.uniform_index(8);
    std::size_t lb = 3 + rng.uniform_index(8);
    for (std::size_t i = 0; i < la; ++i) {
      sa.push_back(static_cast<char>('a' + rng.uniform_index(5)));
    }
    for (std::size_t i = 0; i < lb; ++i) {
      sb.push_back(static_cast<char>('a' + rng.uniform_index(5)));
    }
    MentionPair ab = make_pair(task(sa), task(sb));
    MentionPair ba = make_pair(task(sb), task(sa));
    CHECK(classifier.classify(ab) == classifier.classify(ba));
  }
}

TEST_CASE("fit rejects unlabeled pairs") {
  std::vector<MentionPair> unlabeled{make_pair(task("a"), task("b"))};
  CHECK_THROWS_AS(fit_string_similarity_classifier(unlabeled), Error);
}

TEST_CASE("cluster_coreferent: transitivity and singletons") {
  std::vector<EntityKey> universe = {task("a"), task("b"), task("c"), task("d"),
                                     metric("m")};
  std::vector<MentionPair> pairs = {make_pair(task("a"), task("b")),
                                    make_pair(task("b"), task("c"))};
  auto clusters = cluster_coreferent(universe, pairs);
  REQUIRE(clusters[EntityType::Task].size() == 2);
  CHECK(clusters[EntityType::Task][0] ==
        std::vector<EntityKey>{task("a"), task("b"), task("c")});
  CHECK(clusters[EntityType::Task][1] == std::vector<EntityKey>{task("d")});
  CHECK(clusters[EntityType::Metric] ==
        std::vector<std::vector<EntityKey>>{{metric("m")}});
}

TEST_CASE("cluster_coreferent: no pairs, all singletons; input order irrelevant") {
  std::vector<EntityKey> universe = {task("x"), task("y")};
  auto clusters = cluster_coreferent(universe, {});
  CHECK(clusters[EntityType::Task].size() == 2);

  std::vector<MentionPair> fwd = {make_pair(task("x"), task("y"))};
  std::vector<MentionPair> rev = {make_pair(task("y"), task("x"))};
  CHECK(cluster_coreferent(universe, fwd) == cluster_coreferent(universe, rev));
}

TEST_CASE("union-find clusters equal a DFS component oracle on random graphs") {
  Rng rng(404);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 50;
    std::vector<EntityKey> universe;
    for (std::size_t i = 0; i < n; ++i) {
      universe.push_back(task("node" + std::string(2, char('a' + i / 26)) +
                              std::to_string(i)));
    }
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::size_t edge_count = rng.uniform_index(80);
    std::vector<MentionPair> pairs;
    for (std::size_t e = 0; e < edge_count; ++e) {
      std::size_t i = rng.uniform_index(n), j = rng.uniform_index(n);
      if (i == j) continue;
      edges.emplace_back(i, j);
      pairs.push_back(make_pair(universe[i], universe[j]));
    }
    auto clusters = cluster_coreferent(universe, pairs);

    // DFS oracle over the same graph.
    std::vector<std::vector<std::size_t>> adjacency(n);
    for (auto [i, j] : edges) {
      adjacency[i].push_back(j);
      adjacency[j].push_back(i);
    }
    std::vector<int> component(n, -1);
    int components = 0;
    for (std::size_t start = 0; start < n; ++start) {
      if (component[start] != -1) continue;
      std::vector<std::size_t> stack{start};
      component[start] = components;
      while (!stack.empty()) {
        std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w : adjacency[v]) {
          if (component[w] == -1) {
            component[w] = components;
            stack.push_back(w);
          }
        }
      }
      ++components;
    }
    std::map<int, std::set<EntityKey>> oracle;
    for (std::size_t i = 0; i < n; ++i) oracle[component[i]].insert(universe[i]);
    std::set<std::set<EntityKey>> oracle_set;
    for (auto& [c, members] : oracle) oracle_set.insert(members);

    std::set<std::set<EntityKey>> got;
    for (const auto& cluster : clusters[EntityType::Task]) {
      got.insert(std::set<EntityKey>(cluster.begin(), cluster.end()));
    }
    CHECK(got == oracle_set);
  }
}

TEST_CASE("candidate_pairs blocking includes the interesting pairs only") {
  std::vector<TaggedPaper> papers;
  papers.push_back({"p", {}, {
    sentence_with("f1 score and f1 scores; machine translation (MT) and MT; imdb.",
                  {{"f1 score", EntityType::Metric},
                   {"f1 scores", EntityType::Metric},
                   {"machine translation", EntityType::Task},
                   {"MT", EntityType::Task},
                   {"imdb", EntityType::Dataset}}),
  }});
  Corpus corpus = Corpus::from_papers(std::move(papers));
  std::vector<EntityKey> inventory;
  for (const auto& [key, entity] : corpus.inventory()) inventory.push_back(key);
  auto candidates = candidate_pairs(corpus, inventory);

  auto has = [&](const EntityKey& a, const EntityKey& b) {
    for (const MentionPair& pair : candidates) {
      if ((pair.a == a && pair.b == b) || (pair.a == b && pair.b == a)) return true;
    }
    return false;
  };
  CHECK(has(metric("f1 score"), metric("f1 scores")));        // shared first token
  CHECK(has(task("machine translation"), task("mt")));        // abbreviation pattern
  CHECK_FALSE(has(metric("f1 score"), task("machine translation")));  // cross-type
}

TEST_CASE("pair ids are canonical and pair-score files round trip") {
  CHECK(pair_id(task("a"), task("b")) == pair_id(task("b"), task("a")));
  CHECK(pair_id(task("a"), task("b")) != pair_id(metric("a"), metric("b")));

  std::vector<MentionPair> pairs = {make_pair(task("alpha"), task("alpha beta"), true)};
  std::ostringstream out;
  write_labeled_pairs(pairs, out);
  CHECK(out.str().find('\t') != std::string::npos);

  std::istringstream scores(pair_id(task("alpha"), task("alpha beta")) + "\t0.9\n");
  ExternalPairScorer scorer(scores, 0.5);
  CHECK(scorer.classify(pairs[0]) == 0.9);
  MentionPair unknown = make_pair(task("x"), task("y"));
  CHECK_THROWS_AS(scorer.classify(unknown), Error);
}

TEST_CASE("read_pair_scores validates the probability range") {
  std::istringstream bad("abcd\t1.5\n");
  CHECK_THROWS_AS(read_pair_scores(bad), Error);
  std::istringstream good("abcd\t0.5\n#comment\n");
  CHECK(read_pair_scores(good).size() == 1);
}
