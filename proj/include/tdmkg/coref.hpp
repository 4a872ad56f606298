#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tdmkg/corpus.hpp"

namespace tdmkg::coref {

struct PairFeatures {
  double normalized_edit_distance = 0.0;  // Levenshtein / max length
  double jaccard = 0.0;                   // over whitespace tokens
  bool abbreviation_match = false;

  bool operator==(const PairFeatures&) const = default;
};

struct MentionPair {
  EntityKey a;
  EntityKey b;
  PairFeatures features;
  std::optional<bool> label;
};

PairFeatures compute_pair_features(const EntityKey& a, const EntityKey& b);
MentionPair make_pair(const EntityKey& a, const EntityKey& b,
                      std::optional<bool> label = std::nullopt);

// True iff the abbreviation's letters, in order, are initials of a word
// subsequence of the long form, anchored at the first word.
bool abbreviation_valid(std::string_view long_form, std::string_view abbreviation);

// Mentions immediately followed (one space allowed) by a parenthesized
// all-caps token, e.g. "named entity recognition (NER)". Both surfaces must
// be tagged entities of the same type somewhere in the corpus.
std::vector<MentionPair> extract_abbreviation_pairs(const Corpus& corpus);

// All same-type pairs with normalized_edit_distance <= tau_pos.
std::vector<MentionPair> edit_distance_pairs(std::span<const EntityKey> inventory,
                                             double tau_pos);

// One surface equals a leading-token prefix of the other ("f1" / "f1 score").
std::vector<MentionPair> token_prefix_pairs(std::span<const EntityKey> inventory);

bool pair_is_heuristic_positive(const EntityKey& a, const EntityKey& b, double tau_pos);

// Union of the three mining heuristics, deduplicated, labeled positive.
std::vector<MentionPair> heuristic_positive_pairs(const Corpus& corpus, double tau_pos);

// Random same-type pairs that fail every heuristic; at most
// ratio * |positives| of them, deterministic for a fixed seed.
std::vector<MentionPair> sample_negatives(std::span<const EntityKey> inventory,
                                          std::span<const MentionPair> positives,
                                          double ratio, std::uint64_t seed,
                                          double tau_pos = 0.2);

class CorefClassifier {
 public:
  virtual ~CorefClassifier() = default;
  virtual double classify(const MentionPair& pair) const = 0;
  virtual double threshold() const = 0;
};

struct ClassifierWeights {
  double bias = 0.0;
  double edit_similarity = 0.0;  // applied to 1 - normalized_edit_distance
  double jaccard = 0.0;
  double abbreviation = 0.0;

  bool operator==(const ClassifierWeights&) const = default;
};

// logistic(w0 + w1*(1-ned) + w2*jaccard + w3*[abbr]); the jaccard-rule mode
// is the 0/1 baseline that fires when token Jaccard exceeds the cutoff.
class StringSimilarityClassifier : public CorefClassifier {
 public:
  StringSimilarityClassifier(ClassifierWeights weights, double threshold = 0.5);
  static StringSimilarityClassifier jaccard_rule(double cutoff = 0.75);

  double classify(const MentionPair& pair) const override;
  double threshold() const override { return threshold_; }
  const ClassifierWeights& weights() const { return weights_; }

 private:
  StringSimilarityClassifier() = default;
  ClassifierWeights weights_;
  double threshold_ = 0.5;
  bool jaccard_rule_mode_ = false;
  double jaccard_cutoff_ = 0.75;
};

struct FitConfig {
  std::size_t epochs = 200;
  double learning_rate = 0.1;
  std::uint64_t seed = 1;
  double threshold = 0.5;
};

// Full-batch logistic regression over the labeled pairs.
StringSimilarityClassifier fit_string_similarity_classifier(
    std::span<const MentionPair> labeled, const FitConfig& config = {});

// Replays probabilities from a pair_id<TAB>probability file.
class ExternalPairScorer : public CorefClassifier {
 public:
  ExternalPairScorer(std::istream& in, double threshold = 0.5);
  double classify(const MentionPair& pair) const override;
  double threshold() const override { return threshold_; }

 private:
  std::map<std::string, double> scores_;
  double threshold_;
};

// Stable id over (type, surfaces in canonical order).
std::string pair_id(const EntityKey& a, const EntityKey& b);

// Inference-time candidate blocking: shared first token, corpus abbreviation
// pattern, or normalized edit distance <= 0.5 (length-pruned).
std::vector<MentionPair> candidate_pairs(const Corpus& corpus,
                                         std::span<const EntityKey> inventory);

// Connected components over positive pairs via union-find; singletons kept.
std::map<EntityType, std::vector<std::vector<EntityKey>>> cluster_coreferent(
    std::span<const EntityKey> universe, std::span<const MentionPair> positive_pairs);

void write_labeled_pairs(std::span<const MentionPair> pairs, std::ostream& out);
std::map<std::string, double> read_pair_scores(std::istream& in);

}  // namespace tdmkg::coref
