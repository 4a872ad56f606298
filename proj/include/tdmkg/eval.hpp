#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tdmkg/corpus.hpp"
#include "tdmkg/kg.hpp"

namespace tdmkg::eval {

using SurfacePair = std::pair<std::string, std::string>;

// Pairs of entity surfaces under one relation type; symmetric types are
// stored in canonical (min, max) order.
struct PairSet {
  kg::RelationType rtype = kg::RelationType::EvaluatedOn;
  std::set<SurfacePair> pairs;

  void add(std::string a, std::string b);
  bool contains(const SurfacePair& pair) const;
  std::size_t size() const { return pairs.size(); }

  bool operator==(const PairSet&) const = default;
};

PairSet pair_set_from_kg(const kg::KnowledgeGraph& kg, kg::RelationType rtype);

// Complete within-cluster pairing (C(|c|,2) per cluster).
PairSet cluster_to_pairs(const std::vector<std::vector<std::string>>& clusters,
                         kg::RelationType rtype = kg::RelationType::Coreferent);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const Prf&) const = default;
};

Prf pairwise_prf(const PairSet& predicted, const PairSet& gold);

// Secondary coreference view: precision macro-averaged over predicted
// clusters, recall macro-averaged over gold clusters, pairs within each
// cluster as the unit. Singleton clusters carry no pairs and are skipped.
Prf macro_cluster_prf(const std::vector<std::vector<std::string>>& predicted_clusters,
                      const std::vector<std::vector<std::string>>& gold_clusters);

// Macro precision@k over queries; rankings shorter than k count the missing
// slots as misses.
std::map<std::size_t, double> precision_at_k(
    const std::map<std::string, std::vector<std::string>>& rankings,
    const std::set<SurfacePair>& judgments, const std::vector<std::size_t>& ks);

struct SplitResult {
  std::vector<EntityKey> dev_entities;
  std::vector<EntityKey> test_entities;
  kg::KnowledgeGraph dev_kg;
  kg::KnowledgeGraph test_kg;
  std::vector<kg::Relation> dropped_relations;  // cross-split
  std::set<EntityKey> exclusion;  // test entities + their gold coref clusters
};

// Entity-level split; dev gets ceil(dev_fraction * n) entities.
SplitResult split_dev_test(const kg::KnowledgeGraph& gold, double dev_fraction = 0.10,
                           std::uint64_t seed = 1);

struct LeaderboardTuple {
  std::string task;
  std::string dataset;
  std::string metric;
};

// Tab-separated task<TAB>dataset<TAB>metric, one per line.
std::vector<LeaderboardTuple> parse_leaderboard(std::istream& in);

struct ReferencePairs {
  PairSet td;  // EvaluatedOn
  PairSet tm;  // EvaluatedBy
};

ReferencePairs tuples_to_pairs(std::span<const LeaderboardTuple> tuples);

struct RelaxedMatchResult {
  double coverage = 0.0;
  std::size_t covered = 0;
  std::size_t total = 0;
  std::vector<std::pair<SurfacePair, SurfacePair>> matched;  // (reference, predicted)
};

// A reference pair counts covered when some predicted pair matches both
// elements under length-sum-normalized edit distance < tau. Surfaces are
// normalized before comparison.
RelaxedMatchResult relaxed_match(const PairSet& predicted, const PairSet& reference,
                                 double tau = 0.3);

double relaxed_edit_distance(std::string_view a, std::string_view b);

using SurfaceClusters = std::map<EntityType, std::vector<std::vector<std::string>>>;

SurfaceClusters surface_clusters(const kg::KnowledgeGraph& kg);

// Adds every pair reachable by swapping either endpoint for a coreferent
// cluster mate; superset of the input and idempotent. Directed types only.
PairSet expand_with_coreference(const PairSet& predicted, const SurfaceClusters& clusters);

struct HumanEvalRow {
  kg::Relation relation;
  std::vector<std::string> paper_ids;  // up to 3, when a corpus is supplied
};

struct HumanEvalManifest {
  std::map<kg::RelationType, std::vector<HumanEvalRow>> samples;
  std::map<kg::RelationType, std::size_t> population;
  std::size_t requested = 0;
};

// Uniform sample without replacement per relation type, skipping excluded
// pairs; short populations are reported and sampled in full.
HumanEvalManifest sample_for_human_eval(
    const kg::KnowledgeGraph& kg, std::size_t per_relation, std::uint64_t seed,
    const std::map<kg::RelationType, std::set<SurfacePair>>& exclusion = {},
    const Corpus* corpus = nullptr);

struct MetricRecord {
  std::string name;
  double value = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
};

void write_metric_records(std::span<const MetricRecord> records, std::ostream& out);

}  // namespace tdmkg::eval
