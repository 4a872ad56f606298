#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tdmkg/corpus.hpp"
#include "tdmkg/kg.hpp"

namespace tdmkg::term2vec {

// One paper's tagged entities in first-mention order, deduplicated.
struct PseudoSentence {
  std::string paper_id;
  std::vector<EntityKey> tokens;

  bool operator==(const PseudoSentence&) const = default;
};

std::vector<PseudoSentence> build_pseudo_sentences(const Corpus& corpus);

struct SkipGramConfig {
  std::size_t dimension = 100;
  std::size_t window = 5;
  std::size_t min_count = 1;
  std::size_t negative_samples = 5;
  std::size_t epochs = 5;
  double learning_rate_start = 0.025;
  double learning_rate_end = 0.0001;
  double unigram_power = 0.75;
  std::uint64_t seed = 1;
  bool shuffle_tokens = false;  // ablation: randomize within-sentence order
  // threads > 1 runs lock-free concurrent updates over sentence shards;
  // results are then no longer reproducible from the seed.
  std::size_t threads = 1;
};

// Input (center) and output (context) vectors per vocabulary entry.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::vector<EntityKey> vocabulary, std::size_t dimension);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vocabulary_.size(); }
  const std::vector<EntityKey>& vocabulary() const { return vocabulary_; }

  bool has(const EntityKey& key) const;
  std::size_t index_of(const EntityKey& key) const;

  std::span<const double> input_vector(std::size_t index) const;
  std::span<double> input_vector(std::size_t index);
  std::span<const double> output_vector(std::size_t index) const;
  std::span<double> output_vector(std::size_t index);
  std::span<const double> input_vector(const EntityKey& key) const;

  bool operator==(const EmbeddingTable&) const = default;

 private:
  std::vector<EntityKey> vocabulary_;
  std::map<EntityKey, std::size_t> index_;
  std::size_t dimension_ = 0;
  std::vector<double> input_;
  std::vector<double> output_;
};

// Skip-gram with negative sampling over the pseudo-sentences; deterministic
// for a fixed seed (single-threaded).
EmbeddingTable train_skipgram(std::span<const PseudoSentence> sentences,
                              const SkipGramConfig& config);

// The per-(center, context) SGNS objective, exposed for gradient checking:
//   L = -log s(u_c . v_j) - sum_n log s(-u_n . v_j)
struct SgnsPoint {
  std::vector<double> center;
  std::vector<double> context;
  std::vector<std::vector<double>> negatives;
};

struct SgnsGradient {
  std::vector<double> center;
  std::vector<double> context;
  std::vector<std::vector<double>> negatives;
};

double sgns_pair_loss(const SgnsPoint& point);
SgnsGradient sgns_pair_gradient(const SgnsPoint& point);

// Total SGNS loss over the corpus with negatives drawn from a dedicated
// seeded stream, so losses of two tables over the same corpus are comparable.
double corpus_sgns_loss(const EmbeddingTable& table,
                        std::span<const PseudoSentence> sentences,
                        const SkipGramConfig& config);

// Top-k by cosine over input vectors, query excluded, ties by surface.
std::vector<std::pair<EntityKey, double>> nearest_neighbors(
    const EmbeddingTable& table, const EntityKey& query, std::size_t k,
    bool same_type_only);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct ClusterAssignment {
  EntityType entity_type = EntityType::Task;
  std::size_t k = 0;
  std::map<EntityKey, std::size_t> assignment;
  std::vector<std::vector<double>> centroids;
  double inertia = 0.0;
};

// k-means++ seeding, Lloyd iterations to an assignment fixpoint (at most
// max_iterations); empty clusters are reseeded with the farthest point.
// inertia_trace, when given, receives the inertia after each assignment step.
ClusterAssignment kmeans_cluster(const EmbeddingTable& table, EntityType entity_type,
                                 std::size_t k, std::uint64_t seed,
                                 std::size_t max_iterations = 100,
                                 std::vector<double>* inertia_trace = nullptr);

// Paper-level PMI, log base 2; -infinity when the pair never co-occurs.
double pmi(const Corpus& corpus, const EntityKey& a, const EntityKey& b);

// Each entity's top-k same-type partners with positive PMI, as Related pairs.
std::vector<std::pair<EntityKey, EntityKey>> pmi_related_baseline(
    const Corpus& corpus, EntityType entity_type, std::size_t top_k);

// Every within-cluster pair becomes a Related edge with Embedding provenance.
std::vector<kg::Relation> clusters_to_related(const ClusterAssignment& assignment);

// Text format: "d=<dim> count=<n>" header, then surface<TAB>type<TAB>values.
void export_embeddings(const EmbeddingTable& table, std::ostream& out);
EmbeddingTable import_embeddings(std::istream& in);

}  // namespace tdmkg::term2vec
