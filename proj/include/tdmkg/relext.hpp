#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tdmkg/corpus.hpp"
#include "tdmkg/kg.hpp"

namespace tdmkg::relext {

enum class Level { Sentence, Document };

std::string_view to_string(Level level);
Level level_from_string(std::string_view s);

// One (context, task-target hypothesis) unit. Sentence-level contexts are a
// single sentence; document-level contexts join the selected sentences with
// '\n' so scorers can recover sentence boundaries.
struct HypothesisInstance {
  std::string instance_id;
  std::string paper_id;
  Level level = Level::Sentence;
  kg::RelationType rtype = kg::RelationType::EvaluatedOn;
  EntityKey task;
  EntityKey target;
  std::string context;
  std::optional<bool> label;
  std::optional<std::size_t> sentence_index;  // sentence-level only, not serialized
};

struct ScoreRecord {
  std::string instance_id;
  double probability = 0.0;
};

// Document-level ids hash (paper_id, level, rtype, task, target); sentence
// -level ids additionally hash the sentence index so ids stay unique when the
// same pair co-occurs in several sentences of one paper.
std::string instance_id(const std::string& paper_id, Level level,
                        kg::RelationType rtype, const EntityKey& task,
                        const EntityKey& target,
                        std::optional<std::size_t> sentence_index = std::nullopt);

class RelationScorer {
 public:
  virtual ~RelationScorer() = default;
  virtual std::vector<ScoreRecord> score(std::span<const HypothesisInstance> batch) = 0;
  virtual double threshold() const = 0;
};

// One instance per (task, dataset) and (task, metric) pair of distinct
// entities co-mentioned in a sentence; context is the sentence text.
std::vector<HypothesisInstance> generate_sentence_hypotheses(const TaggedPaper& paper);

// Exactly n_t*n_d + n_t*n_m instances per paper. Context keeps sentences that
// mention either entity, in document order; when over the cap, sentences
// mentioning both entities are preferred, then earliest-first.
std::vector<HypothesisInstance> generate_document_hypotheses(
    const TaggedPaper& paper, std::size_t max_context_sentences = 30);

enum class SieveProvenance { SentenceSieve, DocumentSieve, NoEvidence };

std::string_view to_string(SieveProvenance p);

struct SievePrediction {
  bool decision = false;
  SieveProvenance provenance = SieveProvenance::NoEvidence;
  double confidence = 0.0;
};

// Sentence sieve first: if the pair co-occurs in any sentence, the decision
// is an OR over the sentence scorer and the document scorer is never
// consulted. Otherwise the document scorer decides over every paper
// containing both entities.
SievePrediction sieve_predict(const Corpus& corpus, const EntityKey& task,
                              const EntityKey& target, kg::RelationType rtype,
                              RelationScorer& sentence_scorer,
                              RelationScorer& document_scorer,
                              std::size_t max_context_sentences = 30);

struct LexicalScorerConfig {
  std::vector<std::string> evaluated_on_cues = {"evaluated on", "experiments on",
                                                "results on", "trained on", "test set"};
  std::vector<std::string> evaluated_by_cues = {"in terms of", "measured by", "report",
                                                "score of", "evaluate", "using"};
  double co_mention_divisor = 5.0;
  double decision_threshold = 0.5;
};

// Cue phrase in the same sentence as either entity mention -> 1.0; otherwise
// min(1, co-mention count / divisor). Deterministic; stands in for a trained
// entailment model so the pipeline runs end to end.
class LexicalScorer : public RelationScorer {
 public:
  explicit LexicalScorer(LexicalScorerConfig config = {});
  std::vector<ScoreRecord> score(std::span<const HypothesisInstance> batch) override;
  double threshold() const override { return config_.decision_threshold; }

  double score_one(const HypothesisInstance& instance) const;

 private:
  LexicalScorerConfig config_;
};

// Replays probabilities recorded by an external model from a two-column TSV
// (instance_id<TAB>probability). Missing ids are a hard error.
class ExternalScorer : public RelationScorer {
 public:
  ExternalScorer(std::istream& in, double decision_threshold = 0.5);
  std::vector<ScoreRecord> score(std::span<const HypothesisInstance> batch) override;
  double threshold() const override { return threshold_; }

  std::size_t record_count() const { return scores_.size(); }

 private:
  std::map<std::string, double> scores_;
  double threshold_;
};

struct SentenceAnnotation {
  std::string paper_id;
  std::size_t sentence_index = 0;
  kg::RelationType rtype = kg::RelationType::EvaluatedOn;
  std::string task;    // surfaces, normalized on use
  std::string target;
};

struct DocumentAnnotation {
  std::string paper_id;
  kg::RelationType rtype = kg::RelationType::EvaluatedOn;
  std::string task;
  std::string target;
};

struct TrainingExportConfig {
  std::size_t max_negatives_per_positive = 10;  // per document
  std::uint64_t seed = 17;
  std::size_t max_context_sentences = 30;
};

// Positives are the annotated pairs; every other generated combination in
// the same sentence/document becomes a negative, capped per document at
// max_negatives_per_positive * max(1, positives) via a seeded sample.
std::vector<HypothesisInstance> export_training_instances(
    const Corpus& corpus, const std::vector<SentenceAnnotation>& gold,
    const TrainingExportConfig& config = {});
std::vector<HypothesisInstance> export_training_instances(
    const Corpus& corpus, const std::vector<DocumentAnnotation>& gold,
    const TrainingExportConfig& config = {});

void write_instances(std::span<const HypothesisInstance> instances, std::ostream& out);
std::vector<HypothesisInstance> read_instances(std::istream& in);

std::vector<SentenceAnnotation> read_sentence_annotations(std::istream& in);
std::vector<DocumentAnnotation> read_document_annotations(std::istream& in);

}  // namespace tdmkg::relext
