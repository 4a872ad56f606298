#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "tdmkg/corpus.hpp"
#include "tdmkg/eval.hpp"
#include "tdmkg/kg.hpp"
#include "tdmkg/term2vec.hpp"

namespace tdmkg::pipeline {

inline constexpr std::string_view kVersion = "0.1.0";

enum class ScorerKind { Lexical, External };
enum class CorefMode { Learned, JaccardRule, External };
enum class RelatedSource { Embedding, Pmi };

struct PipelineConfig {
  // Sieve thresholds and scorer selection per level.
  double tau_s = 0.5;
  double tau_d = 0.5;
  ScorerKind sentence_scorer = ScorerKind::Lexical;
  ScorerKind document_scorer = ScorerKind::Lexical;
  std::string sentence_scores_path;
  std::string document_scores_path;

  // Coreference.
  CorefMode coref_mode = CorefMode::Learned;
  std::string coref_scores_path;
  double tau_pos = 0.2;
  double tau_c = 0.5;
  double jaccard_cutoff = 0.75;

  // Related relations.
  RelatedSource related_source = RelatedSource::Embedding;
  std::size_t pmi_top_k = 20;
  term2vec::SkipGramConfig skipgram;
  std::map<EntityType, std::size_t> clusters_per_type;  // absent/0 = round(sqrt(n/2))

  // Shared knobs.
  double relaxed_tau = 0.3;
  std::uint64_t seed = 1;
  std::size_t min_paper_freq = 1;
  std::size_t max_context_sentences = 30;
};

std::string config_hash(const PipelineConfig& config);
kg::FileMeta file_meta(const PipelineConfig& config);

struct BuildReport {
  kg::KgStats stats;
  std::size_t candidate_td_pairs = 0;
  std::size_t candidate_tm_pairs = 0;
  std::size_t sentence_sieve_edges = 0;
  std::size_t document_sieve_edges = 0;
  std::size_t rejected_pairs = 0;  // scored below threshold
  std::size_t coref_candidates = 0;
  std::size_t coref_edges = 0;
  std::size_t related_edges = 0;
  std::size_t closure_added = 0;
  std::map<EntityType, std::size_t> clusters_used;
};

struct BuildResult {
  kg::KnowledgeGraph graph;
  BuildReport report;
};

// corpus parse -> relation sieve -> coref clustering -> related extraction
// -> closure. Deterministic for a fixed config.
BuildResult build_kg(const Corpus& corpus, const PipelineConfig& config);

struct EvalReport {
  std::map<kg::RelationType, eval::Prf> prf;  // micro pairwise, the primary view
  eval::Prf coref_macro_over_clusters;        // secondary coreference column
  std::map<kg::RelationType, std::size_t> predicted_counts;
  std::map<kg::RelationType, std::size_t> gold_counts;
};

EvalReport evaluate_against_gold(const kg::KnowledgeGraph& predicted,
                                 const kg::KnowledgeGraph& gold);

struct CoverageRow {
  double coverage = 0.0;
  std::size_t covered = 0;
  std::size_t total = 0;
};

struct CoverageReport {
  CoverageRow td_plain;       // Relaxed Match
  CoverageRow tm_plain;
  CoverageRow td_expanded;    // + coreferent
  CoverageRow tm_expanded;
};

CoverageReport coverage_against_leaderboard(
    const kg::KnowledgeGraph& predicted,
    std::span<const eval::LeaderboardTuple> tuples, double tau);

}  // namespace tdmkg::pipeline
