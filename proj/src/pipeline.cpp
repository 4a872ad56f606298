#include "tdmkg/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "tdmkg/coref.hpp"
#include "tdmkg/relext.hpp"

namespace tdmkg::pipeline {

namespace {

std::string_view to_string(ScorerKind kind) {
  return kind == ScorerKind::Lexical ? "lexical" : "external";
}

std::string_view to_string(CorefMode mode) {
  switch (mode) {
    case CorefMode::Learned: return "learned";
    case CorefMode::JaccardRule: return "jaccard-rule";
    case CorefMode::External: return "external";
  }
  return "learned";
}

std::string_view to_string(RelatedSource source) {
  return source == RelatedSource::Embedding ? "embedding" : "pmi";
}

std::unique_ptr<relext::RelationScorer> make_scorer(ScorerKind kind,
                                                    const std::string& path,
                                                    double threshold) {
  if (kind == ScorerKind::Lexical) {
    relext::LexicalScorerConfig config;
    config.decision_threshold = threshold;
    return std::make_unique<relext::LexicalScorer>(config);
  }
  std::ifstream in(path);
  if (!in) throw Error("cannot open score file '" + path + "'");
  return std::make_unique<relext::ExternalScorer>(in, threshold);
}

std::size_t default_cluster_count(std::size_t n) {
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n) / 2.0))));
}

}  // namespace

std::string config_hash(const PipelineConfig& config) {
  std::ostringstream canon;
  canon << "tau_s=" << config.tau_s << ";tau_d=" << config.tau_d
        << ";s_scorer=" << to_string(config.sentence_scorer)
        << ";d_scorer=" << to_string(config.document_scorer)
        << ";s_scores=" << config.sentence_scores_path
        << ";d_scores=" << config.document_scores_path
        << ";coref=" << to_string(config.coref_mode)
        << ";coref_scores=" << config.coref_scores_path
        << ";tau_pos=" << config.tau_pos << ";tau_c=" << config.tau_c
        << ";jaccard_cutoff=" << config.jaccard_cutoff
        << ";related=" << to_string(config.related_source)
        << ";pmi_top_k=" << config.pmi_top_k
        << ";sg_dim=" << config.skipgram.dimension
        << ";sg_window=" << config.skipgram.window
        << ";sg_min_count=" << config.skipgram.min_count
        << ";sg_negative=" << config.skipgram.negative_samples
        << ";sg_epochs=" << config.skipgram.epochs
        << ";sg_lr=" << config.skipgram.learning_rate_start << ".."
        << config.skipgram.learning_rate_end
        << ";sg_power=" << config.skipgram.unigram_power
        << ";sg_seed=" << config.skipgram.seed
        << ";sg_shuffle=" << config.skipgram.shuffle_tokens;
  for (const auto& [type, k] : config.clusters_per_type) {
    canon << ";k_" << tdmkg::to_string(type) << "=" << k;
  }
  canon << ";relaxed_tau=" << config.relaxed_tau << ";seed=" << config.seed
        << ";min_paper_freq=" << config.min_paper_freq
        << ";max_context=" << config.max_context_sentences;
  return to_hex16(fnv1a64(canon.str()));
}

kg::FileMeta file_meta(const PipelineConfig& config) {
  return {std::string(kVersion), config_hash(config)};
}

namespace {

void validate(const PipelineConfig& config) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(config.tau_s) || !in_unit(config.tau_d) || !in_unit(config.tau_c)) {
    throw Error("decision thresholds tau_s/tau_d/tau_c must lie in [0,1]");
  }
  if (!(config.tau_pos > 0.0 && config.tau_pos < 1.0)) {
    throw Error("tau_pos must lie in (0,1)");
  }
  if (!(config.relaxed_tau > 0.0 && config.relaxed_tau < 1.0)) {
    throw Error("relaxed_tau must lie in (0,1)");
  }
  if (!(config.jaccard_cutoff >= 0.0 && config.jaccard_cutoff <= 1.0)) {
    throw Error("jaccard_cutoff must lie in [0,1]");
  }
  if (config.min_paper_freq < 1) throw Error("min_paper_freq must be >= 1");
  if (config.sentence_scorer == ScorerKind::External &&
      config.sentence_scores_path.empty()) {
    throw Error("external sentence scorer requires --sentence-scores");
  }
  if (config.document_scorer == ScorerKind::External &&
      config.document_scores_path.empty()) {
    throw Error("external document scorer requires --document-scores");
  }
  if (config.coref_mode == CorefMode::External && config.coref_scores_path.empty()) {
    throw Error("external coref mode requires --coref-scores");
  }
}

}  // namespace

BuildResult build_kg(const Corpus& corpus, const PipelineConfig& config) {
  validate(config);
  BuildResult result;
  BuildReport& report = result.report;
  kg::KnowledgeGraph& graph = result.graph;

  std::vector<Entity> inventory = corpus.entity_inventory(config.min_paper_freq);
  std::vector<EntityKey> universe;
  universe.reserve(inventory.size());
  for (const Entity& e : inventory) {
    graph.add_entity(e.key(), e.paper_frequency);
    universe.push_back(e.key());
  }
  std::sort(universe.begin(), universe.end());
  std::set<EntityKey> universe_set(universe.begin(), universe.end());

  // Candidate TD/TM pairs: pairs of in-universe entities sharing a paper.
  std::set<std::pair<EntityKey, EntityKey>> td_pairs, tm_pairs;
  for (const TaggedPaper& paper : corpus.papers()) {
    std::set<EntityKey> keys;
    for (const Sentence& sentence : paper.sentences) {
      auto sk = sentence_entity_keys(sentence);
      keys.insert(sk.begin(), sk.end());
    }
    std::vector<EntityKey> tasks, datasets, metrics;
    for (const EntityKey& key : keys) {
      if (!universe_set.count(key)) continue;
      switch (key.type) {
        case EntityType::Task: tasks.push_back(key); break;
        case EntityType::Dataset: datasets.push_back(key); break;
        case EntityType::Metric: metrics.push_back(key); break;
      }
    }
    for (const EntityKey& t : tasks) {
      for (const EntityKey& d : datasets) td_pairs.insert({t, d});
      for (const EntityKey& m : metrics) tm_pairs.insert({t, m});
    }
  }
  report.candidate_td_pairs = td_pairs.size();
  report.candidate_tm_pairs = tm_pairs.size();

  auto sentence_scorer =
      make_scorer(config.sentence_scorer, config.sentence_scores_path, config.tau_s);
  auto document_scorer =
      make_scorer(config.document_scorer, config.document_scores_path, config.tau_d);

  auto run_sieve = [&](const std::set<std::pair<EntityKey, EntityKey>>& pairs,
                       kg::RelationType rtype) {
    for (const auto& [task, target] : pairs) {
      relext::SievePrediction prediction =
          relext::sieve_predict(corpus, task, target, rtype, *sentence_scorer,
                                *document_scorer, config.max_context_sentences);
      if (!prediction.decision) {
        ++report.rejected_pairs;
        continue;
      }
      kg::Provenance provenance =
          prediction.provenance == relext::SieveProvenance::SentenceSieve
              ? kg::Provenance::SentenceSieve
              : kg::Provenance::DocumentSieve;
      if (provenance == kg::Provenance::SentenceSieve) {
        ++report.sentence_sieve_edges;
      } else {
        ++report.document_sieve_edges;
      }
      graph.add_relation({task, target, rtype, prediction.confidence, provenance});
    }
  };
  run_sieve(td_pairs, kg::RelationType::EvaluatedOn);
  run_sieve(tm_pairs, kg::RelationType::EvaluatedBy);

  // Coreference: classify blocked candidates, then cluster.
  std::vector<coref::MentionPair> candidates = coref::candidate_pairs(corpus, universe);
  report.coref_candidates = candidates.size();

  std::unique_ptr<coref::CorefClassifier> classifier;
  kg::Provenance coref_provenance = kg::Provenance::Classifier;
  switch (config.coref_mode) {
    case CorefMode::Learned: {
      std::vector<coref::MentionPair> labeled =
          coref::heuristic_positive_pairs(corpus, config.tau_pos);
      std::erase_if(labeled, [&](const coref::MentionPair& pair) {
        return !universe_set.count(pair.a) || !universe_set.count(pair.b);
      });
      if (labeled.empty()) {
        // Nothing to learn from; an unfit classifier would sit exactly at
        // the 0.5 boundary, so predict no coreference instead.
        candidates.clear();
        break;
      }
      std::vector<coref::MentionPair> negatives =
          coref::sample_negatives(universe, labeled, 1.0, config.seed, config.tau_pos);
      labeled.insert(labeled.end(), negatives.begin(), negatives.end());
      coref::FitConfig fit;
      fit.seed = config.seed;
      fit.threshold = config.tau_c;
      classifier = std::make_unique<coref::StringSimilarityClassifier>(
          coref::fit_string_similarity_classifier(labeled, fit));
      break;
    }
    case CorefMode::JaccardRule:
      classifier = std::make_unique<coref::StringSimilarityClassifier>(
          coref::StringSimilarityClassifier::jaccard_rule(config.jaccard_cutoff));
      coref_provenance = kg::Provenance::Heuristic;
      break;
    case CorefMode::External: {
      std::ifstream in(config.coref_scores_path);
      if (!in) {
        throw Error("cannot open pair score file '" + config.coref_scores_path + "'");
      }
      classifier = std::make_unique<coref::ExternalPairScorer>(in, config.tau_c);
      break;
    }
  }

  std::vector<coref::MentionPair> positives;
  for (const coref::MentionPair& pair : candidates) {
    if (!classifier) break;
    double p = classifier->classify(pair);
    if (p >= classifier->threshold()) {
      graph.add_relation({pair.a, pair.b, kg::RelationType::Coreferent, p,
                          coref_provenance});
      positives.push_back(pair);
    }
  }
  report.coref_edges = positives.size();

  // Related relations.
  if (config.related_source == RelatedSource::Embedding) {
    std::vector<term2vec::PseudoSentence> sentences =
        term2vec::build_pseudo_sentences(corpus);
    for (term2vec::PseudoSentence& ps : sentences) {
      std::erase_if(ps.tokens,
                    [&](const EntityKey& key) { return !universe_set.count(key); });
    }
    std::erase_if(sentences, [](const term2vec::PseudoSentence& ps) {
      return ps.tokens.empty();
    });
    bool trainable = std::any_of(
        sentences.begin(), sentences.end(),
        [](const term2vec::PseudoSentence& ps) { return ps.tokens.size() >= 2; });
    if (trainable) {
      term2vec::SkipGramConfig sg = config.skipgram;
      if (sg.seed == 0) sg.seed = config.seed;
      term2vec::EmbeddingTable table = term2vec::train_skipgram(sentences, sg);
      for (EntityType type :
           {EntityType::Task, EntityType::Dataset, EntityType::Metric}) {
        std::size_t n = 0;
        for (const EntityKey& key : table.vocabulary()) n += key.type == type;
        if (n < 2) continue;
        std::size_t k = 0;
        auto it = config.clusters_per_type.find(type);
        if (it != config.clusters_per_type.end()) k = it->second;
        if (k == 0) k = default_cluster_count(n);
        k = std::clamp<std::size_t>(k, 1, n);
        report.clusters_used[type] = k;
        term2vec::ClusterAssignment assignment =
            term2vec::kmeans_cluster(table, type, k, config.seed);
        for (const kg::Relation& r : term2vec::clusters_to_related(assignment)) {
          if (graph.add_relation(r) == kg::AddStatus::Inserted) ++report.related_edges;
        }
      }
    }
  } else {
    for (EntityType type : {EntityType::Task, EntityType::Dataset, EntityType::Metric}) {
      for (const auto& [a, b] :
           term2vec::pmi_related_baseline(corpus, type, config.pmi_top_k)) {
        if (!universe_set.count(a) || !universe_set.count(b)) continue;
        kg::Relation r{a, b, kg::RelationType::Related, 1.0, kg::Provenance::Heuristic};
        if (graph.add_relation(r) == kg::AddStatus::Inserted) ++report.related_edges;
      }
    }
  }

  std::size_t before = graph.relation_count();
  graph = kg::coreference_closure(graph);
  report.closure_added = graph.relation_count() - before;
  report.stats = kg::kg_stats(graph);
  return result;
}

EvalReport evaluate_against_gold(const kg::KnowledgeGraph& predicted,
                                 const kg::KnowledgeGraph& gold) {
  EvalReport report;
  for (kg::RelationType rtype :
       {kg::RelationType::EvaluatedOn, kg::RelationType::EvaluatedBy,
        kg::RelationType::Coreferent, kg::RelationType::Related}) {
    eval::PairSet pred = eval::pair_set_from_kg(predicted, rtype);
    eval::PairSet ref = eval::pair_set_from_kg(gold, rtype);
    // Coreferent edges are evaluated as clusters: all pairs within a
    // connected component count as linked. Micro pairwise numbers are the
    // primary view; macro-over-clusters is reported as a secondary column.
    if (rtype == kg::RelationType::Coreferent) {
      auto surface_clusters_of = [](const kg::KnowledgeGraph& g) {
        std::vector<std::vector<std::string>> clusters;
        for (const auto& [type, typed] : g.coref_clusters()) {
          for (const auto& cluster : typed) {
            if (cluster.size() < 2) continue;
            std::vector<std::string> surfaces;
            for (const EntityKey& key : cluster) surfaces.push_back(key.surface);
            clusters.push_back(std::move(surfaces));
          }
        }
        return clusters;
      };
      auto pred_clusters = surface_clusters_of(predicted);
      auto gold_clusters = surface_clusters_of(gold);
      pred = eval::cluster_to_pairs(pred_clusters);
      ref = eval::cluster_to_pairs(gold_clusters);
      report.coref_macro_over_clusters =
          eval::macro_cluster_prf(pred_clusters, gold_clusters);
    }
    report.predicted_counts[rtype] = pred.size();
    report.gold_counts[rtype] = ref.size();
    report.prf[rtype] = eval::pairwise_prf(pred, ref);
  }
  return report;
}

CoverageReport coverage_against_leaderboard(
    const kg::KnowledgeGraph& predicted,
    std::span<const eval::LeaderboardTuple> tuples, double tau) {
  eval::ReferencePairs reference = eval::tuples_to_pairs(tuples);
  eval::PairSet td = eval::pair_set_from_kg(predicted, kg::RelationType::EvaluatedOn);
  eval::PairSet tm = eval::pair_set_from_kg(predicted, kg::RelationType::EvaluatedBy);
  eval::SurfaceClusters clusters = eval::surface_clusters(predicted);

  auto row = [&](const eval::PairSet& pred, const eval::PairSet& ref) {
    eval::RelaxedMatchResult r = eval::relaxed_match(pred, ref, tau);
    return CoverageRow{r.coverage, r.covered, r.total};
  };
  CoverageReport report;
  report.td_plain = row(td, reference.td);
  report.tm_plain = row(tm, reference.tm);
  report.td_expanded = row(eval::expand_with_coreference(td, clusters), reference.td);
  report.tm_expanded = row(eval::expand_with_coreference(tm, clusters), reference.tm);
  return report;
}

}  // namespace tdmkg::pipeline
