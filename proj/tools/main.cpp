// tdmkg command-line interface: builds Task/Dataset/Metric knowledge graphs
// from tagged-paper corpora and evaluates them against gold graphs and
// leaderboard tuples.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "tdmkg/coref.hpp"
#include "tdmkg/eval.hpp"
#include "tdmkg/kg.hpp"
#include "tdmkg/pipeline.hpp"
#include "tdmkg/relext.hpp"
#include "tdmkg/term2vec.hpp"

namespace {

using namespace tdmkg;

struct CliOptions {
  std::vector<std::string> corpus_paths;
  std::string kg_path;
  std::string gold_path;
  std::string leaderboard_path;
  std::string out_path;
  std::string embeddings_path;
  std::string annotations_path;
  std::string level = "sentence";
  std::string query_surface;
  std::string query_type = "Task";
  std::size_t top_k = 20;
  std::size_t per_relation = 100;
  std::string exclusion_path;
  bool export_candidates = false;
  std::size_t cluster_k = 0;
  std::string cluster_type = "Task";
  pipeline::PipelineConfig pipeline;
};

Corpus load_corpus(const std::vector<std::string>& paths) {
  std::vector<TaggedPaper> papers;
  for (const std::string& path : paths) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus file '" + path + "'");
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
      ++line_number;
      if (line.empty() || line[0] == '#') continue;
      papers.push_back(parse_tagged_paper_line(line, line_number));
    }
  }
  return Corpus::from_papers(std::move(papers));
}

kg::KnowledgeGraph load_kg(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open KG file '" + path + "'");
  return kg::import_kg(in);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file '" + path + "'");
  return out;
}

// Reports go to --out when given, stdout otherwise.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (!path.empty()) file_ = open_out(path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::optional<std::ofstream> file_;
};

void print_file_header(std::ostream& out, const pipeline::PipelineConfig& config) {
  out << "# tdmkg " << pipeline::kVersion
      << " config=" << pipeline::config_hash(config) << "\n";
}

int cmd_ingest(const CliOptions& options) {
  Corpus corpus = load_corpus(options.corpus_paths);
  std::size_t sentences = 0, mentions = 0;
  for (const TaggedPaper& paper : corpus.papers()) {
    sentences += paper.sentences.size();
    for (const Sentence& s : paper.sentences) mentions += s.mentions.size();
  }
  std::cerr << "papers: " << corpus.papers().size() << "  sentences: " << sentences
            << "  mentions: " << mentions << "  entities: "
            << corpus.inventory().size() << "\n";

  OutputTarget target(options.out_path);
  std::ostream& out = target.stream();
  print_file_header(out, options.pipeline);
  for (const Entity& e : corpus.entity_inventory(options.pipeline.min_paper_freq)) {
    out << e.surface_norm << '\t' << to_string(e.type) << '\t' << e.paper_frequency
        << '\t' << e.mention_frequency << '\n';
  }
  return 0;
}

int cmd_build(const CliOptions& options) {
  Corpus corpus = load_corpus(options.corpus_paths);
  pipeline::BuildResult result = pipeline::build_kg(corpus, options.pipeline);

  const pipeline::BuildReport& report = result.report;
  std::cerr << "candidate pairs: " << report.candidate_td_pairs << " TD, "
            << report.candidate_tm_pairs << " TM\n"
            << "sieve edges: " << report.sentence_sieve_edges << " sentence, "
            << report.document_sieve_edges << " document ("
            << report.rejected_pairs << " pairs below threshold)\n"
            << "coreferent edges: " << report.coref_edges << " (from "
            << report.coref_candidates << " candidates)\n"
            << "related edges: " << report.related_edges << "\n"
            << "closure added: " << report.closure_added << "\n";
  std::cerr << "nodes:";
  for (const auto& [type, count] : report.stats.entities) {
    std::cerr << " " << to_string(type) << "=" << count;
  }
  std::cerr << "  relations:";
  for (const auto& [rtype, count] : report.stats.relations) {
    std::cerr << " " << kg::to_string(rtype) << "=" << count;
  }
  std::cerr << "\n";

  OutputTarget target(options.out_path);
  kg::export_kg(result.graph, target.stream(), pipeline::file_meta(options.pipeline));
  return 0;
}

int cmd_stats(const CliOptions& options) {
  kg::KnowledgeGraph graph = load_kg(options.kg_path);
  kg::KgStats stats = kg::kg_stats(graph);
  OutputTarget target(options.out_path);
  std::ostream& out = target.stream();
  print_file_header(out, options.pipeline);
  out << "nodes\n";
  for (const auto& [type, count] : stats.entities) {
    out << "  " << to_string(type) << "\t" << count << "\n";
  }
  out << "  total\t" << stats.total_entities << "\n";
  out << "relations\n";
  for (const auto& [rtype, count] : stats.relations) {
    out << "  " << kg::to_string(rtype) << "\t" << count << "\n";
  }
  out << "  total\t" << stats.total_relations << "\n";
  return 0;
}

int cmd_export_instances(const CliOptions& options) {
  Corpus corpus = load_corpus(options.corpus_paths);
  bool sentence_level = options.level == "sentence";

  std::vector<relext::HypothesisInstance> instances;
  relext::TrainingExportConfig config;
  config.seed = options.pipeline.seed;
  config.max_context_sentences = options.pipeline.max_context_sentences;
  if (!options.annotations_path.empty()) {
    std::ifstream ann(options.annotations_path);
    if (!ann) {
      throw Error("cannot open annotations file '" + options.annotations_path + "'");
    }
    if (sentence_level) {
      instances = relext::export_training_instances(
          corpus, relext::read_sentence_annotations(ann), config);
    } else {
      instances = relext::export_training_instances(
          corpus, relext::read_document_annotations(ann), config);
    }
  } else {
    for (const TaggedPaper& paper : corpus.papers()) {
      auto generated = sentence_level
                           ? relext::generate_sentence_hypotheses(paper)
                           : relext::generate_document_hypotheses(
                                 paper, options.pipeline.max_context_sentences);
      instances.insert(instances.end(), generated.begin(), generated.end());
    }
  }
  OutputTarget target(options.out_path);
  print_file_header(target.stream(), options.pipeline);
  relext::write_instances(instances, target.stream());
  std::cerr << "instances: " << instances.size() << "\n";
  return 0;
}

int cmd_export_pairs(const CliOptions& options) {
  Corpus corpus = load_corpus(options.corpus_paths);
  std::vector<EntityKey> inventory;
  for (const auto& [key, entity] : corpus.inventory()) inventory.push_back(key);

  OutputTarget target(options.out_path);
  print_file_header(target.stream(), options.pipeline);
  if (options.export_candidates) {
    // Inference-time candidate pairs; score these to drive
    // `build --coref-mode external`.
    auto candidates = coref::candidate_pairs(corpus, inventory);
    coref::write_labeled_pairs(candidates, target.stream());
    std::cerr << "candidate pairs: " << candidates.size() << "\n";
    return 0;
  }
  auto positives = coref::heuristic_positive_pairs(corpus, options.pipeline.tau_pos);
  auto negatives = coref::sample_negatives(inventory, positives, 1.0,
                                           options.pipeline.seed,
                                           options.pipeline.tau_pos);
  std::vector<coref::MentionPair> all = positives;
  all.insert(all.end(), negatives.begin(), negatives.end());
  coref::write_labeled_pairs(all, target.stream());
  std::cerr << "pairs: " << positives.size() << " positive, " << negatives.size()
            << " negative\n";
  return 0;
}

term2vec::EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embeddings file '" + path + "'");
  return term2vec::import_embeddings(in);
}

int cmd_train_embeddings(const CliOptions& options) {
  Corpus corpus = load_corpus(options.corpus_paths);
  auto sentences = term2vec::build_pseudo_sentences(corpus);
  term2vec::EmbeddingTable table =
      term2vec::train_skipgram(sentences, options.pipeline.skipgram);
  OutputTarget target(options.out_path);
  print_file_header(target.stream(), options.pipeline);
  term2vec::export_embeddings(table, target.stream());
  std::cerr << "embedded entities: " << table.size() << " (d=" << table.dimension()
            << ")\n";
  return 0;
}

int cmd_cluster(const CliOptions& options) {
  term2vec::EmbeddingTable table = load_embeddings(options.embeddings_path);
  EntityType type = entity_type_from_string(options.cluster_type);
  std::size_t n = 0;
  for (const EntityKey& key : table.vocabulary()) n += key.type == type;
  if (n == 0) throw Error("no embedded entities of type " + options.cluster_type);
  std::size_t k = options.cluster_k;
  if (k == 0) {
    k = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(std::sqrt(n / 2.0))));
  }
  auto assignment =
      term2vec::kmeans_cluster(table, type, std::min(k, n), options.pipeline.seed);
  std::map<std::size_t, std::vector<std::string>> groups;
  for (const auto& [key, cluster] : assignment.assignment) {
    groups[cluster].push_back(key.surface);
  }
  OutputTarget target(options.out_path);
  std::ostream& out = target.stream();
  print_file_header(out, options.pipeline);
  for (const auto& [cluster, members] : groups) {
    out << cluster;
    for (const std::string& member : members) out << '\t' << member;
    out << '\n';
  }
  std::cerr << "clusters: " << groups.size() << " (inertia " << assignment.inertia
            << ")\n";
  return 0;
}

int cmd_eval(const CliOptions& options) {
  kg::KnowledgeGraph predicted = load_kg(options.kg_path);
  kg::KnowledgeGraph gold = load_kg(options.gold_path);
  pipeline::EvalReport report = pipeline::evaluate_against_gold(predicted, gold);

  OutputTarget target(options.out_path);
  std::ostream& out = target.stream();
  print_file_header(out, options.pipeline);
  out << "relation\tP\tR\tF1\tpred\tgold\n";
  std::vector<eval::MetricRecord> records;
  for (const auto& [rtype, prf] : report.prf) {
    out << kg::to_string(rtype) << '\t' << prf.precision << '\t' << prf.recall
        << '\t' << prf.f1 << '\t' << report.predicted_counts.at(rtype) << '\t'
        << report.gold_counts.at(rtype) << '\n';
    std::string name(kg::to_string(rtype));
    records.push_back({name + "/f1", prf.f1,
                       static_cast<double>(report.predicted_counts.at(rtype)),
                       static_cast<double>(report.gold_counts.at(rtype))});
  }
  const eval::Prf& macro = report.coref_macro_over_clusters;
  out << "Coreferent (macro over clusters)\t" << macro.precision << '\t'
      << macro.recall << '\t' << macro.f1 << "\t-\t-\n";
  records.push_back({"Coreferent/macro-f1", macro.f1, 0, 0});
  eval::write_metric_records(records, out);
  return 0;
}

int cmd_coverage(const CliOptions& options) {
  kg::KnowledgeGraph predicted = load_kg(options.kg_path);
  std::ifstream in(options.leaderboard_path);
  if (!in) {
    throw Error("cannot open leaderboard file '" + options.leaderboard_path + "'");
  }
  auto tuples = eval::parse_leaderboard(in);
  pipeline::CoverageReport report = pipeline::coverage_against_leaderboard(
      predicted, tuples, options.pipeline.relaxed_tau);

  OutputTarget target(options.out_path);
  std::ostream& out = target.stream();
  auto row = [&out](const char* name, const pipeline::CoverageRow& td,
                    const pipeline::CoverageRow& tm) {
    out << name << '\t' << td.coverage << " (" << td.covered << "/" << td.total
        << ")\t" << tm.coverage << " (" << tm.covered << "/" << tm.total << ")\n";
  };
  print_file_header(out, options.pipeline);
  out << "method\tEvaluatedOn\tEvaluatedBy\n";
  row("Relaxed Match", report.td_plain, report.tm_plain);
  row("+coreferent", report.td_expanded, report.tm_expanded);
  std::vector<eval::MetricRecord> records{
      {"coverage/EvaluatedOn", report.td_plain.coverage,
       static_cast<double>(report.td_plain.covered),
       static_cast<double>(report.td_plain.total)},
      {"coverage/EvaluatedBy", report.tm_plain.coverage,
       static_cast<double>(report.tm_plain.covered),
       static_cast<double>(report.tm_plain.total)},
      {"coverage+coref/EvaluatedOn", report.td_expanded.coverage,
       static_cast<double>(report.td_expanded.covered),
       static_cast<double>(report.td_expanded.total)},
      {"coverage+coref/EvaluatedBy", report.tm_expanded.coverage,
       static_cast<double>(report.tm_expanded.covered),
       static_cast<double>(report.tm_expanded.total)},
  };
  eval::write_metric_records(records, out);
  return 0;
}

// `rtype<TAB>source<TAB>target` lines, e.g. known training pairs.
std::map<kg::RelationType, std::set<eval::SurfacePair>> load_exclusion(
    const std::string& path) {
  std::map<kg::RelationType, std::set<eval::SurfacePair>> exclusion;
  if (path.empty()) return exclusion;
  std::ifstream in(path);
  if (!in) throw Error("cannot open exclusion file '" + path + "'");
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab1 = line.find('\t');
    std::size_t tab2 =
        tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      throw Error("exclusion file line " + std::to_string(line_number) +
                  ": expected rtype<TAB>source<TAB>target");
    }
    kg::RelationType rtype = kg::relation_type_from_string(line.substr(0, tab1));
    std::string a = normalize_surface(line.substr(tab1 + 1, tab2 - tab1 - 1));
    std::string b = normalize_surface(line.substr(tab2 + 1));
    if (kg::is_symmetric(rtype) && b < a) std::swap(a, b);
    exclusion[rtype].insert({std::move(a), std::move(b)});
  }
  return exclusion;
}

int cmd_sample_human_eval(const CliOptions& options) {
  kg::KnowledgeGraph graph = load_kg(options.kg_path);
  std::optional<Corpus> corpus;
  if (!options.corpus_paths.empty()) corpus = load_corpus(options.corpus_paths);
  eval::HumanEvalManifest manifest = eval::sample_for_human_eval(
      graph, options.per_relation, options.pipeline.seed,
      load_exclusion(options.exclusion_path), corpus ? &*corpus : nullptr);

  OutputTarget target(options.out_path);
  std::ostream& out = target.stream();
  print_file_header(out, options.pipeline);
  for (const auto& [rtype, rows] : manifest.samples) {
    if (manifest.population.at(rtype) < options.per_relation) {
      std::cerr << "warning: only " << manifest.population.at(rtype) << " "
                << kg::to_string(rtype) << " edges available (requested "
                << options.per_relation << ")\n";
    }
    for (const auto& row : rows) {
      out << kg::to_string(rtype) << '\t' << row.relation.source.surface << '\t'
          << row.relation.target.surface << '\t'
          << kg::to_string(row.relation.provenance) << '\t'
          << row.relation.confidence << '\t';
      for (std::size_t i = 0; i < row.paper_ids.size(); ++i) {
        if (i) out << ',';
        out << row.paper_ids[i];
      }
      out << '\n';
    }
  }
  return 0;
}

int cmd_query(const CliOptions& options) {
  term2vec::EmbeddingTable table = load_embeddings(options.embeddings_path);
  EntityKey query{normalize_surface(options.query_surface),
                  entity_type_from_string(options.query_type)};
  auto neighbors = term2vec::nearest_neighbors(table, query, options.top_k, true);
  for (const auto& [key, cosine] : neighbors) {
    std::cout << key.surface << '\t' << to_string(key.type) << '\t' << cosine << '\n';
  }
  return 0;
}

void add_common_options(CLI::App* cmd, CliOptions& options) {
  cmd->add_option("--seed", options.pipeline.seed, "Master random seed");
  cmd->add_option("--out", options.out_path, "Output file (default: stdout)");
}

void add_corpus_option(CLI::App* cmd, CliOptions& options, bool required = true) {
  auto* opt = cmd->add_option("--corpus", options.corpus_paths,
                              "Tagged-paper corpus file(s), line-delimited records");
  if (required) opt->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Task/Dataset/Metric knowledge-graph pipeline"};
  app.set_version_flag("--version", std::string(pipeline::kVersion));
  app.set_config("--config", "", "INI config file; command-line flags override it");
  app.fallthrough();  // lets `tdmkg build --config ...` reach the global flag
  app.require_subcommand(1);

  CliOptions options;

  auto add_threshold_options = [&](CLI::App* cmd) {
    cmd->add_option("--tau-s", options.pipeline.tau_s,
                    "Sentence sieve decision threshold");
    cmd->add_option("--tau-d", options.pipeline.tau_d,
                    "Document sieve decision threshold");
    cmd->add_option("--tau-pos", options.pipeline.tau_pos,
                    "Edit-distance threshold for mined coref positives");
    cmd->add_option("--tau-c", options.pipeline.tau_c, "Coref decision threshold");
    cmd->add_option("--relaxed-tau", options.pipeline.relaxed_tau,
                    "Relaxed-match edit-distance threshold");
    cmd->add_option("--min-paper-freq", options.pipeline.min_paper_freq,
                    "Drop entities below this paper frequency");
    cmd->add_option("--max-context-sentences",
                    options.pipeline.max_context_sentences,
                    "Document-level context cap");
    std::map<std::string, pipeline::ScorerKind> scorer_kinds{
        {"lexical", pipeline::ScorerKind::Lexical},
        {"external", pipeline::ScorerKind::External}};
    cmd->add_option("--sentence-scorer", options.pipeline.sentence_scorer,
                    "Sentence-level relation scorer")
        ->transform(CLI::CheckedTransformer(scorer_kinds));
    cmd->add_option("--document-scorer", options.pipeline.document_scorer,
                    "Document-level relation scorer")
        ->transform(CLI::CheckedTransformer(scorer_kinds));
    cmd->add_option("--sentence-scores", options.pipeline.sentence_scores_path,
                    "TSV instance scores for the external sentence scorer");
    cmd->add_option("--document-scores", options.pipeline.document_scores_path,
                    "TSV instance scores for the external document scorer");
    std::map<std::string, pipeline::CorefMode> coref_modes{
        {"learned", pipeline::CorefMode::Learned},
        {"jaccard-rule", pipeline::CorefMode::JaccardRule},
        {"external", pipeline::CorefMode::External}};
    cmd->add_option("--coref-mode", options.pipeline.coref_mode,
                    "Coreference classifier")
        ->transform(CLI::CheckedTransformer(coref_modes));
    cmd->add_option("--coref-scores", options.pipeline.coref_scores_path,
                    "TSV pair scores for the external coref classifier");
    std::map<std::string, pipeline::RelatedSource> related_sources{
        {"embedding", pipeline::RelatedSource::Embedding},
        {"pmi", pipeline::RelatedSource::Pmi}};
    cmd->add_option("--related-source", options.pipeline.related_source,
                    "Related-relation extractor")
        ->transform(CLI::CheckedTransformer(related_sources));
    cmd->add_option("--pmi-top-k", options.pipeline.pmi_top_k,
                    "Partners per entity for the PMI baseline");
    cmd->add_option("--dimension", options.pipeline.skipgram.dimension,
                    "Embedding dimension");
    cmd->add_option("--window", options.pipeline.skipgram.window, "Skip-gram window");
    cmd->add_option("--min-count", options.pipeline.skipgram.min_count,
                    "Skip-gram minimum token count");
    cmd->add_option("--negative", options.pipeline.skipgram.negative_samples,
                    "Negative samples per context pair");
    cmd->add_option("--epochs", options.pipeline.skipgram.epochs,
                    "Skip-gram training epochs");
    cmd->add_option("--embedding-seed", options.pipeline.skipgram.seed,
                    "Skip-gram seed");
    cmd->add_flag("--shuffle-pseudo-sentences",
                  options.pipeline.skipgram.shuffle_tokens,
                  "Shuffle token order within pseudo-sentences");
    cmd->add_flag_callback(
        "--parallel",
        [&options] {
          options.pipeline.skipgram.threads =
              std::max(1u, std::thread::hardware_concurrency());
        },
        "Multi-threaded embedding training (results not seed-reproducible)");
    cmd->add_option("--clusters-task",
                    options.pipeline.clusters_per_type[tdmkg::EntityType::Task],
                    "K for task clustering (0 = auto)");
    cmd->add_option("--clusters-dataset",
                    options.pipeline.clusters_per_type[tdmkg::EntityType::Dataset],
                    "K for dataset clustering (0 = auto)");
    cmd->add_option("--clusters-metric",
                    options.pipeline.clusters_per_type[tdmkg::EntityType::Metric],
                    "K for metric clustering (0 = auto)");
  };

  auto* ingest =
      app.add_subcommand("ingest", "Parse and index a corpus; dump the inventory");
  add_corpus_option(ingest, options);
  add_common_options(ingest, options);
  ingest->add_option("--min-paper-freq", options.pipeline.min_paper_freq,
                     "Drop entities below this paper frequency");

  auto* build = app.add_subcommand("build", "Run the full pipeline and write a KG file");
  add_corpus_option(build, options);
  add_common_options(build, options);
  add_threshold_options(build);

  auto* export_instances =
      app.add_subcommand("export-instances", "Emit hypothesis instances as JSONL");
  add_corpus_option(export_instances, options);
  add_common_options(export_instances, options);
  export_instances->add_option("--level", options.level, "sentence | document")
      ->check(CLI::IsMember({"sentence", "document"}));
  export_instances->add_option("--annotations", options.annotations_path,
                               "Gold annotations (JSONL) for labeled training export");

  auto* export_pairs =
      app.add_subcommand("export-pairs", "Emit labeled coref training pairs as TSV");
  add_corpus_option(export_pairs, options);
  add_common_options(export_pairs, options);
  export_pairs->add_option("--tau-pos", options.pipeline.tau_pos,
                           "Edit-distance threshold for mined positives");
  export_pairs->add_flag("--candidates", options.export_candidates,
                         "Emit unlabeled inference candidates instead");

  auto* train = app.add_subcommand("train-embeddings",
                                   "Train skip-gram embeddings over pseudo-sentences");
  add_corpus_option(train, options);
  add_common_options(train, options);
  add_threshold_options(train);

  auto* cluster = app.add_subcommand("cluster", "K-means over an embedding file");
  add_common_options(cluster, options);
  cluster->add_option("--embeddings", options.embeddings_path, "Embedding file")
      ->required();
  cluster->add_option("--type", options.cluster_type, "Entity type to cluster")
      ->check(CLI::IsMember({"Task", "Dataset", "Metric"}));
  cluster->add_option("--k", options.cluster_k, "Cluster count (0 = auto)");

  auto* eval_cmd = app.add_subcommand("eval", "Score a KG against a gold KG");
  add_common_options(eval_cmd, options);
  eval_cmd->add_option("--kg", options.kg_path, "Predicted KG file")->required();
  eval_cmd->add_option("--gold", options.gold_path, "Gold KG file")->required();

  auto* coverage = app.add_subcommand(
      "coverage", "Leaderboard coverage with and without coreference");
  add_common_options(coverage, options);
  coverage->add_option("--kg", options.kg_path, "Predicted KG file")->required();
  coverage->add_option("--leaderboard", options.leaderboard_path,
                       "task<TAB>dataset<TAB>metric tuples")
      ->required();
  coverage->add_option("--relaxed-tau", options.pipeline.relaxed_tau,
                       "Relaxed-match threshold");

  auto* sample = app.add_subcommand("sample-human-eval",
                                    "Sample relation instances for manual assessment");
  add_common_options(sample, options);
  sample->add_option("--kg", options.kg_path, "KG file")->required();
  sample->add_option("--per-relation", options.per_relation, "Sample size per type");
  sample->add_option("--exclude-pairs", options.exclusion_path,
                     "rtype<TAB>source<TAB>target pairs never to sample");
  add_corpus_option(sample, options, /*required=*/false);

  auto* stats = app.add_subcommand("stats", "Node and relation counts of a KG file");
  add_common_options(stats, options);
  stats->add_option("--kg", options.kg_path, "KG file")->required();

  auto* query = app.add_subcommand("query", "Nearest same-type neighbors of an entity");
  add_common_options(query, options);
  query->add_option("--embeddings", options.embeddings_path, "Embedding file")
      ->required();
  query->add_option("--entity", options.query_surface, "Entity surface")->required();
  query->add_option("--type", options.query_type, "Entity type")
      ->check(CLI::IsMember({"Task", "Dataset", "Metric"}));
  query->add_option("--top-k", options.top_k, "Neighbors to print");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) return cmd_ingest(options);
    if (build->parsed()) return cmd_build(options);
    if (export_instances->parsed()) return cmd_export_instances(options);
    if (export_pairs->parsed()) return cmd_export_pairs(options);
    if (train->parsed()) return cmd_train_embeddings(options);
    if (cluster->parsed()) return cmd_cluster(options);
    if (eval_cmd->parsed()) return cmd_eval(options);
    if (coverage->parsed()) return cmd_coverage(options);
    if (sample->parsed()) return cmd_sample_human_eval(options);
    if (stats->parsed()) return cmd_stats(options);
    if (query->parsed()) return cmd_query(options);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
