#include "tdmkg/relext.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace tdmkg::relext {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Level level) {
  return level == Level::Sentence ? "Sentence" : "Document";
}

Level level_from_string(std::string_view s) {
  if (s == "Sentence") return Level::Sentence;
  if (s == "Document") return Level::Document;
  throw Error("unknown instance level: '" + std::string(s) + "'");
}

std::string_view to_string(SieveProvenance p) {
  switch (p) {
    case SieveProvenance::SentenceSieve: return "SentenceSieve";
    case SieveProvenance::DocumentSieve: return "DocumentSieve";
    case SieveProvenance::NoEvidence: return "NoEvidence";
  }
  return "NoEvidence";
}

std::string instance_id(const std::string& paper_id, Level level,
                        kg::RelationType rtype, const EntityKey& task,
                        const EntityKey& target,
                        std::optional<std::size_t> sentence_index) {
  std::string data;
  data.reserve(paper_id.size() + task.surface.size() + target.surface.size() + 32);
  data += paper_id;
  data += '\x1f';
  data += to_string(level);
  data += '\x1f';
  data += kg::to_string(rtype);
  data += '\x1f';
  data += task.surface;
  data += '\x1f';
  data += target.surface;
  if (sentence_index) {
    data += '\x1f';
    data += std::to_string(*sentence_index);
  }
  return to_hex16(fnv1a64(data));
}

namespace {

struct TypedKeys {
  std::vector<EntityKey> tasks, datasets, metrics;
};

TypedKeys split_by_type(const std::set<EntityKey>& keys) {
  TypedKeys out;
  for (const EntityKey& key : keys) {
    switch (key.type) {
      case EntityType::Task: out.tasks.push_back(key); break;
      case EntityType::Dataset: out.datasets.push_back(key); break;
      case EntityType::Metric: out.metrics.push_back(key); break;
    }
  }
  return out;
}

HypothesisInstance make_instance(const std::string& paper_id, Level level,
                                 kg::RelationType rtype, const EntityKey& task,
                                 const EntityKey& target, std::string context,
                                 std::optional<std::size_t> sentence_index) {
  HypothesisInstance inst;
  inst.instance_id = instance_id(paper_id, level, rtype, task, target, sentence_index);
  inst.paper_id = paper_id;
  inst.level = level;
  inst.rtype = rtype;
  inst.task = task;
  inst.target = target;
  inst.context = std::move(context);
  inst.sentence_index = sentence_index;
  return inst;
}

}  // namespace

std::vector<HypothesisInstance> generate_sentence_hypotheses(const TaggedPaper& paper) {
  std::vector<HypothesisInstance> out;
  for (std::size_t si = 0; si < paper.sentences.size(); ++si) {
    const Sentence& sentence = paper.sentences[si];
    TypedKeys keys = split_by_type(sentence_entity_keys(sentence));
    for (const EntityKey& task : keys.tasks) {
      for (const EntityKey& dataset : keys.datasets) {
        out.push_back(make_instance(paper.paper_id, Level::Sentence,
                                    kg::RelationType::EvaluatedOn, task, dataset,
                                    sentence.text, si));
      }
      for (const EntityKey& metric : keys.metrics) {
        out.push_back(make_instance(paper.paper_id, Level::Sentence,
                                    kg::RelationType::EvaluatedBy, task, metric,
                                    sentence.text, si));
      }
    }
  }
  return out;
}

namespace {

// Document context for one pair: sentences mentioning either entity, capped
// preferring both-mention sentences, re-joined in document order.
std::string document_context(const TaggedPaper& paper, const EntityKey& a,
                             const EntityKey& b, std::size_t max_sentences) {
  struct Candidate {
    std::size_t index;
    bool both;
  };
  std::vector<Candidate> candidates;
  for (std::size_t si = 0; si < paper.sentences.size(); ++si) {
    bool has_a = sentence_mentions(paper.sentences[si], a);
    bool has_b = sentence_mentions(paper.sentences[si], b);
    if (has_a || has_b) candidates.push_back({si, has_a && has_b});
  }
  if (candidates.size() > max_sentences) {
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& x, const Candidate& y) {
                       if (x.both != y.both) return x.both;
                       return x.index < y.index;
                     });
    candidates.resize(max_sentences);
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& x, const Candidate& y) { return x.index < y.index; });
  }
  std::string context;
  for (const Candidate& c : candidates) {
    if (!context.empty()) context += '\n';
    context += paper.sentences[c.index].text;
  }
  return context;
}

}  // namespace

std::vector<HypothesisInstance> generate_document_hypotheses(
    const TaggedPaper& paper, std::size_t max_context_sentences) {
  std::set<EntityKey> all;
  for (const Sentence& sentence : paper.sentences) {
    auto keys = sentence_entity_keys(sentence);
    all.insert(keys.begin(), keys.end());
  }
  TypedKeys keys = split_by_type(all);
  std::vector<HypothesisInstance> out;
  for (const EntityKey& task : keys.tasks) {
    for (const EntityKey& dataset : keys.datasets) {
      out.push_back(make_instance(
          paper.paper_id, Level::Document, kg::RelationType::EvaluatedOn, task, dataset,
          document_context(paper, task, dataset, max_context_sentences), std::nullopt));
    }
    for (const EntityKey& metric : keys.metrics) {
      out.push_back(make_instance(
          paper.paper_id, Level::Document, kg::RelationType::EvaluatedBy, task, metric,
          document_context(paper, task, metric, max_context_sentences), std::nullopt));
    }
  }
  return out;
}

SievePrediction sieve_predict(const Corpus& corpus, const EntityKey& task,
                              const EntityKey& target, kg::RelationType rtype,
                              RelationScorer& sentence_scorer,
                              RelationScorer& document_scorer,
                              std::size_t max_context_sentences) {
  if (task.type != EntityType::Task || target.type != kg::target_type(rtype)) {
    throw Error("sieve pair violates the schema: " + to_string(task) + " -" +
                std::string(kg::to_string(rtype)) + "-> " + to_string(target));
  }
  std::vector<SentenceRef> refs = corpus.cooccurring_sentences(task, target);
  if (!refs.empty()) {
    std::vector<HypothesisInstance> batch;
    batch.reserve(refs.size());
    for (const SentenceRef& ref : refs) {
      const Sentence& sentence = corpus.paper(ref.paper_id).sentences[ref.sentence_index];
      batch.push_back(make_instance(ref.paper_id, Level::Sentence, rtype, task, target,
                                    sentence.text, ref.sentence_index));
    }
    std::vector<ScoreRecord> scores = sentence_scorer.score(batch);
    double best = 0.0;
    for (const ScoreRecord& s : scores) best = std::max(best, s.probability);
    return {best >= sentence_scorer.threshold(), SieveProvenance::SentenceSieve, best};
  }

  std::vector<std::string> shared_papers = corpus.papers_containing_both(task, target);
  if (shared_papers.empty()) {
    return {false, SieveProvenance::NoEvidence, 0.0};
  }
  std::vector<HypothesisInstance> batch;
  batch.reserve(shared_papers.size());
  for (const std::string& paper_id : shared_papers) {
    const TaggedPaper& paper = corpus.paper(paper_id);
    batch.push_back(make_instance(
        paper_id, Level::Document, rtype, task, target,
        document_context(paper, task, target, max_context_sentences), std::nullopt));
  }
  std::vector<ScoreRecord> scores = document_scorer.score(batch);
  double best = 0.0;
  for (const ScoreRecord& s : scores) best = std::max(best, s.probability);
  return {best >= document_scorer.threshold(), SieveProvenance::DocumentSieve, best};
}

LexicalScorer::LexicalScorer(LexicalScorerConfig config) : config_(std::move(config)) {}

double LexicalScorer::score_one(const HypothesisInstance& instance) const {
  const std::vector<std::string>& cues = instance.rtype == kg::RelationType::EvaluatedOn
                                             ? config_.evaluated_on_cues
                                             : config_.evaluated_by_cues;
  std::size_t co_mentions = 0;
  bool cue_hit = false;
  std::size_t start = 0;
  const std::string& context = instance.context;
  while (start <= context.size()) {
    std::size_t end = context.find('\n', start);
    if (end == std::string::npos) end = context.size();
    std::string segment = collapse_whitespace(
        ascii_lower(std::string_view(context).substr(start, end - start)));
    bool has_task = contains_substring(segment, instance.task.surface);
    bool has_target = contains_substring(segment, instance.target.surface);
    if (has_task && has_target) ++co_mentions;
    if (has_task || has_target) {
      for (const std::string& cue : cues) {
        if (contains_substring(segment, cue)) {
          cue_hit = true;
          break;
        }
      }
    }
    if (end == context.size()) break;
    start = end + 1;
  }
  if (cue_hit) return 1.0;
  return std::min(1.0, static_cast<double>(co_mentions) / config_.co_mention_divisor);
}

std::vector<ScoreRecord> LexicalScorer::score(std::span<const HypothesisInstance> batch) {
  std::vector<ScoreRecord> out;
  out.reserve(batch.size());
  for (const HypothesisInstance& instance : batch) {
    out.push_back({instance.instance_id, score_one(instance)});
  }
  return out;
}

ExternalScorer::ExternalScorer(std::istream& in, double decision_threshold)
    : threshold_(decision_threshold) {
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error("score file line " + std::to_string(line_number) +
                  ": expected instance_id<TAB>probability");
    }
    std::string id = line.substr(0, tab);
    double probability;
    try {
      std::size_t consumed = 0;
      probability = std::stod(line.substr(tab + 1), &consumed);
      if (consumed != line.size() - tab - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error("score file line " + std::to_string(line_number) +
                  ": invalid probability '" + line.substr(tab + 1) + "'");
    }
    if (!(probability >= 0.0 && probability <= 1.0)) {
      throw Error("score file line " + std::to_string(line_number) +
                  ": probability " + std::to_string(probability) + " outside [0,1]");
    }
    scores_[id] = probability;
  }
}

std::vector<ScoreRecord> ExternalScorer::score(std::span<const HypothesisInstance> batch) {
  std::vector<ScoreRecord> out;
  out.reserve(batch.size());
  for (const HypothesisInstance& instance : batch) {
    auto it = scores_.find(instance.instance_id);
    if (it == scores_.end()) {
      throw Error("score file has no record for instance " + instance.instance_id +
                  " (paper '" + instance.paper_id + "')");
    }
    out.push_back({instance.instance_id, it->second});
  }
  return out;
}

namespace {

struct AnnotationKey {
  kg::RelationType rtype;
  std::string task;
  std::string target;
  auto operator<=>(const AnnotationKey&) const = default;
};

// Seeded per-document downsampling of negatives; positives always kept.
void apply_negative_cap(std::vector<HypothesisInstance>& negatives,
                        std::size_t positives, const std::string& paper_id,
                        const TrainingExportConfig& config,
                        std::vector<HypothesisInstance>& out) {
  std::size_t cap = config.max_negatives_per_positive * std::max<std::size_t>(1, positives);
  if (negatives.size() > cap) {
    std::sort(negatives.begin(), negatives.end(),
              [](const HypothesisInstance& a, const HypothesisInstance& b) {
                return a.instance_id < b.instance_id;
              });
    Rng rng(config.seed ^ fnv1a64(paper_id));
    rng.shuffle(negatives);
    negatives.resize(cap);
  }
  for (HypothesisInstance& inst : negatives) out.push_back(std::move(inst));
}

void sort_instances(std::vector<HypothesisInstance>& instances) {
  std::sort(instances.begin(), instances.end(),
            [](const HypothesisInstance& a, const HypothesisInstance& b) {
              return std::tie(a.paper_id, a.instance_id) <
                     std::tie(b.paper_id, b.instance_id);
            });
}

}  // namespace

std::vector<HypothesisInstance> export_training_instances(
    const Corpus& corpus, const std::vector<SentenceAnnotation>& gold,
    const TrainingExportConfig& config) {
  // (paper, sentence) -> annotated pairs
  std::map<std::pair<std::string, std::size_t>, std::set<AnnotationKey>> annotated;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const SentenceAnnotation& ann = gold[i];
    std::string where = "sentence annotation " + std::to_string(i) + " (paper '" +
                        ann.paper_id + "', sentence " + std::to_string(ann.sentence_index) + ")";
    if (!corpus.has_paper(ann.paper_id)) throw Error(where + ": unknown paper");
    const TaggedPaper& paper = corpus.paper(ann.paper_id);
    if (ann.sentence_index >= paper.sentences.size()) {
      throw Error(where + ": sentence index out of range");
    }
    EntityKey task{normalize_surface(ann.task), EntityType::Task};
    EntityKey target{normalize_surface(ann.target), kg::target_type(ann.rtype)};
    const Sentence& sentence = paper.sentences[ann.sentence_index];
    if (!sentence_mentions(sentence, task)) {
      throw Error(where + ": entity " + to_string(task) + " not tagged in that sentence");
    }
    if (!sentence_mentions(sentence, target)) {
      throw Error(where + ": entity " + to_string(target) + " not tagged in that sentence");
    }
    annotated[{ann.paper_id, ann.sentence_index}].insert(
        {ann.rtype, task.surface, target.surface});
  }

  std::vector<HypothesisInstance> out;
  for (const TaggedPaper& paper : corpus.papers()) {
    std::vector<HypothesisInstance> instances = generate_sentence_hypotheses(paper);
    std::vector<HypothesisInstance> negatives;
    std::size_t positives = 0;
    for (HypothesisInstance& inst : instances) {
      auto it = annotated.find({paper.paper_id, *inst.sentence_index});
      bool positive = it != annotated.end() &&
                      it->second.count({inst.rtype, inst.task.surface, inst.target.surface});
      inst.label = positive;
      if (positive) {
        ++positives;
        out.push_back(std::move(inst));
      } else {
        negatives.push_back(std::move(inst));
      }
    }
    apply_negative_cap(negatives, positives, paper.paper_id, config, out);
  }
  sort_instances(out);
  return out;
}

std::vector<HypothesisInstance> export_training_instances(
    const Corpus& corpus, const std::vector<DocumentAnnotation>& gold,
    const TrainingExportConfig& config) {
  std::map<std::string, std::set<AnnotationKey>> annotated;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const DocumentAnnotation& ann = gold[i];
    std::string where = "document annotation " + std::to_string(i) + " (paper '" +
                        ann.paper_id + "')";
    if (!corpus.has_paper(ann.paper_id)) throw Error(where + ": unknown paper");
    EntityKey task{normalize_surface(ann.task), EntityType::Task};
    EntityKey target{normalize_surface(ann.target), kg::target_type(ann.rtype)};
    const TaggedPaper& paper = corpus.paper(ann.paper_id);
    auto tagged_in_paper = [&paper](const EntityKey& key) {
      for (const Sentence& sentence : paper.sentences) {
        if (sentence_mentions(sentence, key)) return true;
      }
      return false;
    };
    if (!tagged_in_paper(task)) {
      throw Error(where + ": entity " + to_string(task) + " not tagged in that paper");
    }
    if (!tagged_in_paper(target)) {
      throw Error(where + ": entity " + to_string(target) + " not tagged in that paper");
    }
    annotated[ann.paper_id].insert({ann.rtype, task.surface, target.surface});
  }

  std::vector<HypothesisInstance> out;
  for (const TaggedPaper& paper : corpus.papers()) {
    std::vector<HypothesisInstance> instances =
        generate_document_hypotheses(paper, config.max_context_sentences);
    std::vector<HypothesisInstance> negatives;
    std::size_t positives = 0;
    auto it = annotated.find(paper.paper_id);
    for (HypothesisInstance& inst : instances) {
      bool positive = it != annotated.end() &&
                      it->second.count({inst.rtype, inst.task.surface, inst.target.surface});
      inst.label = positive;
      if (positive) {
        ++positives;
        out.push_back(std::move(inst));
      } else {
        negatives.push_back(std::move(inst));
      }
    }
    apply_negative_cap(negatives, positives, paper.paper_id, config, out);
  }
  sort_instances(out);
  return out;
}

void write_instances(std::span<const HypothesisInstance> instances, std::ostream& out) {
  for (const HypothesisInstance& inst : instances) {
    ordered_json rec;
    rec["instance_id"] = inst.instance_id;
    rec["paper_id"] = inst.paper_id;
    rec["level"] = to_string(inst.level);
    rec["rtype"] = kg::to_string(inst.rtype);
    rec["task"] = inst.task.surface;
    rec["target"] = inst.target.surface;
    rec["context"] = inst.context;
    if (inst.label) rec["label"] = *inst.label;
    out << rec.dump() << "\n";
  }
}

std::vector<HypothesisInstance> read_instances(std::istream& in) {
  std::vector<HypothesisInstance> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw Error("instances line " + std::to_string(line_number) + ": " + e.what());
    }
    HypothesisInstance inst;
    try {
      inst.instance_id = rec.at("instance_id").get<std::string>();
      inst.paper_id = rec.at("paper_id").get<std::string>();
      inst.level = level_from_string(rec.at("level").get<std::string>());
      inst.rtype = kg::relation_type_from_string(rec.at("rtype").get<std::string>());
      inst.task = {rec.at("task").get<std::string>(), EntityType::Task};
      inst.target = {rec.at("target").get<std::string>(), kg::target_type(inst.rtype)};
      inst.context = rec.at("context").get<std::string>();
      if (rec.contains("label")) inst.label = rec["label"].get<bool>();
    } catch (const json::exception& e) {
      throw Error("instances line " + std::to_string(line_number) + ": " + e.what());
    }
    out.push_back(std::move(inst));
  }
  return out;
}

namespace {

json parse_annotation_line(const std::string& line, std::size_t line_number) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw Error("annotation line " + std::to_string(line_number) + ": " + e.what());
  }
}

}  // namespace

std::vector<SentenceAnnotation> read_sentence_annotations(std::istream& in) {
  std::vector<SentenceAnnotation> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    json rec = parse_annotation_line(line, line_number);
    try {
      out.push_back({rec.at("paper_id").get<std::string>(),
                     rec.at("sentence_index").get<std::size_t>(),
                     kg::relation_type_from_string(rec.at("rtype").get<std::string>()),
                     rec.at("task").get<std::string>(),
                     rec.at("target").get<std::string>()});
    } catch (const json::exception& e) {
      throw Error("annotation line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return out;
}

std::vector<DocumentAnnotation> read_document_annotations(std::istream& in) {
  std::vector<DocumentAnnotation> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    json rec = parse_annotation_line(line, line_number);
    try {
      out.push_back({rec.at("paper_id").get<std::string>(),
                     kg::relation_type_from_string(rec.at("rtype").get<std::string>()),
                     rec.at("task").get<std::string>(),
                     rec.at("target").get<std::string>()});
    } catch (const json::exception& e) {
      throw Error("annotation line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace tdmkg::relext
