#include "tdmkg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace tdmkg::eval {

using nlohmann::ordered_json;

void PairSet::add(std::string a, std::string b) {
  if (kg::is_symmetric(rtype) && b < a) std::swap(a, b);
  pairs.emplace(std::move(a), std::move(b));
}

bool PairSet::contains(const SurfacePair& pair) const {
  if (kg::is_symmetric(rtype) && pair.second < pair.first) {
    return pairs.count({pair.second, pair.first}) != 0;
  }
  return pairs.count(pair) != 0;
}

PairSet pair_set_from_kg(const kg::KnowledgeGraph& kg, kg::RelationType rtype) {
  PairSet out;
  out.rtype = rtype;
  for (const kg::Relation& r : kg.relations_of(rtype)) {
    out.add(r.source.surface, r.target.surface);
  }
  return out;
}

PairSet cluster_to_pairs(const std::vector<std::vector<std::string>>& clusters,
                         kg::RelationType rtype) {
  PairSet out;
  out.rtype = rtype;
  for (const auto& cluster : clusters) {
    for (std::size_t i = 0; i < cluster.size(); ++i) {
      for (std::size_t j = i + 1; j < cluster.size(); ++j) {
        out.add(cluster[i], cluster[j]);
      }
    }
  }
  return out;
}

Prf pairwise_prf(const PairSet& predicted, const PairSet& gold) {
  if (predicted.rtype != gold.rtype) {
    throw Error("pairwise_prf: relation type mismatch");
  }
  std::size_t inter = 0;
  for (const SurfacePair& pair : predicted.pairs) {
    inter += gold.pairs.count(pair);
  }
  Prf out;
  if (predicted.pairs.empty()) {
    out.precision = gold.pairs.empty() ? 1.0 : 0.0;
  } else {
    out.precision = static_cast<double>(inter) / static_cast<double>(predicted.size());
  }
  if (gold.pairs.empty()) {
    out.recall = predicted.pairs.empty() ? 1.0 : 0.0;
  } else {
    out.recall = static_cast<double>(inter) / static_cast<double>(gold.size());
  }
  out.f1 = out.precision + out.recall == 0.0
               ? 0.0
               : 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

Prf macro_cluster_prf(const std::vector<std::vector<std::string>>& predicted_clusters,
                      const std::vector<std::vector<std::string>>& gold_clusters) {
  PairSet predicted = cluster_to_pairs(predicted_clusters);
  PairSet gold = cluster_to_pairs(gold_clusters);

  auto cluster_scores = [](const std::vector<std::vector<std::string>>& clusters,
                           const PairSet& against) {
    double sum = 0.0;
    std::size_t counted = 0;
    for (const auto& cluster : clusters) {
      if (cluster.size() < 2) continue;
      std::size_t hits = 0, total = 0;
      for (std::size_t i = 0; i < cluster.size(); ++i) {
        for (std::size_t j = i + 1; j < cluster.size(); ++j) {
          ++total;
          hits += against.contains({cluster[i], cluster[j]});
        }
      }
      sum += static_cast<double>(hits) / static_cast<double>(total);
      ++counted;
    }
    return std::pair<double, std::size_t>{sum, counted};
  };

  auto [p_sum, p_count] = cluster_scores(predicted_clusters, gold);
  auto [r_sum, r_count] = cluster_scores(gold_clusters, predicted);
  Prf out;
  if (p_count == 0) {
    out.precision = r_count == 0 ? 1.0 : 0.0;
  } else {
    out.precision = p_sum / static_cast<double>(p_count);
  }
  if (r_count == 0) {
    out.recall = p_count == 0 ? 1.0 : 0.0;
  } else {
    out.recall = r_sum / static_cast<double>(r_count);
  }
  out.f1 = out.precision + out.recall == 0.0
               ? 0.0
               : 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

std::map<std::size_t, double> precision_at_k(
    const std::map<std::string, std::vector<std::string>>& rankings,
    const std::set<SurfacePair>& judgments, const std::vector<std::size_t>& ks) {
  std::map<std::size_t, double> out;
  for (std::size_t k : ks) {
    if (k == 0) {
      out[k] = 0.0;
      continue;
    }
    double sum = 0.0;
    for (const auto& [query, candidates] : rankings) {
      std::size_t hits = 0;
      for (std::size_t i = 0; i < std::min(k, candidates.size()); ++i) {
        hits += judgments.count({query, candidates[i]});
      }
      sum += static_cast<double>(hits) / static_cast<double>(k);
    }
    out[k] = rankings.empty() ? 0.0 : sum / static_cast<double>(rankings.size());
  }
  return out;
}

SplitResult split_dev_test(const kg::KnowledgeGraph& gold, double dev_fraction,
                           std::uint64_t seed) {
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
    throw Error("dev_fraction must be in (0,1)");
  }
  std::vector<EntityKey> keys;
  for (const auto& [key, node] : gold.entities()) keys.push_back(key);
  std::size_t dev_count = static_cast<std::size_t>(
      std::ceil(dev_fraction * static_cast<double>(keys.size())));

  Rng rng(seed);
  rng.shuffle(keys);
  SplitResult result;
  result.dev_entities.assign(keys.begin(), keys.begin() + std::min(dev_count, keys.size()));
  result.test_entities.assign(keys.begin() + std::min(dev_count, keys.size()), keys.end());
  std::sort(result.dev_entities.begin(), result.dev_entities.end());
  std::sort(result.test_entities.begin(), result.test_entities.end());

  std::set<EntityKey> dev_set(result.dev_entities.begin(), result.dev_entities.end());
  for (const EntityKey& key : result.dev_entities) {
    result.dev_kg.add_entity(key, gold.entities().at(key).paper_frequency);
  }
  for (const EntityKey& key : result.test_entities) {
    result.test_kg.add_entity(key, gold.entities().at(key).paper_frequency);
  }
  for (const kg::Relation& r : gold.relations()) {
    bool src_dev = dev_set.count(r.source) != 0;
    bool tgt_dev = dev_set.count(r.target) != 0;
    if (src_dev && tgt_dev) {
      result.dev_kg.add_relation(r);
    } else if (!src_dev && !tgt_dev) {
      result.test_kg.add_relation(r);
    } else {
      result.dropped_relations.push_back(r);
    }
  }

  // Test entities plus every member of their gold coreferent clusters.
  result.exclusion.insert(result.test_entities.begin(), result.test_entities.end());
  for (const auto& [type, clusters] : gold.coref_clusters()) {
    for (const auto& cluster : clusters) {
      bool touches_test = std::any_of(cluster.begin(), cluster.end(),
                                      [&](const EntityKey& member) {
                                        return !dev_set.count(member);
                                      });
      if (touches_test) result.exclusion.insert(cluster.begin(), cluster.end());
    }
  }
  return result;
}

std::vector<LeaderboardTuple> parse_leaderboard(std::istream& in) {
  std::vector<LeaderboardTuple> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab1 = line.find('\t');
    std::size_t tab2 = tab1 == std::string::npos ? std::string::npos
                                                 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      throw Error("leaderboard line " + std::to_string(line_number) +
                  ": expected task<TAB>dataset<TAB>metric");
    }
    // A trailing score column may be present; it is dropped on ingestion.
    std::size_t tab3 = line.find('\t', tab2 + 1);
    std::size_t metric_end = tab3 == std::string::npos ? line.size() : tab3;
    LeaderboardTuple t{line.substr(0, tab1), line.substr(tab1 + 1, tab2 - tab1 - 1),
                       line.substr(tab2 + 1, metric_end - tab2 - 1)};
    if (t.task.empty() || t.dataset.empty() || t.metric.empty()) {
      throw Error("leaderboard line " + std::to_string(line_number) +
                  ": all of task/dataset/metric must be non-empty");
    }
    out.push_back(std::move(t));
  }
  return out;
}

ReferencePairs tuples_to_pairs(std::span<const LeaderboardTuple> tuples) {
  ReferencePairs out;
  out.td.rtype = kg::RelationType::EvaluatedOn;
  out.tm.rtype = kg::RelationType::EvaluatedBy;
  for (const LeaderboardTuple& t : tuples) {
    out.td.add(normalize_surface(t.task), normalize_surface(t.dataset));
    out.tm.add(normalize_surface(t.task), normalize_surface(t.metric));
  }
  return out;
}

double relaxed_edit_distance(std::string_view a, std::string_view b) {
  return length_sum_edit_distance(a, b);
}

RelaxedMatchResult relaxed_match(const PairSet& predicted, const PairSet& reference,
                                 double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error("relaxed-match tau must be in (0,1)");
  if (reference.pairs.empty()) {
    throw Error("relaxed_match: empty reference set (coverage undefined)");
  }
  std::vector<SurfacePair> pred_norm;
  pred_norm.reserve(predicted.pairs.size());
  for (const SurfacePair& pair : predicted.pairs) {
    pred_norm.emplace_back(normalize_surface(pair.first), normalize_surface(pair.second));
  }
  RelaxedMatchResult result;
  result.total = reference.pairs.size();
  for (const SurfacePair& ref : reference.pairs) {
    SurfacePair ref_norm{normalize_surface(ref.first), normalize_surface(ref.second)};
    for (std::size_t i = 0; i < pred_norm.size(); ++i) {
      if (relaxed_edit_distance(ref_norm.first, pred_norm[i].first) < tau &&
          relaxed_edit_distance(ref_norm.second, pred_norm[i].second) < tau) {
        ++result.covered;
        result.matched.emplace_back(ref, *std::next(predicted.pairs.begin(),
                                                    static_cast<long>(i)));
        break;
      }
    }
  }
  result.coverage =
      static_cast<double>(result.covered) / static_cast<double>(result.total);
  return result;
}

SurfaceClusters surface_clusters(const kg::KnowledgeGraph& kg) {
  SurfaceClusters out;
  for (const auto& [type, clusters] : kg.coref_clusters()) {
    for (const auto& cluster : clusters) {
      std::vector<std::string> surfaces;
      surfaces.reserve(cluster.size());
      for (const EntityKey& key : cluster) surfaces.push_back(key.surface);
      out[type].push_back(std::move(surfaces));
    }
  }
  return out;
}

PairSet expand_with_coreference(const PairSet& predicted, const SurfaceClusters& clusters) {
  if (kg::is_symmetric(predicted.rtype)) {
    throw Error("expand_with_coreference applies to EvaluatedOn/EvaluatedBy pair sets");
  }
  EntityType src_type = kg::source_type(predicted.rtype);
  EntityType tgt_type = kg::target_type(predicted.rtype);

  auto membership = [&](EntityType type) {
    std::map<std::string, const std::vector<std::string>*> index;
    auto it = clusters.find(type);
    if (it != clusters.end()) {
      for (const auto& cluster : it->second) {
        for (const std::string& surface : cluster) index[surface] = &cluster;
      }
    }
    return index;
  };
  auto src_index = membership(src_type);
  auto tgt_index = membership(tgt_type);

  PairSet out = predicted;
  for (const SurfacePair& pair : predicted.pairs) {
    auto si = src_index.find(pair.first);
    auto ti = tgt_index.find(pair.second);
    std::vector<std::string> sources =
        si == src_index.end() ? std::vector<std::string>{pair.first} : *si->second;
    std::vector<std::string> targets =
        ti == tgt_index.end() ? std::vector<std::string>{pair.second} : *ti->second;
    for (const std::string& s : sources) {
      for (const std::string& t : targets) {
        out.add(s, t);
      }
    }
  }
  return out;
}

HumanEvalManifest sample_for_human_eval(
    const kg::KnowledgeGraph& kg, std::size_t per_relation, std::uint64_t seed,
    const std::map<kg::RelationType, std::set<SurfacePair>>& exclusion,
    const Corpus* corpus) {
  HumanEvalManifest manifest;
  manifest.requested = per_relation;
  const kg::RelationType types[] = {
      kg::RelationType::EvaluatedOn, kg::RelationType::EvaluatedBy,
      kg::RelationType::Coreferent, kg::RelationType::Related};
  for (kg::RelationType rtype : types) {
    std::vector<kg::Relation> population;
    auto excluded = exclusion.find(rtype);
    for (const kg::Relation& r : kg.relations_of(rtype)) {
      if (excluded != exclusion.end()) {
        SurfacePair pair{r.source.surface, r.target.surface};
        if (kg::is_symmetric(rtype) && pair.second < pair.first) {
          std::swap(pair.first, pair.second);
        }
        if (excluded->second.count(pair)) continue;
      }
      population.push_back(r);
    }
    manifest.population[rtype] = population.size();
    if (population.size() > per_relation) {
      Rng rng(seed ^ fnv1a64(kg::to_string(rtype)));
      rng.shuffle(population);
      population.resize(per_relation);
      std::sort(population.begin(), population.end(),
                [](const kg::Relation& a, const kg::Relation& b) {
                  return std::tie(a.source, a.target) < std::tie(b.source, b.target);
                });
    }
    std::vector<HumanEvalRow>& rows = manifest.samples[rtype];
    for (kg::Relation& r : population) {
      HumanEvalRow row;
      row.relation = std::move(r);
      if (corpus != nullptr && corpus->has_entity(row.relation.source) &&
          corpus->has_entity(row.relation.target)) {
        std::vector<std::string> ids =
            corpus->papers_containing_both(row.relation.source, row.relation.target);
        if (ids.size() > 3) ids.resize(3);
        row.paper_ids = std::move(ids);
      }
      rows.push_back(std::move(row));
    }
  }
  return manifest;
}

void write_metric_records(std::span<const MetricRecord> records, std::ostream& out) {
  for (const MetricRecord& record : records) {
    ordered_json rec;
    rec["name"] = record.name;
    rec["value"] = record.value;
    rec["numerator"] = record.numerator;
    rec["denominator"] = record.denominator;
    out << rec.dump() << "\n";
  }
}

}  // namespace tdmkg::eval
