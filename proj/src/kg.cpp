#include "tdmkg/kg.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "tdmkg/union_find.hpp"

namespace tdmkg::kg {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(RelationType t) {
  switch (t) {
    case RelationType::EvaluatedOn: return "EvaluatedOn";
    case RelationType::EvaluatedBy: return "EvaluatedBy";
    case RelationType::Coreferent: return "Coreferent";
    case RelationType::Related: return "Related";
  }
  return "EvaluatedOn";
}

RelationType relation_type_from_string(std::string_view s) {
  if (s == "EvaluatedOn") return RelationType::EvaluatedOn;
  if (s == "EvaluatedBy") return RelationType::EvaluatedBy;
  if (s == "Coreferent") return RelationType::Coreferent;
  if (s == "Related") return RelationType::Related;
  throw Error("unknown relation type: '" + std::string(s) + "'");
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::SentenceSieve: return "SentenceSieve";
    case Provenance::DocumentSieve: return "DocumentSieve";
    case Provenance::Heuristic: return "Heuristic";
    case Provenance::Classifier: return "Classifier";
    case Provenance::Embedding: return "Embedding";
    case Provenance::ClosureInferred: return "ClosureInferred";
    case Provenance::Gold: return "Gold";
  }
  return "Gold";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "SentenceSieve") return Provenance::SentenceSieve;
  if (s == "DocumentSieve") return Provenance::DocumentSieve;
  if (s == "Heuristic") return Provenance::Heuristic;
  if (s == "Classifier") return Provenance::Classifier;
  if (s == "Embedding") return Provenance::Embedding;
  if (s == "ClosureInferred") return Provenance::ClosureInferred;
  if (s == "Gold") return Provenance::Gold;
  throw Error("unknown provenance: '" + std::string(s) + "'");
}

std::string_view to_string(AddStatus s) {
  switch (s) {
    case AddStatus::Inserted: return "Inserted";
    case AddStatus::ConfidenceRaised: return "ConfidenceRaised";
    case AddStatus::DuplicateIgnored: return "DuplicateIgnored";
    case AddStatus::TypeViolation: return "TypeViolation";
    case AddStatus::MissingEndpoint: return "MissingEndpoint";
  }
  return "Inserted";
}

bool is_symmetric(RelationType t) {
  return t == RelationType::Coreferent || t == RelationType::Related;
}

EntityType source_type(RelationType t) {
  switch (t) {
    case RelationType::EvaluatedOn:
    case RelationType::EvaluatedBy:
      return EntityType::Task;
    default:
      throw Error("source_type is only defined for directed relation types");
  }
}

EntityType target_type(RelationType t) {
  switch (t) {
    case RelationType::EvaluatedOn: return EntityType::Dataset;
    case RelationType::EvaluatedBy: return EntityType::Metric;
    default:
      throw Error("target_type is only defined for directed relation types");
  }
}

namespace {

bool type_valid(const Relation& r) {
  switch (r.rtype) {
    case RelationType::EvaluatedOn:
      return r.source.type == EntityType::Task && r.target.type == EntityType::Dataset;
    case RelationType::EvaluatedBy:
      return r.source.type == EntityType::Task && r.target.type == EntityType::Metric;
    case RelationType::Coreferent:
    case RelationType::Related:
      return r.source.type == r.target.type && r.source != r.target;
  }
  return false;
}

}  // namespace

void KnowledgeGraph::add_entity(const EntityKey& key, std::size_t paper_frequency) {
  auto [it, inserted] = entities_.try_emplace(key, EntityNode{key.type, paper_frequency});
  if (!inserted) it->second.paper_frequency = std::max(it->second.paper_frequency, paper_frequency);
}

bool KnowledgeGraph::has_entity(const EntityKey& key) const {
  return entities_.count(key) != 0;
}

KnowledgeGraph::RelationKey KnowledgeGraph::canonical_key(const Relation& r) {
  RelationKey key{r.rtype, r.source, r.target};
  if (is_symmetric(r.rtype) && key.target < key.source) {
    std::swap(key.source, key.target);
  }
  return key;
}

AddStatus KnowledgeGraph::add_relation(Relation r) {
  if (!has_entity(r.source) || !has_entity(r.target)) {
    return AddStatus::MissingEndpoint;
  }
  if (!type_valid(r)) {
    return AddStatus::TypeViolation;
  }
  RelationKey key = canonical_key(r);
  auto it = relations_.find(key);
  if (it == relations_.end()) {
    relations_.emplace(key, RelationMeta{r.confidence, r.provenance});
    return AddStatus::Inserted;
  }
  if (r.confidence > it->second.confidence) {
    it->second = RelationMeta{r.confidence, r.provenance};
    return AddStatus::ConfidenceRaised;
  }
  return AddStatus::DuplicateIgnored;
}

bool KnowledgeGraph::has_relation(const EntityKey& source, const EntityKey& target,
                                  RelationType rtype) const {
  return find_relation(source, target, rtype).has_value();
}

std::optional<Relation> KnowledgeGraph::find_relation(const EntityKey& source,
                                                      const EntityKey& target,
                                                      RelationType rtype) const {
  RelationKey key = canonical_key(Relation{source, target, rtype, 0.0, Provenance::Gold});
  auto it = relations_.find(key);
  if (it == relations_.end()) return std::nullopt;
  return Relation{it->first.source, it->first.target, it->first.rtype,
                  it->second.confidence, it->second.provenance};
}

std::vector<Relation> KnowledgeGraph::relations() const {
  std::vector<Relation> out;
  out.reserve(relations_.size());
  for (const auto& [key, meta] : relations_) {
    out.push_back({key.source, key.target, key.rtype, meta.confidence, meta.provenance});
  }
  return out;
}

std::vector<Relation> KnowledgeGraph::relations_of(RelationType rtype) const {
  std::vector<Relation> out;
  for (const auto& [key, meta] : relations_) {
    if (key.rtype == rtype) {
      out.push_back({key.source, key.target, key.rtype, meta.confidence, meta.provenance});
    }
  }
  return out;
}

std::map<EntityType, std::vector<std::vector<EntityKey>>>
KnowledgeGraph::coref_clusters() const {
  std::vector<EntityKey> keys;
  std::map<EntityKey, std::size_t> index;
  for (const auto& [key, node] : entities_) {
    index.emplace(key, keys.size());
    keys.push_back(key);
  }
  UnionFind uf(keys.size());
  for (const auto& [rkey, meta] : relations_) {
    if (rkey.rtype == RelationType::Coreferent) {
      uf.unite(index.at(rkey.source), index.at(rkey.target));
    }
  }
  std::map<std::size_t, std::vector<EntityKey>> components;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    components[uf.find(i)].push_back(keys[i]);
  }
  std::map<EntityType, std::vector<std::vector<EntityKey>>> out;
  out[EntityType::Task];
  out[EntityType::Dataset];
  out[EntityType::Metric];
  for (auto& [root, members] : components) {
    std::sort(members.begin(), members.end());
    out[members.front().type].push_back(std::move(members));
  }
  for (auto& [type, clusters] : out) {
    std::sort(clusters.begin(), clusters.end());
  }
  return out;
}

KnowledgeGraph coreference_closure(const KnowledgeGraph& kg) {
  KnowledgeGraph out = kg;
  auto clusters_by_type = kg.coref_clusters();

  std::map<EntityKey, const std::vector<EntityKey>*> cluster_of;
  for (const auto& [type, clusters] : clusters_by_type) {
    for (const auto& cluster : clusters) {
      for (const EntityKey& member : cluster) cluster_of[member] = &cluster;
    }
  }

  // All edges whose endpoints fall in the same cluster pair imply the same
  // missing edges, so group first and walk each cross-product once. The
  // implied confidence is the max over the implying edges.
  struct GroupKey {
    const std::vector<EntityKey>* source_cluster;
    const std::vector<EntityKey>* target_cluster;
    RelationType rtype;
    auto operator<=>(const GroupKey&) const = default;
  };
  std::map<GroupKey, double> groups;
  for (const Relation& r : kg.relations()) {
    if (r.rtype != RelationType::EvaluatedOn && r.rtype != RelationType::EvaluatedBy) {
      continue;
    }
    GroupKey key{cluster_of.at(r.source), cluster_of.at(r.target), r.rtype};
    auto [it, inserted] = groups.try_emplace(key, r.confidence);
    if (!inserted) it->second = std::max(it->second, r.confidence);
  }
  for (const auto& [group, confidence] : groups) {
    for (const EntityKey& s : *group.source_cluster) {
      for (const EntityKey& t : *group.target_cluster) {
        if (kg.has_relation(s, t, group.rtype)) continue;
        out.add_relation({s, t, group.rtype, confidence, Provenance::ClosureInferred});
      }
    }
  }
  return out;
}

KgStats kg_stats(const KnowledgeGraph& kg) {
  KgStats stats;
  stats.entities[EntityType::Task] = 0;
  stats.entities[EntityType::Dataset] = 0;
  stats.entities[EntityType::Metric] = 0;
  stats.relations[RelationType::EvaluatedOn] = 0;
  stats.relations[RelationType::EvaluatedBy] = 0;
  stats.relations[RelationType::Coreferent] = 0;
  stats.relations[RelationType::Related] = 0;
  for (const auto& [key, node] : kg.entities()) {
    ++stats.entities[key.type];
    ++stats.total_entities;
  }
  for (const Relation& r : kg.relations()) {
    ++stats.relations[r.rtype];
    ++stats.total_relations;
  }
  return stats;
}

void export_kg(const KnowledgeGraph& kg, std::ostream& out,
               const std::optional<FileMeta>& meta) {
  ordered_json doc;
  if (meta) {
    doc["_meta"] = {{"version", meta->version}, {"config_hash", meta->config_hash}};
  }
  doc["entities"] = ordered_json::array();
  for (const auto& [key, node] : kg.entities()) {
    doc["entities"].push_back({{"surface", key.surface},
                               {"type", std::string(to_string(key.type))},
                               {"paper_frequency", node.paper_frequency}});
  }
  doc["relations"] = ordered_json::array();
  for (const Relation& r : kg.relations()) {
    doc["relations"].push_back(
        {{"source", {{"surface", r.source.surface},
                     {"type", std::string(to_string(r.source.type))}}},
         {"target", {{"surface", r.target.surface},
                     {"type", std::string(to_string(r.target.type))}}},
         {"rtype", std::string(to_string(r.rtype))},
         {"confidence", r.confidence},
         {"provenance", std::string(to_string(r.provenance))}});
  }
  out << doc.dump(2) << "\n";
}

namespace {

EntityKey parse_entity_ref(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("surface") || !j.contains("type") ||
      !j["surface"].is_string() || !j["type"].is_string()) {
    throw Error(where + ": entity reference must be {surface, type}");
  }
  return {normalize_surface(j["surface"].get<std::string>()),
          entity_type_from_string(j["type"].get<std::string>())};
}

}  // namespace

KnowledgeGraph import_kg(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(std::string("invalid KG file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("entities") || !doc.contains("relations") ||
      !doc["entities"].is_array() || !doc["relations"].is_array()) {
    throw Error("KG file must be an object with 'entities' and 'relations' arrays");
  }
  KnowledgeGraph kg;
  for (std::size_t i = 0; i < doc["entities"].size(); ++i) {
    const json& je = doc["entities"][i];
    std::string where = "entities[" + std::to_string(i) + "]";
    if (!je.is_object() || !je.contains("surface") || !je.contains("type")) {
      throw Error(where + ": entity must have fields surface, type");
    }
    EntityKey key{normalize_surface(je["surface"].get<std::string>()),
                  entity_type_from_string(je["type"].get<std::string>())};
    if (key.surface.empty()) throw Error(where + ": surface normalizes to empty");
    if (kg.has_entity(key)) {
      throw Error(where + ": duplicate entity " + to_string(key) +
                  " after normalization");
    }
    std::size_t freq = 1;
    if (je.contains("paper_frequency")) {
      if (!je["paper_frequency"].is_number_unsigned() || je["paper_frequency"] == 0) {
        throw Error(where + ": paper_frequency must be a positive integer");
      }
      freq = je["paper_frequency"].get<std::size_t>();
    }
    kg.add_entity(key, freq);
  }
  for (std::size_t i = 0; i < doc["relations"].size(); ++i) {
    const json& jr = doc["relations"][i];
    std::string where = "relations[" + std::to_string(i) + "]";
    if (!jr.is_object() || !jr.contains("source") || !jr.contains("target") ||
        !jr.contains("rtype")) {
      throw Error(where + ": relation must have fields source, target, rtype");
    }
    Relation r;
    r.source = parse_entity_ref(jr["source"], where + ".source");
    r.target = parse_entity_ref(jr["target"], where + ".target");
    r.rtype = relation_type_from_string(jr["rtype"].get<std::string>());
    if (jr.contains("confidence")) {
      if (!jr["confidence"].is_number()) throw Error(where + ": confidence must be a number");
      r.confidence = jr["confidence"].get<double>();
      if (r.confidence < 0.0 || r.confidence > 1.0) {
        throw Error(where + ": confidence out of [0,1]");
      }
    }
    if (jr.contains("provenance")) {
      r.provenance = provenance_from_string(jr["provenance"].get<std::string>());
    }
    AddStatus status = kg.add_relation(r);
    if (status == AddStatus::TypeViolation) {
      throw Error(where + ": " + std::string(to_string(r.rtype)) +
                  " cannot connect " + to_string(r.source) + " to " + to_string(r.target));
    }
    if (status == AddStatus::MissingEndpoint) {
      throw Error(where + ": endpoint not declared in entities: " +
                  to_string(kg.has_entity(r.source) ? r.target : r.source));
    }
  }
  return kg;
}

}  // namespace tdmkg::kg
