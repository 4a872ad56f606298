#pragma once

#include <compare>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tdmkg/corpus.hpp"

namespace tdmkg::kg {

// evaluatedOn: Task -> Dataset; evaluatedBy: Task -> Metric;
// coreferent/related: undirected, same-type only.
enum class RelationType { EvaluatedOn, EvaluatedBy, Coreferent, Related };

enum class Provenance {
  SentenceSieve,
  DocumentSieve,
  Heuristic,
  Classifier,
  Embedding,
  ClosureInferred,
  Gold,
};

std::string_view to_string(RelationType t);
RelationType relation_type_from_string(std::string_view s);
std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

bool is_symmetric(RelationType t);
EntityType source_type(RelationType t);  // directed types only
EntityType target_type(RelationType t);

struct Relation {
  EntityKey source;
  EntityKey target;
  RelationType rtype = RelationType::EvaluatedOn;
  double confidence = 1.0;
  Provenance provenance = Provenance::Gold;

  bool operator==(const Relation&) const = default;
};

enum class AddStatus {
  Inserted,
  ConfidenceRaised,
  DuplicateIgnored,
  TypeViolation,
  MissingEndpoint,
};

std::string_view to_string(AddStatus s);

struct EntityNode {
  EntityType type = EntityType::Task;
  std::size_t paper_frequency = 1;

  bool operator==(const EntityNode&) const = default;
};

class KnowledgeGraph {
 public:
  void add_entity(const EntityKey& key, std::size_t paper_frequency = 1);
  bool has_entity(const EntityKey& key) const;
  const std::map<EntityKey, EntityNode>& entities() const { return entities_; }

  // Symmetric relations are canonicalized to (min, max) surface order before
  // storage; duplicates keep the max confidence.
  AddStatus add_relation(Relation r);

  bool has_relation(const EntityKey& source, const EntityKey& target,
                    RelationType rtype) const;
  std::optional<Relation> find_relation(const EntityKey& source,
                                        const EntityKey& target,
                                        RelationType rtype) const;

  // Sorted by (rtype, source, target).
  std::vector<Relation> relations() const;
  std::vector<Relation> relations_of(RelationType rtype) const;
  std::size_t relation_count() const { return relations_.size(); }

  // Connected components of Coreferent edges, one partition per entity type;
  // singletons included, members sorted.
  std::map<EntityType, std::vector<std::vector<EntityKey>>> coref_clusters() const;

  bool operator==(const KnowledgeGraph&) const = default;

 private:
  struct RelationKey {
    RelationType rtype;
    EntityKey source;
    EntityKey target;
    auto operator<=>(const RelationKey&) const = default;
  };
  struct RelationMeta {
    double confidence;
    Provenance provenance;
    bool operator==(const RelationMeta&) const = default;
  };

  static RelationKey canonical_key(const Relation& r);

  std::map<EntityKey, EntityNode> entities_;
  std::map<RelationKey, RelationMeta> relations_;
};

// Propagates EvaluatedOn/EvaluatedBy edges across Coreferent clusters on both
// endpoints; added edges carry Provenance::ClosureInferred and the implying
// edge's confidence. Idempotent.
KnowledgeGraph coreference_closure(const KnowledgeGraph& kg);

struct KgStats {
  std::map<EntityType, std::size_t> entities;
  std::map<RelationType, std::size_t> relations;
  std::size_t total_entities = 0;
  std::size_t total_relations = 0;

  bool operator==(const KgStats&) const = default;
};

KgStats kg_stats(const KnowledgeGraph& kg);

struct FileMeta {
  std::string version;
  std::string config_hash;
};

// Canonically ordered JSON; export -> import -> export is byte-identical.
void export_kg(const KnowledgeGraph& kg, std::ostream& out,
               const std::optional<FileMeta>& meta = std::nullopt);
KnowledgeGraph import_kg(std::istream& in);

}  // namespace tdmkg::kg
