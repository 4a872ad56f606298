#include "tdmkg/kg.hpp"

#include <sstream>

#include "doctest.h"

using namespace tdmkg;
using namespace tdmkg::kg;

namespace {

EntityKey task(const std::string& s) { return {s, EntityType::Task}; }
EntityKey dataset(const std::string& s) { return {s, EntityType::Dataset}; }
EntityKey metric(const std::string& s) { return {s, EntityType::Metric}; }

// Independent fixpoint oracle: keep propagating every directed edge through
// every coreferent pair until nothing changes.
KnowledgeGraph closure_oracle(KnowledgeGraph g) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Relation> coref = g.relations_of(RelationType::Coreferent);
    for (RelationType rtype : {RelationType::EvaluatedOn, RelationType::EvaluatedBy}) {
      for (const Relation& r : g.relations_of(rtype)) {
        for (const Relation& c : coref) {
          auto propagate = [&](const EntityKey& from, const EntityKey& to) {
            if (r.source == from && !g.has_relation(to, r.target, rtype)) {
              g.add_relation({to, r.target, rtype, r.confidence,
                              Provenance::ClosureInferred});
              changed = true;
            }
            if (r.target == from && !g.has_relation(r.source, to, rtype)) {
              g.add_relation({r.source, to, rtype, r.confidence,
                              Provenance::ClosureInferred});
              changed = true;
            }
          };
          propagate(c.source, c.target);
          propagate(c.target, c.source);
        }
      }
    }
  }
  return g;
}

std::set<std::tuple<EntityKey, EntityKey, RelationType>> edge_set(
    const KnowledgeGraph& g) {
  std::set<std::tuple<EntityKey, EntityKey, RelationType>> out;
  for (const Relation& r : g.relations()) out.insert({r.source, r.target, r.rtype});
  return out;
}

}  // namespace

TEST_CASE("add_relation accepts schema-valid edges") {
  KnowledgeGraph g;
  g.add_entity(task("sentiment analysis"));
  g.add_entity(dataset("imdb"));
  CHECK(g.add_relation({task("sentiment analysis"), dataset("imdb"),
                        RelationType::EvaluatedOn, 0.9,
                        Provenance::SentenceSieve}) == AddStatus::Inserted);
  CHECK(g.has_relation(task("sentiment analysis"), dataset("imdb"),
                       RelationType::EvaluatedOn));
}

TEST_CASE("add_relation rejects type violations") {
  KnowledgeGraph g;
  g.add_entity(metric("f1"));
  g.add_entity(dataset("imdb"));
  g.add_entity(task("ner"));
  CHECK(g.add_relation({metric("f1"), dataset("imdb"), RelationType::EvaluatedOn, 1.0,
                        Provenance::Gold}) == AddStatus::TypeViolation);
  CHECK(g.add_relation({task("ner"), metric("f1"), RelationType::EvaluatedOn, 1.0,
                        Provenance::Gold}) == AddStatus::TypeViolation);
  CHECK(g.add_relation({task("ner"), metric("f1"), RelationType::Coreferent, 1.0,
                        Provenance::Gold}) == AddStatus::TypeViolation);
  CHECK(g.relation_count() == 0);
}

TEST_CASE("duplicate edges keep the max confidence") {
  KnowledgeGraph g;
  g.add_entity(task("t"));
  g.add_entity(dataset("d"));
  g.add_relation({task("t"), dataset("d"), RelationType::EvaluatedOn, 0.6,
                  Provenance::DocumentSieve});
  CHECK(g.add_relation({task("t"), dataset("d"), RelationType::EvaluatedOn, 0.9,
                        Provenance::SentenceSieve}) == AddStatus::ConfidenceRaised);
  CHECK(g.relation_count() == 1);
  CHECK(g.find_relation(task("t"), dataset("d"), RelationType::EvaluatedOn)->confidence ==
        0.9);

  CHECK(g.add_relation({task("t"), dataset("d"), RelationType::EvaluatedOn, 0.5,
                        Provenance::Gold}) == AddStatus::DuplicateIgnored);
  CHECK(g.find_relation(task("t"), dataset("d"), RelationType::EvaluatedOn)->confidence ==
        0.9);
}

TEST_CASE("symmetric relations answer both orientations") {
  KnowledgeGraph g;
  g.add_entity(metric("f1 score"));
  g.add_entity(metric("f1 scores"));
  g.add_relation({metric("f1 scores"), metric("f1 score"), RelationType::Coreferent,
                  1.0, Provenance::Heuristic});
  CHECK(g.has_relation(metric("f1 score"), metric("f1 scores"), RelationType::Coreferent));
  CHECK(g.has_relation(metric("f1 scores"), metric("f1 score"), RelationType::Coreferent));
  CHECK(g.relation_count() == 1);
}

TEST_CASE("missing endpoints are rejected") {
  KnowledgeGraph g;
  g.add_entity(task("t"));
  CHECK(g.add_relation({task("t"), dataset("d"), RelationType::EvaluatedOn, 1.0,
                        Provenance::Gold}) == AddStatus::MissingEndpoint);
}

TEST_CASE("coreference_closure propagates through a cluster") {
  KnowledgeGraph g;
  g.add_entity(task("t1"));
  g.add_entity(task("t2"));
  g.add_entity(dataset("d1"));
  g.add_relation({task("t1"), task("t2"), RelationType::Coreferent, 1.0,
                  Provenance::Heuristic});
  g.add_relation({task("t1"), dataset("d1"), RelationType::EvaluatedOn, 0.8,
                  Provenance::SentenceSieve});

  KnowledgeGraph closed = coreference_closure(g);
  auto inferred = closed.find_relation(task("t2"), dataset("d1"), RelationType::EvaluatedOn);
  REQUIRE(inferred.has_value());
  CHECK(inferred->provenance == Provenance::ClosureInferred);
  CHECK(inferred->confidence == 0.8);
}

TEST_CASE("closure without coreferent edges is a no-op") {
  KnowledgeGraph g;
  g.add_entity(task("t"));
  g.add_entity(dataset("d"));
  g.add_relation({task("t"), dataset("d"), RelationType::EvaluatedOn, 1.0,
                  Provenance::Gold});
  CHECK(coreference_closure(g) == g);
}

TEST_CASE("closure propagates on the target side too") {
  KnowledgeGraph g;
  g.add_entity(task("t"));
  g.add_entity(dataset("d1"));
  g.add_entity(dataset("d2"));
  g.add_relation({dataset("d1"), dataset("d2"), RelationType::Coreferent, 1.0,
                  Provenance::Heuristic});
  g.add_relation({task("t"), dataset("d1"), RelationType::EvaluatedOn, 0.7,
                  Provenance::DocumentSieve});
  KnowledgeGraph closed = coreference_closure(g);
  CHECK(closed.has_relation(task("t"), dataset("d2"), RelationType::EvaluatedOn));
}

TEST_CASE("closure equals the fixpoint oracle on random graphs and is idempotent") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    KnowledgeGraph g;
    std::vector<EntityKey> tasks, datasets, metrics;
    for (std::size_t i = 0; i < 6; ++i) {
      tasks.push_back(task("t" + std::to_string(i)));
      datasets.push_back(dataset("d" + std::to_string(i)));
      metrics.push_back(metric("m" + std::to_string(i)));
      g.add_entity(tasks.back());
      g.add_entity(datasets.back());
      g.add_entity(metrics.back());
    }
    std::size_t edges = 10 + rng.uniform_index(90);
    for (std::size_t e = 0; e < edges; ++e) {
      double conf = 0.1 + 0.9 * rng.uniform_double();
      switch (rng.uniform_index(4)) {
        case 0:
          g.add_relation({tasks[rng.uniform_index(6)], datasets[rng.uniform_index(6)],
                          RelationType::EvaluatedOn, conf, Provenance::SentenceSieve});
          break;
        case 1:
          g.add_relation({tasks[rng.uniform_index(6)], metrics[rng.uniform_index(6)],
                          RelationType::EvaluatedBy, conf, Provenance::DocumentSieve});
          break;
        case 2: {
          auto& pool = rng.uniform_index(2) ? tasks : datasets;
          std::size_t i = rng.uniform_index(6), j = rng.uniform_index(6);
          if (i != j) {
            g.add_relation({pool[i], pool[j], RelationType::Coreferent, conf,
                            Provenance::Classifier});
          }
          break;
        }
        default: {
          std::size_t i = rng.uniform_index(6), j = rng.uniform_index(6);
          if (i != j) {
            g.add_relation({metrics[i], metrics[j], RelationType::Related, conf,
                            Provenance::Embedding});
          }
          break;
        }
      }
    }
    KnowledgeGraph closed = coreference_closure(g);
    CHECK(edge_set(closed) == edge_set(closure_oracle(g)));
    CHECK(coreference_closure(closed) == closed);

    // Closure only adds, and only directed types.
    CHECK(closed.relation_count() >= g.relation_count());
    CHECK(closed.relations_of(RelationType::Coreferent).size() ==
          g.relations_of(RelationType::Coreferent).size());
    CHECK(closed.relations_of(RelationType::Related).size() ==
          g.relations_of(RelationType::Related).size());
  }
}

TEST_CASE("coref_clusters is a partition with singletons") {
  KnowledgeGraph g;
  g.add_entity(task("a"));
  g.add_entity(task("b"));
  g.add_entity(task("c"));
  g.add_entity(dataset("x"));
  g.add_relation({task("a"), task("b"), RelationType::Coreferent, 1.0,
                  Provenance::Heuristic});
  auto clusters = g.coref_clusters();
  CHECK(clusters[EntityType::Task].size() == 2);   // {a,b} and {c}
  CHECK(clusters[EntityType::Dataset].size() == 1);
  CHECK(clusters[EntityType::Metric].empty());

  std::size_t total = 0;
  for (const auto& [type, typed] : clusters) {
    for (const auto& cluster : typed) total += cluster.size();
  }
  CHECK(total == g.entities().size());
}

TEST_CASE("kg_stats: empty graph is all zeros") {
  KgStats stats = kg_stats(KnowledgeGraph{});
  CHECK(stats.total_entities == 0);
  CHECK(stats.total_relations == 0);
  for (const auto& [type, count] : stats.entities) CHECK(count == 0);
  for (const auto& [rtype, count] : stats.relations) CHECK(count == 0);
}

TEST_CASE("kg_stats on a gold-shaped fixture") {
  // Same shape as the small gold graph: 43/23/19 entities and
  // 81/249/38/257 relations.
  KnowledgeGraph g;
  std::vector<EntityKey> tasks, datasets, metrics;
  for (std::size_t i = 0; i < 43; ++i) tasks.push_back(task("t" + std::to_string(i)));
  for (std::size_t i = 0; i < 23; ++i) datasets.push_back(dataset("d" + std::to_string(i)));
  for (std::size_t i = 0; i < 19; ++i) metrics.push_back(metric("m" + std::to_string(i)));
  for (const auto& k : tasks) g.add_entity(k);
  for (const auto& k : datasets) g.add_entity(k);
  for (const auto& k : metrics) g.add_entity(k);

  std::size_t added = 0;
  for (std::size_t i = 0; i < tasks.size() && added < 81; ++i) {
    for (std::size_t j = 0; j < datasets.size() && added < 81; ++j) {
      g.add_relation({tasks[i], datasets[j], RelationType::EvaluatedOn, 1.0,
                      Provenance::Gold});
      ++added;
    }
  }
  added = 0;
  for (std::size_t i = 0; i < tasks.size() && added < 249; ++i) {
    for (std::size_t j = 0; j < metrics.size() && added < 249; ++j) {
      g.add_relation({tasks[i], metrics[j], RelationType::EvaluatedBy, 1.0,
                      Provenance::Gold});
      ++added;
    }
  }
  added = 0;
  for (std::size_t i = 0; i < tasks.size() && added < 38; ++i) {
    for (std::size_t j = i + 1; j < tasks.size() && added < 38; ++j) {
      g.add_relation({tasks[i], tasks[j], RelationType::Coreferent, 1.0,
                      Provenance::Gold});
      ++added;
    }
  }
  added = 0;  // C(23,2) = 253 dataset pairs; the remaining 4 come from metrics
  for (std::size_t i = 0; i < datasets.size() && added < 257; ++i) {
    for (std::size_t j = i + 1; j < datasets.size() && added < 257; ++j) {
      g.add_relation({datasets[i], datasets[j], RelationType::Related, 1.0,
                      Provenance::Gold});
      ++added;
    }
  }
  for (std::size_t i = 0; i < metrics.size() && added < 257; ++i) {
    for (std::size_t j = i + 1; j < metrics.size() && added < 257; ++j) {
      g.add_relation({metrics[i], metrics[j], RelationType::Related, 1.0,
                      Provenance::Gold});
      ++added;
    }
  }

  KgStats stats = kg_stats(g);
  CHECK(stats.entities[EntityType::Task] == 43);
  CHECK(stats.entities[EntityType::Dataset] == 23);
  CHECK(stats.entities[EntityType::Metric] == 19);
  CHECK(stats.total_entities == 85);
  CHECK(stats.relations[RelationType::EvaluatedOn] == 81);
  CHECK(stats.relations[RelationType::EvaluatedBy] == 249);
  CHECK(stats.relations[RelationType::Coreferent] == 38);
  CHECK(stats.relations[RelationType::Related] == 257);
  CHECK(stats.total_relations == 625);

  // Closure only ever adds, per relation type.
  KgStats after = kg_stats(coreference_closure(g));
  for (const auto& [rtype, count] : stats.relations) {
    CHECK(after.relations[rtype] >= count);
  }
}

TEST_CASE("export/import round trip is byte-identical") {
  KnowledgeGraph g;
  g.add_entity(task("sentiment analysis"), 3);
  g.add_entity(dataset("imdb"), 2);
  g.add_entity(metric("f1"), 4);
  g.add_relation({task("sentiment analysis"), dataset("imdb"),
                  RelationType::EvaluatedOn, 0.9, Provenance::SentenceSieve});
  g.add_relation({task("sentiment analysis"), metric("f1"), RelationType::EvaluatedBy,
                  0.75, Provenance::DocumentSieve});

  std::ostringstream out1;
  export_kg(g, out1);
  std::istringstream in(out1.str());
  KnowledgeGraph g2 = import_kg(in);
  CHECK(g2 == g);
  std::ostringstream out2;
  export_kg(g2, out2);
  CHECK(out1.str() == out2.str());
}

TEST_CASE("import rejects schema violations with a location") {
  std::string bad = R"({
    "entities": [
      {"surface": "a", "type": "Task", "paper_frequency": 1},
      {"surface": "b", "type": "Task", "paper_frequency": 1}
    ],
    "relations": [
      {"source": {"surface": "a", "type": "Task"},
       "target": {"surface": "b", "type": "Task"},
       "rtype": "EvaluatedOn", "confidence": 1.0, "provenance": "Gold"}
    ]
  })";
  std::istringstream in(bad);
  CHECK_THROWS_WITH_AS(import_kg(in), doctest::Contains("relations[0]"), Error);
}

TEST_CASE("random 100-edge graphs survive a round trip") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    KnowledgeGraph g;
    std::vector<EntityKey> tasks, datasets, metrics;
    for (std::size_t i = 0; i < 8; ++i) {
      tasks.push_back(task("task " + std::to_string(i)));
      datasets.push_back(dataset("data " + std::to_string(i)));
      metrics.push_back(metric("metric " + std::to_string(i)));
      g.add_entity(tasks.back(), 1 + rng.uniform_index(9));
      g.add_entity(datasets.back(), 1 + rng.uniform_index(9));
      g.add_entity(metrics.back(), 1 + rng.uniform_index(9));
    }
    for (int e = 0; e < 100; ++e) {
      double conf = rng.uniform_double();
      switch (rng.uniform_index(4)) {
        case 0:
          g.add_relation({tasks[rng.uniform_index(8)], datasets[rng.uniform_index(8)],
                          RelationType::EvaluatedOn, conf, Provenance::Classifier});
          break;
        case 1:
          g.add_relation({tasks[rng.uniform_index(8)], metrics[rng.uniform_index(8)],
                          RelationType::EvaluatedBy, conf, Provenance::DocumentSieve});
          break;
        case 2: {
          std::size_t i = rng.uniform_index(8), j = rng.uniform_index(8);
          if (i != j) {
            g.add_relation({datasets[i], datasets[j], RelationType::Coreferent, conf,
                            Provenance::Heuristic});
          }
          break;
        }
        default: {
          std::size_t i = rng.uniform_index(8), j = rng.uniform_index(8);
          if (i != j) {
            g.add_relation({tasks[i], tasks[j], RelationType::Related, conf,
                            Provenance::Embedding});
          }
          break;
        }
      }
    }
    std::ostringstream out;
    export_kg(g, out);
    std::istringstream in(out.str());
    CHECK(import_kg(in) == g);
  }
}
