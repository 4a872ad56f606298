#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tdmkg/util.hpp"

namespace tdmkg {

enum class EntityType { Task, Dataset, Metric };

std::string_view to_string(EntityType t);
EntityType entity_type_from_string(std::string_view s);

// Identity of a canonical entity: normalized surface + type.
struct EntityKey {
  std::string surface;  // already normalized
  EntityType type;

  auto operator<=>(const EntityKey&) const = default;
};

std::string to_string(const EntityKey& key);

struct Mention {
  std::size_t char_start = 0;  // byte offsets into the sentence, end-exclusive
  std::size_t char_end = 0;
  EntityType type = EntityType::Task;
  std::string surface;  // exact span text, extracted at parse time

  bool operator==(const Mention&) const = default;
};

struct Sentence {
  std::string text;
  std::vector<Mention> mentions;

  bool operator==(const Sentence&) const = default;
};

struct TaggedPaper {
  std::string paper_id;
  std::optional<int> year;
  std::vector<Sentence> sentences;

  bool operator==(const TaggedPaper&) const = default;
};

struct Entity {
  std::string surface_norm;
  EntityType type = EntityType::Task;
  std::size_t paper_frequency = 0;
  std::size_t mention_frequency = 0;
  std::set<std::string> aliases;  // raw surfaces observed

  EntityKey key() const { return {surface_norm, type}; }
  bool operator==(const Entity&) const = default;
};

struct SentenceRef {
  std::string paper_id;
  std::size_t sentence_index = 0;

  auto operator<=>(const SentenceRef&) const = default;
};

// Lowercase, collapse whitespace, strip enclosing quotes/brackets and
// trailing periods/commas. Idempotent; may return "".
std::string normalize_surface(std::string_view raw);

// Immutable after construction; all lookups are index-backed.
class Corpus {
 public:
  Corpus() = default;

  // Builds the inventory and inverted index; rejects duplicate paper ids.
  static Corpus from_papers(std::vector<TaggedPaper> papers);

  const std::vector<TaggedPaper>& papers() const { return papers_; }
  const TaggedPaper& paper(const std::string& paper_id) const;
  bool has_paper(const std::string& paper_id) const;

  const std::map<EntityKey, Entity>& inventory() const { return inventory_; }
  bool has_entity(const EntityKey& key) const;
  const Entity& entity(const EntityKey& key) const;

  const std::map<EntityKey, std::vector<SentenceRef>>& sentence_index() const {
    return sentence_index_;
  }

  // Sentences containing at least one mention of each of a and b,
  // ordered by (paper_id, sentence_index).
  std::vector<SentenceRef> cooccurring_sentences(const EntityKey& a,
                                                 const EntityKey& b) const;

  const std::vector<std::string>& papers_containing(const EntityKey& key) const;
  std::vector<std::string> papers_containing_both(const EntityKey& a,
                                                  const EntityKey& b) const;

  // Entities with paper_frequency >= min_paper_freq, sorted by
  // (type, descending paper_frequency, surface_norm).
  std::vector<Entity> entity_inventory(std::size_t min_paper_freq) const;

 private:
  std::vector<TaggedPaper> papers_;
  std::map<std::string, std::size_t> paper_pos_;
  std::map<EntityKey, Entity> inventory_;
  std::map<EntityKey, std::vector<SentenceRef>> sentence_index_;
  std::map<EntityKey, std::vector<std::string>> paper_index_;
};

// Line-delimited tagged-paper records; malformed records are rejected with
// the offending line number.
Corpus parse_corpus(std::istream& in);
TaggedPaper parse_tagged_paper_line(const std::string& line, std::size_t line_number);

void serialize_corpus(const Corpus& corpus, std::ostream& out);

// Set of (normalized surface, type) keys mentioned in a sentence.
std::set<EntityKey> sentence_entity_keys(const Sentence& sentence);
bool sentence_mentions(const Sentence& sentence, const EntityKey& key);

}  // namespace tdmkg
