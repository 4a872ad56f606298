#include "tdmkg/coref.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>

#include "tdmkg/union_find.hpp"

namespace tdmkg::coref {

namespace {

// Canonical orientation so (a,b) and (b,a) produce identical pairs.
void canonicalize(EntityKey& a, EntityKey& b) {
  if (b < a) std::swap(a, b);
}

bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

char lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

}  // namespace

PairFeatures compute_pair_features(const EntityKey& a, const EntityKey& b) {
  PairFeatures f;
  f.normalized_edit_distance = tdmkg::normalized_edit_distance(a.surface, b.surface);
  f.jaccard = token_jaccard(a.surface, b.surface);
  f.abbreviation_match = abbreviation_valid(a.surface, b.surface) ||
                         abbreviation_valid(b.surface, a.surface);
  return f;
}

MentionPair make_pair(const EntityKey& a, const EntityKey& b,
                      std::optional<bool> label) {
  MentionPair pair{a, b, {}, label};
  canonicalize(pair.a, pair.b);
  pair.features = compute_pair_features(pair.a, pair.b);
  return pair;
}

bool abbreviation_valid(std::string_view long_form, std::string_view abbreviation) {
  std::vector<std::string> words = split_tokens(long_form);
  std::string letters;
  for (char c : abbreviation) {
    if (is_alpha(c)) letters.push_back(lower(c));
  }
  if (letters.empty() || words.empty()) return false;
  if (lower(words[0][0]) != letters[0]) return false;
  std::size_t wi = 1;
  for (std::size_t li = 1; li < letters.size(); ++li) {
    while (wi < words.size() && lower(words[wi][0]) != letters[li]) ++wi;
    if (wi == words.size()) return false;
    ++wi;
  }
  return true;
}

namespace {

// Parses "(TOKEN)" right after `pos`, tolerating one leading space. The token
// must be uppercase letters, digits and internal hyphens, with >= 2 letters.
std::optional<std::string> parenthesized_abbreviation(const std::string& text,
                                                      std::size_t pos) {
  if (pos < text.size() && text[pos] == ' ') ++pos;
  if (pos >= text.size() || text[pos] != '(') return std::nullopt;
  std::size_t close = text.find(')', pos + 1);
  if (close == std::string::npos) return std::nullopt;
  std::string token = text.substr(pos + 1, close - pos - 1);
  while (!token.empty() && token.front() == ' ') token.erase(token.begin());
  while (!token.empty() && token.back() == ' ') token.pop_back();
  if (token.empty() || token.front() == '-' || token.back() == '-') return std::nullopt;
  std::size_t uppercase = 0;
  for (char c : token) {
    if (is_upper(c)) {
      ++uppercase;
    } else if (!is_digit(c) && c != '-') {
      return std::nullopt;
    }
  }
  if (uppercase < 2) return std::nullopt;
  return token;
}

}  // namespace

std::vector<MentionPair> extract_abbreviation_pairs(const Corpus& corpus) {
  std::set<std::pair<EntityKey, EntityKey>> seen;
  std::vector<MentionPair> out;
  for (const TaggedPaper& paper : corpus.papers()) {
    for (const Sentence& sentence : paper.sentences) {
      for (const Mention& mention : sentence.mentions) {
        auto token = parenthesized_abbreviation(sentence.text, mention.char_end);
        if (!token) continue;
        std::string long_norm = normalize_surface(mention.surface);
        std::string abbr_norm = normalize_surface(*token);
        if (long_norm.empty() || abbr_norm.empty() || long_norm == abbr_norm) continue;
        if (!abbreviation_valid(long_norm, abbr_norm)) continue;
        EntityKey long_key{long_norm, mention.type};
        EntityKey abbr_key{abbr_norm, mention.type};
        if (!corpus.has_entity(long_key) || !corpus.has_entity(abbr_key)) continue;
        EntityKey a = long_key, b = abbr_key;
        canonicalize(a, b);
        if (seen.emplace(a, b).second) {
          out.push_back(make_pair(a, b, true));
        }
      }
    }
  }
  return out;
}

std::vector<MentionPair> edit_distance_pairs(std::span<const EntityKey> inventory,
                                             double tau_pos) {
  if (!(tau_pos > 0.0 && tau_pos < 1.0)) throw Error("tau_pos must be in (0,1)");
  std::vector<MentionPair> out;
  for (std::size_t i = 0; i < inventory.size(); ++i) {
    for (std::size_t j = i + 1; j < inventory.size(); ++j) {
      const EntityKey& a = inventory[i];
      const EntityKey& b = inventory[j];
      if (a.type != b.type) continue;
      std::size_t la = a.surface.size(), lb = b.surface.size();
      std::size_t max_len = std::max(la, lb);
      // Levenshtein >= length difference, so this prune is exact.
      if (max_len == 0 ||
          static_cast<double>(la > lb ? la - lb : lb - la) > tau_pos * max_len) {
        continue;
      }
      if (normalized_edit_distance(a.surface, b.surface) <= tau_pos) {
        out.push_back(make_pair(a, b, true));
      }
    }
  }
  return out;
}

namespace {

bool is_token_prefix(const EntityKey& a, const EntityKey& b) {
  std::vector<std::string> ta = split_tokens(a.surface);
  std::vector<std::string> tb = split_tokens(b.surface);
  const auto& shorter = ta.size() < tb.size() ? ta : tb;
  const auto& longer = ta.size() < tb.size() ? tb : ta;
  if (shorter.empty() || shorter.size() >= longer.size()) return false;
  return std::equal(shorter.begin(), shorter.end(), longer.begin());
}

}  // namespace

std::vector<MentionPair> token_prefix_pairs(std::span<const EntityKey> inventory) {
  std::vector<MentionPair> out;
  for (std::size_t i = 0; i < inventory.size(); ++i) {
    for (std::size_t j = i + 1; j < inventory.size(); ++j) {
      if (inventory[i].type != inventory[j].type) continue;
      if (is_token_prefix(inventory[i], inventory[j])) {
        out.push_back(make_pair(inventory[i], inventory[j], true));
      }
    }
  }
  return out;
}

bool pair_is_heuristic_positive(const EntityKey& a, const EntityKey& b, double tau_pos) {
  if (a.type != b.type || a == b) return false;
  if (normalized_edit_distance(a.surface, b.surface) <= tau_pos) return true;
  if (is_token_prefix(a, b)) return true;
  return abbreviation_valid(a.surface, b.surface) ||
         abbreviation_valid(b.surface, a.surface);
}

std::vector<MentionPair> heuristic_positive_pairs(const Corpus& corpus, double tau_pos) {
  std::vector<EntityKey> keys;
  keys.reserve(corpus.inventory().size());
  for (const auto& [key, entity] : corpus.inventory()) keys.push_back(key);

  std::set<std::pair<EntityKey, EntityKey>> seen;
  std::vector<MentionPair> out;
  auto add = [&](std::vector<MentionPair>&& pairs) {
    for (MentionPair& pair : pairs) {
      if (seen.emplace(pair.a, pair.b).second) out.push_back(std::move(pair));
    }
  };
  add(extract_abbreviation_pairs(corpus));
  add(edit_distance_pairs(keys, tau_pos));
  add(token_prefix_pairs(keys));
  std::sort(out.begin(), out.end(), [](const MentionPair& x, const MentionPair& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  return out;
}

std::vector<MentionPair> sample_negatives(std::span<const EntityKey> inventory,
                                          std::span<const MentionPair> positives,
                                          double ratio, std::uint64_t seed,
                                          double tau_pos) {
  std::size_t target = static_cast<std::size_t>(ratio * static_cast<double>(positives.size()) + 0.5);
  if (target == 0) return {};

  std::set<std::pair<EntityKey, EntityKey>> positive_set;
  for (const MentionPair& pair : positives) positive_set.emplace(pair.a, pair.b);

  std::vector<std::pair<EntityKey, EntityKey>> pool;
  for (std::size_t i = 0; i < inventory.size(); ++i) {
    for (std::size_t j = i + 1; j < inventory.size(); ++j) {
      EntityKey a = inventory[i], b = inventory[j];
      if (a.type != b.type || a == b) continue;
      canonicalize(a, b);
      if (positive_set.count({a, b})) continue;
      if (pair_is_heuristic_positive(a, b, tau_pos)) continue;
      pool.emplace_back(std::move(a), std::move(b));
    }
  }
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  if (pool.size() > target) {
    Rng rng(seed);
    rng.shuffle(pool);
    pool.resize(target);
    std::sort(pool.begin(), pool.end());
  }
  std::vector<MentionPair> out;
  out.reserve(pool.size());
  for (const auto& [a, b] : pool) out.push_back(make_pair(a, b, false));
  return out;
}

StringSimilarityClassifier::StringSimilarityClassifier(ClassifierWeights weights,
                                                       double threshold)
    : weights_(weights), threshold_(threshold) {}

StringSimilarityClassifier StringSimilarityClassifier::jaccard_rule(double cutoff) {
  StringSimilarityClassifier c;
  c.jaccard_rule_mode_ = true;
  c.jaccard_cutoff_ = cutoff;
  c.threshold_ = 0.5;
  return c;
}

double StringSimilarityClassifier::classify(const MentionPair& pair) const {
  if (jaccard_rule_mode_) {
    return pair.features.jaccard > jaccard_cutoff_ ? 1.0 : 0.0;
  }
  double z = weights_.bias +
             weights_.edit_similarity * (1.0 - pair.features.normalized_edit_distance) +
             weights_.jaccard * pair.features.jaccard +
             weights_.abbreviation * (pair.features.abbreviation_match ? 1.0 : 0.0);
  return logistic(z);
}

StringSimilarityClassifier fit_string_similarity_classifier(
    std::span<const MentionPair> labeled, const FitConfig& config) {
  for (const MentionPair& pair : labeled) {
    if (!pair.label) throw Error("fit requires labeled pairs");
  }
  // Full-batch gradient ascent on the log-likelihood from zero weights;
  // deterministic regardless of the seed.
  ClassifierWeights w;
  double n = static_cast<double>(labeled.size());
  for (std::size_t epoch = 0; epoch < config.epochs && !labeled.empty(); ++epoch) {
    double g0 = 0, g1 = 0, g2 = 0, g3 = 0;
    for (const MentionPair& pair : labeled) {
      double x1 = 1.0 - pair.features.normalized_edit_distance;
      double x2 = pair.features.jaccard;
      double x3 = pair.features.abbreviation_match ? 1.0 : 0.0;
      double p = logistic(w.bias + w.edit_similarity * x1 + w.jaccard * x2 +
                          w.abbreviation * x3);
      double err = (*pair.label ? 1.0 : 0.0) - p;
      g0 += err;
      g1 += err * x1;
      g2 += err * x2;
      g3 += err * x3;
    }
    w.bias += config.learning_rate * g0 / n;
    w.edit_similarity += config.learning_rate * g1 / n;
    w.jaccard += config.learning_rate * g2 / n;
    w.abbreviation += config.learning_rate * g3 / n;
  }
  return StringSimilarityClassifier(w, config.threshold);
}

ExternalPairScorer::ExternalPairScorer(std::istream& in, double threshold)
    : threshold_(threshold) {
  scores_ = read_pair_scores(in);
}

double ExternalPairScorer::classify(const MentionPair& pair) const {
  auto it = scores_.find(pair_id(pair.a, pair.b));
  if (it == scores_.end()) {
    throw Error("pair score file has no record for " + to_string(pair.a) + " / " +
                to_string(pair.b));
  }
  return it->second;
}

std::string pair_id(const EntityKey& a, const EntityKey& b) {
  const EntityKey& first = a < b ? a : b;
  const EntityKey& second = a < b ? b : a;
  std::string data;
  data += to_string(first.type);
  data += '\x1f';
  data += first.surface;
  data += '\x1f';
  data += second.surface;
  return to_hex16(fnv1a64(data));
}

std::vector<MentionPair> candidate_pairs(const Corpus& corpus,
                                         std::span<const EntityKey> inventory) {
  std::set<std::pair<EntityKey, EntityKey>> seen;
  std::vector<MentionPair> out;
  auto try_add = [&](EntityKey a, EntityKey b) {
    canonicalize(a, b);
    if (seen.emplace(a, b).second) out.push_back(make_pair(a, b));
  };

  std::set<EntityKey> universe(inventory.begin(), inventory.end());
  for (const MentionPair& pair : extract_abbreviation_pairs(corpus)) {
    if (universe.count(pair.a) && universe.count(pair.b)) try_add(pair.a, pair.b);
  }

  // Shared-first-token block.
  std::map<std::pair<EntityType, std::string>, std::vector<const EntityKey*>> blocks;
  for (const EntityKey& key : inventory) {
    std::vector<std::string> tokens = split_tokens(key.surface);
    if (!tokens.empty()) blocks[{key.type, tokens[0]}].push_back(&key);
  }
  for (const auto& [block_key, members] : blocks) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        try_add(*members[i], *members[j]);
      }
    }
  }

  // Edit-distance block at the loose inference radius.
  constexpr double kCandidateRadius = 0.5;
  for (std::size_t i = 0; i < inventory.size(); ++i) {
    for (std::size_t j = i + 1; j < inventory.size(); ++j) {
      const EntityKey& a = inventory[i];
      const EntityKey& b = inventory[j];
      if (a.type != b.type) continue;
      std::size_t la = a.surface.size(), lb = b.surface.size();
      std::size_t max_len = std::max(la, lb);
      if (max_len == 0 ||
          static_cast<double>(la > lb ? la - lb : lb - la) > kCandidateRadius * max_len) {
        continue;
      }
      if (normalized_edit_distance(a.surface, b.surface) <= kCandidateRadius) {
        try_add(a, b);
      }
    }
  }

  std::sort(out.begin(), out.end(), [](const MentionPair& x, const MentionPair& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  return out;
}

std::map<EntityType, std::vector<std::vector<EntityKey>>> cluster_coreferent(
    std::span<const EntityKey> universe, std::span<const MentionPair> positive_pairs) {
  std::vector<EntityKey> keys(universe.begin(), universe.end());
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  std::map<EntityKey, std::size_t> index;
  for (std::size_t i = 0; i < keys.size(); ++i) index.emplace(keys[i], i);

  UnionFind uf(keys.size());
  for (const MentionPair& pair : positive_pairs) {
    if (pair.a.type != pair.b.type) {
      throw Error("coreferent pair must be same-type: " + to_string(pair.a) + " / " +
                  to_string(pair.b));
    }
    auto ia = index.find(pair.a);
    auto ib = index.find(pair.b);
    if (ia == index.end() || ib == index.end()) {
      throw Error("pair references entity outside the clustering universe");
    }
    uf.unite(ia->second, ib->second);
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
  for (auto& [type, clusters] : out) std::sort(clusters.begin(), clusters.end());
  return out;
}

void write_labeled_pairs(std::span<const MentionPair> pairs, std::ostream& out) {
  for (const MentionPair& pair : pairs) {
    out << pair_id(pair.a, pair.b) << '\t' << to_string(pair.a.type) << '\t'
        << pair.a.surface << '\t' << pair.b.surface;
    if (pair.label) out << '\t' << (*pair.label ? 1 : 0);
    out << '\n';
  }
}

std::map<std::string, double> read_pair_scores(std::istream& in) {
  std::map<std::string, double> scores;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error("pair score file line " + std::to_string(line_number) +
                  ": expected pair_id<TAB>probability");
    }
    double probability;
    try {
      std::size_t consumed = 0;
      probability = std::stod(line.substr(tab + 1), &consumed);
      if (consumed != line.size() - tab - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error("pair score file line " + std::to_string(line_number) +
                  ": invalid probability");
    }
    if (!(probability >= 0.0 && probability <= 1.0)) {
      throw Error("pair score file line " + std::to_string(line_number) +
                  ": probability outside [0,1]");
    }
    scores[line.substr(0, tab)] = probability;
  }
  return scores;
}

}  // namespace tdmkg::coref
