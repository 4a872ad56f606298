#include "tdmkg/corpus.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace tdmkg {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(EntityType t) {
  switch (t) {
    case EntityType::Task: return "Task";
    case EntityType::Dataset: return "Dataset";
    case EntityType::Metric: return "Metric";
  }
  return "Task";
}

EntityType entity_type_from_string(std::string_view s) {
  if (s == "Task") return EntityType::Task;
  if (s == "Dataset") return EntityType::Dataset;
  if (s == "Metric") return EntityType::Metric;
  throw Error("unknown entity type: '" + std::string(s) + "'");
}

std::string to_string(const EntityKey& key) {
  return key.surface + " [" + std::string(to_string(key.type)) + "]";
}

std::string normalize_surface(std::string_view raw) {
  std::string s = ascii_lower(collapse_whitespace(raw));
  const std::string_view leading = "\"'`([{";
  const std::string_view trailing = "\"'`)]}.,";
  bool changed = true;
  while (changed && !s.empty()) {
    changed = false;
    while (!s.empty() && leading.find(s.front()) != std::string_view::npos) {
      s.erase(s.begin());
      changed = true;
    }
    while (!s.empty() && trailing.find(s.back()) != std::string_view::npos) {
      s.pop_back();
      changed = true;
    }
    if (changed) {
      std::string t = collapse_whitespace(s);
      if (t != s) s = std::move(t);
    }
  }
  return s;
}

std::set<EntityKey> sentence_entity_keys(const Sentence& sentence) {
  std::set<EntityKey> keys;
  for (const Mention& m : sentence.mentions) {
    std::string norm = normalize_surface(m.surface);
    if (!norm.empty()) keys.insert({std::move(norm), m.type});
  }
  return keys;
}

bool sentence_mentions(const Sentence& sentence, const EntityKey& key) {
  for (const Mention& m : sentence.mentions) {
    if (m.type == key.type && normalize_surface(m.surface) == key.surface) {
      return true;
    }
  }
  return false;
}

Corpus Corpus::from_papers(std::vector<TaggedPaper> papers) {
  Corpus c;
  c.papers_ = std::move(papers);

  std::map<EntityKey, std::set<std::string>> papers_per_entity;
  for (std::size_t pi = 0; pi < c.papers_.size(); ++pi) {
    const TaggedPaper& paper = c.papers_[pi];
    if (paper.paper_id.empty()) {
      throw Error("paper at position " + std::to_string(pi) + " has empty paper_id");
    }
    if (!c.paper_pos_.emplace(paper.paper_id, pi).second) {
      throw Error("duplicate paper_id '" + paper.paper_id + "'");
    }
    for (std::size_t si = 0; si < paper.sentences.size(); ++si) {
      const Sentence& sentence = paper.sentences[si];
      std::set<EntityKey> seen_here;
      for (const Mention& m : sentence.mentions) {
        std::string norm = normalize_surface(m.surface);
        if (norm.empty()) continue;  // callers drop empty-normalized mentions
        EntityKey key{std::move(norm), m.type};
        Entity& e = c.inventory_[key];
        if (e.mention_frequency == 0) {
          e.surface_norm = key.surface;
          e.type = key.type;
        }
        ++e.mention_frequency;
        e.aliases.insert(m.surface);
        papers_per_entity[key].insert(paper.paper_id);
        if (seen_here.insert(key).second) {
          c.sentence_index_[key].push_back({paper.paper_id, si});
        }
      }
    }
  }
  for (auto& [key, ids] : papers_per_entity) {
    c.inventory_[key].paper_frequency = ids.size();
    c.paper_index_[key].assign(ids.begin(), ids.end());
  }
  for (auto& [key, refs] : c.sentence_index_) {
    std::sort(refs.begin(), refs.end());
  }
  return c;
}

const TaggedPaper& Corpus::paper(const std::string& paper_id) const {
  auto it = paper_pos_.find(paper_id);
  if (it == paper_pos_.end()) throw Error("unknown paper_id '" + paper_id + "'");
  return papers_[it->second];
}

bool Corpus::has_paper(const std::string& paper_id) const {
  return paper_pos_.count(paper_id) != 0;
}

bool Corpus::has_entity(const EntityKey& key) const {
  return inventory_.count(key) != 0;
}

const Entity& Corpus::entity(const EntityKey& key) const {
  auto it = inventory_.find(key);
  if (it == inventory_.end()) throw Error("unknown entity " + to_string(key));
  return it->second;
}

std::vector<SentenceRef> Corpus::cooccurring_sentences(const EntityKey& a,
                                                       const EntityKey& b) const {
  auto ia = sentence_index_.find(a);
  auto ib = sentence_index_.find(b);
  if (!has_entity(a) || ia == sentence_index_.end()) {
    throw Error("unknown entity " + to_string(a));
  }
  if (!has_entity(b) || ib == sentence_index_.end()) {
    throw Error("unknown entity " + to_string(b));
  }
  std::vector<SentenceRef> out;
  std::set_intersection(ia->second.begin(), ia->second.end(),
                        ib->second.begin(), ib->second.end(),
                        std::back_inserter(out));
  return out;
}

const std::vector<std::string>& Corpus::papers_containing(const EntityKey& key) const {
  auto it = paper_index_.find(key);
  if (it == paper_index_.end()) throw Error("unknown entity " + to_string(key));
  return it->second;
}

std::vector<std::string> Corpus::papers_containing_both(const EntityKey& a,
                                                        const EntityKey& b) const {
  const auto& pa = papers_containing(a);
  const auto& pb = papers_containing(b);
  std::vector<std::string> out;
  std::set_intersection(pa.begin(), pa.end(), pb.begin(), pb.end(),
                        std::back_inserter(out));
  return out;
}

std::vector<Entity> Corpus::entity_inventory(std::size_t min_paper_freq) const {
  if (min_paper_freq < 1) throw Error("min_paper_freq must be >= 1");
  std::vector<Entity> out;
  for (const auto& [key, e] : inventory_) {
    if (e.paper_frequency >= min_paper_freq) out.push_back(e);
  }
  std::sort(out.begin(), out.end(), [](const Entity& a, const Entity& b) {
    if (a.type != b.type) return a.type < b.type;
    if (a.paper_frequency != b.paper_frequency) {
      return a.paper_frequency > b.paper_frequency;
    }
    return a.surface_norm < b.surface_norm;
  });
  return out;
}

namespace {

std::string at_line(std::size_t line_number) {
  return "line " + std::to_string(line_number) + ": ";
}

}  // namespace

TaggedPaper parse_tagged_paper_line(const std::string& line, std::size_t line_number) {
  json rec;
  try {
    rec = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(at_line(line_number) + "invalid JSON: " + e.what());
  }
  if (!rec.is_object()) throw Error(at_line(line_number) + "record is not an object");
  if (!rec.contains("paper_id") || !rec["paper_id"].is_string()) {
    throw Error(at_line(line_number) + "missing or non-string field 'paper_id'");
  }
  TaggedPaper paper;
  paper.paper_id = rec["paper_id"].get<std::string>();
  if (paper.paper_id.empty()) {
    throw Error(at_line(line_number) + "empty 'paper_id'");
  }
  if (rec.contains("year") && !rec["year"].is_null()) {
    if (!rec["year"].is_number_integer()) {
      throw Error(at_line(line_number) + "field 'year' is not an integer (paper '" +
                  paper.paper_id + "')");
    }
    paper.year = rec["year"].get<int>();
  }
  if (rec.contains("sentences")) {
    if (!rec["sentences"].is_array()) {
      throw Error(at_line(line_number) + "field 'sentences' is not an array (paper '" +
                  paper.paper_id + "')");
    }
    for (std::size_t si = 0; si < rec["sentences"].size(); ++si) {
      const json& js = rec["sentences"][si];
      if (!js.is_object() || !js.contains("text") || !js["text"].is_string()) {
        throw Error(at_line(line_number) + "sentence " + std::to_string(si) +
                    " missing string field 'text' (paper '" + paper.paper_id + "')");
      }
      Sentence sentence;
      sentence.text = js["text"].get<std::string>();
      if (js.contains("mentions")) {
        if (!js["mentions"].is_array()) {
          throw Error(at_line(line_number) + "sentence " + std::to_string(si) +
                      " field 'mentions' is not an array (paper '" + paper.paper_id + "')");
        }
        for (std::size_t mi = 0; mi < js["mentions"].size(); ++mi) {
          const json& jm = js["mentions"][mi];
          auto bad = [&](const std::string& what) {
            return Error(at_line(line_number) + "paper '" + paper.paper_id +
                         "', sentence " + std::to_string(si) + ", mention " +
                         std::to_string(mi) + ": " + what);
          };
          if (!jm.is_object() || !jm.contains("start") || !jm.contains("end") ||
              !jm.contains("type")) {
            throw bad("mention must have fields start, end, type");
          }
          if (!jm["start"].is_number_integer() || !jm["end"].is_number_integer()) {
            throw bad("start/end must be integers");
          }
          long long start = jm["start"].get<long long>();
          long long end = jm["end"].get<long long>();
          if (start < 0 || end <= start ||
              static_cast<std::size_t>(end) > sentence.text.size()) {
            throw bad("span [" + std::to_string(start) + ", " + std::to_string(end) +
                      ") out of bounds for sentence of " +
                      std::to_string(sentence.text.size()) + " bytes");
          }
          if (!jm["type"].is_string()) throw bad("type must be a string");
          Mention m;
          m.char_start = static_cast<std::size_t>(start);
          m.char_end = static_cast<std::size_t>(end);
          try {
            m.type = entity_type_from_string(jm["type"].get<std::string>());
          } catch (const Error& e) {
            throw bad(e.what());
          }
          m.surface = sentence.text.substr(m.char_start, m.char_end - m.char_start);
          sentence.mentions.push_back(std::move(m));
        }
      }
      std::sort(sentence.mentions.begin(), sentence.mentions.end(),
                [](const Mention& a, const Mention& b) {
                  return std::tie(a.char_start, a.char_end) <
                         std::tie(b.char_start, b.char_end);
                });
      paper.sentences.push_back(std::move(sentence));
    }
  }
  return paper;
}

Corpus parse_corpus(std::istream& in) {
  std::vector<TaggedPaper> papers;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    papers.push_back(parse_tagged_paper_line(line, line_number));
  }
  return Corpus::from_papers(std::move(papers));
}

void serialize_corpus(const Corpus& corpus, std::ostream& out) {
  for (const TaggedPaper& paper : corpus.papers()) {
    ordered_json rec;
    rec["paper_id"] = paper.paper_id;
    if (paper.year) rec["year"] = *paper.year;
    rec["sentences"] = ordered_json::array();
    for (const Sentence& sentence : paper.sentences) {
      ordered_json js;
      js["text"] = sentence.text;
      js["mentions"] = ordered_json::array();
      for (const Mention& m : sentence.mentions) {
        ordered_json jm;
        jm["start"] = m.char_start;
        jm["end"] = m.char_end;
        jm["type"] = to_string(m.type);
        js["mentions"].push_back(std::move(jm));
      }
      rec["sentences"].push_back(std::move(js));
    }
    out << rec.dump() << "\n";
  }
}

}  // namespace tdmkg
