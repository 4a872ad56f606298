#include "tdmkg/corpus.hpp"

#include <map>
#include <sstream>

#include "doctest.h"

using namespace tdmkg;

namespace {

// Builds a sentence whose mention offsets are derived from the text itself,
// so fixtures cannot go out of sync with the spans.
Sentence sentence_with(const std::string& text,
                       const std::vector<std::pair<std::string, EntityType>>& mentions) {
  Sentence s;
  s.text = text;
  for (const auto& [surface, type] : mentions) {
    std::size_t pos = text.find(surface);
    REQUIRE(pos != std::string::npos);
    s.mentions.push_back({pos, pos + surface.size(), type, surface});
  }
  return s;
}

}  // namespace

TEST_CASE("normalize_surface rules") {
  CHECK(normalize_surface("Named Entity Recognition") == "named entity recognition");
  CHECK(normalize_surface("  F1  score. ") == "f1 score");
  CHECK(normalize_surface("(NER)") == "ner");
  CHECK(normalize_surface("\"IMDb\",") == "imdb");
  CHECK(normalize_surface("...") == "");
  CHECK(normalize_surface("") == "");
}

TEST_CASE("normalize_surface is idempotent on random strings") {
  Rng rng(99);
  const std::string alphabet = "aB \t.(),'\"xyz12[]-";
  for (int i = 0; i < 1000; ++i) {
    std::string s;
    std::size_t len = rng.uniform_index(20);
    for (std::size_t j = 0; j < len; ++j) {
      s.push_back(alphabet[rng.uniform_index(alphabet.size())]);
    }
    std::string once = normalize_surface(s);
    CHECK(normalize_surface(once) == once);
  }
}

TEST_CASE("parse_corpus: empty stream") {
  std::istringstream in("");
  Corpus corpus = parse_corpus(in);
  CHECK(corpus.papers().empty());
  CHECK(corpus.inventory().empty());
}

TEST_CASE("parse_corpus: one paper, two entities") {
  std::istringstream in(
      R"({"paper_id":"p1","year":2020,"sentences":[{"text":"We evaluate NER on CoNLL.","mentions":[{"start":12,"end":15,"type":"Task"},{"start":19,"end":24,"type":"Dataset"}]}]})"
      "\n");
  Corpus corpus = parse_corpus(in);
  REQUIRE(corpus.papers().size() == 1);
  CHECK(corpus.papers()[0].year == 2020);
  REQUIRE(corpus.inventory().size() == 2);

  EntityKey ner{"ner", EntityType::Task};
  EntityKey conll{"conll", EntityType::Dataset};
  REQUIRE(corpus.has_entity(ner));
  REQUIRE(corpus.has_entity(conll));
  CHECK(corpus.entity(ner).paper_frequency == 1);
  CHECK(corpus.entity(conll).paper_frequency == 1);
  CHECK(corpus.entity(ner).aliases == std::set<std::string>{"NER"});
}

TEST_CASE("parse_corpus: span out of bounds names the paper and mention") {
  std::istringstream in(
      R"({"paper_id":"p9","sentences":[{"text":"short","mentions":[{"start":2,"end":99,"type":"Task"}]}]})"
      "\n");
  CHECK_THROWS_WITH_AS(parse_corpus(in),
                       doctest::Contains("paper 'p9'"), Error);
  std::istringstream in2(
      R"({"paper_id":"p9","sentences":[{"text":"short","mentions":[{"start":2,"end":99,"type":"Task"}]}]})"
      "\n");
  CHECK_THROWS_WITH_AS(parse_corpus(in2), doctest::Contains("mention 0"), Error);
}

TEST_CASE("parse_corpus: malformed line reports the line number") {
  std::istringstream in("{\"paper_id\":\"ok\",\"sentences\":[]}\nnot json\n");
  CHECK_THROWS_WITH_AS(parse_corpus(in), doctest::Contains("line 2"), Error);
}

TEST_CASE("parse_corpus: duplicate paper_id rejected") {
  std::istringstream in(
      "{\"paper_id\":\"p1\",\"sentences\":[]}\n{\"paper_id\":\"p1\",\"sentences\":[]}\n");
  CHECK_THROWS_WITH_AS(parse_corpus(in), doctest::Contains("duplicate paper_id"), Error);
}

namespace {

Corpus three_paper_fixture() {
  std::vector<TaggedPaper> papers;
  papers.push_back({"a", {}, {
    sentence_with("parsing on ptb here", {{"parsing", EntityType::Task},
                                          {"ptb", EntityType::Dataset}}),
    sentence_with("just parsing alone", {{"parsing", EntityType::Task}}),
  }});
  papers.push_back({"b", {}, {
    sentence_with("parsing with ptb again", {{"parsing", EntityType::Task},
                                             {"ptb", EntityType::Dataset}}),
  }});
  papers.push_back({"c", {}, {
    sentence_with("only ptb", {{"ptb", EntityType::Dataset}}),
    sentence_with("tagging task", {{"tagging", EntityType::Task}}),
  }});
  return Corpus::from_papers(std::move(papers));
}

}  // namespace

TEST_CASE("cooccurring_sentences: planted fixture equals brute-force scan") {
  Corpus corpus = three_paper_fixture();
  EntityKey parsing{"parsing", EntityType::Task};
  EntityKey ptb{"ptb", EntityType::Dataset};

  auto got = corpus.cooccurring_sentences(parsing, ptb);
  // Brute force over all sentences.
  std::vector<SentenceRef> expected;
  for (const TaggedPaper& paper : corpus.papers()) {
    for (std::size_t si = 0; si < paper.sentences.size(); ++si) {
      if (sentence_mentions(paper.sentences[si], parsing) &&
          sentence_mentions(paper.sentences[si], ptb)) {
        expected.push_back({paper.paper_id, si});
      }
    }
  }
  CHECK(got == expected);
  CHECK(got.size() == 2);
  CHECK(got == corpus.cooccurring_sentences(ptb, parsing));
}

TEST_CASE("cooccurring_sentences: reflexive and disjoint cases") {
  Corpus corpus = three_paper_fixture();
  EntityKey parsing{"parsing", EntityType::Task};
  EntityKey tagging{"tagging", EntityType::Task};

  CHECK(corpus.cooccurring_sentences(parsing, parsing).size() == 3);
  CHECK(corpus.cooccurring_sentences(parsing, tagging).empty());
  CHECK_THROWS_AS(
      corpus.cooccurring_sentences(parsing, {"missing", EntityType::Metric}), Error);
}

TEST_CASE("entity_inventory filtering and ordering") {
  Corpus corpus = three_paper_fixture();
  auto all = corpus.entity_inventory(1);
  CHECK(all.size() == 3);
  // Sorted by type first: Tasks (parsing freq 2, tagging freq 1), then Dataset.
  CHECK(all[0].surface_norm == "parsing");
  CHECK(all[1].surface_norm == "tagging");
  CHECK(all[2].surface_norm == "ptb");

  auto frequent = corpus.entity_inventory(2);
  REQUIRE(frequent.size() == 2);
  CHECK(frequent[0].surface_norm == "parsing");
  CHECK(frequent[1].surface_norm == "ptb");
  CHECK(frequent[1].paper_frequency == 3);
}

TEST_CASE("entity_inventory: equal-frequency entities ordered by surface") {
  std::vector<TaggedPaper> papers;
  papers.push_back({"p", {}, {
    sentence_with("zeta and alpha", {{"zeta", EntityType::Task},
                                     {"alpha", EntityType::Task}}),
  }});
  Corpus corpus = Corpus::from_papers(std::move(papers));
  auto inv = corpus.entity_inventory(1);
  REQUIRE(inv.size() == 2);
  CHECK(inv[0].surface_norm == "alpha");
  CHECK(inv[1].surface_norm == "zeta");
}

TEST_CASE("corpus round-trip: serialize then re-parse is identical") {
  Corpus corpus = three_paper_fixture();
  std::ostringstream out;
  serialize_corpus(corpus, out);
  std::istringstream in(out.str());
  Corpus again = parse_corpus(in);
  CHECK(again.papers() == corpus.papers());
  CHECK(again.inventory() == corpus.inventory());
  CHECK(again.sentence_index() == corpus.sentence_index());

  std::ostringstream out2;
  serialize_corpus(again, out2);
  CHECK(out2.str() == out.str());
}

TEST_CASE("inventory counts equal brute-force recount") {
  Corpus corpus = three_paper_fixture();
  std::map<EntityKey, std::size_t> mention_counts;
  std::map<EntityKey, std::set<std::string>> paper_sets;
  for (const TaggedPaper& paper : corpus.papers()) {
    for (const Sentence& sentence : paper.sentences) {
      for (const Mention& m : sentence.mentions) {
        std::string norm = normalize_surface(m.surface);
        if (norm.empty()) continue;
        EntityKey key{norm, m.type};
        ++mention_counts[key];
        paper_sets[key].insert(paper.paper_id);
      }
    }
  }
  CHECK(mention_counts.size() == corpus.inventory().size());
  for (const auto& [key, entity] : corpus.inventory()) {
    CHECK(entity.mention_frequency == mention_counts[key]);
    CHECK(entity.paper_frequency == paper_sets[key].size());
  }
}

TEST_CASE("empty-normalized mentions are dropped from the inventory") {
  std::vector<TaggedPaper> papers;
  papers.push_back({"p", {}, {
    sentence_with("weird ... mention", {{"...", EntityType::Metric},
                                        {"mention", EntityType::Task}}),
  }});
  Corpus corpus = Corpus::from_papers(std::move(papers));
  CHECK(corpus.inventory().size() == 1);
  CHECK(corpus.has_entity({"mention", EntityType::Task}));
}

TEST_CASE("parser survives corrupted input with errors, never crashes") {
  Rng rng(1234);
  std::string valid =
      R"({"paper_id":"ok","sentences":[{"text":"NER here","mentions":[{"start":0,"end":3,"type":"Task"}]}]})";
  for (int trial = 0; trial < 300; ++trial) {
    std::string line = valid;
    // Flip, delete or insert a few characters.
    for (int edit = 0; edit < 3; ++edit) {
      if (line.empty()) break;
      std::size_t pos = rng.uniform_index(line.size());
      switch (rng.uniform_index(3)) {
        case 0: line[pos] = static_cast<char>(32 + rng.uniform_index(95)); break;
        case 1: line.erase(pos, 1); break;
        default:
          line.insert(pos, 1, static_cast<char>(32 + rng.uniform_index(95)));
      }
    }
    std::istringstream in(line + "\n");
    try {
      Corpus corpus = parse_corpus(in);
      // Parsed fine: whatever got through must satisfy the span invariant.
      for (const TaggedPaper& paper : corpus.papers()) {
        for (const Sentence& sentence : paper.sentences) {
          for (const Mention& m : sentence.mentions) {
            CHECK(m.char_start < m.char_end);
            CHECK(m.char_end <= sentence.text.size());
            CHECK(m.surface ==
                  sentence.text.substr(m.char_start, m.char_end - m.char_start));
          }
        }
      }
    } catch (const Error&) {
      // Rejected with a structured error: also acceptable.
    }
  }
}
