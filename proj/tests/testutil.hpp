#pragma once

// Fixture helpers shared by the unit and acceptance binaries.

#include <string>
#include <utility>
#include <vector>

#include "tdmkg/corpus.hpp"
#include "tdmkg/util.hpp"

namespace testutil {

using tdmkg::Corpus;
using tdmkg::EntityType;
using tdmkg::Mention;
using tdmkg::Rng;
using tdmkg::Sentence;
using tdmkg::TaggedPaper;

// Offsets are derived from the text itself so fixtures cannot drift.
inline Sentence sentence_with(
    const std::string& text,
    const std::vector<std::pair<std::string, EntityType>>& mentions) {
  Sentence s;
  s.text = text;
  for (const auto& [surface, type] : mentions) {
    std::size_t pos = text.find(surface);
    if (pos == std::string::npos) {
      throw tdmkg::Error("fixture surface '" + surface + "' not in text");
    }
    s.mentions.push_back({pos, pos + surface.size(), type, surface});
  }
  return s;
}

struct CorpusGenOptions {
  std::size_t papers = 20;
  std::size_t max_entities_per_paper = 10;
  std::uint64_t seed = 1;
};

// Random tagged corpus with a mix of cue-bearing, plain-co-mention and
// filler sentences over fixed entity pools.
inline Corpus random_corpus(const CorpusGenOptions& options) {
  const std::vector<std::string> tasks = {
      "machine translation", "dependency parsing", "summarization",
      "question answering", "speech recognition", "relation extraction"};
  const std::vector<std::string> datasets = {
      "wmt16", "penn treebank", "squad", "cnn dailymail", "librispeech", "imdb"};
  const std::vector<std::string> metrics = {"bleu", "rouge", "accuracy",
                                            "word error rate"};

  Rng rng(options.seed);
  auto pick = [&rng](const std::vector<std::string>& pool, std::size_t count) {
    std::vector<std::string> chosen = pool;
    rng.shuffle(chosen);
    if (chosen.size() > count) chosen.resize(count);
    return chosen;
  };

  std::vector<TaggedPaper> papers;
  for (std::size_t p = 0; p < options.papers; ++p) {
    std::size_t budget = 2 + rng.uniform_index(options.max_entities_per_paper - 1);
    std::size_t n_tasks = 1 + rng.uniform_index(std::min<std::size_t>(3, budget));
    std::size_t n_data = rng.uniform_index(std::min<std::size_t>(3, tasks.size())) + 1;
    std::size_t n_metrics = rng.uniform_index(3);
    std::vector<std::string> ts = pick(tasks, n_tasks);
    std::vector<std::string> ds = pick(datasets, n_data);
    std::vector<std::string> ms = pick(metrics, n_metrics);

    TaggedPaper paper;
    paper.paper_id = "paper" + std::to_string(p);
    paper.year = 2015 + static_cast<int>(rng.uniform_index(6));
    for (const std::string& t : ts) {
      paper.sentences.push_back(sentence_with(
          "This work studies " + t + " in depth.", {{t, EntityType::Task}}));
      if (!ds.empty() && rng.uniform_index(2) == 0) {
        const std::string& d = ds[rng.uniform_index(ds.size())];
        if (rng.uniform_index(2) == 0) {
          paper.sentences.push_back(sentence_with(
              "The " + t + " system was evaluated on " + d + ".",
              {{t, EntityType::Task}, {d, EntityType::Dataset}}));
        } else {
          paper.sentences.push_back(sentence_with(
              "Both " + t + " and " + d + " appear in this sentence.",
              {{t, EntityType::Task}, {d, EntityType::Dataset}}));
        }
      }
      if (!ms.empty() && rng.uniform_index(2) == 0) {
        const std::string& m = ms[rng.uniform_index(ms.size())];
        if (rng.uniform_index(2) == 0) {
          paper.sentences.push_back(sentence_with(
              "We report " + m + " for " + t + ".",
              {{t, EntityType::Task}, {m, EntityType::Metric}}));
        } else {
          paper.sentences.push_back(sentence_with(
              "Numbers for " + t + " and " + m + " follow below.",
              {{t, EntityType::Task}, {m, EntityType::Metric}}));
        }
      }
    }
    for (const std::string& d : ds) {
      paper.sentences.push_back(sentence_with(
          "The corpus " + d + " is described elsewhere.", {{d, EntityType::Dataset}}));
    }
    for (const std::string& m : ms) {
      paper.sentences.push_back(sentence_with(
          "Details about the " + m + " measure follow.", {{m, EntityType::Metric}}));
    }
    paper.sentences.push_back({"Unrelated filler sentence without any mention.", {}});
    papers.push_back(std::move(paper));
  }
  return Corpus::from_papers(std::move(papers));
}

}  // namespace testutil
