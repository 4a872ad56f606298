#include "tdmkg/term2vec.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace tdmkg::term2vec {

std::vector<PseudoSentence> build_pseudo_sentences(const Corpus& corpus) {
  std::vector<PseudoSentence> out;
  for (const TaggedPaper& paper : corpus.papers()) {
    PseudoSentence ps;
    ps.paper_id = paper.paper_id;
    std::set<EntityKey> seen;
    for (const Sentence& sentence : paper.sentences) {
      for (const Mention& mention : sentence.mentions) {
        std::string norm = normalize_surface(mention.surface);
        if (norm.empty()) continue;
        EntityKey key{std::move(norm), mention.type};
        if (seen.insert(key).second) ps.tokens.push_back(std::move(key));
      }
    }
    if (!ps.tokens.empty()) out.push_back(std::move(ps));
  }
  return out;
}

EmbeddingTable::EmbeddingTable(std::vector<EntityKey> vocabulary, std::size_t dimension)
    : vocabulary_(std::move(vocabulary)), dimension_(dimension) {
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    index_.emplace(vocabulary_[i], i);
  }
  input_.assign(vocabulary_.size() * dimension_, 0.0);
  output_.assign(vocabulary_.size() * dimension_, 0.0);
}

bool EmbeddingTable::has(const EntityKey& key) const { return index_.count(key) != 0; }

std::size_t EmbeddingTable::index_of(const EntityKey& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) throw Error("entity not embedded: " + to_string(key));
  return it->second;
}

std::span<const double> EmbeddingTable::input_vector(std::size_t index) const {
  return {input_.data() + index * dimension_, dimension_};
}
std::span<double> EmbeddingTable::input_vector(std::size_t index) {
  return {input_.data() + index * dimension_, dimension_};
}
std::span<const double> EmbeddingTable::output_vector(std::size_t index) const {
  return {output_.data() + index * dimension_, dimension_};
}
std::span<double> EmbeddingTable::output_vector(std::size_t index) {
  return {output_.data() + index * dimension_, dimension_};
}
std::span<const double> EmbeddingTable::input_vector(const EntityKey& key) const {
  return input_vector(index_of(key));
}

namespace {

struct TrainingData {
  EmbeddingTable table;
  std::vector<std::vector<std::size_t>> sequences;  // token indices per sentence
  std::vector<double> noise_cdf;                    // unigram^power cumulative
  std::size_t total_pairs_per_epoch = 0;
};

TrainingData prepare(std::span<const PseudoSentence> sentences,
                     const SkipGramConfig& config) {
  std::map<EntityKey, std::size_t> counts;
  for (const PseudoSentence& ps : sentences) {
    for (const EntityKey& token : ps.tokens) ++counts[token];
  }
  std::vector<EntityKey> vocabulary;
  for (const auto& [key, count] : counts) {
    if (count >= config.min_count) vocabulary.push_back(key);
  }
  if (vocabulary.empty()) throw Error("empty vocabulary");

  TrainingData data;
  data.table = EmbeddingTable(std::move(vocabulary), config.dimension);

  for (const PseudoSentence& ps : sentences) {
    std::vector<std::size_t> seq;
    for (const EntityKey& token : ps.tokens) {
      if (data.table.has(token)) seq.push_back(data.table.index_of(token));
    }
    if (seq.size() >= 2) data.sequences.push_back(std::move(seq));
  }
  if (data.sequences.empty()) {
    throw Error("no pseudo-sentence has two or more in-vocabulary tokens");
  }

  data.noise_cdf.resize(data.table.size());
  double cumulative = 0.0;
  for (std::size_t i = 0; i < data.table.size(); ++i) {
    cumulative += std::pow(static_cast<double>(counts.at(data.table.vocabulary()[i])),
                           config.unigram_power);
    data.noise_cdf[i] = cumulative;
  }

  for (const auto& seq : data.sequences) {
    for (std::size_t center = 0; center < seq.size(); ++center) {
      std::size_t lo = center >= config.window ? center - config.window : 0;
      std::size_t hi = std::min(seq.size() - 1, center + config.window);
      data.total_pairs_per_epoch += hi - lo;  // excludes the center itself
    }
  }
  return data;
}

std::size_t sample_noise(const std::vector<double>& cdf, Rng& rng) {
  double draw = rng.uniform_double() * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), draw);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

std::size_t sample_negative(const std::vector<double>& cdf, Rng& rng,
                            std::size_t exclude) {
  std::size_t draw = sample_noise(cdf, rng);
  while (draw == exclude) draw = sample_noise(cdf, rng);
  return draw;
}

void init_vectors(EmbeddingTable& table, std::uint64_t seed) {
  Rng rng(seed);
  double scale = 1.0 / static_cast<double>(table.dimension());
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (double& v : table.input_vector(i)) {
      v = (rng.uniform_double() - 0.5) * scale;
    }
  }
  // Output vectors start at zero, as in the reference word2vec layout.
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

namespace {

// One SGNS update. In parallel mode the table is shared between workers and
// every element access goes through a relaxed atomic_ref, word2vec-style
// lock-free hogwild; lost updates are acceptable, torn doubles are not.
void sgns_update(EmbeddingTable& table, std::size_t center_word,
                 std::size_t context_word, const std::vector<double>& noise_cdf,
                 std::size_t negative_samples, double lr, Rng& rng,
                 std::vector<double>& center_grad) {
  const std::size_t dim = table.dimension();
  std::span<double> v = table.input_vector(center_word);
  std::span<double> u_ctx = table.output_vector(context_word);
  std::fill(center_grad.begin(), center_grad.end(), 0.0);

  auto read = [](double& slot) {
    return std::atomic_ref<double>(slot).load(std::memory_order_relaxed);
  };
  auto add = [](double& slot, double delta) {
    std::atomic_ref<double> ref(slot);
    ref.store(ref.load(std::memory_order_relaxed) + delta,
              std::memory_order_relaxed);
  };
  auto dot_atomic = [&](std::span<double> a, std::span<double> b) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) s += read(a[d]) * read(b[d]);
    return s;
  };

  // Positive term: pull u_c and v together.
  double s = logistic(dot_atomic(v, u_ctx));
  double g = s - 1.0;
  for (std::size_t d = 0; d < dim; ++d) {
    center_grad[d] += g * read(u_ctx[d]);
    add(u_ctx[d], -lr * g * read(v[d]));
  }
  // Negative terms: push sampled noise vectors away.
  for (std::size_t n = 0; n < negative_samples; ++n) {
    std::span<double> u_neg =
        table.output_vector(sample_negative(noise_cdf, rng, context_word));
    double sn = logistic(dot_atomic(v, u_neg));
    for (std::size_t d = 0; d < dim; ++d) {
      center_grad[d] += sn * read(u_neg[d]);
      add(u_neg[d], -lr * sn * read(v[d]));
    }
  }
  for (std::size_t d = 0; d < dim; ++d) add(v[d], -lr * center_grad[d]);
}

}  // namespace

EmbeddingTable train_skipgram(std::span<const PseudoSentence> sentences,
                              const SkipGramConfig& config) {
  if (config.dimension == 0 || config.window == 0 || config.negative_samples == 0) {
    throw Error("dimension, window and negative_samples must all be >= 1");
  }
  TrainingData data = prepare(sentences, config);
  EmbeddingTable& table = data.table;
  init_vectors(table, config.seed);
  if (config.epochs == 0) return std::move(table);

  if (config.shuffle_tokens) {
    for (std::size_t s = 0; s < data.sequences.size(); ++s) {
      Rng rng(config.seed ^ fnv1a64("shuffle:" + std::to_string(s)));
      rng.shuffle(data.sequences[s]);
    }
  }

  const double total =
      static_cast<double>(data.total_pairs_per_epoch * config.epochs);
  std::atomic<std::size_t> processed{0};

  auto worker = [&](std::size_t worker_id, std::size_t worker_count) {
    Rng rng(config.seed ^ 0x736b696767616d73ull ^ (worker_id * 0x9e3779b97f4a7c15ull));
    std::vector<double> center_grad(config.dimension);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      for (std::size_t si = worker_id; si < data.sequences.size(); si += worker_count) {
        const auto& seq = data.sequences[si];
        for (std::size_t center = 0; center < seq.size(); ++center) {
          std::size_t lo = center >= config.window ? center - config.window : 0;
          std::size_t hi = std::min(seq.size() - 1, center + config.window);
          for (std::size_t pos = lo; pos <= hi; ++pos) {
            if (pos == center) continue;
            std::size_t done = processed.fetch_add(1, std::memory_order_relaxed);
            double progress = static_cast<double>(done) / total;
            double lr = config.learning_rate_start +
                        (config.learning_rate_end - config.learning_rate_start) *
                            progress;
            sgns_update(table, seq[center], seq[pos], data.noise_cdf,
                        config.negative_samples, lr, rng, center_grad);
          }
        }
      }
    }
  };

  std::size_t threads = std::max<std::size_t>(1, config.threads);
  if (threads == 1) {
    worker(0, 1);  // deterministic single-threaded mode
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back(worker, t, threads);
    }
    for (std::thread& t : pool) t.join();
  }
  return std::move(table);
}

double sgns_pair_loss(const SgnsPoint& point) {
  double loss = -std::log(logistic(dot(point.center, point.context)));
  for (const auto& neg : point.negatives) {
    loss -= std::log(logistic(-dot(point.center, neg)));
  }
  return loss;
}

SgnsGradient sgns_pair_gradient(const SgnsPoint& point) {
  const std::size_t dim = point.center.size();
  SgnsGradient grad;
  grad.center.assign(dim, 0.0);
  grad.context.assign(dim, 0.0);

  double s = logistic(dot(point.center, point.context));
  double g = s - 1.0;
  for (std::size_t d = 0; d < dim; ++d) {
    grad.center[d] += g * point.context[d];
    grad.context[d] = g * point.center[d];
  }
  for (const auto& neg : point.negatives) {
    double sn = logistic(dot(point.center, neg));
    std::vector<double> gn(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      grad.center[d] += sn * neg[d];
      gn[d] = sn * point.center[d];
    }
    grad.negatives.push_back(std::move(gn));
  }
  return grad;
}

double corpus_sgns_loss(const EmbeddingTable& table,
                        std::span<const PseudoSentence> sentences,
                        const SkipGramConfig& config) {
  std::map<EntityKey, std::size_t> counts;
  for (const PseudoSentence& ps : sentences) {
    for (const EntityKey& token : ps.tokens) ++counts[token];
  }
  std::vector<double> cdf(table.size());
  double cumulative = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto it = counts.find(table.vocabulary()[i]);
    double c = it == counts.end() ? 0.0 : static_cast<double>(it->second);
    cumulative += std::pow(c, config.unigram_power);
    cdf[i] = cumulative;
  }
  if (cumulative <= 0.0) throw Error("no table entry occurs in the given sentences");

  // Dedicated stream so two tables see identical negative draws.
  Rng rng(config.seed ^ 0x6c6f7373ull);
  double loss = 0.0;
  for (const PseudoSentence& ps : sentences) {
    std::vector<std::size_t> seq;
    for (const EntityKey& token : ps.tokens) {
      if (table.has(token)) seq.push_back(table.index_of(token));
    }
    for (std::size_t center = 0; center < seq.size(); ++center) {
      std::size_t lo = center >= config.window ? center - config.window : 0;
      std::size_t hi = std::min(seq.size() - 1, center + config.window);
      for (std::size_t pos = lo; pos <= hi; ++pos) {
        if (pos == center) continue;
        std::span<const double> v = table.input_vector(seq[center]);
        std::span<const double> u_ctx = table.output_vector(seq[pos]);
        loss -= std::log(logistic(dot(v, u_ctx)));
        for (std::size_t n = 0; n < config.negative_samples; ++n) {
          std::size_t neg = sample_negative(cdf, rng, seq[pos]);
          loss -= std::log(logistic(-dot(v, table.output_vector(neg))));
        }
      }
    }
  }
  return loss;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return num / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::pair<EntityKey, double>> nearest_neighbors(
    const EmbeddingTable& table, const EntityKey& query, std::size_t k,
    bool same_type_only) {
  std::size_t qi = table.index_of(query);
  std::span<const double> qv = table.input_vector(qi);
  std::vector<std::pair<EntityKey, double>> scored;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (i == qi) continue;
    const EntityKey& key = table.vocabulary()[i];
    if (same_type_only && key.type != query.type) continue;
    scored.emplace_back(key, cosine_similarity(qv, table.input_vector(i)));
  }
  std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first.surface < y.first.surface;
  });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

namespace {

struct KmeansRun {
  std::vector<std::size_t> assignment;
  std::vector<std::vector<double>> centroids;
  double inertia = 0.0;
  std::vector<double> trace;
};

KmeansRun kmeans_once(const std::vector<std::span<const double>>& points,
                      std::size_t dim, std::size_t k, std::uint64_t seed,
                      std::size_t max_iterations) {
  const std::size_t n = points.size();
  Rng rng(seed);
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);

  // k-means++ seeding.
  std::size_t first = rng.uniform_index(n);
  centroids.emplace_back(points[first].begin(), points[first].end());
  std::vector<double> dist2(n);
  for (std::size_t i = 0; i < n; ++i) dist2[i] = squared_distance(points[i], centroids[0]);
  while (centroids.size() < k) {
    double total = 0.0;
    for (double d : dist2) total += d;
    std::size_t chosen;
    if (total <= 0.0) {
      chosen = rng.uniform_index(n);
    } else {
      double draw = rng.uniform_double() * total;
      chosen = n - 1;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += dist2[i];
        if (draw < acc) {
          chosen = i;
          break;
        }
      }
    }
    centroids.emplace_back(points[chosen].begin(), points[chosen].end());
    for (std::size_t i = 0; i < n; ++i) {
      dist2[i] = std::min(dist2[i], squared_distance(points[i], centroids.back()));
    }
  }

  std::vector<std::size_t> assignment(n, 0);
  std::vector<std::size_t> previous(n, SIZE_MAX);
  std::vector<double> trace;
  double inertia = 0.0;
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = squared_distance(points[i], centroids[0]);
      for (std::size_t c = 1; c < k; ++c) {
        double d = squared_distance(points[i], centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assignment[i] = best;
      inertia += best_d;
    }
    trace.push_back(inertia);
    if (assignment == previous) break;
    previous = assignment;

    std::vector<std::size_t> sizes(k, 0);
    for (auto& c : centroids) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      ++sizes[assignment[i]];
      for (std::size_t d = 0; d < dim; ++d) centroids[assignment[i]][d] += points[i][d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) {
        for (double& v : centroids[c]) v /= static_cast<double>(sizes[c]);
      }
    }
    // Reseed empty clusters with the points farthest from their own centroid.
    std::vector<bool> reseeded(n, false);
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      std::size_t farthest = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (reseeded[i]) continue;
        double d = squared_distance(points[i], centroids[assignment[i]]);
        if (d > far_d) {
          far_d = d;
          farthest = i;
        }
      }
      centroids[c].assign(points[farthest].begin(), points[farthest].end());
      reseeded[farthest] = true;
    }
  }

  // Final assignment against the final centroids.
  inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    double best_d = squared_distance(points[i], centroids[0]);
    for (std::size_t c = 1; c < k; ++c) {
      double d = squared_distance(points[i], centroids[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    assignment[i] = best;
    inertia += best_d;
  }

  KmeansRun run;
  run.assignment = std::move(assignment);
  run.centroids = std::move(centroids);
  run.inertia = inertia;
  run.trace = std::move(trace);
  return run;
}

}  // namespace

ClusterAssignment kmeans_cluster(const EmbeddingTable& table, EntityType entity_type,
                                 std::size_t k, std::uint64_t seed,
                                 std::size_t max_iterations,
                                 std::vector<double>* inertia_trace) {
  std::vector<EntityKey> members;
  for (const EntityKey& key : table.vocabulary()) {
    if (key.type == entity_type) members.push_back(key);
  }
  if (k < 1 || k > members.size()) {
    throw Error("K=" + std::to_string(k) + " out of range for " +
                std::to_string(members.size()) + " embedded entities of type " +
                std::string(to_string(entity_type)));
  }
  const std::size_t n = members.size();
  const std::size_t dim = table.dimension();
  std::vector<std::span<const double>> points(n);
  for (std::size_t i = 0; i < n; ++i) points[i] = table.input_vector(members[i]);

  // Lloyd's converges to local optima; like the usual library
  // implementations, run several seeded inits and keep the best inertia.
  constexpr std::size_t kRestarts = 10;
  KmeansRun best;
  for (std::size_t r = 0; r < kRestarts; ++r) {
    KmeansRun run = kmeans_once(points, dim, k, seed + 0x9e3779b9ull * r,
                                max_iterations);
    if (r == 0 || run.inertia < best.inertia) best = std::move(run);
  }
  if (inertia_trace) *inertia_trace = best.trace;

  ClusterAssignment result;
  result.entity_type = entity_type;
  result.k = k;
  result.centroids = std::move(best.centroids);
  result.inertia = best.inertia;
  for (std::size_t i = 0; i < n; ++i) {
    result.assignment[members[i]] = best.assignment[i];
  }
  return result;
}

double pmi(const Corpus& corpus, const EntityKey& a, const EntityKey& b) {
  std::size_t n = corpus.papers().size();
  std::size_t ca = corpus.papers_containing(a).size();
  std::size_t cb = corpus.papers_containing(b).size();
  if (n == 0 || ca == 0 || cb == 0) {
    throw Error("pmi requires both entities to occur in at least one paper");
  }
  std::size_t cab = corpus.papers_containing_both(a, b).size();
  if (cab == 0) return -std::numeric_limits<double>::infinity();
  double nd = static_cast<double>(n);
  double p_ab = static_cast<double>(cab) / nd;
  double p_a = static_cast<double>(ca) / nd;
  double p_b = static_cast<double>(cb) / nd;
  return std::log2(p_ab / (p_a * p_b));
}

std::vector<std::pair<EntityKey, EntityKey>> pmi_related_baseline(
    const Corpus& corpus, EntityType entity_type, std::size_t top_k) {
  if (top_k < 1) throw Error("top_k must be >= 1");
  std::vector<EntityKey> members;
  for (const auto& [key, entity] : corpus.inventory()) {
    if (key.type == entity_type) members.push_back(key);
  }
  std::set<std::pair<EntityKey, EntityKey>> emitted;
  for (const EntityKey& a : members) {
    std::vector<std::pair<EntityKey, double>> partners;
    for (const EntityKey& b : members) {
      if (b == a) continue;
      double score = pmi(corpus, a, b);
      if (std::isfinite(score) && score > 0.0) partners.emplace_back(b, score);
    }
    std::sort(partners.begin(), partners.end(), [](const auto& x, const auto& y) {
      if (x.second != y.second) return x.second > y.second;
      return x.first.surface < y.first.surface;
    });
    if (partners.size() > top_k) partners.resize(top_k);
    for (const auto& [b, score] : partners) {
      emitted.emplace(std::min(a, b), std::max(a, b));
    }
  }
  return {emitted.begin(), emitted.end()};
}

std::vector<kg::Relation> clusters_to_related(const ClusterAssignment& assignment) {
  std::map<std::size_t, std::vector<EntityKey>> groups;
  for (const auto& [key, cluster] : assignment.assignment) {
    groups[cluster].push_back(key);
  }
  std::vector<kg::Relation> out;
  for (const auto& [cluster, members] : groups) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        out.push_back({members[i], members[j], kg::RelationType::Related, 1.0,
                       kg::Provenance::Embedding});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const kg::Relation& x, const kg::Relation& y) {
    return std::tie(x.source, x.target) < std::tie(y.source, y.target);
  });
  return out;
}

void export_embeddings(const EmbeddingTable& table, std::ostream& out) {
  out << "d=" << table.dimension() << " count=" << table.size() << "\n";
  char buf[32];
  for (std::size_t i = 0; i < table.size(); ++i) {
    const EntityKey& key = table.vocabulary()[i];
    out << key.surface << '\t' << to_string(key.type) << '\t';
    std::span<const double> v = table.input_vector(i);
    for (std::size_t d = 0; d < v.size(); ++d) {
      std::snprintf(buf, sizeof(buf), "%.17g", v[d]);
      if (d) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

EmbeddingTable import_embeddings(std::istream& in) {
  std::string line;
  std::size_t line_number = 0;
  std::size_t dim = 0, count = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    if (std::sscanf(line.c_str(), "d=%zu count=%zu", &dim, &count) != 2) {
      throw Error("embedding file line " + std::to_string(line_number) +
                  ": expected header 'd=<dim> count=<n>'");
    }
    break;
  }
  if (dim == 0) throw Error("embedding file has no header");

  std::vector<EntityKey> vocabulary;
  std::vector<std::vector<double>> vectors;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab1 = line.find('\t');
    std::size_t tab2 = tab1 == std::string::npos ? std::string::npos
                                                 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      throw Error("embedding file line " + std::to_string(line_number) +
                  ": expected surface<TAB>type<TAB>values");
    }
    EntityKey key{line.substr(0, tab1),
                  entity_type_from_string(line.substr(tab1 + 1, tab2 - tab1 - 1))};
    std::istringstream values(line.substr(tab2 + 1));
    std::vector<double> v;
    double x;
    while (values >> x) v.push_back(x);
    if (v.size() != dim) {
      throw Error("embedding file line " + std::to_string(line_number) + ": expected " +
                  std::to_string(dim) + " values, got " + std::to_string(v.size()));
    }
    vocabulary.push_back(std::move(key));
    vectors.push_back(std::move(v));
  }
  if (vocabulary.size() != count) {
    throw Error("embedding file declares count=" + std::to_string(count) + " but has " +
                std::to_string(vocabulary.size()) + " rows");
  }
  EmbeddingTable table(std::move(vocabulary), dim);
  for (std::size_t i = 0; i < table.size(); ++i) {
    std::span<double> dst = table.input_vector(i);
    std::copy(vectors[i].begin(), vectors[i].end(), dst.begin());
  }
  return table;
}

}  // namespace tdmkg::term2vec
