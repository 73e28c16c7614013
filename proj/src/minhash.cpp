#include "scrub/minhash.hpp"

#include <algorithm>
#include <limits>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "scrub/error.hpp"
#include "scrub/hash.hpp"

namespace scrub {
namespace {

// Union-find over document indices.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

std::vector<std::uint64_t> slot_seeds(int count, std::uint64_t seed) {
  SeedStream stream(seed);
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(count));
  for (auto& s : seeds) s = stream.next();
  return seeds;
}

// Candidate pairs among `indices` whose big-layout signatures collide on at
// least one band; edge weight = signature agreement.
std::vector<ClusterEdge> reband_edges(const std::vector<std::size_t>& indices,
                                      const std::vector<MinHashDoc>& docs,
                                      const LshConfig& cfg) {
  // Distinct seed basis so the strict pass is independent of the first pass.
  const std::uint64_t big_seed = mix64(cfg.seed ^ 0x5eedb16cULL);
  std::vector<MinHashSignature> sigs;
  sigs.reserve(indices.size());
  for (std::size_t idx : indices) {
    sigs.push_back(minhash_signature(docs[idx].shingles, cfg.big_cluster_bands,
                                     cfg.big_cluster_rows, big_seed));
  }
  auto pairs = lsh_candidates(sigs, cfg.big_cluster_bands, cfg.big_cluster_rows);
  std::vector<ClusterEdge> edges;
  edges.reserve(pairs.size());
  for (auto [a, b] : pairs) {
    edges.push_back(ClusterEdge{indices[a], indices[b],
                                signature_agreement(sigs[a], sigs[b])});
  }
  return edges;
}

}  // namespace

MinHashSignature minhash_signature(const ShingleSet& shingles, int bands, int rows,
                                   std::uint64_t seed) {
  if (bands < 1 || rows < 1) throw ConfigError("bands and rows must be >= 1");
  if (shingles.empty())
    throw DataError("cannot sign an empty shingle set; route short docs around MinHash");
  const int len = bands * rows;
  const auto seeds = slot_seeds(len, seed);
  MinHashSignature sig;
  sig.values.assign(static_cast<std::size_t>(len),
                    std::numeric_limits<std::uint64_t>::max());
  for (std::uint64_t h : shingles.hashes) {
    for (int j = 0; j < len; ++j) {
      const std::uint64_t v = mix64(h ^ seeds[static_cast<std::size_t>(j)]);
      auto& slot = sig.values[static_cast<std::size_t>(j)];
      if (v < slot) slot = v;
    }
  }
  return sig;
}

double signature_agreement(const MinHashSignature& a, const MinHashSignature& b) {
  if (a.values.size() != b.values.size() || a.values.empty())
    throw DataError("signature length mismatch");
  std::size_t equal = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    if (a.values[i] == b.values[i]) ++equal;
  return static_cast<double>(equal) / static_cast<double>(a.values.size());
}

std::vector<std::pair<std::size_t, std::size_t>> lsh_candidates(
    const std::vector<MinHashSignature>& signatures, int bands, int rows) {
  const std::size_t len = static_cast<std::size_t>(bands) * static_cast<std::size_t>(rows);
  for (const auto& s : signatures) {
    if (s.values.size() != len) throw DataError("signature length does not match banding");
  }
  std::unordered_set<std::uint64_t> seen_pairs;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
  for (int b = 0; b < bands; ++b) {
    buckets.clear();
    const std::size_t off = static_cast<std::size_t>(b) * static_cast<std::size_t>(rows);
    for (std::size_t i = 0; i < signatures.size(); ++i) {
      const std::uint64_t key =
          hash64_u64_span(signatures[i].values.data() + off,
                          static_cast<std::size_t>(rows), 0x1b4dULL);
      buckets[key].push_back(i);
    }
    for (const auto& [key, members] : buckets) {
      (void)key;
      if (members.size() < 2) continue;
      for (std::size_t x = 0; x < members.size(); ++x) {
        for (std::size_t y = x + 1; y < members.size(); ++y) {
          const std::size_t i = members[x], j = members[y];
          // Exact check: the bucket key is a hash, the contract is equality.
          if (!std::equal(signatures[i].values.begin() + static_cast<std::ptrdiff_t>(off),
                          signatures[i].values.begin() + static_cast<std::ptrdiff_t>(off + static_cast<std::size_t>(rows)),
                          signatures[j].values.begin() + static_cast<std::ptrdiff_t>(off)))
            continue;
          const std::uint64_t pair_key =
              static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(signatures.size()) +
              static_cast<std::uint64_t>(j);
          if (seen_pairs.insert(pair_key).second) out.emplace_back(i, j);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<DuplicateCluster> verify_and_cluster(
    const std::vector<std::pair<std::size_t, std::size_t>>& candidates,
    const std::vector<MinHashDoc>& docs, const LshConfig& cfg) {
  // Connected components over raw candidate pairs.
  DisjointSets components(docs.size());
  for (auto [a, b] : candidates) {
    if (a >= docs.size() || b >= docs.size()) throw DataError("candidate index out of range");
    components.unite(a, b);
  }
  std::unordered_map<std::size_t, std::vector<std::size_t>> comp_members;
  {
    std::unordered_set<std::size_t> touched;
    for (auto [a, b] : candidates) {
      touched.insert(a);
      touched.insert(b);
    }
    for (std::size_t idx : touched) comp_members[components.find(idx)].push_back(idx);
  }
  std::unordered_map<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> comp_pairs;
  for (auto [a, b] : candidates) comp_pairs[components.find(a)].emplace_back(a, b);

  // Verify edges within each component.
  std::vector<ClusterEdge> verified;
  std::vector<std::size_t> roots;
  roots.reserve(comp_members.size());
  for (auto& [root, members] : comp_members) {
    std::sort(members.begin(), members.end());
    roots.push_back(root);
  }
  std::sort(roots.begin(), roots.end());  // deterministic iteration
  for (std::size_t root : roots) {
    auto& members = comp_members[root];
    if (!cfg.verify) {
      for (auto [a, b] : comp_pairs[root]) {
        verified.push_back(ClusterEdge{a, b, 0.0});
      }
    } else if (members.size() >= cfg.big_cluster_size) {
      auto edges = reband_edges(members, docs, cfg);
      verified.insert(verified.end(), edges.begin(), edges.end());
    } else {
      for (std::size_t x = 0; x < members.size(); ++x) {
        for (std::size_t y = x + 1; y < members.size(); ++y) {
          const std::size_t i = members[x], j = members[y];
          const double jac = jaccard(docs[i].verify_hashes, docs[j].verify_hashes);
          if (jac >= cfg.verify_threshold) verified.push_back(ClusterEdge{i, j, jac});
        }
      }
    }
  }

  // Re-cluster over verified edges only; drop singletons.
  DisjointSets final_sets(docs.size());
  for (const auto& e : verified) final_sets.unite(e.a, e.b);
  std::unordered_map<std::size_t, DuplicateCluster> by_root;
  for (const auto& e : verified) {
    auto& cluster = by_root[final_sets.find(e.a)];
    cluster.edges.push_back(e);
  }
  {
    std::unordered_set<std::size_t> touched;
    for (const auto& e : verified) {
      touched.insert(e.a);
      touched.insert(e.b);
    }
    for (std::size_t idx : touched) by_root[final_sets.find(idx)].members.push_back(idx);
  }

  std::vector<DuplicateCluster> clusters;
  clusters.reserve(by_root.size());
  for (auto& [root, cluster] : by_root) {
    (void)root;
    if (cluster.members.size() < 2) continue;
    std::sort(cluster.members.begin(), cluster.members.end());
    std::sort(cluster.edges.begin(), cluster.edges.end(),
              [](const ClusterEdge& x, const ClusterEdge& y) {
                return std::tie(x.a, x.b) < std::tie(y.a, y.b);
              });
    cluster.min_edge_jaccard = cluster.edges.empty() ? 0.0 : cluster.edges[0].jaccard;
    for (const auto& e : cluster.edges)
      cluster.min_edge_jaccard = std::min(cluster.min_edge_jaccard, e.jaccard);
    clusters.push_back(std::move(cluster));
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const DuplicateCluster& x, const DuplicateCluster& y) {
              return x.members[0] < y.members[0];
            });
  return clusters;
}

std::vector<RemovalRecord> select_survivors(const std::vector<DuplicateCluster>& clusters,
                                            const std::vector<MinHashDoc>& docs) {
  std::vector<RemovalRecord> removals;
  for (const auto& cluster : clusters) {
    std::size_t winner = cluster.members[0];
    for (std::size_t idx : cluster.members) {
      const std::string& best_date =
          docs[winner].crawl_date ? *docs[winner].crawl_date : std::string();
      const std::string& date = docs[idx].crawl_date ? *docs[idx].crawl_date : std::string();
      if (date > best_date || (date == best_date && docs[idx].id < docs[winner].id)) {
        winner = idx;
      }
    }
    for (std::size_t idx : cluster.members) {
      if (idx == winner) continue;
      removals.push_back(
          RemovalRecord{docs[idx].id, docs[winner].id, "minhash", "near-duplicate"});
    }
  }
  return removals;
}

MinHashDedupResult minhash_dedup(const std::vector<Document>& docs,
                                 const Tokenizer& tokenizer, const LshConfig& cfg,
                                 int workers) {
  if (workers < 1) throw ConfigError("workers must be >= 1");
  MinHashDedupResult result;

  // Tokenize + shingle every document (parallel, deterministic: each slot is
  // written by exactly one worker).
  std::vector<MinHashDoc> inputs(docs.size());
  {
    std::vector<std::thread> pool;
    std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers),
                                                  docs.size() ? docs.size() : 1);
    std::vector<std::exception_ptr> errors(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t]() {
        try {
          for (std::size_t i = t; i < docs.size(); i += n_threads) {
            MinHashDoc& in = inputs[i];
            in.id = docs[i].id;
            in.crawl_date = docs[i].crawl_date;
            TokenSeq seq = tokenizer.tokenize(docs[i].text);
            in.shingles = shingle(seq, cfg.shingle_ngram);
            if (cfg.verify && !in.shingles.empty())
              in.verify_hashes = shingle(seq, cfg.verify_ngram).hashes;
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
      if (err) std::rethrow_exception(err);
  }

  // Short documents cannot be signed; they pass through untouched.
  std::vector<std::size_t> signable;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].shingles.empty())
      ++result.skipped_short;
    else
      signable.push_back(i);
  }

  std::vector<MinHashSignature> sigs(signable.size());
  {
    std::vector<std::thread> pool;
    std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers),
                                                  signable.size() ? signable.size() : 1);
    std::vector<std::exception_ptr> errors(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t]() {
        try {
          for (std::size_t k = t; k < signable.size(); k += n_threads) {
            sigs[k] = minhash_signature(inputs[signable[k]].shingles, cfg.bands,
                                        cfg.rows, cfg.seed);
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
      if (err) std::rethrow_exception(err);
  }

  auto pairs_local = lsh_candidates(sigs, cfg.bands, cfg.rows);
  // Map back to corpus indices.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(pairs_local.size());
  for (auto [a, b] : pairs_local) pairs.emplace_back(signable[a], signable[b]);

  result.clusters = verify_and_cluster(pairs, inputs, cfg);
  result.removals = select_survivors(result.clusters, inputs);

  std::unordered_set<std::string> removed;
  for (const auto& r : result.removals) removed.insert(r.doc_id);
  for (const auto& doc : docs) {
    if (!removed.count(doc.id)) result.kept_ids.push_back(doc.id);
  }
  return result;
}

}  // namespace scrub
