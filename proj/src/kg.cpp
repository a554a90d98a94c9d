#include "alinet/kg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <tuple>
#include <unordered_set>

#include "alinet/errors.hpp"

namespace alinet {

namespace {

std::vector<std::string> split_tab(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

struct RawLine {
  std::vector<std::string> fields;
  int line_no;
};

std::vector<RawLine> read_tsv(const std::string& path, std::size_t expected_fields) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::vector<RawLine> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_tab(line);
    if (fields.size() != expected_fields) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(expected_fields) + " fields, got " +
                       std::to_string(fields.size()));
    }
    out.push_back({std::move(fields), line_no});
  }
  return out;
}

// Unordered edge key in one id space.
inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

int intern_relation(KnowledgeGraphPair& pair, const std::string& name, int side) {
  auto [it, inserted] = pair.relation_ids.try_emplace(name, pair.num_relations);
  if (inserted) {
    pair.num_relations += 1;
    pair.relation_names.push_back(name);
    pair.relation_in_1.push_back(0);
    pair.relation_in_2.push_back(0);
  }
  (side == 1 ? pair.relation_in_1 : pair.relation_in_2)[it->second] = 1;
  return it->second;
}

}  // namespace

void validate_alignment(const KnowledgeGraphPair& pair, const AlignmentSet& alignment,
                        const std::string& what) {
  std::unordered_set<int> seen1, seen2;
  for (const auto& [e1, e2] : alignment.pairs) {
    if (!pair.valid_entity(e1) || pair.side_of(e1) != 1) {
      throw ReferentialError(what + ": id " + std::to_string(e1) +
                             " is not a side-1 entity");
    }
    if (!pair.valid_entity(e2) || pair.side_of(e2) != 2) {
      throw ReferentialError(what + ": id " + std::to_string(e2) +
                             " is not a side-2 entity");
    }
    if (!seen1.insert(e1).second || !seen2.insert(e2).second) {
      throw ReferentialError(what + ": entity appears in more than one pair");
    }
  }
}

namespace {

struct TripleHash {
  std::size_t operator()(const Triple& t) const {
    std::uint64_t h = static_cast<std::uint64_t>(t.head) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(t.relation) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(t.tail) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

std::pair<KnowledgeGraphPair, AlignmentSet> load_graph_pair(
    const std::string& triples_path_1, const std::string& triples_path_2,
    const std::string& links_path) {
  KnowledgeGraphPair pair;
  std::unordered_set<Triple, TripleHash> seen_triples;

  auto ingest = [&](const std::string& path, int side) {
    auto& entity_ids = side == 1 ? pair.entity_ids_1 : pair.entity_ids_2;
    auto intern_entity = [&](const std::string& name) {
      auto [it, inserted] = entity_ids.try_emplace(name, pair.num_entities);
      if (inserted) {
        pair.num_entities += 1;
        pair.entity_names.push_back(name);
      }
      return it->second;
    };
    for (const auto& raw : read_tsv(path, 3)) {
      const int h = intern_entity(raw.fields[0]);
      const int r = intern_relation(pair, raw.fields[1], side);
      const int t = intern_entity(raw.fields[2]);
      // duplicates dropped silently
      if (seen_triples.insert({h, r, t}).second) pair.triples.push_back({h, r, t});
    }
  };

  ingest(triples_path_1, 1);
  pair.num_entities1 = pair.num_entities;
  ingest(triples_path_2, 2);

  AlignmentSet links;
  std::unordered_set<std::uint64_t> seen_links;
  for (const auto& raw : read_tsv(links_path, 2)) {
    auto it1 = pair.entity_ids_1.find(raw.fields[0]);
    if (it1 == pair.entity_ids_1.end()) {
      throw ReferentialError(links_path + ":" + std::to_string(raw.line_no) +
                             ": unknown side-1 entity '" + raw.fields[0] + "'");
    }
    auto it2 = pair.entity_ids_2.find(raw.fields[1]);
    if (it2 == pair.entity_ids_2.end()) {
      throw ReferentialError(links_path + ":" + std::to_string(raw.line_no) +
                             ": unknown side-2 entity '" + raw.fields[1] + "'");
    }
    const std::uint64_t key = edge_key(it1->second, it2->second);
    if (seen_links.insert(key).second) links.pairs.emplace_back(it1->second, it2->second);
  }
  validate_alignment(pair, links, links_path);
  return {std::move(pair), std::move(links)};
}

NeighborStructure build_neighbor_structure(const KnowledgeGraphPair& pair,
                                           int max_hop) {
  if (max_hop < 1) throw ConfigError("build_neighbor_structure: max_hop must be >= 1");
  const int n = pair.num_entities;

  // Undirected, deduplicated adjacency lists; self-loops ignored.
  std::vector<std::vector<int>> adj(n);
  for (const Triple& t : pair.triples) {
    if (t.head == t.tail) continue;
    adj[t.head].push_back(t.tail);
    adj[t.tail].push_back(t.head);
  }
  for (auto& nbrs : adj) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }

  NeighborStructure s;
  s.num_entities = n;
  s.max_hop = max_hop;
  s.hops.assign(max_hop, std::vector<std::vector<int>>(n));

  // Per-node breadth-first expansion bounded to max_hop levels, with a
  // stamped visited array so no per-node reinitialization is needed.
  std::vector<int> stamp(n, -1);
  std::vector<int> frontier, next;
  for (int i = 0; i < n; ++i) {
    stamp[i] = i;
    frontier.assign(1, i);
    for (int hop = 1; hop <= max_hop && !frontier.empty(); ++hop) {
      next.clear();
      for (int u : frontier) {
        for (int v : adj[u]) {
          if (stamp[v] == i) continue;
          stamp[v] = i;
          next.push_back(v);
        }
      }
      std::sort(next.begin(), next.end());
      s.hops[hop - 1][i] = next;
      frontier.swap(next);
    }
  }

  std::vector<std::tuple<int, int, double>> adj_triplets;
  for (int i = 0; i < n; ++i) {
    const auto& n1 = s.hops[0][i];
    const double w = 1.0 / (static_cast<double>(n1.size()) + 1.0);
    adj_triplets.emplace_back(i, i, w);
    for (int j : n1) adj_triplets.emplace_back(i, j, w);
  }
  s.adj_norm = SparseMatrix::from_triplets(n, n, std::move(adj_triplets));

  for (int m = 2; m <= max_hop; ++m) {
    std::vector<std::tuple<int, int, double>> mask_triplets;
    for (int i = 0; i < n; ++i) {
      mask_triplets.emplace_back(i, i, 1.0);
      for (int j : s.hops[m - 1][i]) mask_triplets.emplace_back(i, j, 1.0);
    }
    s.hop_masks.push_back(SparseMatrix::from_triplets(n, n, std::move(mask_triplets)));
  }
  return s;
}

SparseMatrix NeighborStructure::union_adjacency(int up_to_hop) const {
  if (up_to_hop < 1 || up_to_hop > max_hop) {
    throw ConfigError("union_adjacency: hop out of range");
  }
  std::vector<std::tuple<int, int, double>> triplets;
  std::vector<int> merged;
  for (int i = 0; i < num_entities; ++i) {
    merged.clear();
    for (int m = 1; m <= up_to_hop; ++m) {
      merged.insert(merged.end(), hops[m - 1][i].begin(), hops[m - 1][i].end());
    }
    // exact-distance sets are disjoint, so no dedup needed
    const double w = 1.0 / (static_cast<double>(merged.size()) + 1.0);
    triplets.emplace_back(i, i, w);
    for (int j : merged) triplets.emplace_back(i, j, w);
  }
  return SparseMatrix::from_triplets(num_entities, num_entities, std::move(triplets));
}

KnowledgeGraphPair augment_neighborhood(const KnowledgeGraphPair& pair,
                                        const AlignmentSet& seed) {
  validate_alignment(pair, seed, "augment_neighborhood seed");

  std::unordered_map<int, int> to2, to1;
  for (const auto& [e1, e2] : seed.pairs) {
    to2[e1] = e2;
    to1[e2] = e1;
  }

  std::unordered_set<std::uint64_t> edges1, edges2;
  for (const Triple& t : pair.triples) {
    if (t.head == t.tail) continue;
    (pair.side_of(t.head) == 1 ? edges1 : edges2).insert(edge_key(t.head, t.tail));
  }

  KnowledgeGraphPair out = pair;
  if (!out.augment_relation.has_value()) {
    out.augment_relation = out.num_relations;
    out.num_relations += 1;
    out.relation_names.push_back("__augment__");
    out.relation_ids.emplace("__augment__", *out.augment_relation);
    out.relation_in_1.push_back(0);
    out.relation_in_2.push_back(0);
  }
  const int r_aug = *out.augment_relation;

  // Mirror each seed-mapped edge that exists on one side only. Iterates the
  // original triples so the added edge keeps the source orientation.
  std::unordered_set<std::uint64_t> added;
  for (const Triple& t : pair.triples) {
    if (t.head == t.tail) continue;
    const bool on1 = pair.side_of(t.head) == 1;
    const auto& fwd = on1 ? to2 : to1;
    auto ith = fwd.find(t.head);
    auto itt = fwd.find(t.tail);
    if (ith == fwd.end() || itt == fwd.end()) continue;
    const int mh = ith->second, mt = itt->second;
    const std::uint64_t key = edge_key(mh, mt);
    auto& other = on1 ? edges2 : edges1;
    if (other.count(key) || added.count(key)) continue;
    added.insert(key);
    out.triples.push_back({mh, r_aug, mt});
    (on1 ? out.relation_in_2 : out.relation_in_1)[r_aug] = 1;
  }
  return out;
}

namespace {

std::pair<AlignmentSet, AlignmentSet> split_with_rng(const AlignmentSet& alignment,
                                                     double train_fraction, Rng& rng) {
  std::vector<std::pair<int, int>> shuffled = alignment.pairs;
  rng.shuffle(shuffled);
  const std::size_t n_train = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(shuffled.size())));
  AlignmentSet train, test;
  train.pairs.assign(shuffled.begin(), shuffled.begin() + n_train);
  test.pairs.assign(shuffled.begin() + n_train, shuffled.end());
  return {std::move(train), std::move(test)};
}

}  // namespace

std::pair<AlignmentSet, AlignmentSet> split_alignment(const AlignmentSet& alignment,
                                                      double train_fraction,
                                                      std::uint64_t rng_seed) {
  if (alignment.empty()) throw ConfigError("split_alignment: empty alignment");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("split_alignment: train_fraction must be in (0,1)");
  }
  Rng rng(rng_seed);
  return split_with_rng(alignment, train_fraction, rng);
}

std::tuple<KnowledgeGraphPair, AlignmentSet, AlignmentSet> generate_synthetic_pair(
    const SyntheticConfig& cfg) {
  const int n = cfg.num_entities_per_side;
  if (n < 2 || cfg.num_relations < 1) {
    throw ConfigError("synthetic: need >= 2 entities per side and >= 1 relation");
  }
  if (cfg.avg_degree < 1.0) throw ConfigError("synthetic: avg_degree must be >= 1");
  if (cfg.rewire_fraction < 0.0 || cfg.rewire_fraction > 1.0) {
    throw ConfigError("synthetic: rewire_fraction must be in [0,1]");
  }
  if (!(cfg.seed_alignment_fraction > 0.0 && cfg.seed_alignment_fraction <= 1.0)) {
    throw ConfigError("synthetic: seed_alignment_fraction must be in (0,1]");
  }
  const std::uint64_t max_edges =
      static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1) / 2;
  const std::uint64_t target_edges = static_cast<std::uint64_t>(
      std::llround(cfg.avg_degree * static_cast<double>(n) / 2.0));
  if (target_edges > max_edges) {
    throw ConfigError("synthetic: avg_degree too large for entity count");
  }

  Rng rng(cfg.rng_seed);
  std::unordered_set<std::uint64_t> edge_set;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> degree(n, 0);
  auto add_edge = [&](int a, int b) {
    edge_set.insert(edge_key(a, b));
    edges.emplace_back(a, b);
    degree[a] += 1;
    degree[b] += 1;
  };

  std::uint64_t attempts = 0;
  const std::uint64_t attempt_cap = 200 * target_edges + 10000;
  while (edges.size() < target_edges) {
    if (++attempts > attempt_cap) {
      throw ConfigError("synthetic: could not place requested edge count");
    }
    const int a = static_cast<int>(rng.below(n));
    const int b = static_cast<int>(rng.below(n));
    if (a == b || edge_set.count(edge_key(a, b))) continue;
    add_edge(a, b);
  }
  // Attach isolated entities so every id appears in some triple and the
  // alignment stays loadable from the emitted files.
  for (int v = 0; v < n; ++v) {
    if (degree[v] > 0) continue;
    for (attempts = 0;; ++attempts) {
      if (attempts > 10000) throw ConfigError("synthetic: cannot connect entity");
      const int u = static_cast<int>(rng.below(n));
      if (u == v || degree[u] == 0 || edge_set.count(edge_key(u, v))) continue;
      add_edge(v, u);
      break;
    }
  }
  // Break two-vertex islands: an edge whose endpoints both have degree 1
  // could never be rewired without isolating one of them.
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [a, b] = edges[e];
    if (degree[a] != 1 || degree[b] != 1) continue;
    for (attempts = 0;; ++attempts) {
      if (attempts > 10000) throw ConfigError("synthetic: cannot break island");
      const int u = static_cast<int>(rng.below(n));
      if (u == a || u == b || degree[u] < 2 || edge_set.count(edge_key(a, u))) continue;
      add_edge(a, u);
      break;
    }
  }

  KnowledgeGraphPair pair;
  pair.num_entities = 2 * n;
  pair.num_entities1 = n;
  pair.num_relations = 2 * cfg.num_relations;
  pair.entity_names.resize(2 * n);
  pair.relation_names.resize(2 * cfg.num_relations);
  for (int i = 0; i < n; ++i) {
    pair.entity_names[i] = "a" + std::to_string(i);
    pair.entity_names[n + i] = "b" + std::to_string(i);
    pair.entity_ids_1.emplace(pair.entity_names[i], i);
    pair.entity_ids_2.emplace(pair.entity_names[n + i], n + i);
  }
  pair.relation_in_1.assign(2 * cfg.num_relations, 0);
  pair.relation_in_2.assign(2 * cfg.num_relations, 0);
  for (int r = 0; r < cfg.num_relations; ++r) {
    pair.relation_names[r] = "r" + std::to_string(r);
    pair.relation_names[cfg.num_relations + r] = "s" + std::to_string(r);
    pair.relation_ids.emplace(pair.relation_names[r], r);
    pair.relation_ids.emplace(pair.relation_names[cfg.num_relations + r],
                              cfg.num_relations + r);
    pair.relation_in_1[r] = 1;
    pair.relation_in_2[cfg.num_relations + r] = 1;
  }

  // KG1 triples: random relation and orientation per edge.
  std::vector<Triple> triples2;
  for (const auto& [a, b] : edges) {
    const int r = static_cast<int>(rng.below(cfg.num_relations));
    const bool flip = rng.coin();
    const int h = flip ? b : a;
    const int t = flip ? a : b;
    pair.triples.push_back({h, r, t});
    // renamed copy on side 2, relation ids offset
    triples2.push_back({n + h, cfg.num_relations + r, n + t});
  }

  // Rewire floor(p * |edges|) side-2 edges: replace one endpoint, keeping the
  // graph simple and never isolating the vacated endpoint.
  std::unordered_set<std::uint64_t> edge_set2;
  std::vector<int> degree2(2 * n, 0);
  for (const Triple& t : triples2) {
    edge_set2.insert(edge_key(t.head, t.tail));
    degree2[t.head] += 1;
    degree2[t.tail] += 1;
  }
  const std::size_t num_rewire = static_cast<std::size_t>(
      std::floor(cfg.rewire_fraction * static_cast<double>(triples2.size())));
  std::vector<std::size_t> order(triples2.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  // Earlier rewires can drain an endpoint down to degree 1 and make a later
  // edge unrewirable; such edges are skipped and replaced by the next ones in
  // the shuffled order, so the requested count is still met when possible.
  std::size_t rewired = 0;
  for (std::size_t k = 0; k < order.size() && rewired < num_rewire; ++k) {
    Triple& t = triples2[order[k]];
    for (int tries = 0; tries < 1000; ++tries) {
      const bool replace_head = rng.coin();
      const int kept = replace_head ? t.tail : t.head;
      const int old = replace_head ? t.head : t.tail;
      const int cand = n + static_cast<int>(rng.below(n));
      if (cand == old || cand == kept) continue;
      if (degree2[old] < 2) continue;  // would isolate the vacated endpoint
      if (edge_set2.count(edge_key(cand, kept))) continue;
      edge_set2.erase(edge_key(t.head, t.tail));
      edge_set2.insert(edge_key(cand, kept));
      degree2[old] -= 1;
      degree2[cand] += 1;
      (replace_head ? t.head : t.tail) = cand;
      rewired += 1;
      break;
    }
  }
  if (rewired < num_rewire) {
    throw ConfigError("synthetic: rewiring infeasible for this configuration");
  }
  pair.triples.insert(pair.triples.end(), triples2.begin(), triples2.end());

  AlignmentSet truth;
  for (int i = 0; i < n; ++i) truth.pairs.emplace_back(i, n + i);
  AlignmentSet seed, test;
  if (cfg.seed_alignment_fraction >= 1.0) {
    seed = std::move(truth);
  } else {
    std::tie(seed, test) = split_with_rng(truth, cfg.seed_alignment_fraction, rng);
  }
  return {std::move(pair), std::move(seed), std::move(test)};
}

void write_triples_tsv(const KnowledgeGraphPair& pair, int side,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  for (const Triple& t : pair.triples) {
    if (pair.side_of(t.head) != side) continue;
    out << pair.entity_names[t.head] << '\t' << pair.relation_names[t.relation]
        << '\t' << pair.entity_names[t.tail] << '\n';
  }
}

void write_links_tsv(const KnowledgeGraphPair& pair, const AlignmentSet& links,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  for (const auto& [e1, e2] : links.pairs) {
    out << pair.entity_names[e1] << '\t' << pair.entity_names[e2] << '\n';
  }
}

}  // namespace alinet
